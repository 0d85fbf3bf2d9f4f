"""Lower bounds on the support of Fourier and short-time Fourier transforms.

theta(G, k) is the smallest possible ||fh||_0 among signals with ||f||_0 <= k;
phi(G, k) is the same quantity for ||V_g f||_0.  We compare closed-form bounds
against exact values obtained by exhaustive search.

Run:  python demos/03_support_bounds.py
"""

# %%
from tfub.bounds import (
    donoho_stark,
    meshulam_theta_lower,
    phi_exact,
    phi_lower_main,
    prime_stft_bound,
    tao_bound,
    theta_exact,
    theta_table,
)
from tfub.gabor import random_window

# %% Cyclic groups of composite order: exact theta against the product and divisor bounds.
for spec in ("Z6", "Z8", "Z12", "Z2xZ2xZ2"):
    n = theta_table(spec)
    print(spec)
    print("  exact    ", n)
    print("  divisor  ", [str(meshulam_theta_lower(spec, k)) for k in range(1, len(n) + 1)])
    print("  product  ", [donoho_stark(len(n), k) for k in range(1, len(n) + 1)])

# %% Prime order: the sum bound |G| + 1 - k is exact.
print("Z7 exact", theta_table("Z7"), " sum bound", [tao_bound(7, k) for k in range(1, 8)])

# %% An exact value with its certificate: the largest rank-deficient row set.
value, cert = theta_exact("Z16", 4, certificate=True)
print("theta(Z16, 4) =", value, "; witness columns", cert.witness[0], "zero rows", cert.witness[1])

# %% STFT side: on Z5 with a random window, phi(k) = 26 - k ...
g = random_window("Z5", 0)
print("phi(Z5, k):", [phi_exact("Z5", k, g) for k in range(1, 6)])

# %% ... which exceeds the general lower bound built from theta.
print("general bound:", [phi_lower_main("Z5", k) for k in range(1, 6)])

# %% When f and g are both sparse, a sumset argument improves things on prime groups.
for kf, kg in [(1, 1), (2, 2), (2, 3), (3, 3)]:
    print(f"||f||_0={kf}, ||g||_0={kg}: ||V_g f||_0 >= {prime_stft_bound(5, kf, kg)}")
