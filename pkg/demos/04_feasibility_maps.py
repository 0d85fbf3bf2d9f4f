"""Which pairs (||f||_0, ||fh||_0) actually occur?

The bounds say what cannot happen; a feasibility map decides every cell, with
a stored witness signal for each feasible pair and an exhaustion record for
each infeasible one.

Run:  python demos/04_feasibility_maps.py
"""

# %%
import numpy as np

from tfub.feasibility import conjecture_check, fourier_pair_map, stft_triple_map
from tfub.gabor import random_window
from tfub.groups import Signal, fourier


def grid(fmap):
    n = fmap.group.order
    print("   l: " + " ".join(f"{l:d}" for l in range(1, n + 1)))
    for k in range(1, n + 1):
        print(f"k={k:2d}: " + " ".join(fmap.status(k, l).code for l in range(1, n + 1)))


# %% Z6: everything allowed by the product bound occurs, except (3, 3).
# F = witnessed, I = excluded by a bound, X = excluded by exhaustive search
z6 = fourier_pair_map("Z6")
grid(z6)

# %% Each feasible cell carries a witness we can check by hand.
f = Signal("Z6", z6[2, 3].witness["f"])
print("witness for (2, 3):", np.round(f.values, 3), "->", f.l0, fourier(f).l0)

# %% Z10 has a gap of its own at (3, 4).
z10 = fourier_pair_map("Z10", ks=[3])
print("Z10 row k=3:", "".join(z10.status(3, l).code for l in range(1, 11)))

# %% Non-cyclic groups: two nonzeros cannot leave exactly one zero in the spectrum.
grid(fourier_pair_map("Z2xZ2"))

# %% The joint map (||f||_0, ||g||_0, ||V_g f||_0) on Z3.
z3 = stft_triple_map("Z3")
for kf in (1, 2, 3):
    for kg in (1, 2, 3):
        occurs = [l for l in range(1, 10) if z3.status(kf, kg, l).code == "F"]
        print(f"||f||_0={kf} ||g||_0={kg}: ||V_g f||_0 in {occurs}")

# %% Is the STFT map the Fourier map shifted by |G|^2 - |G|?  On Z4 yes, on Z2 x Z2 no.
for spec in ("Z4", "Z2xZ2"):
    rep = conjecture_check(spec, random_window(spec, 0))
    print(spec, "agree:", len(rep.agree), "violations:", rep.violations)
