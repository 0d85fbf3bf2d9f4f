"""Fourier and short-time Fourier transforms on finite Abelian groups.

A walk through the basic objects: groups given as products of cyclic factors,
signals on them, the Fourier transform, and the STFT with a window.  Along the
way we watch the support-size trade-off between a signal and its transforms.

Run:  python demos/01_transforms_and_uncertainty.py
"""

# %%
import numpy as np

from tfub.gabor import frame_bounds, gabor_matrix, istft, random_window, stft
from tfub.groups import FiniteAbelianGroup, Signal, delta, fourier, l0

# %% Groups are products of cyclic factors, enumerated in mixed-radix order.
G = FiniteAbelianGroup.parse("Z2xZ3")
print(G, "has order", G.order)
print("elements:", [e.residues for e in G.elements()])
print("(1,2) + (1,2) =", (G.element(5) + G.element(5)).residues)

# %% A point mass has a flat spectrum; a constant has a point-mass spectrum.
Z4 = FiniteAbelianGroup.cyclic(4)
print("fourier(delta) =", np.round(fourier(delta(Z4)).values, 12))
print("fourier(ones)  =", np.round(fourier(Signal(Z4, np.ones(4))).values, 12))

# %% Subgroup indicators sit exactly on the product bound ||f||_0 ||fh||_0 = |G|.
Z12 = FiniteAbelianGroup.cyclic(12)
for step in (1, 2, 3, 4, 6, 12):
    f = Signal(Z12, (np.arange(12) % step == 0).astype(float))
    print(f"indicator of {step}Z12: ||f||_0={f.l0:2d}  ||fh||_0={fourier(f).l0:2d}")

# %% Random signals are as spread out as possible on both sides.
rng = np.random.default_rng(0)
f = Signal(Z12, rng.standard_normal(12))
print("random f:", f.l0, fourier(f).l0)

# %% Parseval with the unnormalized transform: ||fh||^2 = |G| ||f||^2.
print("Parseval ratio:", np.linalg.norm(fourier(f).values) ** 2 / (12 * f.norm ** 2))

# %% The STFT with window g lives on G x G^ and never has fewer than |G| nonzeros.
Z3 = FiniteAbelianGroup.cyclic(3)
g = Signal(Z3, [1, 1, 1])
for vals in ([1, 1, 1], [1, 1, -2], [1, 2, 3]):
    V = stft(Signal(Z3, vals), g)
    print(f"f={vals}: ||V_g f||_0 = {l0(V)}")

# %% The Gabor system {pi(x, xi) g} is a tight frame with bound |G| ||g||^2 ...
g = random_window("Z6", 1)
fb = frame_bounds(gabor_matrix("Z6", g).vectors())
print("frame bounds:", round(fb.lower, 10), round(fb.upper, 10), " |G| ||g||^2 =", round(6 * g.norm ** 2, 10))

# %% ... so the STFT can be inverted by the synthesis operator.
f = Signal("Z6", rng.standard_normal(6) + 1j * rng.standard_normal(6))
back = istft(stft(f, g), g)
print("round-trip error:", np.linalg.norm(back.values - f.values))
