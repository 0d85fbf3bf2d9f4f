"""Gabor frames that survive erasures.

A frame of m vectors in C^n is maximally robust when any n of them still span.
For Gabor systems on prime-order groups this holds for almost every window;
we certify windows, erase coefficients, and recover the signal.

Run:  python demos/05_erasures_and_windows.py
"""

# %%
import numpy as np

from tfub.gabor import delta_window, gabor_matrix, harmonic_frame, random_window
from tfub.groups import Signal
from tfub.recovery import (
    ErasurePattern,
    NotAFrameError,
    adversarial_erasure,
    certify_max_robust,
    erase_and_recover,
    find_certified_window,
    window_report,
)

# %% Find a unimodular window on Z5 whose Gabor system is in general position.
seed, g = find_certified_window("Z5", "unimodular")
frame = gabor_matrix("Z5", g).vectors()
print("certified unimodular window, seed", seed, "moduli", np.round(np.abs(g.values), 12))

# %% Any 20 of the 25 coefficients may be lost.
rng = np.random.default_rng(1)
f = Signal("Z5", rng.standard_normal(5) + 1j * rng.standard_normal(5))
pattern = ErasurePattern.uniform(25, 20, seed=3)
back = erase_and_recover(f, frame, pattern)
print("kept", pattern.kept, "error", np.linalg.norm(back.values - f.values))

# %% One more erasure and the remaining four vectors cannot span C^5.
try:
    erase_and_recover(f, frame, ErasurePattern.uniform(25, 21, seed=3))
except NotAFrameError as exc:
    print("NotAFrame:", exc)

# %% A badly chosen window: the point mass repeats directions, and an adversary exploits it.
bad = gabor_matrix("Z4", delta_window("Z4")).vectors()
pattern = adversarial_erasure(bad)
print("adversarial pattern keeps", pattern.kept)

# %% Harmonic frames (rows of a prime Fourier matrix) are robust as well.
print("harmonic frame 3 x 7 robust:", certify_max_robust(harmonic_frame(3, 7)).ok)

# %% Six properties of a window that should stand or fall together.
for name, window in [("Z5 certified", g), ("Z3 random", random_window("Z3", 0)),
                     ("Z4 point mass", delta_window("Z4"))]:
    rep = window_report(window)
    print(f"{name:14s}", rep.parts, "min ||V_g f||_0 =", rep.min_stft_support)
