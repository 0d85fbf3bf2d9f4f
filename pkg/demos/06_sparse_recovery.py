"""Recovering sparse objects from few samples.

Support bounds turn into uniqueness guarantees: a signal with a 3-sparse
spectrum on Z16 is determined by any 13 of its values, on Z17 by any 6.  The
same reasoning identifies time-varying operators built from a few
time-frequency shifts.

Run:  python demos/06_sparse_recovery.py
"""

# %%
import numpy as np

from tfub.gabor import gabor_matrix
from tfub.groups import FiniteAbelianGroup
from tfub.recovery import (
    AmbiguousRecoveryError,
    OperatorClass,
    find_certified_window,
    gabor_synthesis_decode,
    identify_operator,
    kernel_ambiguity,
    recover_from_stft_samples,
    spectral_recovery,
)

rng = np.random.default_rng(7)

# %% A signal on Z16 with three active frequencies, observed at 13 random points.
G = FiniteAbelianGroup.cyclic(16)
fh = np.zeros(16, dtype=complex)
fh[[2, 5, 11]] = [1.0, -2.0j, 0.5]
f = G.pairing_matrix @ fh / 16
pos = np.sort(rng.choice(16, 13, replace=False))
res = spectral_recovery(f[pos], pos, G, 3)
print("Z16:", res.status, "support", res.support, "supports tried", res.checked)

# %% On Z17 six samples suffice.
G = FiniteAbelianGroup.cyclic(17)
fh = np.zeros(17, dtype=complex)
fh[[0, 4, 9]] = [1, 1j, -1]
f = G.pairing_matrix @ fh / 17
pos = np.sort(rng.choice(17, 6, replace=False))
print("Z17:", spectral_recovery(f[pos], pos, G, 3).status)

# %% A 2-sparse signal on Z5 from four STFT samples of a certified window.
_, g = find_certified_window("Z5", "random")
A = gabor_matrix("Z5", g).matrix
x = np.array([0, 3, 0, 0, -1j])
Lam = [1, 7, 13, 22]
print("from STFT samples:", np.round(recover_from_stft_samples(g, Lam, (A @ x)[Lam], 2).values, 10))

# %% Operator identification: H = sum of five weighted time-frequency shifts, probed once with g.
Lam = [0, 6, 8, 17, 24]
c = rng.standard_normal(5) + 1j * rng.standard_normal(5)
H = OperatorClass("Z5", Lam, c)
op = identify_operator(g, Lam, H.apply(g).values)
print("coefficient error:", np.linalg.norm(op.coefficients - c))

# %% Without knowing the shifts: 4 samples of H g determine a 2-term operator ...
H = OperatorClass("Z5", [3, 19], [2.0, -1.0j])
y = H.apply(g).values
op = gabor_synthesis_decode(g, [0, 1, 3, 4], y[[0, 1, 3, 4]], 2)
print("decoded shifts", op.Lambda, "coefficients", np.round(op.coefficients, 10))

# %% ... but 3 samples do not: two different 2-term operators agree there.
P = A.conj().T
u, w = kernel_ambiguity(P, [0, 1, 2], 4)
try:
    gabor_synthesis_decode(g, [0, 1, 2], (P @ u)[[0, 1, 2]], 2)
except AmbiguousRecoveryError as exc:
    print("ambiguous as expected:", exc)
