"""Ranks of square submatrices of Fourier and Gabor matrices.

Support questions reduce to linear algebra: a signal supported on A whose
transform vanishes on B exists exactly when the submatrix with rows B and
columns A is rank deficient.  This script counts ranks of all minors.

Run:  python demos/02_minor_ranks.py
"""

# %%
import numpy as np

from tfub.gabor import gabor_matrix, random_window
from tfub.groups import dft_matrix
from tfub.rank import all_minors_nonzero, complementary_minor_pairs, minor_rank_histogram, numeric_rank

# %% Every rank decision carries a certificate: the singular-value gap.
rep = numeric_rank(dft_matrix("Z6")[[0, 3]][:, [0, 2]])
print(f"rank {rep.rank}, gap ratio {rep.gap_ratio:.2e}, uncertain={rep.uncertain}")


def show(hist):
    for size, by_rank in sorted(hist.counts.items()):
        row = ", ".join(f"rank {r}: {c}" for r, c in sorted(by_rank.items()))
        print(f"  size {size}: {row}")


# %% Prime order: every minor of the Fourier matrix is nonzero.
print("W_Z5")
show(minor_rank_histogram(dft_matrix("Z5"), range(1, 6)))

# %% Composite order: subgroups produce vanishing minors.
print("W_Z6")
show(minor_rank_histogram(dft_matrix("Z6"), range(1, 7)))
res = all_minors_nonzero(dft_matrix("Z6"), 2)
print("a singular 2x2 block of W_Z6: columns", res.counterexample[0], "rows", res.counterexample[1])

# %% A zero minor and its complementary minor vanish together.
pairs = complementary_minor_pairs(dft_matrix("Z6"), 2)
print(len(pairs), "zero 2x2 minors; complementary 4x4 minors all zero:", all(p.both_zero for p in pairs))

# %% Gabor matrices of random windows: on Z5 nothing vanishes ...
print("A_Z5,g")
show(minor_rank_histogram(gabor_matrix("Z5", random_window("Z5", 1)).matrix, range(1, 4)))

# %% ... while on Z4 every window produces 2x2 zero minors.
A = gabor_matrix("Z4", random_window("Z4", 0)).matrix
cols, rows = all_minors_nonzero(A, 2).counterexample
print("A_Z4,g: singular block at columns", cols, "rows", rows,
      "det =", abs(np.linalg.det(A[np.ix_(rows, cols)])))
