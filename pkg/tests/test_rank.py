import itertools
import json
import math

import numpy as np
import pytest

from tfub.gabor import gabor_matrix, random_window
from tfub.groups import dft_matrix
from tfub.rank import (
    RankHistogram,
    adjacent_minor_check,
    all_minors_nonzero,
    colex_combinations,
    combinations_array,
    complementary_minor_pairs,
    deficiency_search,
    is_cyclic_interval,
    max_deficient_rows,
    minor_rank_histogram,
    null_space,
    numeric_rank,
    submatrix,
)

from oracles import brute_rank_counts

W5, W6 = dft_matrix("Z5"), dft_matrix("Z6")


def brute_max_deficient(M, k):
    """max |B| with rank M[B, A] < k over all |A| = k, by plain enumeration."""
    rows, cols = M.shape
    best = 0
    for A in itertools.combinations(range(cols), k):
        for size in range(rows, best, -1):
            if any(np.linalg.matrix_rank(M[np.ix_(B, A)], tol=1e-8) < k
                   for B in itertools.combinations(range(rows), size)):
                best = size
                break
    return best


# -- combinations ------------------------------------------------------------------


def test_combination_orders():
    assert [tuple(c) for c in combinations_array(4, 2)] == list(itertools.combinations(range(4), 2))
    colex = [tuple(c) for c in colex_combinations(4, 2)]
    assert colex == sorted(itertools.combinations(range(4), 2), key=lambda c: c[::-1])
    assert combinations_array(5, 0).shape == (1, 0)


# -- numeric rank ----------------------------------------------------------------------


def test_numeric_rank_examples():
    assert numeric_rank(np.eye(3)).rank == 3
    assert numeric_rank(np.eye(3)).gap_ratio == math.inf
    rng = np.random.default_rng(0)
    u = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    v = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    rep = numeric_rank(np.outer(u, v))
    assert rep.rank == 1 and rep.gap_ratio > 1e10 and not rep.uncertain
    assert numeric_rank(submatrix(W6, [0, 2], [0, 3])).rank == 1
    with pytest.raises(ValueError):
        numeric_rank(np.zeros((0, 3)))


def test_numeric_rank_report_invariants():
    rng = np.random.default_rng(1)
    for _ in range(20):
        M = rng.standard_normal((4, 6)) @ np.diag([1, 1, 1e-13, 1, 1, 1]) @ rng.standard_normal((6, 5))
        rep = numeric_rank(M)
        assert rep.rank <= 4
        assert rep.gap_ratio >= 1
        assert list(rep.singular_values) == sorted(rep.singular_values, reverse=True)


def test_nearly_singular_is_flagged_uncertain():
    M = np.diag([1.0, 1e-9])  # threshold is 2e-10; the gap is tiny
    assert numeric_rank(M).uncertain


def test_submatrix_examples():
    W4 = dft_matrix("Z4")
    assert np.array_equal(submatrix(W4, range(4), range(4)), W4)
    assert submatrix(W4, [2], [1]).shape == (1, 1)
    assert submatrix(W4, [2], [1])[0, 0] == pytest.approx(-1)
    with pytest.raises(IndexError):
        submatrix(W4, [4], [0])


def test_null_space():
    M = np.array([[1, 1, 0], [0, 0, 1]], dtype=complex)
    K = null_space(M)
    assert K.shape == (3, 1)
    assert np.allclose(M @ K, 0)


# -- histograms ------------------------------------------------------------------------


def test_histogram_examples():
    assert minor_rank_histogram(W5, [2]).counts == {2: {2: 100}}
    assert minor_rank_histogram(W6, [3]).counts == {3: {2: 48, 3: 352}}


def test_gabor_z6_size4_histogram():
    A = gabor_matrix("Z6", random_window("Z6", 11)).matrix
    assert minor_rank_histogram(A, [4]).counts == {4: {3: 2106, 4: 881469}}


@pytest.mark.parametrize("r", range(1, 7))
def test_dft_histogram_against_brute_force(r):
    hist = minor_rank_histogram(W6, [r])
    assert hist.counts[r] == brute_rank_counts(W6, r)
    assert sum(hist.counts[r].values()) == math.comb(6, r) ** 2


def test_gabor_histogram_against_brute_force():
    A = gabor_matrix("Z3", random_window("Z3", 2)).matrix
    hist = minor_rank_histogram(A, [1, 2, 3])
    for r in (1, 2, 3):
        assert hist.counts[r] == brute_rank_counts(A, r)
        assert sum(hist.counts[r].values()) == math.comb(9, r) * math.comb(3, r)


def test_histogram_health_and_thread_independence():
    A = gabor_matrix("Z4", random_window("Z4", 0)).matrix
    one = minor_rank_histogram(A, [2, 3, 4], threads=1)
    many = minor_rank_histogram(A, [2, 3, 4], threads=4)
    assert one.counts == many.counts
    assert one.uncertain == 0 and one.min_gap >= 1e3


def test_histogram_budget_and_serialization():
    hist = minor_rank_histogram(W6, [2, 3], budget_minors=100, matrix_kind="dft", group="Z6")
    assert hist.truncated and hist.checked == 100
    full = minor_rank_histogram(W6, [3], matrix_kind="dft", group="Z6", seed=7)
    obj = json.loads(full.to_json())
    assert obj["matrix"] == "dft" and obj["group"] == "Z6" and obj["seed"] == 7
    assert obj["counts"] == {"3": {"2": 48, "3": 352}}
    back = RankHistogram.from_dict(obj)
    assert back.counts == full.counts
    assert full.csv_rows() == [(3, 2, 48), (3, 3, 352)]
    with pytest.raises(ValueError):
        minor_rank_histogram(W6, [7])


# -- zero-minor searches -----------------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_prime_fourier_minors_never_vanish(p):
    W = dft_matrix(f"Z{p}")
    for r in range(1, p + 1):
        assert all_minors_nonzero(W, r).ok


@pytest.mark.parametrize("p", [3, 5, 7])
def test_prime_fourier_minors_via_gabor_block(p):
    """The zero-translation block of a Gabor matrix with nowhere-vanishing window is a
    rescaled Fourier matrix, so its minors never vanish either."""
    g = np.exp(2j * np.pi * np.random.default_rng(p).random(p)) * (1 + np.arange(p))
    block = gabor_matrix(f"Z{p}", g).matrix[:p]
    for r in range(1, p + 1):
        assert all_minors_nonzero(block, r).ok


@pytest.mark.parametrize("n, d0", [(4, 2), (6, 2), (8, 2), (9, 3)])
def test_composite_fourier_has_zero_minors(n, d0):
    W = dft_matrix(f"Z{n}")
    for r in range(d0, n - d0 + 1):
        res = all_minors_nonzero(W, r)
        assert not res.ok
        A, B = res.counterexample
        assert np.linalg.matrix_rank(W[np.ix_(B, A)], tol=1e-8) < r


def test_zero_minor_counterexample_on_z6():
    res = all_minors_nonzero(W6, 2)
    assert not res.ok and res.checked >= 1
    A, B = res.counterexample
    assert abs(np.linalg.det(W6[np.ix_(B, A)])) < 1e-12


def test_gabor_z4_has_two_by_two_zero_minor():
    for seed in range(3):
        A = gabor_matrix("Z4", random_window("Z4", seed)).matrix
        res = all_minors_nonzero(A, 2)
        assert not res.ok
        cols, rows = res.counterexample
        assert abs(np.linalg.det(A[np.ix_(rows, cols)])) < 1e-10 * np.abs(A).max() ** 2


def test_adjacent_minors():
    assert adjacent_minor_check(W6, 6, "columns", max_size=4).ok
    assert adjacent_minor_check(W6, 6, "rows", max_size=4).ok
    W4 = dft_matrix("Z4")
    for cols in itertools.combinations(range(4), 2):
        assert numeric_rank(submatrix(W4, cols, [0, 1])).rank == 2
    A = gabor_matrix("Z4", random_window("Z4", 3)).matrix
    assert adjacent_minor_check(A, 4, "modulation", max_size=4).ok
    # without the adjacency restriction the same matrix has zero minors
    assert not all_minors_nonzero(A, 2).ok
    with pytest.raises(ValueError):
        adjacent_minor_check(W6, 6, "columns", factors=(2, 3))


def test_cyclic_interval():
    assert is_cyclic_interval([5, 0, 1], 6)
    assert not is_cyclic_interval([0, 2], 6)
    assert is_cyclic_interval([3], 6) and is_cyclic_interval(range(6), 6)


def test_complementary_minors():
    pairs = complementary_minor_pairs(W6, 2)
    assert len(pairs) == 36 and all(p.both_zero for p in pairs)
    pairs = complementary_minor_pairs(W6, 3)
    assert len(pairs) == 48 and all(p.both_zero for p in pairs)
    W4 = dft_matrix("Z4")
    pairs = complementary_minor_pairs(W4, 2)
    hit = [p for p in pairs if p.cols == (0, 2) and p.rows == (0, 2)]
    assert hit and hit[0].both_zero
    assert numeric_rank(submatrix(W4, [1, 3], [1, 3])).rank < 2
    assert complementary_minor_pairs(W5, 2) == []
    assert len(complementary_minor_pairs(W6, 2, sample_budget=5)) == 5


# -- maximal deficient row sets ----------------------------------------------------------


def test_max_deficient_rows_examples():
    assert max_deficient_rows(W6, 2) == 3
    assert max_deficient_rows(W5, 2) == 1
    A = gabor_matrix("Z5", random_window("Z5", 0)).matrix
    assert max_deficient_rows(A, 2) == 1
    with pytest.raises(ValueError):
        max_deficient_rows(W5, 6)


@pytest.mark.parametrize("k", range(1, 7))
def test_max_deficient_rows_matches_brute_force_on_z6(k):
    expected = brute_max_deficient(W6, k)
    for method in ("levels", "flats"):
        cert = deficiency_search(W6, k, method=method)
        assert cert.value == expected
        if cert.witness is not None and cert.value:
            A, B = cert.witness
            assert len(B) == cert.value
            assert np.linalg.matrix_rank(W6[np.ix_(B, A)], tol=1e-8) < k


@pytest.mark.parametrize("k", [1, 2, 3])
def test_max_deficient_rows_matches_brute_force_on_gabor_z3(k):
    A = gabor_matrix("Z3", random_window("Z3", 4)).matrix
    expected = brute_max_deficient(A, k)
    assert deficiency_search(A, k, method="levels").value == expected
    assert deficiency_search(A, k, method="flats").value == expected


def test_levels_method_reports_exhaustion_level():
    cert = deficiency_search(W6, 3, method="levels")
    assert cert.value == 4 and cert.exhausted_level == 5
