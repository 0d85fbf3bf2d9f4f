import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from tfub.bounds import (
    GuardExceededError,
    ThetaProvider,
    bounds_csv,
    cauchy_davenport,
    corollary_prime_bounds,
    divisor_bracket,
    divisors,
    donoho_stark,
    fourier_support_pairs,
    meshulam_theta_lower,
    meshulam_u,
    phi_exact,
    phi_lower_main,
    phi_lower_zpq,
    prime_stft_bound,
    psi,
    stft_lower_general,
    sum_bound,
    table_phi_main,
    table_phi_zpq,
    tao_bound,
    theta_exact,
    theta_table,
)
from tfub.gabor import gabor_matrix, random_window
from tfub.groups import FiniteAbelianGroup, Signal, dft_matrix, fourier

# Lower bounds on ||V_g f||_0 on Z6 as printed: columns are (||g||_0, ||gh||_0),
# each row starts with (||f||_0, ||fh||_0).
TABLE2_COLS = [(1, 6), (2, 3), (2, 4), (2, 5), (2, 6), (3, 2), (3, 4), (3, 5), (3, 6), (4, 2),
               (4, 3), (4, 4), (4, 5), (4, 6), (5, 2), (5, 3), (5, 4), (5, 5), (5, 6), (6, 1),
               (6, 2), (6, 3), (6, 4), (6, 5), (6, 6)]
TABLE2_ROWS = [
    (1, 6, 6, 24, 18, 12, 6, 30, 18, 12, 6, 30, 24, 18, 12, 6, 30, 24, 18, 12, 6, 36, 30, 24, 18, 12, 6),
    (2, 3, 24, 20, 20, 20, 20, 25, 16, 16, 16, 25, 20, 15, 12, 12, 25, 20, 15, 10, 8, 30, 25, 20, 15, 10, 5),
    (2, 4, 18, 20, 15, 15, 15, 25, 15, 12, 12, 25, 20, 15, 10, 9, 25, 20, 15, 10, 6, 30, 25, 20, 15, 10, 5),
    (2, 5, 12, 20, 15, 10, 10, 25, 15, 10, 8, 25, 20, 15, 10, 6, 25, 20, 15, 10, 5, 30, 25, 20, 15, 10, 5),
    (2, 6, 6, 20, 15, 10, 5, 25, 15, 10, 5, 25, 20, 15, 10, 5, 25, 20, 15, 10, 5, 30, 25, 20, 15, 10, 5),
    (3, 4, 18, 16, 15, 15, 15, 20, 12, 12, 12, 20, 16, 12, 9, 9, 20, 16, 12, 8, 6, 24, 20, 16, 12, 8, 4),
    (3, 5, 12, 16, 12, 10, 10, 20, 12, 8, 8, 20, 16, 12, 8, 6, 20, 16, 12, 8, 4, 24, 20, 16, 12, 8, 4),
    (3, 6, 6, 16, 12, 8, 5, 20, 12, 8, 4, 20, 16, 12, 8, 4, 20, 16, 12, 8, 4, 24, 20, 16, 12, 8, 4),
    (4, 4, 18, 15, 15, 15, 15, 15, 12, 12, 12, 15, 12, 9, 9, 9, 15, 12, 9, 6, 6, 18, 15, 12, 9, 6, 3),
    (4, 5, 12, 12, 10, 10, 10, 15, 9, 8, 8, 15, 12, 9, 6, 6, 15, 12, 9, 6, 4, 18, 15, 12, 9, 6, 3),
    (4, 6, 6, 12, 9, 6, 5, 15, 9, 6, 4, 15, 12, 9, 6, 3, 15, 12, 9, 6, 3, 18, 15, 12, 9, 6, 3),
    (5, 5, 12, 10, 10, 10, 10, 10, 8, 8, 8, 10, 8, 6, 6, 6, 10, 8, 6, 4, 4, 12, 10, 8, 6, 4, 2),
    (5, 6, 6, 8, 6, 5, 5, 10, 6, 4, 4, 10, 8, 6, 4, 3, 10, 8, 6, 4, 2, 12, 10, 8, 6, 4, 2),
    (6, 6, 6, 5, 5, 5, 5, 5, 4, 4, 4, 5, 4, 3, 3, 3, 5, 4, 3, 2, 2, 6, 5, 4, 3, 2, 1),
]
PRINTED_ZPQ_ROW_Z6 = (36, 26, 25, 23, 22, 20)

SMALL_GROUPS = ["Z2", "Z3", "Z4", "Z5", "Z6", "Z7", "Z8", "Z9", "Z10", "Z2xZ2", "Z2xZ4",
                "Z2xZ2xZ2", "Z3xZ3"]


def is_prime(n):
    return n > 1 and all(n % d for d in range(2, int(n ** 0.5) + 1))


# -- Fourier-side bounds ------------------------------------------------------------


def test_donoho_stark_and_sum_bound():
    assert donoho_stark(6, 2) == 3
    assert donoho_stark(4, 4) == 1
    assert donoho_stark(16, 6) == 3
    assert sum_bound(16) == 8 and sum_bound(6) == 5 and sum_bound(1) == 2
    with pytest.raises(ValueError):
        donoho_stark(6, 0)
    with pytest.raises(ValueError):
        donoho_stark(6, 7)


def test_tao_bound():
    assert tao_bound(5, 2) == 4
    assert tao_bound(17, 6) == 12
    assert 17 - tao_bound(17, 6) + 1 == 6
    assert tao_bound(7, 7) == 1
    with pytest.raises(ValueError):
        tao_bound(6, 2)


def test_divisor_bracket():
    for n in range(1, 40):
        for k in range(1, n + 1):
            b = divisor_bracket(n, k)
            assert b.d1 <= k <= b.d2 and n % b.d1 == 0 and n % b.d2 == 0
    assert divisors(12) == [1, 2, 3, 4, 6, 12]


def test_meshulam_examples():
    assert meshulam_theta_lower("Z6", 4) == Fraction(5, 3)
    assert meshulam_theta_lower("Z16", 6) == 3
    for p in (2, 3, 5, 7, 11, 13):
        for k in range(1, p + 1):
            assert meshulam_theta_lower(f"Z{p}", k) == p + 1 - k
    for n in (6, 12, 36):
        for d in divisors(n):
            assert meshulam_u(n, d) == Fraction(n, d)
    assert isinstance(meshulam_theta_lower("Z6", 4), Fraction)


def test_u_is_submultiplicative():
    for n in range(1, 37):
        for d in divisors(n):
            for k in range(1, n + 1):
                for s in range(1, d + 1):
                    for t in range(1, n // d + 1):
                        if s * t <= k:
                            assert meshulam_u(n, k) <= meshulam_u(n // d, t) * meshulam_u(d, s)


# -- exact theta -----------------------------------------------------------------------


def test_theta_exact_examples():
    assert theta_table("Z6") == [6, 3, 2, 2, 2, 1]
    assert theta_exact("Z5", 3) == 3
    with pytest.raises(GuardExceededError):
        theta_exact("Z17", 2)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_theta_exact_prime(p):
    assert theta_table(f"Z{p}") == [p + 1 - k for k in range(1, p + 1)]


def test_theta_certificate_is_a_witness():
    value, cert = theta_exact("Z8", 2, certificate=True)
    assert value == 4
    A, B = cert.witness
    W = dft_matrix("Z8")
    sub = W[np.ix_(B, A)]
    assert np.linalg.matrix_rank(sub, tol=1e-8) < len(A)


@pytest.mark.parametrize("spec", SMALL_GROUPS)
def test_exact_theta_dominates_divisor_bound(spec):
    table = theta_table(spec)
    for k, th in enumerate(table, start=1):
        assert th >= meshulam_theta_lower(spec, k)
        assert th >= donoho_stark(len(table), k)
    assert all(a >= b for a, b in zip(table, table[1:]))  # monotone in k


@pytest.mark.parametrize("spec", ["Z2xZ3", "Z3xZ3"])
def test_product_support_bound(spec):
    G = FiniteAbelianGroup.parse(spec)
    d1, d2 = G.factors
    th1, th2 = theta_table(f"Z{d1}"), theta_table(f"Z{d2}")
    rng = np.random.default_rng(0)
    for a1 in range(1, d1 + 1):
        for a2 in range(1, d2 + 1):
            for _ in range(5):
                A1 = rng.choice(d1, a1, replace=False)
                A2 = rng.choice(d2, a2, replace=False)
                vals = np.zeros((d1, d2), dtype=complex)
                vals[np.ix_(A1, A2)] = rng.standard_normal((a1, a2)) + 1j * rng.standard_normal((a1, a2))
                vals[np.ix_(A1, A2)] *= rng.integers(0, 2, (a1, a2))  # allow holes
                if not vals.any():
                    continue
                fh = fourier(Signal(G, vals.reshape(-1)))
                assert fh.l0 >= th1[a1 - 1] * th2[a2 - 1]


@pytest.mark.parametrize("h", [2, 3])
def test_induction_inequality_z6(h):
    th_g = theta_table("Z6")
    th_h, th_q = theta_table(f"Z{h}"), theta_table(f"Z{6 // h}")
    for k in range(1, 7):
        bound = min(th_h[s - 1] * th_q[t - 1]
                    for s in range(1, h + 1) for t in range(1, 6 // h + 1) if s * t <= k)
        assert th_g[k - 1] >= bound


def test_theta_providers():
    exact = ThetaProvider("exact", "Z6")
    assert [exact(k) for k in range(1, 7)] == [6, 3, 2, 2, 2, 1]
    mesh = ThetaProvider("meshulam", "Z6")
    assert [mesh(k) for k in range(1, 7)] == [6, 3, 2, 2, 2, 1]
    naive = ThetaProvider("naive_plus_one", "Z6")
    assert [naive(k) for k in range(1, 7)] == [6, 5, 4, 3, 2, 1]
    tao = ThetaProvider("tao_prime", "Z5")
    assert [tao(k) for k in range(1, 6)] == [5, 4, 3, 2, 1]
    with pytest.raises(ValueError):
        ThetaProvider("tao_prime", "Z6")
    with pytest.raises(ValueError):
        ThetaProvider("bogus", "Z6")
    for k in range(1, 7):
        assert exact(k) >= mesh(k) >= 1


# -- STFT bounds -----------------------------------------------------------------------


def test_stft_lower_general_examples():
    naive = ThetaProvider("naive_plus_one", "Z6")
    assert stft_lower_general(naive, 2, 3, 2, 3) == 20
    assert stft_lower_general(naive, 1, 6, 6, 1) == 36
    exact = ThetaProvider("exact", "Z6")
    assert stft_lower_general(exact, 6, 6, 6, 6) >= 1
    assert stft_lower_general(exact, 2, 3, 2, 3) == 6
    with pytest.raises(ValueError):
        stft_lower_general(exact, 0, 1, 1, 1)


def test_table_of_stft_bounds_on_z6():
    naive = ThetaProvider("naive_plus_one", "Z6")
    for row in TABLE2_ROWS:
        kf, kfh, values = row[0], row[1], row[2:]
        for (kg, kgh), v in zip(TABLE2_COLS, values):
            assert stft_lower_general(naive, kf, kfh, kg, kgh) == v, (kf, kfh, kg, kgh)


def test_stft_bound_variants_are_ordered():
    for kind, spec in [("exact", "Z6"), ("naive_plus_one", "Z6"), ("tao_prime", "Z5")]:
        th = ThetaProvider(kind, spec)
        n = th.group.order
        for args in itertools.product(range(1, n + 1), repeat=4):
            mx = stft_lower_general(th, *args, variant="max")
            ar = stft_lower_general(th, *args, variant="arith")
            ge = stft_lower_general(th, *args, variant="geom")
            assert mx >= ar >= ge - 1e-12


def test_corollary_prime_bounds():
    assert corollary_prime_bounds(5, 1, 1, 1, 1)[0] == 25
    assert corollary_prime_bounds(5, 5, 5, 5, 5)[0] == 1
    tao = ThetaProvider("tao_prime", "Z5")
    for args in itertools.product(range(1, 6), repeat=4):
        mx, avg = corollary_prime_bounds(5, *args)
        assert mx == stft_lower_general(tao, *args, variant="max")
        assert avg == stft_lower_general(tao, *args, variant="arith")
    with pytest.raises(ValueError):
        corollary_prime_bounds(6, 1, 1, 1, 1)


def test_cauchy_davenport_against_sumsets():
    for p in (2, 3, 5, 7):
        for a, b in itertools.product(range(1, p + 1), repeat=2):
            smallest = min(
                len({(x + y) % p for x in A for y in B})
                for A in itertools.combinations(range(p), a)
                for B in itertools.combinations(range(p), b)
            )
            assert cauchy_davenport(a, b, p) == smallest
    with pytest.raises(ValueError):
        cauchy_davenport(1, 1, 4)


def test_prime_stft_bound_examples():
    assert prime_stft_bound(5, 1, 1) == 5
    assert prime_stft_bound(5, 5, 5) == 5
    assert prime_stft_bound(3, 3, 3) == 3
    with pytest.raises(ValueError):
        prime_stft_bound(9, 1, 1)


def test_phi_lower_tables():
    assert [phi_lower_main("Z6", k) for k in range(1, 7)] == [36, 18, 12, 10, 8, 6]
    assert phi_lower_zpq(3, 2, 1) == 36
    literal = [phi_lower_zpq(3, 2, k) for k in range(1, 7)]
    assert literal == [36, 27, Fraction(51, 2), 24, Fraction(45, 2), 21]
    # the printed row differs from the formula from k = 2 on
    assert literal[0] == PRINTED_ZPQ_ROW_Z6[0]
    assert all(l != p for l, p in zip(literal[1:], PRINTED_ZPQ_ROW_Z6[1:]))
    for p in (2, 3, 5, 7):
        for k in range(1, p + 1):
            assert phi_lower_main(f"Z{p}", k) == p * (p + 1 - k) <= p * p + 1 - k
            if k > 1:
                assert phi_lower_main(f"Z{p}", k) < p * p + 1 - k
    with pytest.raises(ValueError):
        phi_lower_zpq(2, 3, 1)


def test_bounds_csv():
    text = bounds_csv(table_phi_zpq(3, 2))
    lines = text.strip().splitlines()
    assert lines[0] == "k,bound_name,value_num,value_den"
    assert lines[3] == "3,phi_zpq,51,2"
    assert len(bounds_csv(table_phi_main("Z6")).strip().splitlines()) == 7


def test_fourier_support_pairs():
    pairs = fourier_support_pairs("Z6", ThetaProvider("exact", "Z6"))
    assert (3, 3) in pairs  # bounds alone cannot exclude it
    assert (2, 2) not in pairs and (1, 6) in pairs and (6, 1) in pairs


# -- exact phi and psi --------------------------------------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5])
def test_phi_exact_prime(p):
    g = random_window(f"Z{p}", 0)
    assert [phi_exact(f"Z{p}", k, g) for k in range(1, p + 1)] == [p * p + 1 - k for k in range(1, p + 1)]


def test_phi_exact_examples():
    assert phi_exact("Z5", 2, random_window("Z5", 1)) == 24
    g = random_window("Z4", 0)
    values = [phi_exact("Z4", k, g) for k in range(1, 5)]
    # the conjectured shift of the Fourier support map by |G|^2 - |G|
    theta = theta_table("Z4")
    assert values == [min(theta[:k]) + 12 for k in range(1, 5)]
    for spec in ("Z4", "Z2xZ2", "Z6"):
        n = FiniteAbelianGroup.parse(spec).order
        assert phi_exact(spec, n, random_window(spec, 2)) >= n
    with pytest.raises(GuardExceededError):
        phi_exact("Z9", 1, random_window("Z9", 0))


def test_phi_exact_on_klein_group_undercuts_the_fourier_shift():
    """On Z2xZ2 every window admits f with ||V_g f||_0 = 10 < 1 + 16 - 4."""
    for seed in range(3):
        g = random_window("Z2xZ2", seed)
        assert [phi_exact("Z2xZ2", k, g) for k in range(1, 5)] == [16, 14, 14, 10]


@pytest.mark.parametrize("spec", ["Z2", "Z3", "Z4", "Z2xZ2", "Z5", "Z6"])
def test_phi_exact_is_window_independent(spec):
    n = FiniteAbelianGroup.parse(spec).order
    tables = [[phi_exact(spec, k, random_window(spec, s)) for k in range(1, n + 1)] for s in (0, 1, 2)]
    assert tables[0] == tables[1] == tables[2]


def test_psi_examples():
    assert psi(dft_matrix("Z6"), 2) == 3
    for k in range(1, 7):
        assert psi(dft_matrix("Z6"), k) == theta_exact("Z6", k)
    A = gabor_matrix("Z5", random_window("Z5", 0)).matrix
    assert psi(A, 2) == 24
    assert psi(A.conj().T, 2) == 4
    with pytest.raises(GuardExceededError):
        psi(np.ones((50, 3)), 1)


@pytest.mark.parametrize("spec", ["Z3", "Z4", "Z2xZ2", "Z6"])
def test_psi_of_gabor_dictionary_equals_theta(spec):
    """Sparse combinations of time-frequency shifts of a generic window behave like
    sparse spectra: psi equals theta for small sparsity."""
    D = gabor_matrix(spec, random_window(spec, 0)).matrix.conj().T
    theta = theta_table(spec)
    assert [psi(D, k) for k in range(1, 4)] == theta[:3]
