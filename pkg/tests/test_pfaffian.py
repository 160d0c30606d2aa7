import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from ginibre_evolution import pfaffian as pf
from ginibre_evolution.errors import InvalidArgumentError
from ginibre_evolution.rng import SeedSpec


def _pf_expansion(a):
    # independent oracle: expansion along the first row
    n = a.shape[0]
    if n == 0:
        return 1.0
    total = 0.0
    for j in range(1, n):
        rest = [k for k in range(n) if k not in (0, j)]
        total += (-1) ** (j - 1) * a[0, j] * _pf_expansion(a[np.ix_(rest, rest)])
    return total


def _skew(rng, d, complex_=False):
    a = rng.standard_normal((d, d))
    if complex_:
        a = a + 1j * rng.standard_normal((d, d))
    return a - a.T


def test_small_examples():
    assert pf.pfaffian_value([[0, 3.0], [-3.0, 0]]) == 3.0
    assert pf.pfaffian_value(pf.canonical_symplectic(4)) == 1.0
    assert pf.pfaffian_value(np.zeros((0, 0))) == 1.0
    assert pf.pfaffian(np.zeros((4, 4))) == (0, -math.inf)
    with pytest.raises(InvalidArgumentError):
        pf.pfaffian(np.zeros((3, 3)))
    with pytest.raises(InvalidArgumentError):
        pf.canonical_symplectic(3)


@pytest.mark.parametrize("d", [2, 4, 6, 8])
def test_matches_expansion(rng, d):
    for _ in range(5):
        a = _skew(rng, d)
        assert abs(pf.pfaffian_value(a) - _pf_expansion(a)) < 1e-12 * max(1.0, abs(_pf_expansion(a)))
        c = _skew(rng, d, True)
        assert abs(pf.pfaffian_value(c) - _pf_expansion(c)) < 1e-11 * max(1.0, abs(_pf_expansion(c)))


@pytest.mark.parametrize("d", [2, 4, 6, 8, 10, 12])
def test_square_is_determinant(rng, d):
    for _ in range(20):
        a = _skew(rng, d)
        sign, lg = pf.pfaffian(a)
        dsign, dlog = np.linalg.slogdet(a)
        assert dsign == 1 and abs(math.expm1(2 * lg - dlog)) < 1e-10


@pytest.mark.parametrize("d", [2, 4, 6, 8])
def test_congruence(rng, d):
    for _ in range(20):
        a = _skew(rng, d)
        b = rng.standard_normal((d, d))
        lhs = pf.pfaffian_value(b @ a @ b.T)
        rhs = np.linalg.det(b) * pf.pfaffian_value(a)
        assert abs(lhs - rhs) <= 1e-9 * abs(rhs)


def test_skew_matrix_storage():
    a = np.array([[0, 1.0, 2.0, 3.0], [9, 0, 4.0, 5.0], [9, 9, 0, 6.0], [9, 9, 9, 0]])
    s = pf.SkewMatrix.from_dense(a)
    assert np.array_equal(s.dense(), s.dense() * 1)
    assert np.array_equal(s.dense(), -s.dense().T)
    assert pf.pfaffian_value(s) == pytest.approx(1 * 6 - 2 * 5 + 3 * 4)


def test_pfaffian_tiny_kernels_stay_finite():
    xs = np.arange(8) * 6.0
    sign, lg = pf.pfaffian(pf.density_kernel(xs))
    assert sign != 0 and math.isfinite(lg) and lg < -100


def test_fixed_time_density_examples():
    assert pf.fixed_time_modified_density([0.3, 0.3]) == 0.0
    v = pf.fixed_time_modified_density([0.0, 0.5])
    assert abs(abs(v) - math.sqrt(8 / math.pi) * 0.5 * math.exp(-0.5)) < 1e-15
    assert abs(abs(v) - 0.4839) < 1e-4
    four = pf.fixed_time_modified_density([0.0, 0.5, 10.0, 10.5])
    assert abs(four - v * v) < 1e-12 * v * v


def test_evolution_normalization():
    r = 0.7
    v = pf.fixed_time_modified_density([0.0, r], "evolution")
    assert abs(v - (-r * math.exp(-r * r) / math.sqrt(math.pi))) < 1e-15
    # time scaling: rho_t(x) = t^{-K/2} rho_1(x / sqrt t)
    t = 2.5
    a = pf.fixed_time_modified_density([0.0, 0.4, 1.1, 2.0], "evolution", t)
    b = pf.fixed_time_modified_density(np.array([0.0, 0.4, 1.1, 2.0]) / math.sqrt(t), "evolution") / t**2
    assert abs(a - b) < 1e-14
    with pytest.raises(InvalidArgumentError):
        pf.fixed_time_modified_density([0.0, 1.0], "other")


def test_adjacent_swap_flips_kernel_pfaffian(rng):
    xs = np.sort(rng.uniform(-2, 2, 6))
    base = pf.pfaffian_value(pf.density_kernel(xs))
    for i in range(5):
        ys = xs.copy()
        ys[[i, i + 1]] = ys[[i + 1, i]]
        assert pf.pfaffian_value(pf.density_kernel(ys)) == pytest.approx(-base, rel=1e-12)


def test_input_validation():
    with pytest.raises(InvalidArgumentError):
        pf.fixed_time_modified_density([0.0, 1.0, 2.0])
    with pytest.raises(InvalidArgumentError):
        pf.fixed_time_spin_correlation([1.0, 0.0])
    with pytest.raises(InvalidArgumentError):
        pf.OrderedPoints((0.0, 0.0))
    with pytest.raises(InvalidArgumentError):
        pf.OrderedPoints((0.0, 1.0, 2.0))


def test_spin_correlation_examples():
    assert pf.fixed_time_spin_correlation([0.2, 0.2]) == 1.0
    assert pf.fixed_time_spin_correlation([0.2, 0.2], "evolution") == 1.0
    assert pf.fixed_time_spin_correlation([]) == 1.0
    assert abs(pf.fixed_time_spin_correlation([0.0, 1.0], "evolution") - math.erfc(1.0)) < 1e-15
    assert abs(pf.fixed_time_spin_correlation([0.0, 1.0], "narrow") - math.erfc(math.sqrt(2))) < 1e-15


def test_spin_correlation_is_double_integral_of_density():
    # -d^2/dr^2 of the K=2 spin correlation equals 4 times the density
    r, h = 0.6, 1e-4
    f = [pf.fixed_time_spin_correlation([0.0, r + k * h], "narrow") for k in (-1, 0, 1)]
    second = (f[0] - 2 * f[1] + f[2]) / h**2
    assert abs(-second / 4 - pf.fixed_time_modified_density([0.0, r], "narrow")) < 1e-6


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-4, 4), min_size=2, max_size=8), st.sampled_from(pf.NORMALIZATIONS))
def test_spin_correlation_bounded(xs, norm):
    xs = sorted(xs)[: 2 * (len(xs) // 2)]
    v = pf.fixed_time_spin_correlation(xs, norm)
    assert -1 - 1e-12 <= v <= 1 + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-64, 64), min_size=2, max_size=6, unique=True), st.integers(-8, 8))
def test_translation_invariance(ints, shift):
    xs = sorted(k / 16 for k in ints)[: 2 * (len(ints) // 2)]
    ys = [x + shift for x in xs]
    for norm in pf.NORMALIZATIONS:
        assert pf.fixed_time_modified_density(xs, norm) == pf.fixed_time_modified_density(ys, norm)
        assert pf.fixed_time_spin_correlation(xs, norm) == pf.fixed_time_spin_correlation(ys, norm)


def test_involution_properties(rng):
    eye = np.eye(4)
    assert np.array_equal(pf.symplectic_involution(eye), eye)
    assert np.array_equal(pf.symplectic_involution(eye, "plain"), -eye)
    for _ in range(20):
        h = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        h = h + h.conj().T
        for conv in ("transpose", "plain"):
            r = pf.symplectic_involution(h, conv)
            assert np.max(np.abs(pf.symplectic_involution(r, conv) - h)) < 1e-14
        assert abs(np.trace(pf.symplectic_involution(h)) - np.trace(h)) < 1e-12
    with pytest.raises(InvalidArgumentError):
        pf.symplectic_involution(np.eye(3))
    with pytest.raises(InvalidArgumentError):
        pf.symplectic_involution(eye, "other")


def test_involution_trace_split(rng):
    # Tr (H - H^R)^2 = 2 Tr H^2 - 2 Tr H H^R under the default convention
    h = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = h + h.conj().T
    hr = pf.symplectic_involution(h)
    lhs = np.trace((h - hr) @ (h - hr))
    rhs = 2 * np.trace(h @ h) - 2 * np.trace(h @ hr)
    assert abs(lhs - rhs) < 1e-12


def test_haar_unitarity():
    u = pf.haar_unitary_block(8, 5, 0, 1000)
    err = np.abs(np.conj(np.swapaxes(u, -1, -2)) @ u - np.eye(8)).max()
    assert err < 1e-12
    single = pf.haar_unitary(8, SeedSpec(5, 3))
    assert np.array_equal(single, u[3])


def test_haar_first_moment():
    u = pf.haar_unitary_block(4, 6, 0, 100_000)
    v = np.abs(u[:, 0, 0]) ** 2
    assert abs(v.mean() - 0.25) < 3 * v.std() / np.sqrt(v.size)


def test_haar_left_invariance():
    u = pf.haar_unitary_block(3, 8, 0, 100_000)
    fixed = pf.haar_unitary(3, SeedSpec(999))
    v = np.abs((fixed @ u)[:, 1, 2]) ** 4
    # E |U_ij|^4 = 2 / (k (k + 1)) for Haar U(k)
    assert abs(v.mean() - 2 / 12) < 3 * v.std() / np.sqrt(v.size)


def test_haar_phases_uniform():
    u = pf.haar_unitary_block(2, 9, 0, 100_000)
    phases = np.angle(np.linalg.eigvals(u)).ravel()[::2]
    stat = stats.kstest((phases + np.pi) / (2 * np.pi), "uniform").statistic
    assert stat < 1.63 / math.sqrt(phases.size)


def test_hermitian_from_points():
    xs = pf.OrderedPoints((-1.0, 0.2, 0.5, 3.0))
    h = pf.HermitianFromPoints(pf.haar_unitary(4, SeedSpec(1)), xs)
    assert np.abs(h.h - h.h.conj().T).max() < 1e-12
    assert np.abs(np.linalg.eigvalsh(h.h) - xs.array()).max() < 1e-10
    with pytest.raises(InvalidArgumentError):
        pf.HermitianFromPoints(np.ones((4, 4)), xs)


def test_group_integral_degenerate_points():
    assert pf.mc_group_integral([1.5, 1.5, 1.5, 1.5], 500, SeedSpec(2)) == (1.0, 0.0)
    assert pf.mc_group_integral([-0.25, -0.25], 500, SeedSpec(2)) == (1.0, 0.0)


def test_group_integral_shift_invariance():
    a, ea = pf.mc_group_integral([0.0, 0.4, 0.9, 1.6], 20_000, SeedSpec(3))
    b, eb = pf.mc_group_integral([2.0, 2.4, 2.9, 3.6], 20_000, SeedSpec(4))
    assert abs(a - b) < 3 * math.hypot(ea, eb)


def test_group_integral_k2_closed_form():
    # at K = 2 the integrand equals exp(-(x1 - x2)^2) for every unitary
    v, e = pf.mc_group_integral([0.0, 0.8], 200, SeedSpec(5))
    assert abs(v - math.exp(-0.64)) < 1e-14 and e < 1e-14


def test_plain_convention_not_shift_invariant():
    # J H^T J maps cI to -cI, so equal points no longer give integrand 1
    a, _ = pf.mc_group_integral([1.0, 1.0], 50, SeedSpec(6), convention="plain")
    assert a == pytest.approx(math.exp(-4.0), rel=1e-12)


def test_vandermonde():
    assert pf.vandermonde([0.0, 1.0, 3.0]) == (1, pytest.approx(math.log(1 * 3 * 2)))
    assert pf.vandermonde([1.0, 0.0])[0] == -1
    assert pf.vandermonde([1.0, 1.0]) == (0, -math.inf)


def test_localization_k4_resolved_width():
    ratios = [pf.localization_ratio(xs, 40_000, SeedSpec(11, 40_000 * i), width=1.0)
              for i, xs in enumerate([(0, 0.5, 1, 2), (0, 0.3, 1.1, 2.5), (-1, 0, 0.2, 1.3)])]
    for (a, ea), (b, eb) in itertools.combinations(ratios, 2):
        assert abs(a - b) < 3 * math.hypot(ea, eb)


def test_localization_k4_printed_width_differs():
    r1, e1 = pf.localization_ratio((0, 0.5, 1, 2), 20_000, SeedSpec(12), width=2.0)
    r2, e2 = pf.localization_ratio((0, 0.3, 1.1, 2.5), 20_000, SeedSpec(13), width=2.0)
    assert abs(r1 - r2) > 3 * math.hypot(e1, e2)
