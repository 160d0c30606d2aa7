import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from ginibre_evolution import schur
from ginibre_evolution.errors import DegenerateInputError, InvalidArgumentError, NumericalFailure
from ginibre_evolution.process import MatrixSample, path_block, sample_increment
from ginibre_evolution.rng import SeedSpec
from ginibre_evolution.spectral import (Spectrum, SpinProfile, count_real_in, det_signs, real_schur_spectrum,
                                        spin_at, spin_right, spin_via_det_sign)

METHODS = ["lapack", "francis"]


@pytest.mark.parametrize("method", METHODS)
def test_diagonal(method):
    s = real_schur_spectrum(np.diag([1.0, -1.0]), method)
    assert s.real_eigs.tolist() == [-1.0, 1.0]
    assert s.complex_pairs.shape == (0, 2)


@pytest.mark.parametrize("method", METHODS)
def test_rotation(method):
    s = real_schur_spectrum(np.array([[0.0, 1.0], [-1.0, 0.0]]), method)
    assert s.num_real == 0
    np.testing.assert_allclose(s.complex_pairs, [[0.0, 1.0]], atol=1e-15)


@pytest.mark.parametrize("method", METHODS)
def test_matches_characteristic_polynomial_roots(method):
    m = sample_increment(20, 1.0, SeedSpec(2024)).entries
    s = real_schur_spectrum(m, method)
    ours = np.concatenate([s.real_eigs, s.complex_pairs[:, 0] + 1j * s.complex_pairs[:, 1],
                           s.complex_pairs[:, 0] - 1j * s.complex_pairs[:, 1]])
    # independent oracle: companion-matrix roots of the characteristic polynomial in extended precision
    import mpmath
    mpmath.mp.dps = 60
    mat = mpmath.matrix(m.tolist())
    charpoly = _charpoly_mp(mat)
    roots = mpmath.polyroots(charpoly, maxsteps=400, extraprec=400)
    ref = np.array([complex(r) for r in roots])
    for z in ours:
        assert np.min(np.abs(ref - z)) < 1e-8


def _charpoly_mp(a):
    # Faddeev-LeVerrier in 60-digit arithmetic; coefficients from highest degree down
    import mpmath
    n = a.rows
    coeffs = [mpmath.mpf(1)]
    m = mpmath.zeros(n, n)
    ident = mpmath.eye(n)
    for k in range(1, n + 1):
        m = a * m + coeffs[-1] * ident
        c = -sum((a * m)[i, i] for i in range(n)) / k
        coeffs.append(c)
    return coeffs


def test_francis_matches_lapack_counts():
    for n in [1, 2, 3, 7, 30]:
        for i in range(10):
            m = sample_increment(n, 1.0, SeedSpec(n, i)).entries
            a = real_schur_spectrum(m, "lapack")
            b = real_schur_spectrum(m, "francis")
            assert a.num_real == b.num_real
            np.testing.assert_allclose(a.real_eigs, b.real_eigs, atol=1e-10)


def test_francis_sweep_cap():
    m = sample_increment(30, 1.0, SeedSpec(1)).entries
    with pytest.raises(NumericalFailure):
        schur.eigenvalues(m, max_sweeps=1)


def test_nonfinite_rejected():
    with pytest.raises(InvalidArgumentError):
        real_schur_spectrum(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(InvalidArgumentError):
        real_schur_spectrum(np.array([[1.0, 0.0, 0.0]]))
    with pytest.raises(InvalidArgumentError):
        real_schur_spectrum(np.eye(2), "bogus")


def test_spin_examples():
    s = Spectrum(np.array([-1.0, 1.0]), np.zeros((0, 2)), 2)
    assert spin_at(s, 0.0) == -1
    assert spin_at(s, -5.0) == 1
    assert spin_at(s, 5.0) == 1
    # at an eigenvalue: strict count for spin_at, inclusive for the right limit
    assert spin_at(s, -1.0) == 1
    assert spin_right(s, -1.0) == -1


def test_spin_profile_right_limits():
    prof = SpinProfile(np.array([-2.0, 0.5, 3.0]))
    for k, x in enumerate(prof.jump_points):
        assert prof(np.nextafter(x, np.inf)) == (-1) ** (k + 1)
        assert prof.right_limit(x) == (-1) ** (k + 1)
    assert prof.weights().tolist() == [-1, 1, -1]


def test_det_sign_examples():
    assert spin_via_det_sign(np.diag([-1.0, 1.0]), 0.0) == -1
    assert spin_via_det_sign(np.array([[0.0, 1.0], [-1.0, 0.0]]), 0.0) == 1
    with pytest.raises(DegenerateInputError):
        spin_via_det_sign(np.diag([-1.0, 1.0]), 1.0)
    with pytest.raises(DegenerateInputError):
        det_signs(np.diag([-1.0, 1.0])[None], [1.0])


def test_det_sign_agrees_with_spectrum_50x50():
    rng = np.random.default_rng(7)
    mats = path_block(50, [1.0], 99, 0, 1000)[:, 0]
    xs = rng.uniform(-10, 10, size=1000)
    for m, x in zip(mats, xs):
        s = real_schur_spectrum(m)
        assert spin_at(s, x) == spin_via_det_sign(m, x)
    batch = det_signs(mats[:50], xs[:3])
    for i in range(50):
        for j in range(3):
            assert batch[i, j] == spin_via_det_sign(mats[i], xs[j])


def test_matrix_sample_accepted():
    m = sample_increment(4, 1.0, SeedSpec(3))
    assert isinstance(m, MatrixSample)
    s = real_schur_spectrum(m)
    assert spin_at(s, 0.1) == spin_via_det_sign(m, 0.1)


def test_count_real_in():
    s = Spectrum(np.array([-1.0, 1.0]), np.zeros((0, 2)), 2)
    assert count_real_in(s, 0, 2) == 1
    assert count_real_in(s, -2, 2) == 2
    assert count_real_in(s, 5, 6) == 0
    assert count_real_in(s, -1, 1) == 0
    assert count_real_in(s, -1, 1, half_open=True) == 1
    with pytest.raises(InvalidArgumentError):
        count_real_in(s, 1, 1)


def test_spectrum_invariants_enforced():
    with pytest.raises(InvalidArgumentError):
        Spectrum(np.array([1.0]), np.zeros((0, 2)), 2)
    with pytest.raises(InvalidArgumentError):
        Spectrum(np.array([]), np.array([[0.0, -1.0]]), 2)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 25), seed=st.integers(0, 2**32), x=st.floats(-6, 6), method=st.sampled_from(METHODS))
def test_spectral_properties(n, seed, x, method):
    m = sample_increment(n, 1.0, SeedSpec(seed)).entries
    s = real_schur_spectrum(m, method)
    assert s.num_real % 2 == n % 2
    assert np.all(np.diff(s.real_eigs) >= 0)
    trace = s.real_eigs.sum() + 2 * s.complex_pairs[:, 0].sum()
    assert abs(trace - np.trace(m)) <= 1e-8 * max(1.0, np.linalg.norm(m))
    lo = s.real_eigs.min() - 1 if s.num_real else -1.0
    hi = s.real_eigs.max() + 1 if s.num_real else 1.0
    assert spin_at(s, lo) == 1
    assert spin_at(s, hi) == (-1) ** s.num_real
    if abs(np.linalg.det(m - x * np.eye(n))) > 1e-12:
        assert spin_at(s, x) == spin_via_det_sign(m, x)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (4, 4), elements=st.floats(-10, 10)))
def test_arbitrary_matrices_parity(a):
    s = real_schur_spectrum(a)
    assert s.num_real % 2 == 0
