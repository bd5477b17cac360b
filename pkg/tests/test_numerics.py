"""Scalar and matrix primitives: norms, dual exponents, SVD, power iteration.

Reference values were frozen from a 40-digit multi-precision evaluation of
the defining formulas; the SVD checks compare against LAPACK, which uses a
different algorithm than the one implemented here.
"""

import numpy as np
import pytest

from projfree.numerics import (
    as_matrix,
    as_vector,
    dual_exponent,
    lp_norm,
    power_iteration_sym,
    svd,
)


# ---------------------------------------------------------------------------
# lp_norm


def test_lp_norm_pythagorean():
    assert lp_norm(np.array([3.0, 4.0]), 2.0) == pytest.approx(5.0, abs=1e-12)


def test_lp_norm_l1_counts():
    assert lp_norm(np.array([1.0, 1.0, 1.0]), 1.0) == pytest.approx(3.0, abs=1e-12)
    assert lp_norm(np.array([1.0, -1.0, 1.0]), 1.0) == pytest.approx(3.0, abs=1e-12)


def test_lp_norm_linf_is_max():
    assert lp_norm(np.array([1.0, -3.0, 2.0]), np.inf) == pytest.approx(3.0)


def test_lp_norm_frozen_values():
    # (1 + 2^1.5)^(2/3) and friends, evaluated at 40 digits.
    assert lp_norm(np.array([1.0, 2.0]), 1.5) == pytest.approx(
        2.4472608147714755, rel=1e-13
    )
    assert lp_norm(np.array([0.5, 0.5]), 1.2) == pytest.approx(
        0.8908987181403393, rel=1e-13
    )
    assert lp_norm(np.array([2.0, 3.0, 6.0]), 3.0) == pytest.approx(
        6.3079935486632676, rel=1e-13
    )


def test_lp_norm_zero_vector():
    assert lp_norm(np.zeros(4), 1.5) == 0.0


def test_lp_norm_scaling_homogeneity():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(6)
    for p in (1.0, 1.3, 2.0, 4.0, np.inf):
        assert lp_norm(3.5 * x, p) == pytest.approx(3.5 * lp_norm(x, p), rel=1e-12)


def test_lp_norm_rejects_bad_exponent():
    with pytest.raises(ValueError):
        lp_norm(np.array([1.0, 2.0]), 0.5)


def test_lp_norm_rescales_to_avoid_overflow():
    # Naive sum of cubes would overflow; the max-rescaled form must not.
    x = np.array([1e300, 1e300])
    assert lp_norm(x, 3.0) == pytest.approx(1e300 * 2.0 ** (1.0 / 3.0), rel=1e-12)


# ---------------------------------------------------------------------------
# dual_exponent


def test_dual_exponent_table():
    assert dual_exponent(1.5) == pytest.approx(3.0, rel=1e-13)
    assert dual_exponent(1.2) == pytest.approx(6.0, rel=1e-13)
    assert dual_exponent(3.0) == pytest.approx(1.5, rel=1e-13)
    assert dual_exponent(2.0) == pytest.approx(2.0, rel=1e-13)
    assert dual_exponent(np.inf) == 1.0


def test_dual_exponent_rejects_p_equal_one():
    # The l_1 conjugate is infinite and is special-cased by the oracles.
    with pytest.raises(ValueError):
        dual_exponent(1.0)


def test_dual_exponent_conjugacy():
    for p in (1.1, 1.5, 1.9, 2.0, 2.5, 7.0):
        q = dual_exponent(p)
        assert 1.0 / p + 1.0 / q == pytest.approx(1.0, abs=1e-12)
        assert dual_exponent(q) == pytest.approx(p, rel=1e-12)


def test_dual_exponent_rejects_bad_exponent():
    with pytest.raises(ValueError):
        dual_exponent(0.9)


# ---------------------------------------------------------------------------
# array coercion


def test_as_vector_coerces_and_checks():
    v = as_vector([1, 2, 3])
    assert v.dtype == np.float64
    assert v.shape == (3,)
    with pytest.raises(ValueError):
        as_vector(np.ones((2, 2)))
    with pytest.raises(ValueError):
        as_vector([1.0, np.nan])


def test_as_matrix_coerces_and_checks():
    m = as_matrix([[1, 2], [3, 4]])
    assert m.dtype == np.float64
    assert m.shape == (2, 2)
    with pytest.raises(ValueError):
        as_matrix(np.ones(3))
    with pytest.raises(ValueError):
        as_matrix([[1.0, np.inf]])


# ---------------------------------------------------------------------------
# svd


def test_svd_diagonal():
    d = svd(np.diag([3.0, 1.0]))
    np.testing.assert_allclose(np.sort(d.s)[::-1], [3.0, 1.0], atol=1e-12)


def test_svd_permuted_diagonal():
    d = svd(np.array([[0.0, 2.0], [1.0, 0.0]]))
    np.testing.assert_allclose(np.sort(d.s)[::-1], [2.0, 1.0], atol=1e-12)


def test_svd_reconstruction_8x5_seed7():
    a = np.random.default_rng(7).standard_normal((8, 5))
    d = svd(a)
    rec = (d.u * d.s) @ d.v.T
    assert np.abs(rec - a).max() <= 1e-8


@pytest.mark.parametrize("shape", [(8, 5), (5, 8), (6, 6), (1, 4), (4, 1)])
def test_svd_factors_are_orthonormal(shape):
    a = np.random.default_rng(11).standard_normal(shape)
    d = svd(a)
    k = min(shape)
    assert d.u.shape == (shape[0], k)
    assert d.v.shape == (shape[1], k)
    np.testing.assert_allclose(d.u.T @ d.u, np.eye(k), atol=1e-8)
    np.testing.assert_allclose(d.v.T @ d.v, np.eye(k), atol=1e-8)


@pytest.mark.parametrize("shape", [(8, 5), (5, 8), (7, 7)])
def test_svd_singular_values_match_lapack(shape):
    a = np.random.default_rng(29).standard_normal(shape)
    mine = np.sort(svd(a).s)[::-1]
    ref = np.linalg.svd(a, compute_uv=False)
    np.testing.assert_allclose(mine, ref, atol=1e-8)


def test_svd_nonnegative_sorted_spectrum():
    a = np.random.default_rng(3).standard_normal((6, 4))
    s = svd(a).s
    assert np.all(s >= 0.0)
    assert np.all(np.diff(s) <= 1e-12)


def test_svd_rank_deficient():
    a = np.outer([1.0, 2.0, 3.0], [4.0, 5.0])
    d = svd(a)
    rec = (d.u * d.s) @ d.v.T
    np.testing.assert_allclose(rec, a, atol=1e-10)
    assert d.s[1] <= 1e-10


def test_svd_zero_matrix():
    d = svd(np.zeros((3, 2)))
    np.testing.assert_allclose(d.s, 0.0, atol=0.0)
    np.testing.assert_allclose(d.u.T @ d.u, np.eye(2), atol=1e-12)


# ---------------------------------------------------------------------------
# power iteration


def test_power_iteration_known_2x2():
    a = np.array([[2.0, 1.0], [1.0, 2.0]])
    assert power_iteration_sym(a) == pytest.approx(3.0, rel=1e-7)


def test_power_iteration_matches_eigvalsh():
    rng = np.random.default_rng(5)
    b = rng.standard_normal((6, 6))
    a = b @ b.T
    ref = float(np.linalg.eigvalsh(a)[-1])
    assert power_iteration_sym(a) == pytest.approx(ref, rel=1e-6)


def test_power_iteration_zero_matrix():
    assert power_iteration_sym(np.zeros((3, 3))) == pytest.approx(0.0, abs=1e-12)
