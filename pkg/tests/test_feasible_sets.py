"""Norm balls: linear minimization oracles, projections, and constants.

Frozen reference values come from 40-digit evaluations of the closed forms;
the sampled checks compare oracle answers against dense boundary scans.
"""

import math

import numpy as np
import pytest

from projfree.feasible_sets import GroupLpqBall, LpBall, SchattenPBall

RNG = np.random.default_rng(123)


def _l15_boundary_2d(samples: int) -> np.ndarray:
    """Dense boundary of the 2-D unit l_1.5 ball via the angle map
    (|cos t|^(4/3), |sin t|^(4/3)) with all four sign patterns."""
    t = np.linspace(0.0, np.pi / 2, samples)
    base = np.stack([np.cos(t) ** 2, np.sin(t) ** 2], axis=1) ** (2.0 / 3.0)
    quads = [np.array([sx, sy]) for sx in (1, -1) for sy in (1, -1)]
    return np.concatenate([base * q for q in quads], axis=0)


# ---------------------------------------------------------------------------
# lmo


def test_lmo_l2_antiradial():
    ball = LpBall(p=2.0, r=1.0, d=2)
    np.testing.assert_allclose(
        ball.lmo(np.array([3.0, 4.0])), [-0.6, -0.8], atol=1e-12
    )


def test_lmo_linf_sign_rule_with_zero():
    ball = LpBall(p=np.inf, r=2.0, d=3)
    np.testing.assert_allclose(
        ball.lmo(np.array([1.0, -3.0, 0.0])), [-2.0, 2.0, 0.0], atol=0.0
    )


def test_lmo_l1_picks_largest_coordinate():
    ball = LpBall(p=1.0, r=1.0, d=3)
    np.testing.assert_allclose(
        ball.lmo(np.array([1.0, -3.0, 0.0])), [0.0, 1.0, 0.0], atol=0.0
    )


def test_lmo_l1_tie_breaks_to_lowest_index():
    ball = LpBall(p=1.0, r=1.0, d=3)
    v = ball.lmo(np.array([2.0, -2.0, 2.0]))
    np.testing.assert_allclose(v, [-1.0, 0.0, 0.0], atol=0.0)


def test_lmo_l15_frozen():
    ball = LpBall(p=1.5, r=1.0, d=2)
    c = np.array([1.0, 2.0])
    v = ball.lmo(c)
    np.testing.assert_allclose(
        v, [-0.2311204247835449, -0.92448169913417961], atol=1e-12
    )
    assert float(v @ c) == pytest.approx(-2.0800838230519041, abs=1e-12)


def test_lmo_l15_beats_dense_boundary_scan():
    ball = LpBall(p=1.5, r=1.0, d=2)
    c = np.array([1.0, 2.0])
    pts = _l15_boundary_2d(100_000)
    brute = float((pts @ c).min())
    assert float(ball.lmo(c) @ c) <= brute + 1e-3


def test_lmo_zero_direction_is_deterministic():
    for region in (
        LpBall(p=1.5, r=2.0, d=3),
        SchattenPBall(p=2.0, r=1.0, m=2, n=3),
        GroupLpqBall(p=2.0, q=1.5, r=1.0, m=2, n=3),
    ):
        c = np.zeros(region.shape)
        v = region.lmo(c)
        expected = np.zeros(region.shape)
        expected.flat[0] = region.r
        np.testing.assert_allclose(v, expected, atol=0.0)


@pytest.mark.parametrize(
    "region",
    [
        LpBall(p=1.0, r=1.5, d=5),
        LpBall(p=1.5, r=2.0, d=5),
        LpBall(p=2.0, r=0.7, d=5),
        LpBall(p=3.0, r=1.0, d=5),
        LpBall(p=np.inf, r=2.5, d=5),
        SchattenPBall(p=1.5, r=1.2, m=4, n=3),
        SchattenPBall(p=2.0, r=3.0, m=3, n=3),
        GroupLpqBall(p=1.5, q=1.75, r=1.1, m=3, n=4),
        GroupLpqBall(p=2.0, q=2.0, r=2.0, m=3, n=4),
    ],
)
def test_lmo_duality_identity(region):
    # <lmo(c), c> = -r * dual_norm(c), and the answer sits on the boundary.
    for _ in range(5):
        c = RNG.standard_normal(region.shape)
        v = region.lmo(c)
        assert float(np.vdot(v, c)) == pytest.approx(
            -region.r * region.dual_norm(c), rel=1e-9, abs=1e-9
        )
        assert region.norm(v) == pytest.approx(region.r, rel=1e-9)
        assert region.contains(v, tol=1e-8)


def test_lmo_positively_homogeneous_in_direction():
    region = LpBall(p=1.5, r=1.0, d=4)
    c = RNG.standard_normal(4)
    for a in (0.1, 1.0, 250.0):
        np.testing.assert_allclose(region.lmo(a * c), region.lmo(c), atol=1e-12)


def test_lmo_shape_mismatch():
    with pytest.raises(ValueError):
        LpBall(p=2.0, r=1.0, d=3).lmo(np.ones(4))
    with pytest.raises(ValueError):
        SchattenPBall(p=2.0, r=1.0, m=2, n=2).lmo(np.ones((3, 2)))


# ---------------------------------------------------------------------------
# projection


def test_project_l2_radial():
    ball = LpBall(p=2.0, r=1.0, d=2)
    np.testing.assert_allclose(
        ball.project(np.array([3.0, 4.0])), [0.6, 0.8], atol=1e-12
    )


def test_project_l1_symmetric_point():
    ball = LpBall(p=1.0, r=1.0, d=2)
    np.testing.assert_allclose(
        ball.project(np.array([1.0, 1.0])), [0.5, 0.5], atol=1e-12
    )


def test_project_linf_clips():
    ball = LpBall(p=np.inf, r=1.0, d=3)
    np.testing.assert_allclose(
        ball.project(np.array([3.0, -0.5, -2.0])), [1.0, -0.5, -1.0], atol=0.0
    )


def test_project_interior_passthrough():
    for region in (
        LpBall(p=1.5, r=1.0, d=3),
        LpBall(p=3.0, r=1.0, d=3),  # no general projection, but feasible is id
        SchattenPBall(p=2.0, r=5.0, m=2, n=2),
        GroupLpqBall(p=2.0, q=1.5, r=4.0, m=2, n=2),
    ):
        x = np.full(region.shape, 0.1)
        np.testing.assert_allclose(region.project(x), x, atol=1e-12)


def test_project_l15_frozen():
    ball = LpBall(p=1.5, r=1.0, d=2)
    got = ball.project(np.array([1.0, 2.0]))
    np.testing.assert_allclose(
        got, [0.32000487666420174, 0.87534845448283206], atol=1e-8
    )


def test_project_l15_beats_dense_boundary_scan():
    ball = LpBall(p=1.5, r=1.0, d=2)
    x = np.array([1.0, 2.0])
    got = ball.project(x)
    pts = _l15_boundary_2d(250_000)
    brute = float(np.sqrt(((pts - x) ** 2).sum(axis=1)).min())
    assert float(np.linalg.norm(got - x)) <= brute + 1e-3


@pytest.mark.parametrize(
    "region",
    [
        LpBall(p=1.0, r=1.0, d=6),
        LpBall(p=1.3, r=0.8, d=6),
        LpBall(p=2.0, r=1.5, d=6),
        LpBall(p=np.inf, r=0.5, d=6),
        SchattenPBall(p=1.5, r=1.0, m=3, n=4),
        SchattenPBall(p=np.inf, r=1.0, m=3, n=3),
        GroupLpqBall(p=2.0, q=1.5, r=1.0, m=3, n=4),
    ],
)
def test_project_idempotent_and_variational(region):
    rng = np.random.default_rng(7)
    for _ in range(4):
        x = 3.0 * rng.standard_normal(region.shape)
        px = region.project(x)
        assert region.contains(px, tol=1e-7)
        np.testing.assert_allclose(region.project(px), px, atol=1e-9)
        # variational inequality: <x - px, z - px> <= 0 for feasible z
        for _ in range(20):
            z = region.random_feasible(rng)
            assert float(np.vdot(x - px, z - px)) <= 1e-6


def test_project_unsupported_exponent():
    with pytest.raises(ValueError):
        LpBall(p=3.0, r=1.0, d=2).project(np.array([5.0, 5.0]))
    with pytest.raises(ValueError):
        GroupLpqBall(p=1.5, q=1.5, r=1.0, m=2, n=2).project(np.ones((2, 2)))


def test_project_schatten_acts_on_spectrum():
    # Diagonal input: the matrix projection must equal the vector projection
    # of the singular values placed back on the diagonal.
    ball = SchattenPBall(p=2.0, r=1.0, m=2, n=2)
    got = ball.project(np.diag([3.0, 4.0]))
    np.testing.assert_allclose(got, np.diag([0.6, 0.8]), atol=1e-10)


# ---------------------------------------------------------------------------
# norms and constants


def test_group_norm_frozen():
    ball = GroupLpqBall(p=1.5, q=1.75, r=1.0, m=2, n=2)
    x = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert ball.norm(x) == pytest.approx(6.303135963057488, rel=1e-12)
    assert ball.dual_norm(x) == pytest.approx(4.8028641928177327, rel=1e-12)


def test_schatten_norm_frozen():
    ball = SchattenPBall(p=1.5, r=1.0, m=2, n=2)
    x = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert ball.norm(x) == pytest.approx(5.5279405440405873, rel=1e-10)
    assert ball.dual_norm(x) == pytest.approx(5.4655326951342164, rel=1e-10)


def test_schatten_norm_of_diagonal_matches_vector_norm():
    ball = SchattenPBall(p=1.5, r=1.0, m=2, n=2)
    assert ball.norm(np.diag([3.0, 4.0])) == pytest.approx(
        5.5842503764800294, rel=1e-12
    )


def test_holder_inequality_sampled():
    for region in (
        LpBall(p=1.5, r=1.0, d=5),
        SchattenPBall(p=1.5, r=1.0, m=3, n=3),
        GroupLpqBall(p=1.5, q=1.75, r=1.0, m=3, n=3),
    ):
        for _ in range(10):
            x = RNG.standard_normal(region.shape)
            y = RNG.standard_normal(region.shape)
            assert abs(float(np.vdot(x, y))) <= region.norm(x) * region.dual_norm(
                y
            ) * (1.0 + 1e-9)


def test_strong_convexity_values():
    assert LpBall(p=1.5, r=2.0, d=4).strong_convexity() == pytest.approx(0.25)
    assert LpBall(p=2.0, r=1.0, d=4).strong_convexity() == pytest.approx(1.0)
    assert SchattenPBall(p=2.0, r=12000.0, m=40, n=30).strong_convexity() == (
        pytest.approx(1.0 / 12000.0, rel=1e-12)
    )
    assert GroupLpqBall(
        p=1.5, q=1.75, r=2.0, m=3, n=3
    ).strong_convexity() == pytest.approx(0.25)


def test_strong_convexity_rejects_flat_exponents():
    for region in (
        LpBall(p=1.0, r=1.0, d=3),
        LpBall(p=3.0, r=1.0, d=3),
        LpBall(p=np.inf, r=1.0, d=3),
        SchattenPBall(p=2.5, r=1.0, m=2, n=2),
        GroupLpqBall(p=2.0, q=3.0, r=1.0, m=2, n=2),
        GroupLpqBall(p=1.0, q=2.0, r=1.0, m=2, n=2),
    ):
        with pytest.raises(ValueError):
            region.strong_convexity()


def test_diameters():
    assert LpBall(p=1.5, r=2.0, d=9).diameter() == pytest.approx(4.0)
    # p <= 2 balls sit inside the l_2 ball of the same radius
    assert LpBall(p=1.5, r=2.0, d=9).euclidean_diameter() == pytest.approx(4.0)
    assert LpBall(p=3.0, r=2.0, d=4).euclidean_diameter() == pytest.approx(
        5.0396841995794927, rel=1e-12
    )
    assert LpBall(p=np.inf, r=1.0, d=9).euclidean_diameter() == pytest.approx(6.0)
    assert SchattenPBall(p=2.0, r=3.0, m=5, n=2).euclidean_diameter() == (
        pytest.approx(6.0)
    )
    assert SchattenPBall(p=np.inf, r=1.0, m=5, n=4).euclidean_diameter() == (
        pytest.approx(4.0)
    )
    assert GroupLpqBall(
        p=2.0, q=1.5, r=2.0, m=3, n=4
    ).euclidean_diameter() == pytest.approx(4.0)
    assert GroupLpqBall(
        p=np.inf, q=np.inf, r=1.0, m=4, n=9
    ).euclidean_diameter() == pytest.approx(2.0 * 3.0 * 2.0)


def test_euclidean_diameter_dominates_sampled_distances():
    for region in (
        LpBall(p=3.0, r=1.0, d=4),
        SchattenPBall(p=4.0, r=1.0, m=3, n=3),
        GroupLpqBall(p=3.0, q=2.5, r=1.0, m=3, n=3),
    ):
        rng = np.random.default_rng(17)
        cap = region.euclidean_diameter()
        for _ in range(50):
            a = region.random_boundary(rng)
            b = region.random_boundary(rng)
            assert float(np.linalg.norm((a - b).ravel())) <= cap * (1.0 + 1e-9)


def test_contains_tolerance():
    ball = LpBall(p=2.0, r=1.0, d=2)
    assert ball.contains(np.array([1.0, 0.0]))
    assert ball.contains(np.array([1.0 + 1e-10, 0.0]))
    assert not ball.contains(np.array([1.01, 0.0]))


def test_random_point_helpers():
    region = LpBall(p=1.5, r=2.0, d=5)
    rng = np.random.default_rng(0)
    b = region.random_boundary(rng)
    assert region.norm(b) == pytest.approx(region.r, rel=1e-9)
    f = region.random_feasible(rng)
    assert region.contains(f, tol=1e-9)
    u = region.random_direction(rng)
    assert float(np.linalg.norm(u)) == pytest.approx(1.0, abs=1e-12)


def test_constructor_validation():
    with pytest.raises(ValueError):
        LpBall(p=0.5, r=1.0, d=2)
    with pytest.raises(ValueError):
        LpBall(p=2.0, r=0.0, d=2)
    with pytest.raises(ValueError):
        LpBall(p=2.0, r=1.0, d=0)
    with pytest.raises(ValueError):
        SchattenPBall(p=2.0, r=1.0, m=0, n=2)
    with pytest.raises(ValueError):
        GroupLpqBall(p=2.0, q=0.5, r=1.0, m=2, n=2)


# ---------------------------------------------------------------------------
# oracle continuity


def test_oracle_continuity_doubled_constant_is_sharp():
    """On the unit l_2 ball the oracle map p -> lmo(p) satisfies
    ||lmo(p) - lmo(q)|| <= 2 ||p - q|| / (alpha (||p|| + ||q||)) with equality
    for equal-norm directions, so the bound without the factor 2 fails."""
    ball = LpBall(p=2.0, r=1.0, d=2)
    alpha = ball.strong_convexity()
    eps = 0.05
    p = np.array([1.0, eps])
    q = np.array([1.0, -eps])
    lhs = float(np.linalg.norm(ball.lmo(p) - ball.lmo(q)))
    np_, nq_ = np.linalg.norm(p), np.linalg.norm(q)
    doubled = 2.0 * float(np.linalg.norm(p - q)) / (alpha * (np_ + nq_))
    assert lhs <= doubled + 1e-12
    assert lhs > 0.5 * doubled * 1.99  # halving the constant breaks the bound


def test_oracle_continuity_doubled_constant_holds_sampled():
    ball = LpBall(p=1.5, r=1.3, d=4)
    alpha = ball.strong_convexity()
    rng = np.random.default_rng(99)
    for _ in range(200):
        p = rng.standard_normal(4)
        q = rng.standard_normal(4)
        lhs = float(np.linalg.norm(ball.lmo(p) - ball.lmo(q)))
        rhs = (
            2.0
            * float(np.linalg.norm(p - q))
            / (alpha * (np.linalg.norm(p) + np.linalg.norm(q)))
        )
        assert lhs <= rhs + 1e-9
