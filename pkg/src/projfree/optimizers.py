"""Projection-free and projected first-order methods.

Conventions shared by every run function:

* w_0 is the initial point (default: an oracle vertex along a random unit
  direction); record t covers the iterate produced by update t, so traces
  are 1-indexed and hold exactly `iters` rows.
* the Frank-Wolfe gap and the unperturbed loss are recorded at every new
  iterate for diagnostics, outside the timed step.
* timings are only collected (and serialized) when record_timings is set; a
  default run is bit-deterministic given its seed.
"""

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .diagnostics import fw_gap
from .errors import DivergenceError, NumericFailure
from .perturbation import PerturbedLoss, sample_unit_sphere
from .trace import Trace

DIVERGENCE_GUARD = 1e12

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0  # 1/phi


# ---------------------------------------------------------------------------
# step-size rules


@dataclass
class PredefinedDecay:
    """gamma_t = 2 / (t + 1)."""


@dataclass
class QuadraticLineSearch:
    """Minimizer of the quadratic upper model, clamped to [0, 1]."""

    smoothness: float


@dataclass
class ExactLineSearch:
    """Golden-section search on the chord, interval tolerance `tol`."""

    tol: float = 1e-8


@dataclass
class ShortStep:
    """Dual-norm short step gamma = min(1, alpha * ||g||_* / (4 L))."""

    smoothness: float
    alpha: float


StepRule = (PredefinedDecay, QuadraticLineSearch, ExactLineSearch, ShortStep)


def step_size_predefined(t: int) -> float:
    """The open-loop schedule 2 / (t + 1) for t >= 1."""
    if t < 1:
        raise ValueError(f"step schedule is defined for t >= 1, got {t}")
    return 2.0 / (t + 1.0)


def theta_schedule(t: int):
    """Averaging weights (theta_t, Theta_t) = (t, t (t + 1) / 2).

    The ratio theta_t / Theta_t equals the step 2 / (t + 1) exactly, which is
    what makes the incremental gradient-average update valid.
    """
    if t < 1:
        raise ValueError(f"theta schedule is defined for t >= 1, got {t}")
    return t, t * (t + 1) // 2


def line_search_quadratic(directional: float, dist2: float, smoothness: float) -> float:
    """argmin_{gamma in [0,1]} gamma * directional + gamma^2 * L * dist2 / 2.

    `directional` is <v - w, grad> and dist2 is ||v - w||^2.  Non-descent
    directions return 0; a degenerate chord (dist2 = 0) returns 0.
    """
    if smoothness <= 0.0:
        raise ValueError(f"smoothness must be > 0, got {smoothness}")
    if dist2 < 0.0:
        raise ValueError(f"dist2 must be >= 0, got {dist2}")
    if dist2 == 0.0 or directional >= 0.0:
        return 0.0
    return min(1.0, -directional / (smoothness * dist2))


def short_step(grad_dual_norm: float, alpha: float, smoothness: float) -> float:
    """gamma = 1 when L < alpha * ||g||_* / 4, else alpha * ||g||_* / (4 L)."""
    if smoothness <= 0.0:
        raise ValueError(f"smoothness must be > 0, got {smoothness}")
    if alpha <= 0.0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    if grad_dual_norm < 0.0:
        raise ValueError(f"grad_dual_norm must be >= 0, got {grad_dual_norm}")
    scaled = alpha * grad_dual_norm / 4.0
    if smoothness < scaled:
        return 1.0
    return scaled / smoothness


def exact_line_search(phi: Callable[[float], float], tol: float = 1e-8) -> float:
    """Golden-section minimization of phi over [0, 1].

    Returns the best point actually evaluated (endpoints included), so the
    result never increases phi relative to gamma = 0; for unimodal phi it is
    within tol of the true minimizer.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be > 0, got {tol}")
    a, b = 0.0, 1.0
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = phi(c)
    fd = phi(d)
    best_g, best_v = (c, fc) if fc <= fd else (d, fd)
    for g, v in ((0.0, phi(0.0)), (1.0, phi(1.0))):
        if v < best_v:
            best_g, best_v = g, v
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = phi(c)
            if fc < best_v:
                best_g, best_v = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = phi(d)
            if fd < best_v:
                best_g, best_v = d, fd
    return best_g


# ---------------------------------------------------------------------------
# shared run plumbing


@dataclass
class IterateSnapshot:
    """Mid-run state handed to an observer callback (used by tests)."""

    t: int
    w: np.ndarray
    v: Optional[np.ndarray]
    z: Optional[np.ndarray]
    p: Optional[np.ndarray]
    gamma: float


class _Clock:
    """Milliseconds since construction, or None when timing is off."""

    def __init__(self, enabled: bool):
        self.enabled = enabled
        self._start = time.perf_counter() if enabled else 0.0

    def lap(self) -> Optional[float]:
        if not self.enabled:
            return None
        now = time.perf_counter()
        out = (now - self._start) * 1e3
        self._start = now
        return out


def _split_loss(loss):
    """(objective actually optimized, unperturbed loss for diagnostics)."""
    if isinstance(loss, PerturbedLoss):
        return loss, loss.base
    return loss, loss


def _guard_finite(g: np.ndarray, t: int) -> np.ndarray:
    if not np.all(np.isfinite(g)):
        raise DivergenceError(f"non-finite gradient at iteration {t}", t)
    return g


def default_init(region, rng: np.random.Generator) -> np.ndarray:
    """A feasible vertex: the oracle answer along a random unit direction."""
    size = int(np.prod(region.shape))
    direction = sample_unit_sphere(size, rng).reshape(region.shape)
    return region.lmo(direction)


def _prepare(loss, region, init, rng):
    if rng is None:
        rng = np.random.default_rng(0)
    if init is None:
        w = default_init(region, rng)
    else:
        w = np.array(init, dtype=np.float64)
        if w.shape != tuple(region.shape):
            raise ValueError(
                f"init shape {w.shape} does not match region shape {region.shape}"
            )
        if not region.contains(w, tol=1e-8):
            raise ValueError("init must be feasible")
    if loss.shape != tuple(region.shape):
        raise ValueError(
            f"loss expects parameters of shape {loss.shape}, region has {region.shape}"
        )
    return w, rng


def _record(
    trace: Trace,
    t: int,
    objective,
    base,
    region,
    w: np.ndarray,
    gamma: float,
    batch: Optional[int],
    grad_norm: float,
    step_ms: Optional[float],
    oracle_ms: Optional[float],
    proj_ms: Optional[float],
) -> None:
    f_val = base.evaluate(w)
    if not math.isfinite(f_val):
        raise NumericFailure(f"non-finite loss at iteration {t}")
    h_val = None
    if objective is not base:
        h_val = objective.evaluate(w)
    gap = fw_gap(region, w, base.gradient(w))
    trace.append(
        t, f_val, h_val, gap, gamma, batch, grad_norm,
        step_ms=step_ms, oracle_ms=oracle_ms, proj_ms=proj_ms,
    )
    if f_val > DIVERGENCE_GUARD:
        raise DivergenceError(
            f"loss exceeded divergence guard ({f_val:.3e}) at iteration {t}", t
        )


def _chord_step(rule, t, objective, region, w, v, g) -> float:
    """Step size along the chord w -> v for the configured rule."""
    if isinstance(rule, PredefinedDecay):
        return step_size_predefined(t)
    if isinstance(rule, QuadraticLineSearch):
        diff = v - w
        directional = float(np.vdot(diff, g))
        dist2 = float(np.vdot(diff, diff))
        return line_search_quadratic(directional, dist2, rule.smoothness)
    if isinstance(rule, ExactLineSearch):
        return exact_line_search(
            lambda gamma: objective.evaluate(w + gamma * (v - w)), rule.tol
        )
    if isinstance(rule, ShortStep):
        return short_step(region.dual_norm(g), rule.alpha, rule.smoothness)
    raise TypeError(f"unknown step rule: {rule!r}")


# ---------------------------------------------------------------------------
# run functions


def fw_run(
    loss,
    region,
    rule,
    iters: int,
    init=None,
    rng=None,
    record_timings: bool = False,
    on_iterate=None,
) -> Trace:
    """Frank-Wolfe: move toward the oracle point of the current gradient.

    Update t forms w_t = (1 - gamma_t) w_{t-1} + gamma_t * lmo(grad(w_{t-1}))
    with gamma_t from the configured step rule.
    """
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    w, rng = _prepare(loss, region, init, rng)
    objective, base = _split_loss(loss)
    trace = Trace()
    for t in range(1, iters + 1):
        clock = _Clock(record_timings)
        g = _guard_finite(objective.gradient(w), t)
        inner = _Clock(record_timings)
        v = region.lmo(g)
        oracle_ms = inner.lap()
        gamma = _chord_step(rule, t, objective, region, w, v, g)
        w = (1.0 - gamma) * w + gamma * v
        step_ms = clock.lap()
        grad_norm = float(np.linalg.norm(g.ravel()))
        _record(
            trace, t, objective, base, region, w, gamma, None, grad_norm,
            step_ms, oracle_ms, None,
        )
        if on_iterate is not None:
            on_iterate(IterateSnapshot(t=t, w=w, v=v, z=None, p=None, gamma=gamma))
    trace.final_point = w
    return trace


def _pa_core(
    loss,
    region,
    iters: int,
    init,
    rng,
    record_timings: bool,
    on_iterate,
    gradient_at,
) -> Trace:
    """Shared primal-averaging loop; gradient_at(t, z) supplies the search
    direction p_t (averaged, instantaneous, or stochastic) and the batch size."""
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    v_prev, rng = _prepare(loss, region, init, rng)
    objective, base = _split_loss(loss)
    w = v_prev.copy()
    trace = Trace()
    for t in range(1, iters + 1):
        clock = _Clock(record_timings)
        gamma = step_size_predefined(t)
        z = (1.0 - gamma) * w + gamma * v_prev
        p, batch = gradient_at(t, z)
        p = _guard_finite(p, t)
        inner = _Clock(record_timings)
        v = region.lmo(p)
        oracle_ms = inner.lap()
        w = (1.0 - gamma) * w + gamma * v
        step_ms = clock.lap()
        grad_norm = float(np.linalg.norm(p.ravel()))
        _record(
            trace, t, objective, base, region, w, gamma, batch, grad_norm,
            step_ms, oracle_ms, None,
        )
        if on_iterate is not None:
            on_iterate(IterateSnapshot(t=t, w=w, v=v, z=z, p=p, gamma=gamma))
        v_prev = v
    trace.final_point = w
    return trace


def pa_run(
    loss,
    region,
    option: str = "A",
    iters: int = 100,
    init=None,
    rng=None,
    record_timings: bool = False,
    on_iterate=None,
) -> Trace:
    """Primal averaging: oracle directions come from the iterate z_t between
    w and the previous vertex.

    Option "A" aggregates gradients with weights theta_t = t (kept as a
    running average); option "B" uses the instantaneous gradient at z_t.
    """
    option = option.upper()
    if option not in ("A", "B"):
        raise ValueError(f"pa_run option must be 'A' or 'B', got {option!r}")
    objective = loss

    state = {"p": None, "Theta": 0}

    def gradient_at(t, z):
        g = objective.gradient(z)
        if option == "B":
            return g, None
        theta, big_theta = theta_schedule(t)
        state["Theta"] = big_theta
        if state["p"] is None:
            state["p"] = g
        else:
            state["p"] = ((big_theta - theta) * state["p"] + theta * g) / big_theta
        return state["p"], None

    return _pa_core(
        loss, region, iters, init, rng, record_timings, on_iterate, gradient_at
    )


def spa_batch_size(t: int, n_samples: int) -> int:
    """Growing batch |S_t| = min(t^4, N)."""
    if t < 1:
        raise ValueError(f"batch schedule is defined for t >= 1, got {t}")
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    return min(t**4, n_samples)


def spa_run(
    loss,
    region,
    iters: int = 100,
    init=None,
    rng=None,
    record_timings: bool = False,
    on_iterate=None,
) -> Trace:
    """Stochastic primal averaging: instantaneous-direction updates driven by
    a without-replacement batch gradient with |S_t| = min(t^4, N).

    Once the schedule reaches N the update coincides with the deterministic
    instantaneous-gradient run in exact arithmetic.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    n = loss.n_samples

    def gradient_at(t, z):
        size = spa_batch_size(t, n)
        if size == n:
            idx = np.arange(n)
        else:
            idx = rng.choice(n, size=size, replace=False)
        return loss.stochastic_gradient(z, idx), size

    return _pa_core(
        loss, region, iters, init, rng, record_timings, on_iterate, gradient_at
    )


def projected_gd_run(
    loss,
    region,
    eta: float,
    iters: int,
    init=None,
    rng=None,
    record_timings: bool = False,
    on_iterate=None,
) -> Trace:
    """Projected gradient descent with a constant step size."""
    if eta <= 0.0:
        raise ValueError(f"eta must be > 0, got {eta}")
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    w, rng = _prepare(loss, region, init, rng)
    objective, base = _split_loss(loss)
    trace = Trace()
    for t in range(1, iters + 1):
        clock = _Clock(record_timings)
        g = _guard_finite(objective.gradient(w), t)
        y = w - eta * g
        inner = _Clock(record_timings)
        w = region.project(y)
        proj_ms = inner.lap()
        step_ms = clock.lap()
        grad_norm = float(np.linalg.norm(g.ravel()))
        _record(
            trace, t, objective, base, region, w, eta, None, grad_norm,
            step_ms, None, proj_ms,
        )
        if on_iterate is not None:
            on_iterate(IterateSnapshot(t=t, w=w, v=None, z=None, p=g, gamma=eta))
    trace.final_point = w
    return trace


def projected_sgd_run(
    loss,
    region,
    eta0: float,
    batch: int,
    iters: int,
    init=None,
    rng=None,
    record_timings: bool = False,
    sqrt_decay: bool = True,
    on_iterate=None,
) -> Trace:
    """Projected SGD on without-replacement minibatches.

    The step size decays as eta0 / sqrt(t) unless sqrt_decay is disabled.
    """
    if eta0 <= 0.0:
        raise ValueError(f"eta0 must be > 0, got {eta0}")
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    if batch < 1:
        raise ValueError(f"batch must be >= 1, got {batch}")
    w, rng = _prepare(loss, region, init, rng)
    objective, base = _split_loss(loss)
    n = loss.n_samples
    size = min(batch, n)
    trace = Trace()
    for t in range(1, iters + 1):
        clock = _Clock(record_timings)
        idx = rng.choice(n, size=size, replace=False)
        g = _guard_finite(objective.stochastic_gradient(w, idx), t)
        eta = eta0 / math.sqrt(t) if sqrt_decay else eta0
        y = w - eta * g
        inner = _Clock(record_timings)
        w = region.project(y)
        proj_ms = inner.lap()
        step_ms = clock.lap()
        grad_norm = float(np.linalg.norm(g.ravel()))
        _record(
            trace, t, objective, base, region, w, eta, size, grad_norm,
            step_ms, None, proj_ms,
        )
        if on_iterate is not None:
            on_iterate(IterateSnapshot(t=t, w=w, v=None, z=None, p=g, gamma=eta))
    trace.final_point = w
    return trace
