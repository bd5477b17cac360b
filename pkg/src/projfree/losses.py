"""Loss functions over tabular and partially observed matrix data.

Every loss exposes evaluate(w), gradient(w), and stochastic_gradient(w, idx),
where the stochastic form returns (N / |idx|) * sum of per-sample gradients
so that the full index set reproduces gradient(w) exactly.
"""

import numpy as np

from .numerics import as_matrix, as_vector, power_iteration_sym


def _sigmoid(z: np.ndarray) -> np.ndarray:
    # Stable logistic function, no overflow on large |z|.
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class TabularDataset:
    """Feature matrix (n, d) with a target vector (n,)."""

    def __init__(self, features, targets):
        self.features = as_matrix(features)
        self.targets = as_vector(targets)
        if self.features.shape[0] != self.targets.shape[0]:
            raise ValueError(
                f"features have {self.features.shape[0]} rows but targets "
                f"have {self.targets.shape[0]} entries"
            )

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]


class ObservedMatrix:
    """A reference matrix observed on an index subset.

    mask is boolean (m, n); entries outside the mask are ignored by the loss.
    """

    def __init__(self, values, mask):
        self.values = as_matrix(values)
        self.mask = np.asarray(mask, dtype=bool)
        if self.mask.shape != self.values.shape:
            raise ValueError(
                f"mask shape {self.mask.shape} does not match values shape "
                f"{self.values.shape}"
            )
        self.observed = np.argwhere(self.mask)
        if self.observed.shape[0] == 0:
            raise ValueError("ObservedMatrix needs at least one observed entry")

    @property
    def shape(self):
        return self.values.shape

    @property
    def n_observed(self) -> int:
        return self.observed.shape[0]


class Loss:
    """Base class; subclasses fill in the margin/residual algebra."""

    #: number of samples N used by the stochastic aggregate
    n_samples: int
    #: parameter shape the loss expects
    shape: tuple

    def evaluate(self, w) -> float:
        raise NotImplementedError

    def gradient(self, w) -> np.ndarray:
        raise NotImplementedError

    def stochastic_gradient(self, w, indices) -> np.ndarray:
        raise NotImplementedError

    def _check_indices(self, indices) -> np.ndarray:
        idx = np.asarray(indices, dtype=np.int64).ravel()
        if idx.size == 0:
            raise ValueError("stochastic_gradient needs a non-empty index set")
        if idx.min() < 0 or idx.max() >= self.n_samples:
            raise ValueError(
                f"sample indices must lie in [0, {self.n_samples}), "
                f"got range [{idx.min()}, {idx.max()}]"
            )
        # Sorted access keeps the reduction order identical to the full
        # gradient when every sample is present.
        return np.sort(idx)


class _TabularLoss(Loss):
    """Shared plumbing for losses of the form sum_i psi(x_i . w, y_i).

    With bias=True a constant-1 feature is appended, so the model vector
    carries the intercept as its last coordinate and the constraint set acts
    on the full vector.
    """

    def __init__(self, data: TabularDataset, bias: bool = False):
        self.data = data
        self.bias = bool(bias)
        x = data.features
        if self.bias:
            x = np.hstack([x, np.ones((data.n, 1))])
        self._x = x
        self._y = data.targets
        self.n_samples = data.n
        self.shape = (x.shape[1],)

    @property
    def dim(self) -> int:
        return self.shape[0]

    def _margins(self, w) -> np.ndarray:
        w = as_vector(w)
        if w.shape != self.shape:
            raise ValueError(f"expected model of shape {self.shape}, got {w.shape}")
        return self._x @ w

    # subclasses: per-sample loss values and d(loss)/d(margin)
    def _values(self, m: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _dmargin(self, m: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, w) -> float:
        return float(np.sum(self._values(self._margins(w))))

    def gradient(self, w) -> np.ndarray:
        return self._x.T @ self._dmargin(self._margins(w))

    def stochastic_gradient(self, w, indices) -> np.ndarray:
        idx = self._check_indices(indices)
        xs = self._x[idx]
        m = xs @ as_vector(w)
        coef = self._dmargin_rows(m, idx)
        return (self.n_samples / idx.size) * (xs.T @ coef)

    def _dmargin_rows(self, m: np.ndarray, idx: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class LogisticLoss(_TabularLoss):
    """sum_i log(1 + exp(-y_i * x_i.w)) with labels y_i in {-1, +1}."""

    def __init__(self, data: TabularDataset, bias: bool = False):
        super().__init__(data, bias)
        labels = set(np.unique(self._y))
        if not labels <= {-1.0, 1.0}:
            raise ValueError(
                f"logistic loss needs labels in {{-1, +1}}, got {sorted(labels)}"
            )

    def _values(self, m):
        return np.logaddexp(0.0, -self._y * m)

    def _dmargin(self, m):
        return -self._y * _sigmoid(-self._y * m)

    def _dmargin_rows(self, m, idx):
        y = self._y[idx]
        return -y * _sigmoid(-y * m)


class QuadraticLoss(_TabularLoss):
    """sum_i (x_i.w - y_i)^2, optionally with an unconstrained intercept.

    With bias=True the intercept is not part of the model vector: it is
    re-solved in closed form (the residual mean) at every evaluation, so the
    constraint set still acts on the d coefficients alone.
    """

    def __init__(self, data: TabularDataset, bias: bool = False):
        # Deliberately skip the appended-feature path of the base class.
        self.data = data
        self.bias = bool(bias)
        self._x = data.features
        self._y = data.targets
        self.n_samples = data.n
        self.shape = (data.d,)

    def _residuals(self, w) -> np.ndarray:
        m = self._margins(w)
        if self.bias:
            b = float(np.mean(self._y - m))
            return m + b - self._y
        return m - self._y

    def evaluate(self, w) -> float:
        r = self._residuals(w)
        return float(r @ r)

    def gradient(self, w) -> np.ndarray:
        # With the intercept at its exact minimizer the partial in b vanishes,
        # so the chain rule reduces to the plain residual pullback.
        return 2.0 * (self._x.T @ self._residuals(w))

    def stochastic_gradient(self, w, indices) -> np.ndarray:
        idx = self._check_indices(indices)
        r = self._residuals(w)
        return (self.n_samples / idx.size) * 2.0 * (self._x[idx].T @ r[idx])

    def exact_smoothness(self) -> float:
        """L = 2 * lambda_max(X^T X), computed by power iteration."""
        return 2.0 * power_iteration_sym(self._x.T @ self._x)


class SquaredSigmoidLoss(_TabularLoss):
    """(1/n) * sum_i (y_i - sigmoid(x_i.w))^2; targets typically in {0, 1}."""

    def _values(self, m):
        return (self._y - _sigmoid(m)) ** 2 / self.n_samples

    def _dmargin(self, m):
        s = _sigmoid(m)
        return -2.0 * (self._y - s) * s * (1.0 - s) / self.n_samples

    def _dmargin_rows(self, m, idx):
        s = _sigmoid(m)
        return -2.0 * (self._y[idx] - s) * s * (1.0 - s) / self.n_samples


class BiWeightLoss(_TabularLoss):
    """Robust regression: sum_i r_i^2 / (1 + r_i^2) with r_i = x_i.w - y_i.

    Bounded per-sample loss (< 1), hence non-convex; total is < n everywhere.
    """

    def _values(self, m):
        r2 = (m - self._y) ** 2
        return r2 / (1.0 + r2)

    def _dmargin(self, m):
        r = m - self._y
        return 2.0 * r / (1.0 + r * r) ** 2

    def _dmargin_rows(self, m, idx):
        r = m - self._y[idx]
        return 2.0 * r / (1.0 + r * r) ** 2


class ObservedQuadraticLoss(Loss):
    """sum over observed entries (W_ij - M_ij)^2 for matrix completion."""

    def __init__(self, observed: ObservedMatrix):
        self.observed = observed
        self.n_samples = observed.n_observed
        self.shape = observed.shape

    def _check(self, w) -> np.ndarray:
        w = as_matrix(w)
        if w.shape != self.shape:
            raise ValueError(f"expected model of shape {self.shape}, got {w.shape}")
        return w

    def evaluate(self, w) -> float:
        w = self._check(w)
        diff = (w - self.observed.values)[self.observed.mask]
        return float(diff @ diff)

    def gradient(self, w) -> np.ndarray:
        w = self._check(w)
        g = np.zeros(self.shape)
        mask = self.observed.mask
        g[mask] = 2.0 * (w[mask] - self.observed.values[mask])
        return g

    def stochastic_gradient(self, w, indices) -> np.ndarray:
        w = self._check(w)
        idx = self._check_indices(indices)
        rows = self.observed.observed[idx, 0]
        cols = self.observed.observed[idx, 1]
        g = np.zeros(self.shape)
        np.add.at(
            g,
            (rows, cols),
            2.0 * (w[rows, cols] - self.observed.values[rows, cols]),
        )
        return (self.n_samples / idx.size) * g


def estimate_smoothness(loss, region, trials: int = 32, rng=None) -> float:
    """Upper bound on the gradient Lipschitz constant over a feasible region.

    Quadratic losses get the exact constant 2 * lambda_max(X^T X) by power
    iteration.  Everything else is probed on random feasible pairs and the
    largest gradient-difference ratio is inflated by a 1.5x safety factor.
    """
    if isinstance(loss, QuadraticLoss):
        return loss.exact_smoothness()
    if rng is None:
        rng = np.random.default_rng(0)
    if trials < 1:
        raise ValueError("estimate_smoothness needs at least one trial")
    best = 0.0
    for _ in range(trials):
        u = region.random_feasible(rng)
        v = region.random_feasible(rng)
        gap = float(np.linalg.norm((u - v).ravel()))
        if gap < 1e-12:
            continue
        du = loss.gradient(u)
        dv = loss.gradient(v)
        best = max(best, float(np.linalg.norm((du - dv).ravel())) / gap)
    if best == 0.0:
        # Constant-gradient loss; any positive constant is a valid bound.
        return 1e-12
    return 1.5 * best
