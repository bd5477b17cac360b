"""Dense numeric kernels: norms, dual exponents, and a desk-scale SVD.

Vectors and matrices are plain float64 numpy arrays.  Construction helpers
reject non-finite entries; downstream code assumes finiteness.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericFailure

# Largest min(m, n) the Jacobi SVD accepts.  Everything here is desk scale.
SVD_SIZE_LIMIT = 512

# A Gram pair (i, j) counts as orthogonal once |<a_i, a_j>| falls below this
# relative threshold; sweeps stop when every pair passes.
_JACOBI_TOL = 1e-12
_JACOBI_MAX_SWEEPS = 100


def as_vector(x) -> np.ndarray:
    """Coerce to a 1-D float64 array, rejecting NaN/Inf entries."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector contains non-finite entries")
    return v


def as_matrix(x) -> np.ndarray:
    """Coerce to a 2-D float64 array, rejecting NaN/Inf entries."""
    m = np.asarray(x, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    return m


def lp_norm(x, p: float) -> float:
    """l_p norm of a vector for p in [1, inf].

    p = math.inf is the distinguished sup-norm exponent.  Entries are rescaled
    by max|x_i| before powering so large inputs do not overflow.
    """
    v = np.asarray(x, dtype=np.float64).ravel()
    if not (p >= 1.0):
        raise ValueError(f"lp_norm requires p >= 1, got {p}")
    if v.size == 0:
        return 0.0
    a = np.abs(v)
    m = float(a.max())
    if m == 0.0 or math.isinf(p):
        return m
    if p == 1.0:
        return float(a.sum())
    if p == 2.0:
        return m * float(np.sqrt(np.sum((a / m) ** 2)))
    return m * float(np.sum((a / m) ** p) ** (1.0 / p))


def dual_exponent(p: float) -> float:
    """Holder conjugate q with 1/p + 1/q = 1, for p in (1, inf].

    p = 1 is rejected: its conjugate is handled specially by the oracles.
    """
    if math.isinf(p):
        return 1.0
    if not (p > 1.0):
        raise ValueError(f"dual_exponent requires p > 1 (or inf), got {p}")
    return p / (p - 1.0)


@dataclass
class SvdResult:
    """Thin SVD a = u @ diag(s) @ v.T with s sorted descending."""

    u: np.ndarray  # (m, k)
    s: np.ndarray  # (k,)
    v: np.ndarray  # (n, k)


def _orthonormal_fill(u: np.ndarray, cols) -> None:
    """Replace the listed (zero) columns of u with unit vectors orthogonal to
    the rest, chosen deterministically from the standard basis."""
    m = u.shape[0]
    for j in cols:
        for b in range(m):
            cand = np.zeros(m)
            cand[b] = 1.0
            cand -= u @ (u.T @ cand)
            norm = float(np.linalg.norm(cand))
            if norm > 1e-8:
                u[:, j] = cand / norm
                break
        else:  # pragma: no cover - cannot happen for k <= m
            raise NumericFailure("failed to complete orthonormal basis")


def svd(a) -> SvdResult:
    """One-sided Jacobi SVD of a dense matrix.

    Columns of the working copy are rotated pairwise until the column Gram
    matrix is diagonal to relative tolerance 1e-12, then read off as
    singular values/vectors.  Intended for desk-scale problems; inputs with
    min(m, n) > 512 are rejected.
    """
    a = as_matrix(a)
    m, n = a.shape
    if min(m, n) > SVD_SIZE_LIMIT:
        raise ValueError(
            f"svd supports min(m, n) <= {SVD_SIZE_LIMIT}, got shape {a.shape}"
        )
    if m < n:
        r = svd(a.T)
        return SvdResult(u=r.v, s=r.s, v=r.u)

    work = a.copy()
    v = np.eye(n)
    for _ in range(_JACOBI_MAX_SWEEPS):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                ci = work[:, i]
                cj = work[:, j]
                aa = float(ci @ ci)
                bb = float(cj @ cj)
                cc = float(ci @ cj)
                if abs(cc) <= _JACOBI_TOL * math.sqrt(aa * bb) or cc == 0.0:
                    continue
                rotated = True
                tau = (bb - aa) / (2.0 * cc)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                cs = 1.0 / math.hypot(1.0, t)
                sn = cs * t
                gi = cs * ci - sn * cj
                gj = sn * ci + cs * cj
                work[:, i] = gi
                work[:, j] = gj
                vi = cs * v[:, i] - sn * v[:, j]
                vj = sn * v[:, i] + cs * v[:, j]
                v[:, i] = vi
                v[:, j] = vj
        if not rotated:
            break
    else:
        raise NumericFailure("Jacobi SVD failed to converge")

    s = np.linalg.norm(work, axis=0)
    order = np.argsort(-s, kind="stable")
    s = s[order]
    work = work[:, order]
    v = v[:, order]

    u = np.zeros((m, n))
    zero_cols = []
    for j in range(n):
        if s[j] > 0.0:
            u[:, j] = work[:, j] / s[j]
        else:
            zero_cols.append(j)
    if zero_cols:
        _orthonormal_fill(u, zero_cols)
    return SvdResult(u=u, s=s, v=v)


def power_iteration_sym(a: np.ndarray, tol: float = 1e-8, max_iter: int = 10_000) -> float:
    """Largest eigenvalue of a symmetric PSD matrix by power iteration."""
    a = as_matrix(a)
    n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError("power iteration needs a square matrix")
    x = np.ones(n) / math.sqrt(n)
    lam = 0.0
    for _ in range(max_iter):
        y = a @ x
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            return 0.0
        x = y / norm
        new_lam = float(x @ (a @ x))
        if abs(new_lam - lam) <= tol * max(1.0, abs(new_lam)):
            return new_lam
        lam = new_lam
    raise NumericFailure("power iteration failed to converge")
