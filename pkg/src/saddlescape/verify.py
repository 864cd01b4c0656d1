"""Independent curvature checks: finite-difference Hessians and stationarity tests."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Array, GradientOracle, ParameterError, RngStream

__all__ = [
    "CurvatureReport",
    "StationarityVerdict",
    "default_step",
    "fd_quadform",
    "dense_hessian",
    "dense_hessian_eig",
    "classify",
    "grad_power_lambda_min",
    "DENSE_CAP",
]

# Above this dimension a dense finite-difference Hessian is refused; callers
# with analytic structure should verify it directly.
DENSE_CAP = 200


@dataclass(frozen=True)
class CurvatureReport:
    """Estimated most-negative curvature at a point."""

    lambda_min: float
    direction: Array
    quad_form: float
    method: str
    h: float


@dataclass(frozen=True)
class StationarityVerdict:
    """Outcome of a second-order stationarity test at tolerances (eps, rho)."""

    grad_ok: bool
    curv_ok: bool
    is_sosp: bool
    grad_norm: float
    lambda_min: float
    threshold: float


def default_step(x: Array) -> float:
    """Central-difference step balancing truncation against roundoff."""
    return float(np.finfo(float).eps ** (1.0 / 3.0) * max(1.0, float(np.linalg.norm(x))))


def fd_quadform(oracle: GradientOracle, x: Array, e: Array, h: float | None = None) -> float:
    """Rayleigh quotient estimate <e, H(x) e> from two gradient calls.

    For a unit direction the error is bounded by rho * h on a declared
    Hessian-Lipschitz domain.
    """
    x = np.asarray(x, dtype=float)
    e = np.asarray(e, dtype=float)
    norm = float(np.linalg.norm(e))
    if norm == 0.0:
        raise ParameterError("direction must be nonzero")
    e = e / norm
    if h is None:
        h = default_step(x)
    gp = oracle.gradient(x + h * e)
    gm = oracle.gradient(x - h * e)
    return float(np.dot(gp - gm, e) / (2.0 * h))


def dense_hessian(oracle: GradientOracle, x: Array, h: float | None = None) -> Array:
    """Symmetrized central-difference Hessian, one gradient pair per column."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if n > DENSE_CAP:
        raise ParameterError(
            f"dense Hessian capped at n={DENSE_CAP}; use fd_quadform or analytic structure"
        )
    if h is None:
        h = default_step(x)
    columns = np.empty((n, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        columns[:, i] = (oracle.gradient(x + e) - oracle.gradient(x - e)) / (2.0 * h)
    return (columns + columns.T) / 2.0


def _smallest_eigpair(matrix: Array, max_iter: int = 20000, tol: float = 1e-13):
    """Smallest eigenpair by power iteration on a spectrally shifted copy.

    Deterministic start vector; the shift comes from a Gershgorin bound so no
    external eigensolver is involved.
    """
    n = matrix.shape[0]
    bound = float(np.max(np.sum(np.abs(matrix), axis=1)))
    if bound == 0.0:
        e = np.zeros(n)
        e[0] = 1.0
        return 0.0, e
    shifted = bound * np.eye(n) - matrix  # eigenvalues bound - lam >= 0
    v = np.ones(n) + 1e-3 * np.arange(n)  # ramp breaks symmetric ties
    v /= np.linalg.norm(v)
    lam = float(v @ matrix @ v)
    for _ in range(max_iter):
        w = shifted @ v
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            break
        v = w / norm
        new_lam = float(v @ matrix @ v)
        if abs(new_lam - lam) <= tol * max(1.0, abs(new_lam)):
            lam = new_lam
            break
        lam = new_lam
    return lam, v


def dense_hessian_eig(oracle: GradientOracle, x: Array, h: float | None = None) -> CurvatureReport:
    """Most-negative eigenpair of the finite-difference Hessian."""
    if h is None:
        h = default_step(np.asarray(x, dtype=float))
    matrix = dense_hessian(oracle, x, h)
    lam, v = _smallest_eigpair(matrix)
    quad = fd_quadform(oracle, x, v, h)
    return CurvatureReport(lambda_min=lam, direction=v, quad_form=quad, method="dense-fd", h=h)


def classify(
    oracle: GradientOracle,
    x: Array,
    eps: float,
    rho: float | None = None,
    h: float | None = None,
) -> StationarityVerdict:
    """Second-order stationarity test: small gradient and no strong negative curvature.

    The curvature margin 10 * rho * h absorbs the finite-difference error.
    """
    if eps <= 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    x = np.asarray(x, dtype=float)
    rho = oracle.spec.rho if rho is None else rho
    if h is None:
        h = default_step(x)
    grad_norm = float(np.linalg.norm(oracle.gradient(x)))
    report = dense_hessian_eig(oracle, x, h)
    threshold = -math.sqrt(rho * eps)
    tol_curv = 10.0 * rho * h
    grad_ok = grad_norm <= eps
    curv_ok = report.lambda_min >= threshold - tol_curv
    return StationarityVerdict(
        grad_ok=grad_ok,
        curv_ok=curv_ok,
        is_sosp=grad_ok and curv_ok,
        grad_norm=grad_norm,
        lambda_min=report.lambda_min,
        threshold=threshold,
    )


def grad_power_lambda_min(
    oracle: GradientOracle,
    x: Array,
    iters: int,
    stream: RngStream,
    radius: float | None = None,
) -> CurvatureReport:
    """Gradient-only bottom-eigenpair estimate via fixed-radius power steps.

    Runs the same gradient-difference iteration the escape algorithms use,
    at a vanishing probe radius, then scores the direction with fd_quadform.
    Useful as a cross-check that needs no Hessian assembly.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    ell = oracle.spec.ell
    if radius is None:
        radius = 1e-5 * max(1.0, float(np.linalg.norm(x)))
    g0 = oracle.gradient(x)
    y = stream.gen.standard_normal(n)
    y /= np.linalg.norm(y)
    for _ in range(iters):
        probe = oracle.gradient(x + radius * y) - g0
        y = y - probe / (ell * radius)
        norm = float(np.linalg.norm(y))
        if norm == 0.0 or not np.isfinite(norm):
            y = stream.gen.standard_normal(n)
            norm = float(np.linalg.norm(y))
        y = y / norm
    h = default_step(x)
    quad = fd_quadform(oracle, x, y, h)
    return CurvatureReport(lambda_min=quad, direction=y, quad_form=quad, method="grad-power", h=h)
