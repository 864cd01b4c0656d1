"""Negative-curvature finding from gradient differences, and the escape step it feeds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    AlgorithmError,
    Array,
    GradientOracle,
    ParameterError,
    RngStream,
    SmoothnessSpec,
    grad_component,
    uniform_ball_sample,
)

__all__ = [
    "NCParams",
    "NCOutcome",
    "derive_nc_params",
    "nc_find",
    "perturb_along_nc",
    "lemma_decrease_bound",
]

_MAX_RESTARTS = 3


@dataclass(frozen=True)
class NCParams:
    """Step count and probe radius for gradient-based curvature search."""

    steps: int
    radius: float
    eps: float
    delta0: float
    ell: float
    rho: float

    def __post_init__(self):
        if self.steps < 1:
            raise ParameterError(f"steps must be >= 1, got {self.steps}")
        if self.radius <= 0:
            raise ParameterError(f"radius must be positive, got {self.radius}")
        if self.eps <= 0:
            raise ParameterError(f"eps must be positive, got {self.eps}")
        if not (0 < self.delta0 <= 1):
            raise ParameterError(f"delta0 must be in (0, 1], got {self.delta0}")


@dataclass(frozen=True)
class NCOutcome:
    """Unit escape direction plus diagnostics from the curvature search."""

    e_hat: Array
    steps_used: int
    renormalized: bool
    path: list[Array] | None = None
    ledger: list[float] | None = None


def derive_nc_params(spec: SmoothnessSpec, eps: float, delta0: float, n: int) -> NCParams:
    """Failure-probability-delta0 step count and radius for dimension n.

    Requires sqrt(rho * eps) <= ell so the curvature threshold is inside the
    representable spectrum.
    """
    if eps <= 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    if not (0 < delta0 <= 1):
        raise ParameterError(f"delta0 must be in (0, 1], got {delta0}")
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    ell, rho = spec.ell, spec.rho
    threshold = math.sqrt(rho * eps)
    if threshold > ell:
        raise ParameterError(
            f"sqrt(rho*eps)={threshold:g} exceeds ell={ell:g}; shrink eps"
        )
    log_arg = (ell / delta0) * math.sqrt(n / (math.pi * rho * eps))
    steps = max(1, math.ceil(8 * ell / threshold * math.log(log_arg)))
    radius = eps / (8 * ell) * math.sqrt(math.pi / n) * delta0
    return NCParams(steps=steps, radius=radius, eps=eps, delta0=delta0, ell=ell, rho=rho)


def nc_find(
    oracle: GradientOracle,
    x_tilde: Array,
    params: NCParams,
    stream: RngStream,
    renormalize: bool = True,
    y0: Array | None = None,
    record_path: bool = False,
) -> NCOutcome:
    """Estimate the most-negative-curvature direction at x_tilde.

    Gradient differences at a fixed probe radius act as Hessian-vector
    products, so the loop is a power iteration on (I - H/ell) and converges
    to the bottom eigenvector.  The update is 1-homogeneous in y, so
    renormalizing the iterate to the probe radius each step (the default,
    which keeps magnitudes tame) leaves the direction unchanged.
    """
    x_tilde = np.asarray(x_tilde, dtype=float)
    n = x_tilde.shape[0]
    ell = params.ell
    r = params.radius
    g0 = oracle.gradient(x_tilde)

    for attempt in range(_MAX_RESTARTS + 1):
        if y0 is not None and attempt == 0:
            y = np.asarray(y0, dtype=float).copy()
        else:
            y = uniform_ball_sample(np.zeros(n), r, stream)
        path: list[Array] | None = [] if record_path else None
        failed = False
        for _ in range(params.steps):
            norm = float(np.linalg.norm(y))
            if norm == 0.0 or not np.isfinite(norm):
                failed = True
                break
            probe = oracle.gradient(x_tilde + (r / norm) * y) - g0
            y = y - (norm / (ell * r)) * probe
            if renormalize:
                new_norm = float(np.linalg.norm(y))
                if new_norm == 0.0 or not np.isfinite(new_norm):
                    failed = True
                    break
                y = (r / new_norm) * y
            if path is not None:
                path.append(y.copy())
        norm = float(np.linalg.norm(y))
        if not failed and norm > 0.0 and np.isfinite(norm):
            return NCOutcome(
                e_hat=y / norm,
                steps_used=params.steps,
                renormalized=renormalize,
                path=path,
            )
    raise AlgorithmError("curvature search degenerated to the zero vector repeatedly")


def lemma_decrease_bound(eps: float, rho: float) -> float:
    """Guaranteed decrease of a certified escape step."""
    return math.sqrt(eps**3 / rho) / 384.0


def perturb_along_nc(
    oracle: GradientOracle,
    x0: Array,
    e_hat: Array,
    eps: float,
    rho: float,
    mode: str = "two-candidate",
    step: float | None = None,
) -> Array:
    """Step distance sqrt(eps/rho)/4 along the curvature direction.

    two-candidate mode evaluates both signs and keeps the lower value,
    falling back to x0 when neither candidate decreases f.  gradient-sign
    mode uses the sign of the directional derivative, as stated.
    """
    x0 = np.asarray(x0, dtype=float)
    e_hat = np.asarray(e_hat, dtype=float)
    norm = float(np.linalg.norm(e_hat))
    if norm == 0.0:
        raise ParameterError("e_hat must be nonzero")
    e_hat = e_hat / norm
    if step is None:
        step = 0.25 * math.sqrt(eps / rho)
    if mode == "gradient-sign":
        slope = grad_component(oracle, x0, e_hat)
        sign = 1.0 if slope >= 0 else -1.0
        return x0 - step * sign * e_hat
    if mode != "two-candidate":
        raise ParameterError(f"unknown perturbation mode: {mode!r}")
    f0 = oracle.value(x0)
    plus = x0 + step * e_hat
    minus = x0 - step * e_hat
    f_plus = oracle.value(plus)
    f_minus = oracle.value(minus)
    candidate, f_cand = (plus, f_plus) if f_plus <= f_minus else (minus, f_minus)
    if f_cand < f0:
        return candidate
    return x0
