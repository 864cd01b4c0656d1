"""Shared primitives: oracles, smoothness constants, RNG streams, traces, samplers."""

from __future__ import annotations

import dataclasses
import hashlib
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

Array = np.ndarray

__all__ = [
    "Array",
    "SmoothnessSpec",
    "GradientOracle",
    "StochasticOracle",
    "AdditiveNoiseOracle",
    "CountingOracle",
    "RngStream",
    "TraceRecord",
    "Trace",
    "ParameterError",
    "AlgorithmError",
    "DivergenceError",
    "uniform_ball_sample",
    "gaussian_sample",
    "grad_component",
    "EVENT_GD",
    "EVENT_AGD",
    "EVENT_PERTURB",
    "EVENT_NCF_STEP",
    "EVENT_NCF_EXPLOIT",
    "EVENT_NCE",
    "EVENT_SGD",
    "EVENTS",
]

# Event vocabulary for trace records.
EVENT_GD = "gd"
EVENT_AGD = "agd"
EVENT_PERTURB = "perturb-uniform"
EVENT_NCF_STEP = "ncf-step"
EVENT_NCF_EXPLOIT = "ncf-exploit"
EVENT_NCE = "nce"
EVENT_SGD = "sgd"
EVENTS = frozenset(
    {EVENT_GD, EVENT_AGD, EVENT_PERTURB, EVENT_NCF_STEP, EVENT_NCF_EXPLOIT, EVENT_NCE, EVENT_SGD}
)


class ParameterError(ValueError):
    """Raised when a parameter derivation receives out-of-range inputs."""


class AlgorithmError(RuntimeError):
    """Raised when an iteration reaches a state the algorithm cannot recover from."""


class DivergenceError(RuntimeError):
    """Raised when an iterate leaves the trust region; carries the partial trace."""

    def __init__(self, message: str, trace: "Trace | None" = None):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class SmoothnessSpec:
    """Declared gradient-Lipschitz (ell) and Hessian-Lipschitz (rho) constants."""

    ell: float
    rho: float

    def __post_init__(self):
        if not (self.ell > 0 and math.isfinite(self.ell)):
            raise ParameterError(f"ell must be positive and finite, got {self.ell}")
        if not (self.rho > 0 and math.isfinite(self.rho)):
            raise ParameterError(f"rho must be positive and finite, got {self.rho}")


@dataclass(frozen=True)
class GradientOracle:
    """Deterministic first-order oracle: function value, exact gradient, constants."""

    f: Callable[[Array], float]
    grad: Callable[[Array], Array]
    spec: SmoothnessSpec
    dim: int
    name: str = ""

    def value(self, x: Array) -> float:
        return float(self.f(x))

    def gradient(self, x: Array) -> Array:
        return np.asarray(self.grad(x), dtype=float)

    def with_spec(self, ell: float, rho: float) -> "GradientOracle":
        """Same function with different declared constants (e.g. local bounds)."""
        return dataclasses.replace(self, spec=SmoothnessSpec(ell, rho))


class CountingOracle:
    """Wraps an oracle and counts value/gradient calls for run metadata."""

    def __init__(self, inner: GradientOracle):
        self.inner = inner
        self.f_evals = 0
        self.grad_evals = 0

    @property
    def spec(self) -> SmoothnessSpec:
        return self.inner.spec

    @property
    def dim(self) -> int:
        return self.inner.dim

    @property
    def name(self) -> str:
        return self.inner.name

    def value(self, x: Array) -> float:
        self.f_evals += 1
        return self.inner.value(x)

    def gradient(self, x: Array) -> Array:
        self.grad_evals += 1
        return self.inner.gradient(x)


class StochasticOracle:
    """Sampled first-order oracle g(x; theta) with unbiased mean gradient.

    Subclasses define the noise model through draw_theta/grad_at.  The
    minibatch helpers share one theta draw across evaluation points, which is
    what difference estimators require.
    """

    def __init__(self, mean: GradientOracle, sigma: float, ell_tilde: float):
        if sigma < 0:
            raise ParameterError(f"sigma must be nonnegative, got {sigma}")
        if ell_tilde <= 0:
            raise ParameterError(f"ell_tilde must be positive, got {ell_tilde}")
        self.mean = mean
        self.sigma = float(sigma)
        self.ell_tilde = float(ell_tilde)
        self.sample_count = 0

    @property
    def spec(self) -> SmoothnessSpec:
        return self.mean.spec

    @property
    def dim(self) -> int:
        return self.mean.dim

    @property
    def name(self) -> str:
        return self.mean.name

    def value(self, x: Array) -> float:
        return self.mean.value(x)

    def mean_gradient(self, x: Array) -> Array:
        return self.mean.gradient(x)

    def draw_theta(self, stream: "RngStream", m: int) -> Array:
        raise NotImplementedError

    def grad_at(self, x: Array, thetas: Array) -> Array:
        """Per-sample gradients g(x; theta_j), stacked as an (m, dim) array."""
        raise NotImplementedError

    def sample(self, x: Array, stream: "RngStream") -> Array:
        self.sample_count += 1
        return self.grad_at(x, self.draw_theta(stream, 1))[0]

    def minibatch_mean(self, x: Array, m: int, stream: "RngStream") -> Array:
        self.sample_count += m
        return self.grad_at(x, self.draw_theta(stream, m)).mean(axis=0)

    def minibatch_diff(self, x0: Array, x1: Array, m: int, stream: "RngStream") -> Array:
        """Mean over a shared-theta minibatch of g(x1; theta) - g(x0; theta)."""
        self.sample_count += 2 * m
        thetas = self.draw_theta(stream, m)
        return (self.grad_at(x1, thetas) - self.grad_at(x0, thetas)).mean(axis=0)


class AdditiveNoiseOracle(StochasticOracle):
    """g(x; theta) = grad f(x) + theta with theta ~ N(0, sigma^2 I).

    The noise does not depend on x, so shared-theta differences cancel it
    exactly and an m-sample mean collapses to a single scaled draw.  The
    closed forms below are distributionally exact for every m and keep
    theoretically derived batch sizes affordable.
    """

    def __init__(self, mean: GradientOracle, sigma: float, exact_batches: bool = True):
        super().__init__(mean, sigma, ell_tilde=mean.spec.ell)
        self.exact_batches = exact_batches

    def draw_theta(self, stream: "RngStream", m: int) -> Array:
        return self.sigma * stream.gen.standard_normal((m, self.dim))

    def grad_at(self, x: Array, thetas: Array) -> Array:
        return self.mean.gradient(x)[None, :] + thetas

    def minibatch_mean(self, x: Array, m: int, stream: "RngStream") -> Array:
        if not self.exact_batches:
            return super().minibatch_mean(x, m, stream)
        self.sample_count += m
        noise = self.sigma / math.sqrt(m) * stream.gen.standard_normal(self.dim)
        return self.mean.gradient(x) + noise

    def minibatch_diff(self, x0: Array, x1: Array, m: int, stream: "RngStream") -> Array:
        if not self.exact_batches:
            return super().minibatch_diff(x0, x1, m, stream)
        # theta is x-independent, so it cancels for any batch size.
        self.sample_count += 2 * m
        return self.mean.gradient(x1) - self.mean.gradient(x0)


def _mix64(a: int, b: int) -> int:
    """Deterministic 64-bit mix of two integers (splitmix64 finalizer)."""
    z = (a * 0x9E3779B97F4A7C15 + b) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return (z ^ (z >> 31)) & 0xFFFFFFFFFFFFFFFF


def _label_to_int(label) -> int:
    if isinstance(label, int):
        return label & 0xFFFFFFFFFFFFFFFF
    digest = hashlib.blake2b(str(label).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@dataclass(eq=False)
class RngStream:
    """Counter-based random stream keyed by (seed, stream_id).

    Streams with distinct ids are statistically independent and their draws
    do not depend on scheduling, so parallel trials reproduce exactly.
    """

    seed: int
    stream_id: int = 0
    _gen: np.random.Generator | None = field(default=None, repr=False)

    @property
    def gen(self) -> np.random.Generator:
        if self._gen is None:
            key = np.array(
                [self.seed & 0xFFFFFFFFFFFFFFFF, self.stream_id & 0xFFFFFFFFFFFFFFFF],
                dtype=np.uint64,
            )
            self._gen = np.random.Generator(np.random.Philox(key=key))
        return self._gen

    def substream(self, label) -> "RngStream":
        """Fresh independent stream derived deterministically from a label."""
        return RngStream(self.seed, _mix64(self.stream_id, _label_to_int(label)))


def uniform_ball_sample(center: Array, radius: float, stream: RngStream) -> Array:
    """Uniform draw from the closed ball of given radius around center."""
    if radius < 0:
        raise ParameterError(f"radius must be nonnegative, got {radius}")
    center = np.asarray(center, dtype=float)
    n = center.shape[0]
    direction = stream.gen.standard_normal(n)
    norm = float(np.linalg.norm(direction))
    while norm == 0.0:  # probability-zero guard
        direction = stream.gen.standard_normal(n)
        norm = float(np.linalg.norm(direction))
    # radius * U^(1/n) is the radial law that makes the ball density uniform
    scale = radius * stream.gen.random() ** (1.0 / n)
    return center + scale / norm * direction


def gaussian_sample(center: Array, variance_per_coord: float, stream: RngStream) -> Array:
    """Isotropic Gaussian draw N(center, variance_per_coord * I)."""
    if variance_per_coord < 0:
        raise ParameterError(f"variance must be nonnegative, got {variance_per_coord}")
    center = np.asarray(center, dtype=float)
    return center + math.sqrt(variance_per_coord) * stream.gen.standard_normal(center.shape[0])


def grad_component(oracle, x: Array, e: Array) -> float:
    """Directional derivative <grad f(x), e>."""
    return float(np.dot(oracle.gradient(np.asarray(x, dtype=float)), np.asarray(e, dtype=float)))


@dataclass
class TraceRecord:
    """State after one counted iteration: step index, value, gradient norm, event."""

    t: int
    f: float
    grad_norm: float
    event: str
    x: Array | None = None
    v_norm: float | None = None


@dataclass
class Trace:
    """Per-iteration run record plus run-level metadata."""

    records: list[TraceRecord] = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def append(self, record: TraceRecord) -> None:
        self.records.append(record)

    def final_f(self) -> float:
        return self.records[-1].f

    def initial_f(self) -> float:
        return self.records[0].f

    def decrease(self) -> float:
        return self.initial_f() - self.final_f()

    def events(self) -> list[str]:
        return [rec.event for rec in self.records]

    def __len__(self) -> int:
        return len(self.records)


def check_finite(x: Array, trace: Trace | None = None, what: str = "iterate") -> Array:
    """Reject NaN/Inf before it enters algorithm state."""
    if not np.all(np.isfinite(x)):
        raise DivergenceError(f"non-finite {what} encountered", trace)
    return x


def check_trust_region(x: Array, bound: float, trace: Trace | None = None) -> Array:
    if float(np.linalg.norm(x)) > bound:
        raise DivergenceError(f"iterate norm exceeded trust region bound {bound}", trace)
    return x
