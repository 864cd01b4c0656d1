"""Shared builders for the test suite."""

import numpy as np
import pytest

from saddlescape import GradientOracle, SmoothnessSpec


def make_quadratic(diag, rho=1.0, ell=None):
    """f(x) = 0.5 x' diag(d) x with exact declared constants."""
    d = np.asarray(diag, dtype=float)
    if ell is None:
        ell = float(np.max(np.abs(d)))

    def f(x):
        return 0.5 * float(np.dot(x, d * x))

    def grad(x):
        return d * x

    return GradientOracle(
        f=f, grad=grad, spec=SmoothnessSpec(ell, rho), dim=d.shape[0], name="quadratic"
    )


def angular_gap(a, b):
    """Angle-insensitive direction mismatch: 1 - |cos(a, b)|."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    denom = float(np.linalg.norm(a) * np.linalg.norm(b))
    if denom == 0.0:
        return 1.0
    return 1.0 - abs(float(np.dot(a, b)) / denom)


@pytest.fixture
def quad2():
    """Indefinite 2-D quadratic: bottom eigenpair (-1, e0)."""
    return make_quadratic([-1.0, 2.0])


@pytest.fixture
def quad5():
    """Indefinite 5-D quadratic with a clear spectral gap at the bottom."""
    return make_quadratic([-2.0, -0.5, 0.3, 1.0, 3.0])
