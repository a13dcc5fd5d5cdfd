"""Shared oracles and helpers for the test suite."""

from fractions import Fraction

import numpy as np
import pytest


def tri_monomial_integral(a: int, b: int) -> float:
    """Exact integral of x^a y^b over the triangle {x,y >= -1, x+y <= 0}.

    Integrating x first:
      int = (-1)^(a+1)/(a+1) * (I(a+b+1) - I(b)),  I(m) = int_{-1}^1 y^m dy.
    Computed in exact rational arithmetic.
    """

    def line(m: int) -> Fraction:
        return Fraction(0) if m % 2 else Fraction(2, m + 1)

    val = Fraction((-1) ** (a + 1), a + 1) * (line(a + b + 1) - line(b))
    return float(val)


def quad_monomial_integral(a: int, b: int) -> float:
    """Exact integral of x^a y^b over [-1, 1]^2."""

    def line(m: int) -> Fraction:
        return Fraction(0) if m % 2 else Fraction(2, m + 1)

    return float(line(a) * line(b))


def simpson_oracle(f, a: float, b: float, tol: float = 1e-15) -> float:
    """Adaptive composite Simpson with Richardson extrapolation."""
    n = 8
    prev = None
    for _ in range(24):
        x = np.linspace(a, b, n + 1)
        y = f(x)
        h = (b - a) / n
        s = h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())
        if prev is not None and abs(s - prev) < tol * max(1.0, abs(s)):
            return s + (s - prev) / 15.0
        prev = s
        n *= 2
    return s + (s - prev) / 15.0


def random_physical_states(rng, n, gamma=1.4):
    """Random conservative states with positive density and pressure."""
    rho = rng.uniform(0.3, 3.0, n)
    p = rng.uniform(0.3, 3.0, n)
    u = rng.uniform(-2.0, 2.0, n)
    v = rng.uniform(-2.0, 2.0, n)
    E = p / (gamma - 1.0) + 0.5 * rho * (u**2 + v**2)
    return np.stack([rho, rho * u, rho * v, E], axis=-1)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
