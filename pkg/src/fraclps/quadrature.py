"""Small quadrature building blocks shared by the semigroup and derivative modules."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1], cached per order."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre_on(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre rule mapped to the interval [a, b]."""
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def log_trapezoid(v_min: float, v_max: float, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform trapezoid rule in v; returns nodes e^v and weights for dv.

    Suited to integrals of the form int g(u) du/u after u = e^v, provided
    g decays at both ends of the v-range.
    """
    if count < 2:
        raise ValueError("log_trapezoid needs at least 2 nodes")
    v = np.linspace(v_min, v_max, count)
    dv = (v_max - v_min) / (count - 1)
    w = np.full(count, dv)
    w[0] *= 0.5
    w[-1] *= 0.5
    return np.exp(v), w
