"""Logarithmic time grids with trapezoid weights for dt/t integrals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["TimeGrid", "default_time_grid"]


@dataclass(frozen=True)
class TimeGrid:
    """Log-spaced nodes on [t_min, t_max] with weights for int (.) dt/t.

    The weights implement the trapezoid rule in v = log t, which converges
    superalgebraically for integrands that decay at both endpoints.
    """

    t_min: float
    t_max: float
    count: int

    def __post_init__(self) -> None:
        if not (0 < self.t_min < self.t_max):
            raise ValueError(f"need 0 < t_min < t_max, got ({self.t_min}, {self.t_max})")
        if self.count < 2:
            raise ValueError(f"count must be >= 2, got {self.count}")

    @property
    def nodes(self) -> np.ndarray:
        return np.exp(np.linspace(np.log(self.t_min), np.log(self.t_max), self.count))

    @property
    def weights(self) -> np.ndarray:
        dv = np.log(self.t_max / self.t_min) / (self.count - 1)
        w = np.full(self.count, dv)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def integrate(self, samples: np.ndarray, axis: int = 0) -> np.ndarray:
        """Integrate samples at the nodes against dt/t."""
        w = self.weights
        shape = [1] * np.ndim(samples)
        shape[axis] = self.count
        return (samples * w.reshape(shape)).sum(axis=axis)

    def refine(self, factor: int = 2) -> "TimeGrid":
        return TimeGrid(self.t_min, self.t_max, factor * self.count)


def default_time_grid(
    xi_min: float,
    xi_max: float,
    count: int = 400,
    low_scale: float = 1e-5,
    high_scale: float = 50.0,
) -> TimeGrid:
    """Time grid adequate for band-limited fields with frequencies in [xi_min, xi_max].

    t_min = low_scale/xi_max and t_max = high_scale/xi_min keep the boundary
    contributions of t^{q alpha} ... e^{-q t xi} integrands below ~1e-10 for
    q*alpha >= 2; callers with smaller q*alpha should lower ``low_scale``
    themselves (the low-end mass scales like (q t_min xi_max)^{q alpha}).
    """
    if not (0 < xi_min <= xi_max):
        raise ValueError("need 0 < xi_min <= xi_max")
    return TimeGrid(low_scale / xi_max, high_scale / xi_min, count)
