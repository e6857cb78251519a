"""Empirical cotype/type probes on finite-dimensional sequence-space values.

A lacunary field places one Fourier mode per value-space coordinate at
geometrically spaced frequencies.  Sweeping the coordinate count m and
recording the best observed ratio between the square-function norm and the
field norm separates value spaces where the square-function inequality
holds (bounded trend) from those where it fails (growing trend).  Growth
certifies failure of the inequality on the tested family; boundedness is
consistency, not proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .concurrency import ordered_map
from .fracderiv import FracOrder
from .grid import BanachSpec, Field, GridSpec, e0_project, lp_norm
from .squarefuncs import SquareFunctionReport, g_function
from .timegrid import TimeGrid, default_time_grid

__all__ = [
    "ProbeConfig",
    "ProbeResult",
    "lacunary_ladder",
    "make_lacunary_field",
    "make_ladder_field",
    "cotype_ratio",
    "type_ratio",
    "run_cotype_probe",
    "run_type_probe",
]


def lacunary_ladder(count: int, base: int, nyquist: int, ratio: float = 2.0) -> tuple[int, ...]:
    """``count`` strictly increasing integer frequencies from ``base`` upward.

    Rungs follow base * ratio^j; when that would overflow ``nyquist`` the
    ratio is compressed to make the top rung land at ~0.95 * nyquist, and
    integer collisions are resolved by bumping to the next free integer.
    """
    if count < 1 or base < 1:
        raise ValueError("count and base must be positive")
    top = base * ratio ** (count - 1)
    if top > 0.95 * nyquist:
        if base + count - 1 > 0.95 * nyquist:
            raise ValueError(f"cannot fit {count} distinct rungs below nyquist={nyquist}")
        ratio = (0.95 * nyquist / base) ** (1.0 / max(count - 1, 1))
    rungs = []
    prev = 0
    for j in range(count):
        k = max(int(round(base * ratio**j)), prev + 1)
        rungs.append(k)
        prev = k
    if rungs[-1] >= nyquist:
        raise ValueError(f"ladder exceeds nyquist={nyquist}")
    return tuple(rungs)


def make_ladder_field(
    grid: GridSpec,
    ladder,
    r: float,
    amplitudes,
    signs,
) -> Field:
    """f(x) = sum_j a_j eps_j e^{i k_j x} e_j over the given frequency ladder."""
    if grid.dim != 1:
        raise ValueError("lacunary probe fields are one-dimensional")
    ladder = tuple(int(k) for k in ladder)
    m = len(ladder)
    amplitudes = np.asarray(amplitudes, dtype=np.float64)
    signs = np.asarray(signs, dtype=np.float64)
    if amplitudes.shape != (m,) or signs.shape != (m,):
        raise ValueError("amplitudes and signs must match the ladder length")
    if len(set(ladder)) != m:
        raise ValueError("ladder frequencies must be distinct")
    if max(ladder) >= grid.n // 2:
        raise ValueError(f"ladder top {max(ladder)} exceeds the Nyquist limit n/2={grid.n//2}")
    banach = BanachSpec.sequence(m, r) if m > 1 else BanachSpec.scalar()
    coeff = np.zeros(grid.shape + (m,), dtype=np.complex128)
    for j, k in enumerate(ladder):
        coeff[k, j] = amplitudes[j] * signs[j]
    from .grid import Spectrum, inverse_transform

    return inverse_transform(Spectrum(grid, banach, coeff))


def make_lacunary_field(
    grid: GridSpec,
    m: int,
    r: float,
    amplitudes,
    signs,
    base_freq: int = 1,
) -> Field:
    """Strictly lacunary field with frequencies k_j = base_freq * 2^j.

    Rejects ladders that do not fit below the Nyquist limit.
    """
    ladder = [base_freq * 2**j for j in range(m)]
    if ladder[-1] >= grid.n // 2:
        raise ValueError(
            f"lacunary ladder base={base_freq}, m={m} exceeds the Nyquist limit n/2={grid.n//2}"
        )
    return make_ladder_field(grid, ladder, r, amplitudes, signs)


def _probe_time_grid(grid: GridSpec, ladder, count: int) -> TimeGrid:
    xi_min = 2.0 * np.pi * min(ladder) / grid.period
    xi_max = 2.0 * np.pi * max(ladder) / grid.period
    return default_time_grid(xi_min, xi_max, count=count)


def _report_lp(report: SquareFunctionReport, p: float) -> float:
    vol = report.grid.cell_volume
    if np.isinf(p):
        return float(report.values.max())
    return float((vol * (report.values**p).sum()) ** (1.0 / p))


def cotype_ratio(f: Field, ord: FracOrder, q: float, p: float, tg: TimeGrid) -> float:
    """||g(f)||_p / ||f||_p, the quotient bounded for cotype-q value spaces."""
    denom = lp_norm(f, p)
    if denom == 0.0:
        raise ValueError("cotype ratio needs a nonzero field")
    return _report_lp(g_function(f, ord, q, tg), p) / denom


def type_ratio(f: Field, ord: FracOrder, q: float, p: float, tg: TimeGrid) -> float:
    """||f||_p / (||E0 f||_p + ||g(f)||_p), bounded for type-q value spaces."""
    num = lp_norm(f, p)
    if num == 0.0:
        raise ValueError("type ratio needs a nonzero field")
    fixed = lp_norm(e0_project(f), p)
    gnorm = _report_lp(g_function(f, ord, q, tg), p)
    return num / (fixed + gnorm)


@dataclass(frozen=True)
class ProbeConfig:
    """Protocol of a cotype/type probe sweep.

    The defaults are frozen from a calibration run of the shipped protocol;
    ``bounded_max`` and ``growing_min`` are the trend thresholds applied to
    rho(m_last)/rho(m_first).
    """

    r: float = 4.0
    q: float = 2.0
    p: float | None = None
    alpha: float = 16.0
    m_list: tuple[int, ...] = (2, 4, 8, 16, 32, 64)
    trials: int = 2
    seed: int = 20260810
    grid_n: int = 8192
    base_freq: int = 2
    time_count: int = 400
    bounded_max: float = 1.2
    growing_min: float = 1.5

    def __post_init__(self) -> None:
        if tuple(sorted(set(self.m_list))) != tuple(self.m_list):
            raise ValueError("m_list must be strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not (self.q > 1):
            raise ValueError("q must exceed 1")
        if not (self.r >= 1):
            raise ValueError("r must be in [1, inf]")
        p = self.p if self.p is not None else self.q
        if not (p > 1):
            raise ValueError("p must exceed 1")

    @property
    def lebesgue_p(self) -> float:
        return self.p if self.p is not None else self.q


@dataclass(frozen=True)
class ProbeResult:
    """Per-dimension best ratios rho(m) and the fitted growth exponent."""

    kind: str
    m_values: tuple[int, ...]
    rho: tuple[float, ...]
    trials: int
    growth_exponent: float
    config: ProbeConfig = field(repr=False, default=None)

    @property
    def trend_ratio(self) -> float:
        return self.rho[-1] / self.rho[0]

    def verdict(self) -> str:
        """"growing", "bounded", or "inconclusive" against the frozen thresholds."""
        if self.trend_ratio >= self.config.growing_min:
            return "growing"
        if self.trend_ratio <= self.config.bounded_max:
            return "bounded"
        return "inconclusive"

    def write_csv(self, path) -> None:
        fmt = "{:.17g}"
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("m,rho,trials,growth_exponent\n")
            for m, rho in zip(self.m_values, self.rho):
                fh.write(f"{m},{fmt.format(rho)},{self.trials},{fmt.format(self.growth_exponent)}\n")


def _trial_draws(cfg: ProbeConfig, m: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Amplitude/sign draws at dimension m: one equal-amplitude field plus
    seeded random sign/amplitude trials."""
    draws = [(np.ones(m), np.ones(m))]
    for trial in range(cfg.trials):
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, m, trial]))
        signs = rng.choice([-1.0, 1.0], size=m)
        if trial % 2 == 0:
            amp = np.ones(m)
        else:
            amp = np.exp(0.3 * rng.standard_normal(m))
        draws.append((amp, signs))
    return draws


def _run_probe(cfg: ProbeConfig, ratio_fn, kind: str) -> ProbeResult:
    grid = GridSpec(dim=1, n=cfg.grid_n)
    ord = FracOrder.of(cfg.alpha)
    p = cfg.lebesgue_p
    full_ladder = lacunary_ladder(max(cfg.m_list), cfg.base_freq, cfg.grid_n // 2)
    tg = _probe_time_grid(grid, full_ladder, cfg.time_count)
    rhos = []
    for m in cfg.m_list:
        ladder = full_ladder[:m]

        def one(draw):
            amp, signs = draw
            f = make_ladder_field(grid, ladder, cfg.r, amp, signs)
            return ratio_fn(f, ord, cfg.q, p, tg)

        ratios = ordered_map(one, _trial_draws(cfg, m))
        # Trial families are nested across m (smaller fields embed as
        # zero-padded draws), so the per-m best is the running max.
        best = max(ratios)
        rhos.append(max(best, rhos[-1]) if rhos else best)
    logm = np.log(np.asarray(cfg.m_list, dtype=np.float64))
    logr = np.log(np.asarray(rhos))
    slope = float(np.polyfit(logm, logr, 1)[0])
    return ProbeResult(
        kind=kind,
        m_values=tuple(cfg.m_list),
        rho=tuple(float(r) for r in rhos),
        trials=cfg.trials,
        growth_exponent=slope,
        config=cfg,
    )


def run_cotype_probe(cfg: ProbeConfig) -> ProbeResult:
    """Sweep rho(m) = max_trials ||g(f)||_p / ||f||_p over the trial family."""
    return _run_probe(cfg, cotype_ratio, "cotype")


def run_type_probe(cfg: ProbeConfig) -> ProbeResult:
    """Sweep rho(m) = max_trials ||f||_p / (||E0 f||_p + ||g(f)||_p)."""
    if not (1 < cfg.q <= 2):
        raise ValueError("type probe needs q in (1, 2]")
    return _run_probe(cfg, type_ratio, "type")
