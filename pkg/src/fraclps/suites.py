"""Verification suites: one row per identity/inequality check, with PASS/FAIL.

Each suite builds deterministic test fields from the run configuration's
seed, drives the corresponding check operations, and reports a residual or
ratio against a pinned tolerance.  A nonzero ``tolerance`` in the config
overrides every per-check tolerance (useful to force failures in CI
plumbing tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fracderiv as fd
from . import hilbert as hb
from . import semigroup as sg
from . import squarefuncs as sqf
from .config import RunConfig
from .grid import (
    BanachSpec,
    Field,
    GridSpec,
    e0_project,
    lp_norm,
    random_band_limited_field,
    single_mode_field,
)
from .timegrid import TimeGrid, default_time_grid

__all__ = ["CheckRow", "SUITE_NAMES", "run_suite", "format_table"]

SUITE_NAMES = ("semigroup", "fracderiv", "squarefuncs", "hilbert")


@dataclass(frozen=True)
class CheckRow:
    suite: str
    name: str
    detail: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.tolerance)


def _rng(cfg: RunConfig, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([cfg.seed, *key]))


def _grid(cfg: RunConfig) -> GridSpec:
    return GridSpec(dim=cfg.dim, n=cfg.n, period=cfg.period)


def _banach(cfg: RunConfig) -> BanachSpec:
    if cfg.banach_m == 1:
        return BanachSpec.scalar()
    return BanachSpec.sequence(cfg.banach_m, cfg.banach_r)


def _fields(cfg: RunConfig, count: int, key: int, banach: BanachSpec | None = None,
            real: bool = False) -> list[Field]:
    grid = _grid(cfg)
    banach = banach or _banach(cfg)
    rng = _rng(cfg, key)
    return [
        random_band_limited_field(grid, banach, rng, cfg.k_min, cfg.k_max, real=real)
        for _ in range(count)
    ]


def _tg(cfg: RunConfig, low_scale: float = 1e-5) -> TimeGrid:
    xi_lo = 2.0 * math.pi * cfg.k_min / cfg.period
    xi_hi = 2.0 * math.pi * cfg.k_max / cfg.period
    if cfg.t_min > 0 and cfg.t_max > 0:
        return TimeGrid(cfg.t_min, cfg.t_max, cfg.t_count)
    return default_time_grid(xi_lo, xi_hi, cfg.t_count, low_scale=low_scale)


# ---------------------------------------------------------------------------
# semigroup suite


def _suite_semigroup(cfg: RunConfig) -> list[CheckRow]:
    rows = []
    grid = _grid(cfg)
    quad = sg.SubordinationQuad.build(cfg.subordination_nodes)

    worst = 0.0
    for f in _fields(cfg, cfg.trials, key=11):
        for t in (0.1, 1.0, 10.0):
            direct = sg.poisson_apply(f, t)
            sub = sg.subordinate_poisson(f, t, quad)
            worst = max(worst, fd.relative_l2_distance(sub, direct))
    rows.append(CheckRow("semigroup", "subordination_agreement",
                         f"subordination route vs direct multiplier, {cfg.trials} fields x 3 times",
                         worst, 1e-8))

    rows.append(CheckRow("semigroup", "subordination_mass",
                         "subordination weights integrate the density to 1",
                         abs(quad.density_integral() - 1.0), 1e-9))

    f = _fields(cfg, 1, key=12)[0]
    law = max(
        fd.relative_l2_distance(sg.poisson_apply(sg.poisson_apply(f, 0.4), 0.6),
                                sg.poisson_apply(f, 1.0)),
        fd.relative_l2_distance(sg.heat_apply(sg.heat_apply(f, 0.02), 0.03),
                                sg.heat_apply(f, 0.05)),
    )
    rows.append(CheckRow("semigroup", "semigroup_law",
                         "P_s P_t = P_{s+t} and the heat analogue", law, 1e-12))

    over = 0.0
    for p in (1.0, 2.0, 4.0, math.inf):
        base = lp_norm(f, p)
        for t in (0.05, 0.5, 5.0):
            over = max(over, lp_norm(sg.poisson_apply(f, t), p) / base - 1.0)
    rows.append(CheckRow("semigroup", "contractivity",
                         "||P_t f||_p <= ||f||_p for p in {1,2,4,inf}", max(over, 0.0), 1e-12))

    const = single_mode_field(grid, (0,) * grid.dim, amplitude=3.0)
    fixed = fd.relative_l2_distance(sg.subordinate_poisson(const, 2.0, quad), const)
    rows.append(CheckRow("semigroup", "constant_fixed",
                         "constants are fixed points of the subordinated semigroup",
                         fixed, 1e-9))

    t0, h = 1.0, 1e-4
    fdiff = (sg.poisson_apply(f, t0 + h) - sg.poisson_apply(f, t0 - h)) * (0.5 / h)
    deriv = sg.poisson_derivative_integer(f, t0, 1)
    rows.append(CheckRow("semigroup", "derivative_fd_crosscheck",
                         "first time derivative vs centered finite difference",
                         fd.relative_l2_distance(fdiff, deriv), 1e-6))
    return rows


# ---------------------------------------------------------------------------
# fracderiv suite


def _suite_fracderiv(cfg: RunConfig) -> list[CheckRow]:
    rows = []
    grid = _grid(cfg)
    fields = _fields(cfg, max(cfg.trials // 4, 2), key=21)

    worst = 0.0
    for f in fields:
        for a in (0.3, 0.5, 1.0, 1.3, 2.0, 2.7):
            o = fd.FracOrder.of(a)
            for t in (0.1, 1.0, 10.0):
                worst = max(worst, fd.relative_l2_distance(
                    fd.frac_derivative_quadrature(f, t, o),
                    fd.frac_derivative_spectral(f, t, o)))
    rows.append(CheckRow("fracderiv", "route_agreement",
                         "integral route vs spectral multiplier over alpha and t",
                         worst, 1e-6))

    f = fields[0]
    integer = max(
        fd.relative_l2_distance(fd.frac_derivative_quadrature(f, 1.0, fd.FracOrder.of(1.0)),
                                sg.poisson_derivative_integer(f, 1.0, 1)),
        fd.relative_l2_distance(fd.frac_derivative_quadrature(f, 1.0, fd.FracOrder.of(2.0)),
                                sg.poisson_derivative_integer(f, 1.0, 2)),
    )
    rows.append(CheckRow("fracderiv", "integer_consistency",
                         "integral route at integer orders vs plain derivatives",
                         integer, 1e-7))

    freal = _fields(cfg, 1, key=22, banach=BanachSpec.scalar(), real=True)[0]
    phase = 0.0
    for a in (0.3, 0.7, 1.4, 2.5):
        d = fd.frac_derivative_spectral(freal, 0.5, fd.FracOrder.of(a))
        vals = np.exp(1j * np.pi * a) * d.values
        phase = max(phase, float(np.abs(vals.imag).max() / max(np.abs(vals.real).max(), 1e-300)))
    rows.append(CheckRow("fracderiv", "phase_realness",
                         "e^{i pi a} times the derivative of a real field is real",
                         phase, 1e-10))

    sweep = TimeGrid(1e-3, 1e3, 61)
    stab = 0.0
    for a in (0.7, 1.0):
        o = fd.FracOrder.of(a)
        r1 = fd.check_decay_bound(f, o, 2.0, sweep)
        r2 = fd.check_decay_bound(f, o, 2.0, sweep.refine())
        stab = max(stab, abs(r2.supremum / r1.supremum - 1.0))
    rows.append(CheckRow("fracderiv", "decay_stability",
                         "sup_t t^a ||d^a P_t f||_p / ||f||_p stable under grid doubling",
                         stab, 0.05))

    single = single_mode_field(grid, (1,) * grid.dim)
    rows.append(CheckRow("fracderiv", "order_reduction_single",
                         "recover order 0.5 from order 1.5, single mode",
                         fd.check_order_reduction(single, 0.5, 1.5, 1.0), 1e-6))
    rows.append(CheckRow("fracderiv", "order_reduction_random",
                         "recover order 0.5 from order 1.5, random field",
                         fd.check_order_reduction(f, 0.5, 1.5, 1.0), 1e-5))
    rows.append(CheckRow("fracderiv", "composition_single",
                         "order 0.75 of order 0.75 equals order 1.5, single mode",
                         fd.check_composition(single, 0.75, 0.75, 1.0), 1e-6))
    rows.append(CheckRow("fracderiv", "composition_random",
                         "order 0.5 of order 1.7 equals order 2.2, random field",
                         fd.check_composition(f, 0.5, 1.7, 1.0), 1e-5))

    if grid.dim == 1:
        xg = np.exp(np.linspace(np.log(0.05), np.log(20.0), 48))
        kstab = 0.0
        for a in (0.5, 1.0):
            o = fd.FracOrder.of(a)
            r1 = fd.check_kernel_bounds(o, 2.0, xg)
            xg2 = np.exp(np.linspace(np.log(0.05), np.log(20.0), 96))
            r2 = fd.check_kernel_bounds(o, 2.0, xg2)
            kstab = max(kstab, abs(r2.sup_size / r1.sup_size - 1.0),
                        abs(r2.sup_grad / r1.sup_grad - 1.0))
        rows.append(CheckRow("fracderiv", "kernel_bounds_stability",
                             "|x| A(x) and |x|^2 A'(x) stable under x-grid refinement",
                             kstab, 0.10))

        t0, x0, h = 1.1, 0.7, 1e-3
        def pk(u): return u / (np.pi * (u * u + x0 * x0))
        fdval = (pk(t0 + h) - 2 * pk(t0) + pk(t0 - h)) / h**2
        an = fd.poisson_kernel_time_derivative(t0, x0, 2)
        rows.append(CheckRow("fracderiv", "kernel_derivative_fd",
                             "analytic second kernel derivative vs finite difference",
                             abs(fdval - an) / abs(an), 1e-5))

        o1 = fd.FracOrder.of(1.0)
        base = fd.kernel_value(1.0, 0.7, o1)
        hom = max(abs(c * fd.kernel_value(c, c * 0.7, o1) - base) / abs(base) for c in (2.0, 5.0))
        rows.append(CheckRow("fracderiv", "kernel_homogeneity",
                             "joint (t, x) rescaling leaves c K_{ct}(cx) invariant",
                             hom, 1e-10))
    return rows


# ---------------------------------------------------------------------------
# squarefuncs suite


def _suite_squarefuncs(cfg: RunConfig) -> list[CheckRow]:
    rows = []
    grid = _grid(cfg)
    tg = _tg(cfg)
    single = single_mode_field(grid, (cfg.k_min,) * grid.dim)
    xi_single = 2.0 * math.pi * cfg.k_min * math.sqrt(grid.dim) / cfg.period
    tg_single = default_time_grid(xi_single, xi_single, cfg.t_count)

    g1 = sqf.g_function(single, fd.FracOrder.of(1.0), 2.0, tg_single)
    rows.append(CheckRow("squarefuncs", "single_mode_g",
                         "g of a single mode at order 1, q=2 is 1/2 everywhere",
                         float(np.abs(g1.values - 0.5).max()), 1e-6))

    fields = _fields(cfg, max(cfg.trials // 2, 4), key=31)
    ratio_worst = 0.0
    for (b, gpair) in ((0.5, 1.5), (1.0, 2.0), (1.3, 2.7)):
        for q in (2.0, 3.0):
            rep = sqf.check_beta_gamma_comparison(fields[0], b, gpair, q, tg)
            ratio_worst = max(ratio_worst, rep.max_ratio)
    rows.append(CheckRow("squarefuncs", "order_comparison",
                         "g_beta <= (Gamma(beta)/Gamma(gamma)) g_gamma pointwise",
                         ratio_worst, 1.0 + 1e-4))

    rows.append(CheckRow("squarefuncs", "lq_identity_single",
                         "||S||_q^q = v_n ||g||_q^q, single mode",
                         sqf.check_Lq_identity(single, fd.FracOrder.of(1.0), 2.0, tg_single),
                         1e-6))
    worst = max(sqf.check_Lq_identity(f, fd.FracOrder.of(1.0), 2.0, tg) for f in fields)
    rows.append(CheckRow("squarefuncs", "lq_identity_random",
                         "||S||_q^q = v_n ||g||_q^q, random fields",
                         worst, 1e-4))

    chain = 0.0
    o = fd.FracOrder.of(1.0)
    for lam in (2.0, 4.0):
        s = sqf.area_function(fields[0], o, cfg.q, tg)
        gs = sqf.gstar_function(fields[0], o, cfg.q, lam, tg)
        bound = 2.0 ** (lam * grid.dim / cfg.q) * gs.values
        chain = max(chain, float((s.values / np.maximum(bound, 1e-300)).max()))
    rows.append(CheckRow("squarefuncs", "cone_vs_gstar",
                         "S <= 2^{lambda n / q} g* pointwise", chain, 1.0 + 1e-4))

    r1 = sqf.check_g_le_S(fields[0], o, cfg.q, tg)
    from .grid import resample

    fine = resample(fields[0], GridSpec(grid.dim, grid.n * 2, grid.period))
    r2 = sqf.check_g_le_S(fine, o, cfg.q, tg.refine())
    rows.append(CheckRow("squarefuncs", "g_vs_cone_stability",
                         "max g/S stable under refining both grids",
                         abs(r2.max_ratio / r1.max_ratio - 1.0), 0.10))

    tg_pol = default_time_grid(xi_single, xi_single, cfg.t_count, low_scale=1e-6)
    rows.append(CheckRow("squarefuncs", "polarization_single",
                         "conjugate-pairing polarization identity, single mode",
                         sqf.check_polarization(single, single, fd.FracOrder.of(1.0), tg_pol),
                         1e-8))
    scalars = _fields(cfg, 2, key=32, banach=BanachSpec.scalar())
    tg_r = _tg(cfg, low_scale=1e-6)
    rows.append(CheckRow("squarefuncs", "polarization_random",
                         "conjugate-pairing polarization identity, random pair",
                         sqf.check_polarization(scalars[0], scalars[1], fd.FracOrder.of(0.8), tg_r),
                         1e-6))

    tg_it = TimeGrid(tg.t_min, tg.t_max, min(cfg.t_count, 150))
    rows.append(CheckRow("squarefuncs", "iteration_identity_k1",
                         "double-scale identity with the Beta constant, k=1",
                         sqf.check_iteration_identity(scalars[0], 1, 2.0, tg_it), 1e-4))
    rows.append(CheckRow("squarefuncs", "iteration_identity_k2",
                         "double-scale identity with the Beta constant, k=2",
                         sqf.check_iteration_identity(scalars[0], 2, 2.0, tg_it), 1e-4))

    gs2 = sqf.gstar_function(fields[0], o, cfg.q, 2.0, tg)
    gs4 = sqf.gstar_function(fields[0], o, cfg.q, 4.0, tg)
    gs8 = sqf.gstar_function(fields[0], o, cfg.q, 8.0, tg)
    mono = max(float((gs4.values - gs2.values).max()), float((gs8.values - gs4.values).max()))
    rows.append(CheckRow("squarefuncs", "gstar_lambda_monotone",
                         "g* decreases pointwise as lambda grows", max(mono, 0.0), 1e-12))

    zero = single_mode_field(grid, (0,) * grid.dim, amplitude=0.0)
    constf = single_mode_field(grid, (0,) * grid.dim, amplitude=2.5)
    vanish = max(
        float(sqf.g_function(zero, o, 2.0, tg_single).values.max()),
        float(sqf.g_function(constf, o, 2.0, tg_single).values.max()),
    )
    rows.append(CheckRow("squarefuncs", "mean_part_annihilated",
                         "g vanishes identically on constants", vanish, 1e-10))

    hv = np.abs(scalars[0].values[..., 0]) ** 2
    habs = Field(grid, BanachSpec.scalar(), hv[..., None].astype(np.complex128))
    tg_m = TimeGrid(1e-3, 10.0, 40)
    dom1 = sqf.check_maximal_domination(habs, 2.0, tg_m)
    dom2 = sqf.check_maximal_domination(habs, 2.0, tg_m.refine())
    dstab = abs(dom2.max_ratio / dom1.max_ratio - 1.0)
    rows.append(CheckRow("squarefuncs", "maximal_domination_stability",
                         "sup_t weighted averages vs M h, stable under t refinement",
                         dstab, 0.10))
    return rows


# ---------------------------------------------------------------------------
# hilbert suite


def _hilbert_fields(cfg: RunConfig, n: int) -> list[hb.LineSample]:
    rng = _rng(cfg, 41)
    samples = []
    A = cfg.line_half_width
    for _ in range(10):
        centers = rng.uniform(-3.0, 3.0, size=3)
        widths = rng.uniform(0.3, 1.2, size=3)
        amps = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        freqs = rng.uniform(0.0, 4.0, size=3)

        def fn(x, centers=centers, widths=widths, amps=amps, freqs=freqs):
            out = np.zeros_like(x, dtype=np.complex128)
            for c, w, a, k in zip(centers, widths, amps, freqs):
                out += a * np.exp(-((x - c) / w) ** 2) * np.cos(k * x)
            return out

        samples.append(hb.LineSample.from_function(fn, A, n))
    return samples


def _suite_hilbert(cfg: RunConfig) -> list[CheckRow]:
    rows = []
    n = cfg.line_n
    A = cfg.line_half_width

    box = hb.LineSample.from_function(lambda x: (np.abs(x) <= 1.0).astype(complex), A, n)
    H = hb.truncated_hilbert(box, 4.0 * box.step)
    i2 = int(np.argmin(np.abs(box.x - 2.0)))
    rows.append(CheckRow("hilbert", "box_closed_form",
                         "H of the unit-interval indicator at x=2 equals log 3",
                         abs(float(H.values[i2, 0].real) - math.log(3.0)), 5e-3))

    gauss = hb.LineSample.from_function(lambda x: np.exp(-(x**2)), A, n)
    Hg = hb.truncated_hilbert(gauss, 16.0 * gauss.step)
    i0 = int(np.argmin(np.abs(gauss.x)))
    rows.append(CheckRow("hilbert", "odd_kernel_symmetry",
                         "H of an even field vanishes at its center",
                         abs(complex(Hg.values[i0, 0])), 1e-12))

    stab = 0.0
    coarse_fields = _hilbert_fields(cfg, n)
    # truncation radii shared by both resolutions and kept well above the
    # coarse step, where the sharp cutoff's O(h/eps) error is negligible
    h_coarse = 2.0 * A / n
    eps_grid = np.exp(np.linspace(np.log(64.0 * h_coarse), np.log(2.0 * A), 60))
    for f1, f2 in zip(coarse_fields, _hilbert_fields(cfg, 2 * n)):
        def ratio(f):
            hs = hb.maximal_hilbert(f, eps_grid)
            hp = hb.smoothed_maximal_hilbert(f, eps_grid=eps_grid)
            mnorm = hb.hardy_littlewood_maximal(
                hb.LineSample(f.half_width, BanachSpec.scalar(),
                              f.pointwise_norm()[:, None].astype(np.complex128)))
            return float((np.abs(hp - hs) / np.maximum(mnorm, 1e-300)).max())

        q1, q2 = ratio(f1), ratio(f2)
        stab = max(stab, abs(q2 / q1 - 1.0))
    rows.append(CheckRow("hilbert", "smoothed_comparison_stability",
                         "max |H*_phi - H*| / M(||f||) stable under halving the step",
                         stab, 0.10))

    const = hb.LineSample.from_function(lambda x: np.full_like(x, 3.0), A, n // 4)
    mc = hb.hardy_littlewood_maximal(const)
    rows.append(CheckRow("hilbert", "maximal_constant",
                         "M of a constant is the constant", float(np.abs(mc - 3.0).max()), 1e-12))

    rng = _rng(cfg, 42)
    v1 = np.abs(rng.standard_normal(n // 4))
    v2 = np.abs(rng.standard_normal(n // 4))
    mk = lambda v: hb.LineSample(A, BanachSpec.scalar(), v[:, None].astype(np.complex128))
    sub = hb.hardy_littlewood_maximal(mk(v1 + v2)) - (
        hb.hardy_littlewood_maximal(mk(v1)) + hb.hardy_littlewood_maximal(mk(v2)))
    rows.append(CheckRow("hilbert", "maximal_sublinear",
                         "M(h1 + h2) <= M h1 + M h2 pointwise",
                         max(float(sub.max()), 0.0), 1e-12))

    rolled = hb.LineSample(A, gauss.banach, np.roll(gauss.values, 37, axis=0))
    Hr = hb.truncated_hilbert(rolled, 16.0 * gauss.step)
    Hg_roll = np.roll(Hg.values, 37, axis=0)
    # compare away from the wrapped window edge
    mask = np.ones(n, dtype=bool)
    mask[:64] = mask[-64:] = False
    shift_err = float(np.abs((Hr.values - Hg_roll)[mask]).max())
    rows.append(CheckRow("hilbert", "translation_commutes",
                         "H_eps commutes with whole-grid-step translations",
                         shift_err, 1e-10))

    med1 = hb.convergence_probe(gauss, hb.convergence_eps_sequence(gauss)).median_oscillation
    gauss2 = hb.LineSample.from_function(lambda x: np.exp(-(x**2)), A, 2 * n)
    med2 = hb.convergence_probe(gauss2, hb.convergence_eps_sequence(gauss2)).median_oscillation
    rows.append(CheckRow("hilbert", "convergence_linear_decay",
                         "median oscillation halves when the step halves",
                         abs(med1 / med2 - 2.0), 0.5))
    return rows


_SUITES = {
    "semigroup": _suite_semigroup,
    "fracderiv": _suite_fracderiv,
    "squarefuncs": _suite_squarefuncs,
    "hilbert": _suite_hilbert,
}


def run_suite(name: str, cfg: RunConfig) -> list[CheckRow]:
    """Run one suite (or 'all'); honors the config's tolerance override."""
    if name == "all":
        names = SUITE_NAMES
    elif name in _SUITES:
        names = (name,)
    else:
        raise ValueError(f"unknown suite '{name}'; choose from {SUITE_NAMES + ('all',)}")
    rows: list[CheckRow] = []
    for suite in names:
        rows.extend(_SUITES[suite](cfg))
    if cfg.tolerance > 0:
        rows = [CheckRow(r.suite, r.name, r.detail, r.value, cfg.tolerance) for r in rows]
    return rows


def format_table(rows: list[CheckRow]) -> str:
    """Fixed-order plain-text table, one line per check."""
    name_w = max(len(r.name) for r in rows)
    suite_w = max(len(r.suite) for r in rows)
    lines = []
    header = f"{'suite':<{suite_w}}  {'check':<{name_w}}  {'value':>12}  {'tolerance':>12}  status"
    lines.append(header)
    lines.append("-" * len(header))
    for r in rows:
        status = "PASS" if r.passed else "FAIL"
        lines.append(
            f"{r.suite:<{suite_w}}  {r.name:<{name_w}}  {r.value:>12.4e}  {r.tolerance:>12.4e}  {status}"
        )
    npass = sum(r.passed for r in rows)
    lines.append(f"{npass}/{len(rows)} checks passed")
    return "\n".join(lines)
