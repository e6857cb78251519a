"""Batch command-line front end: compute, verify, probe.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 input parse error, 4 quadrature accuracy-budget failure.  All outputs are
CSV plus key=value metadata sidecars, written atomically (temp + rename),
byte-reproducible for a fixed config and seed.
"""

from __future__ import annotations

import argparse
import os
import sys
import tempfile
from dataclasses import replace

import numpy as np

from . import __version__
from . import hilbert as hb
from .config import RunConfig, config_hash, load_config
from .errors import AccuracyError, ConfigError, InputError
from .fracderiv import FracOrder, frac_derivative_spectral
from .grid import frequency_band, read_field_csv, write_field_csv
from .probes import ProbeConfig, run_cotype_probe, run_type_probe
from .semigroup import SubordinationQuad, subordinate_poisson
from .squarefuncs import area_function, g_function, gstar_function
from .suites import SUITE_NAMES, format_table, run_suite
from .timegrid import TimeGrid, default_time_grid

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_INPUT = 3
EXIT_ACCURACY = 4

_COMPUTE_KINDS = ("semigroup", "fracderiv", "gfun", "area", "gstar")
_PROBE_KINDS = ("cotype", "type", "hilbert-convergence")


def _atomic_write_text(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_via(path: str, writer) -> None:
    """Run a path-taking writer against a temp file, then rename."""
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".part")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _sidecar(cfg: RunConfig, command: str, kind: str, extra: dict | None = None) -> str:
    lines = [
        f"command={command}",
        f"kind={kind}",
        f"version={__version__}",
        f"config_hash={config_hash(cfg)}",
        f"seed={cfg.seed}",
        f"subordination_nodes={cfg.subordination_nodes}",
        f"sw_near={cfg.sw_near}",
        f"sw_far={cfg.sw_far}",
        f"t_count={cfg.t_count}",
    ]
    for k, v in (extra or {}).items():
        lines.append(f"{k}={v}")
    return "\n".join(lines) + "\n"


def _time_grid_for(cfg: RunConfig, f) -> TimeGrid:
    if cfg.t_min > 0 and cfg.t_max > 0:
        return TimeGrid(cfg.t_min, cfg.t_max, cfg.t_count)
    xi_lo, xi_hi = frequency_band(f)
    return default_time_grid(xi_lo, xi_hi, cfg.t_count)


def _cmd_compute(args, cfg: RunConfig) -> int:
    if args.input is None:
        raise ConfigError("compute requires --input FIELD_CSV")
    f = read_field_csv(args.input, period=cfg.period)
    out_dir = args.out or "."
    os.makedirs(out_dir, exist_ok=True)
    kind = args.kind
    base = os.path.join(out_dir, kind)
    alpha = cfg.alpha[0]
    extra = {"t": repr(cfg.t), "alpha": repr(alpha), "q": repr(cfg.q), "lambda": repr(cfg.lam)}

    if kind == "semigroup":
        quad = SubordinationQuad.build(cfg.subordination_nodes)
        out = subordinate_poisson(f, cfg.t, quad)
        _atomic_via(base + ".csv", lambda p: write_field_csv(out, p))
    elif kind == "fracderiv":
        out = frac_derivative_spectral(f, cfg.t, FracOrder.of(alpha))
        _atomic_via(base + ".csv", lambda p: write_field_csv(out, p))
    else:
        tg = _time_grid_for(cfg, f)
        ord = FracOrder.of(alpha)
        os_arg = cfg.oversample if cfg.oversample > 0 else None
        if kind == "gfun":
            rep = g_function(f, ord, cfg.q, tg)
        elif kind == "area":
            rep = area_function(f, ord, cfg.q, tg, oversample=os_arg)
        else:
            rep = gstar_function(f, ord, cfg.q, cfg.lam, tg, oversample=os_arg)
        _atomic_via(base + ".csv", lambda p: rep.write_csv(p))
        _atomic_write_text(base + ".meta",
                           rep.sidecar_text() + _sidecar(cfg, "compute", kind))
        print(f"wrote {base}.csv and {base}.meta")
        return EXIT_OK
    _atomic_write_text(base + ".meta", _sidecar(cfg, "compute", kind, extra))
    print(f"wrote {base}.csv and {base}.meta")
    return EXIT_OK


def _cmd_verify(args, cfg: RunConfig) -> int:
    rows = run_suite(args.suite, cfg)
    table = format_table(rows)
    print(table)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        lines = ["suite,check,detail,value,tolerance,status"]
        for r in rows:
            status = "PASS" if r.passed else "FAIL"
            detail = r.detail.replace(",", ";")
            lines.append(f"{r.suite},{r.name},{detail},{r.value:.17g},{r.tolerance:.17g},{status}")
        path = os.path.join(args.out, f"verify_{args.suite}.csv")
        _atomic_write_text(path, "\n".join(lines) + "\n")
        _atomic_write_text(os.path.join(args.out, f"verify_{args.suite}.meta"),
                           _sidecar(cfg, "verify", args.suite))
    return EXIT_OK if all(r.passed for r in rows) else EXIT_VERIFY_FAILED


def _hilbert_convergence_probe(cfg: RunConfig, out_dir: str | None) -> int:
    f = hb.LineSample.from_function(lambda x: np.exp(-(x**2)), cfg.line_half_width, cfg.line_n)
    rep = hb.convergence_probe(f, hb.convergence_eps_sequence(f))
    f2 = hb.LineSample.from_function(lambda x: np.exp(-(x**2)), cfg.line_half_width, 2 * cfg.line_n)
    rep2 = hb.convergence_probe(f2, hb.convergence_eps_sequence(f2))
    hstar = hb.maximal_hilbert(f)
    hphi = hb.smoothed_maximal_hilbert(f)
    from .grid import BanachSpec

    mnorm = hb.hardy_littlewood_maximal(
        hb.LineSample(f.half_width, BanachSpec.scalar(),
                      f.pointwise_norm()[:, None].astype(np.complex128)))
    decay = rep.median_oscillation / max(rep2.median_oscillation, 1e-300)
    print(f"median oscillation: h = {rep.median_oscillation:.6e}, "
          f"h/2 = {rep2.median_oscillation:.6e}, decay ratio = {decay:.3f}")
    print(f"fraction of points below threshold {rep.threshold:g}: {rep.fraction_below:.4f}")
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        fmt = "{:.17g}"
        lines = ["x,osc,Hstar,Hstar_phi,M"]
        xs = f.x
        for i in range(f.n):
            lines.append(",".join(fmt.format(v) for v in
                                  (xs[i], rep.oscillation[i], hstar[i], hphi[i], mnorm[i])))
        path = os.path.join(out_dir, "probe_hilbert_convergence.csv")
        _atomic_write_text(path, "\n".join(lines) + "\n")
        _atomic_write_text(os.path.join(out_dir, "probe_hilbert_convergence.meta"),
                           _sidecar(cfg, "probe", "hilbert-convergence",
                                    {"median_oscillation": repr(rep.median_oscillation),
                                     "median_oscillation_half_step": repr(rep2.median_oscillation)}))
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_probe(args, cfg: RunConfig) -> int:
    if args.kind == "hilbert-convergence":
        return _hilbert_convergence_probe(cfg, args.out)
    pcfg = ProbeConfig(
        r=cfg.probe_r,
        q=cfg.probe_q,
        alpha=cfg.probe_alpha,
        m_list=cfg.probe_m_list,
        trials=cfg.probe_trials,
        seed=cfg.seed,
        grid_n=cfg.probe_grid_n,
        base_freq=cfg.probe_base_freq,
        time_count=cfg.probe_time_count,
        bounded_max=cfg.probe_bounded_max,
        growing_min=cfg.probe_growing_min,
    )
    result = run_cotype_probe(pcfg) if args.kind == "cotype" else run_type_probe(pcfg)
    print(f"{args.kind} probe: r={pcfg.r:g} q={pcfg.q:g} alpha={pcfg.alpha:g} "
          f"m={list(result.m_values)}")
    for m, rho in zip(result.m_values, result.rho):
        print(f"  m={m:>4d}  rho={rho:.6f}")
    print(f"trend rho({result.m_values[-1]})/rho({result.m_values[0]}) = "
          f"{result.trend_ratio:.4f}, growth exponent = {result.growth_exponent:.4f}, "
          f"verdict: {result.verdict()}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, f"probe_{args.kind}.csv")
        _atomic_via(path, lambda p: result.write_csv(p))
        _atomic_write_text(os.path.join(args.out, f"probe_{args.kind}.meta"),
                           _sidecar(cfg, "probe", args.kind,
                                    {"trend_ratio": repr(result.trend_ratio),
                                     "verdict": result.verdict()}))
        print(f"wrote {path}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fraclps",
        description="Fractional Littlewood-Paley square functions on periodic grids: "
                    "compute fields and reports, verify identities, run value-space probes.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_compute = sub.add_parser("compute", help="apply an operator to an input field CSV")
    p_compute.add_argument("--kind", required=True, choices=_COMPUTE_KINDS)
    p_compute.add_argument("--config", default=None)
    p_compute.add_argument("--input", default=None, help="input field CSV")
    p_compute.add_argument("--out", default=None, help="output directory")
    p_compute.add_argument("--seed", type=int, default=None)

    p_verify = sub.add_parser("verify", help="run an identity-check suite")
    p_verify.add_argument("--suite", default="all", choices=SUITE_NAMES + ("all",))
    p_verify.add_argument("--config", default=None)
    p_verify.add_argument("--out", default=None)
    p_verify.add_argument("--seed", type=int, default=None)

    p_probe = sub.add_parser("probe", help="run a cotype/type or convergence probe")
    p_probe.add_argument("--kind", required=True, choices=_PROBE_KINDS)
    p_probe.add_argument("--config", default=None)
    p_probe.add_argument("--out", default=None)
    p_probe.add_argument("--seed", type=int, default=None)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be a nonnegative integer")
            cfg = replace(cfg, seed=args.seed)
        if args.command == "compute":
            return _cmd_compute(args, cfg)
        if args.command == "verify":
            return _cmd_verify(args, cfg)
        return _cmd_probe(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AccuracyError as exc:
        print(f"accuracy error: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
