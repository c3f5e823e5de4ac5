"""Command-line entry point: ``sixdma {run,sweep-elements,sweep-gamma,scenario}``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .channel import Scenario
from .config import ConfigError, SolverConfig, dump_config, load_config
from .pso import InfeasiblePoseError
from .runner import (
    SCHEME_ORDER,
    export_results,
    median_table,
    run_scheme,
    scheme_from_name,
    sweep_elements,
    sweep_gamma,
    trace_records,
)

log = logging.getLogger("sixdma_isac")


def parse_range(text: str, cast=float) -> list:
    """``a..b`` (step 1), ``a..b:step`` (inclusive) or a comma list ``a,b,c``."""
    text = text.strip()
    if ".." not in text:
        return [cast(x) for x in text.split(",") if x.strip()]
    span, _, step = text.partition(":")
    lo, _, hi = span.partition("..")
    lo, hi = float(lo), float(hi)
    step = float(step) if step else 1.0
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return [cast(lo + i * step) for i in range(n)]


def _load(args):
    if args.scenario is None:
        return Scenario(), SolverConfig()
    return load_config(args.scenario)


def _write_traces(results, out: Path):
    path = out.with_suffix(".trace.jsonl")
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for rec in trace_records(results):
            fh.write(json.dumps(rec) + "\n")
    log.info("wrote traces to %s", path)


def _print_medians(results, keys):
    for m in median_table(results, keys=keys):
        cells = " ".join(f"{k}={m[k]}" for k in keys)
        print(f"{cells} snr_s_dB={m['snr_s_dB']:.6f} snr_c_dB={m['snr_c_dB']:.6f} rho={m['rho']:.6f} n={m['count']}")


def cmd_run(args):
    scenario, solver = _load(args)
    scheme = scheme_from_name(args.scheme, scenario)
    result = run_scheme(scenario, scheme, args.seed, solver)
    out = Path(args.out)
    export_results([result], out)
    print(f"{scheme.name}: snr_s={result.snr_s_dB:.6f} dB snr_c={result.snr_c_dB:.6f} dB "
          f"rho={result.rho:.6f} p_R={np.round(result.pose.p_R, 3).tolist()} "
          f"gamma={np.round(result.pose.gamma, 4).tolist()} ao_iters={result.ao_iters}")
    if args.verbose:
        _write_traces([result], out)
    if args.plot:
        from .plotting import plot_geometry

        plot_geometry([result], scenario, out.with_suffix(".png"))
    return 0


def cmd_sweep_elements(args):
    scenario, solver = _load(args)
    results = sweep_elements(scenario, args.schemes, parse_range(args.nx, int), args.seeds,
                             master_seed=args.seed, solver=solver, workers=args.jobs)
    out = Path(args.out)
    export_results(results, out)
    _print_medians(results, ("scheme", "N_x"))
    if args.verbose:
        _write_traces(results, out)
    if args.plot:
        from .plotting import plot_elements, plot_geometry

        plot_elements(results, out.with_suffix(".png"))
        plot_geometry(results, scenario, out.with_name(out.stem + "_poses.png"))
    return 0


def cmd_sweep_gamma(args):
    scenario, solver = _load(args)
    if args.nx is not None:
        scenario = scenario.replace(N_x=args.nx, N_y=args.nx)
    results = sweep_gamma(scenario, args.schemes, parse_range(args.gamma, float), args.seeds,
                          master_seed=args.seed, solver=solver, workers=args.jobs)
    out = Path(args.out)
    export_results(results, out)
    _print_medians(results, ("scheme", "Gamma0_dB"))
    if args.verbose:
        _write_traces(results, out)
    if args.plot:
        from .plotting import plot_tradeoff

        plot_tradeoff(results, out.with_suffix(".png"))
    return 0


def cmd_scenario(args):
    text = json.dumps(dump_config(Scenario(), SolverConfig()), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="sixdma", description=__doc__)
    parser.add_argument("--log-level", default="WARNING")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed_help):
        p.add_argument("--scenario", help="scenario JSON (defaults to the built-in scenario)")
        p.add_argument("--seed", type=int, default=0, help=seed_help)
        p.add_argument("--out", required=True, help="output CSV path")
        p.add_argument("--verbose", action="store_true", help="write per-iteration traces to <out>.trace.jsonl")
        p.add_argument("--plot", action="store_true", help="render figures next to the CSV")

    p = sub.add_parser("run", help="optimise one scheme")
    common(p, "RNG seed")
    p.add_argument("--scheme", required=True, help=f"one of {', '.join(SCHEME_ORDER)}")
    p.set_defaults(func=cmd_run)

    def sweep_opts(p):
        p.add_argument("--seeds", type=int, default=5, help="replicates per cell")
        p.add_argument("--schemes", type=lambda s: s.split(","), default=list(SCHEME_ORDER))
        p.add_argument("--jobs", type=int, default=1, help="worker processes")

    p = sub.add_parser("sweep-elements", help="sweep N_x = N_y")
    common(p, "master seed")
    p.add_argument("--nx", default="4..16:4", help="N_x values, e.g. 4..16 or 4..16:4 or 4,8,16")
    sweep_opts(p)
    p.set_defaults(func=cmd_sweep_elements)

    p = sub.add_parser("sweep-gamma", help="sweep the communication threshold")
    common(p, "master seed")
    p.add_argument("--gamma", default="-10..40:2", help="Gamma0 values in dB, e.g. -10..40:2")
    p.add_argument("--nx", type=int, default=None, help="override N_x = N_y")
    sweep_opts(p)
    p.set_defaults(func=cmd_sweep_gamma)

    p = sub.add_parser("scenario", help="print the default scenario JSON")
    p.add_argument("--out")
    p.set_defaults(func=cmd_scenario)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError, InfeasiblePoseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
