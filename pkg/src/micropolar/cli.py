"""Command-line entry point: ``micropolar <subcommand> [options]``.

Exit codes: 0 when every enabled check passes, 1 when a check fails,
2 for configuration or validation errors, 3 for numerical failures.
"""
import argparse
import logging
import os
import sys
import warnings

import numpy as np

from . import __version__
from . import experiments as ex
from . import io
from .config import deep_merge, from_dict, read_toml
from .errors import ConfigurationError, DomainError, MicropolarError
from .radial import RadialDataSpec
from .spectral import set_fft_workers

log = logging.getLogger("micropolar")

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _common(p):
    p.add_argument("--config", metavar="PATH", help="TOML experiment file")
    p.add_argument("--out", metavar="DIR", help="output directory (default: outputs.directory)")
    p.add_argument("--seed", type=int, help="override the random seed")
    p.add_argument("--threads", type=int, default=1, help="FFT worker threads (results do not depend on it)")
    p.add_argument("--strict", action="store_true", help="turn warnings into errors")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="micropolar", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("symbol-verify", help="sweep the propagator against its heat asymptotics")
    _common(p)
    p.add_argument("--params", action="append", metavar="MU,CHI[,GAMMA]",
                   help="parameter set (repeatable; default: five built-in sets)")
    p.add_argument("--t-grid", default="1,1e4,81", metavar="LO,HI,COUNT")
    p.add_argument("--r-grid", default="1e-10,1e8,2000", metavar="LO,HI,COUNT")
    p.add_argument("--threshold", type=float, default=1.5)

    p = sub.add_parser("linear-decay", help="continuum decay of the linear flow by radial quadrature")
    _common(p)
    p.add_argument("--params", metavar="MU,CHI[,GAMMA]", default="1,1,0.5")
    p.add_argument("--gamma-data", action="append", type=float, metavar="GAMMA",
                   help="power-law exponent (repeatable; default: 0.5, 1, 1.5 and the enhanced pair)")
    p.add_argument("--phi", default="rational", choices=("rational", "gaussian"))
    p.add_argument("--t-grid", default="10,1e4,31", metavar="LO,HI,COUNT")

    for name, text in (
        ("simulate", "run one configured trajectory"),
        ("decay-study", "torus decay study with slope fits inside the validity window"),
        ("profile-error", "distance of the nonlinear flow to the linear flow and the heat profile"),
        ("compare-ns", "micropolar against Navier-Stokes from the same velocity"),
    ):
        p = sub.add_parser(name, help=text)
        _common(p)

    p = sub.add_parser("plot", help="SVG line charts from CSV output")
    _common(p)
    p.add_argument("csv", nargs="+", help="CSV files written by this tool")
    p.add_argument("--x", default="t")
    p.add_argument("--columns", help="comma-separated column names (default: all)")
    p.add_argument("--linear", action="store_true", help="linear axes instead of log-log")
    p.add_argument("--name", default="plot.svg", help="output file name inside --out")
    return parser


def _load(args, command):
    base = ex.base_config(command)
    raw = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}") from exc
        raw = read_toml(text)
    if args.seed is not None:
        raw = deep_merge(raw, {"seed": args.seed})
        idata = dict(raw.get("initial_data", base.get("initial_data", {})))
        idata["seed"] = args.seed
        raw["initial_data"] = idata
    if args.strict:
        raw["strict"] = True
    return from_dict(raw, base=base)


def _outdir(args, config=None):
    d = args.out or (config.outputs.directory if config is not None else "out")
    os.makedirs(d, exist_ok=True)
    return d


def _short(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.6g}"
    if isinstance(v, dict):
        return "{...}"
    return str(v)


def _finish(outdir, command, config_echo, checks, outputs, validity=None, extra=None):
    outputs = list(outputs)
    io.write_manifest(outdir, command, config_echo, checks, outputs, validity, extra)
    failed = [k for k, c in checks.items() if not c.get("passed")]
    for k, c in checks.items():
        print(f"{'PASS' if c.get('passed') else 'FAIL'} {k}: value={_short(c.get('value'))} tol={_short(c.get('tolerance'))}")
    print(f"manifest: {os.path.join(outdir, io.MANIFEST)}")
    return EXIT_CHECK if failed else EXIT_OK


def cmd_symbol_verify(args):
    if args.params:
        sets = [ex.parse_param_triple(s) for s in args.params]
    elif args.config:
        sets = [_load(args, "symbol-verify").params]
    else:
        sets = [ex.parse_param_triple(",".join(str(v) for v in t)) for t in ex.SYMBOL_PARAM_SETS]
    t_grid = ex.parse_log_grid(args.t_grid, "t-grid", minimum=1.0)
    r_grid = ex.parse_log_grid(args.r_grid, "r-grid")
    res = ex.run_symbol_verify(sets, r_grid, t_grid, args.threshold)
    outdir = _outdir(args)
    outputs = []
    for i, rep in enumerate(res["reports"]):
        path = os.path.join(outdir, f"bounds_{i}.json")
        io.write_report(path, rep.to_dict())
        outputs.append(path)
    echo = {"params": [p.as_dict() for p in sets], "t_grid": args.t_grid, "r_grid": args.r_grid,
            "threshold": args.threshold}
    return _finish(outdir, "symbol-verify", echo, res["checks"], outputs)


def cmd_linear_decay(args):
    params = ex.parse_param_triple(args.params)
    t_grid = ex.parse_log_grid(args.t_grid, "t-grid", minimum=1.0)
    if args.gamma_data:
        cases = []
        for G in args.gamma_data:
            spec = RadialDataSpec(Gamma=G, phi_kind=args.phi)
            cases.append((f"u_L_G{G:g}", spec, "u_L", -G, 0.05))
            cases.append((f"h_L_G{G:g}", spec, "h_L", -G - 1, 0.1))
    else:
        cases = ex.default_linear_cases(args.phi)
    res = ex.run_linear_decay(params, cases, t_grid, window=(t_grid[0], t_grid[-1]))
    outdir = _outdir(args)
    cols = res["columns"]
    header = list(cols)
    rows = list(zip(*[cols[h] for h in header]))
    csv_path = io.write_csv(os.path.join(outdir, "linear_decay.csv"), header, rows)
    fit_path = io.write_report(os.path.join(outdir, "decay_fit.json"), {"params": params.as_dict(), "fits": res["fits"]})
    echo = {"params": params.as_dict(), "t_grid": args.t_grid, "phi": args.phi, "gamma_data": args.gamma_data}
    return _finish(outdir, "linear-decay", echo, res["checks"], [csv_path, fit_path])


def _write_trajectory(outdir, stem, traj, params, config):
    paths = []
    if config.outputs.emit_csv:
        paths.append(io.write_trajectory_csv(os.path.join(outdir, f"{stem}.csv"), traj))
        paths.append(io.write_accumulators_csv(os.path.join(outdir, f"{stem}_integrals.csv"), traj))
    if config.outputs.emit_snapshots:
        for i, (t, st) in enumerate(traj.snapshots):
            paths.extend(io.write_snapshot(outdir, f"{stem}_snap{i:04d}", st, t, params))
    return paths


def _svg(outdir, config, paths, csvs, columns):
    if not config.outputs.emit_svg:
        return paths
    from .plot import line_chart

    series = []
    for label, path in csvs:
        _, data = io.read_csv(path)
        for c in columns:
            series.append((f"{label} {c}" if len(csvs) > 1 else c, data["t"], data[c]))
    paths.append(line_chart(os.path.join(outdir, "decay.svg"), series))
    return paths


def cmd_simulate(args):
    config = _load(args, "simulate")
    outdir = _outdir(args, config)
    res = ex.run_simulate(config)
    traj = res["trajectory"]
    paths = _write_trajectory(outdir, "trajectory", traj, config.params, config)
    if config.outputs.emit_json:
        paths.append(io.write_report(os.path.join(outdir, "summary.json"), {"meta": traj.meta, "checks": res["checks"]}))
    if config.outputs.emit_csv:
        paths = _svg(outdir, config, paths, [("run", paths[0])], ["energy_u", "energy_h"])
    validity = {"t_max": config.torus_grid().validity_time(config.params.mu)}
    return _finish(outdir, "simulate", config.to_dict(), res["checks"], paths, validity)


def cmd_decay_study(args):
    config = _load(args, "decay-study")
    outdir = _outdir(args, config)
    res = ex.run_decay_study(config)
    traj = res["trajectory"]
    paths = _write_trajectory(outdir, "trajectory", traj, config.params, config)
    if config.outputs.emit_json:
        paths.append(io.write_report(os.path.join(outdir, "decay_fit.json"), {"window": res["window"], "fits": res["fits"]}))
    if config.outputs.emit_csv:
        paths = _svg(outdir, config, paths, [("run", paths[0])], ["energy_u", "energy_h"])
    return _finish(outdir, "decay-study", config.to_dict(), res["checks"], paths, res["window"])


def cmd_profile_error(args):
    config = _load(args, "profile-error")
    outdir = _outdir(args, config)
    res = ex.run_profile_error(config)
    traj = res["trajectory"]
    paths = _write_trajectory(outdir, "trajectory", traj, config.params, config)
    if config.outputs.emit_json:
        paths.append(io.write_report(os.path.join(outdir, "profile.json"), res["summary"]))
    if config.outputs.emit_csv:
        paths = _svg(outdir, config, paths, [("run", paths[0])], ["diff_lin_u", "diff_lin_h"])
    return _finish(outdir, "profile-error", config.to_dict(), res["checks"], paths, res["summary"]["window"])


def cmd_compare_ns(args):
    config = _load(args, "compare-ns")
    outdir = _outdir(args, config)
    res = ex.run_compare_ns(config)
    paths = _write_trajectory(outdir, "micropolar", res["micropolar"], config.params, config)
    paths += _write_trajectory(outdir, "ns", res["ns"], config.params, config)
    if config.outputs.emit_json:
        paths.append(io.write_report(os.path.join(outdir, "comparison.json"), res["summary"]))
    if config.outputs.emit_csv:
        paths = _svg(outdir, config, paths,
                     [("micropolar", os.path.join(outdir, "micropolar.csv")), ("ns", os.path.join(outdir, "ns.csv"))],
                     ["energy_u"])
    return _finish(outdir, "compare-ns", config.to_dict(), res["checks"], paths, res["summary"]["window"])


def cmd_plot(args):
    from .plot import line_chart

    outdir = _outdir(args)
    series = []
    for path in args.csv:
        header, data = io.read_csv(path)
        if args.x not in data:
            raise ConfigurationError(f"column {args.x!r} not in {path}")
        cols = args.columns.split(",") if args.columns else [h for h in header if h != args.x]
        stem = os.path.splitext(os.path.basename(path))[0]
        for c in cols:
            if c not in data:
                raise ConfigurationError(f"column {c!r} not in {path}")
            label = f"{stem}:{c}" if len(args.csv) > 1 else c
            series.append((label, data[args.x], data[c]))
    if not series or all(len(x) == 0 for _, x, _ in series):
        raise ConfigurationError("nothing to plot: the CSV files hold no data rows")
    out = line_chart(os.path.join(outdir, args.name), series, xlabel=args.x, loglog=not args.linear)
    echo = {"csv": [os.path.basename(p) for p in args.csv], "x": args.x, "columns": args.columns, "loglog": not args.linear}
    return _finish(outdir, "plot", echo, {}, [out])


COMMANDS = {
    "symbol-verify": cmd_symbol_verify,
    "linear-decay": cmd_linear_decay,
    "simulate": cmd_simulate,
    "decay-study": cmd_decay_study,
    "profile-error": cmd_profile_error,
    "compare-ns": cmd_compare_ns,
    "plot": cmd_plot,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.threads < 1:
            raise ConfigurationError(f"--threads must be >= 1, got {args.threads}")
        set_fft_workers(args.threads)
        with warnings.catch_warnings():
            if args.strict:
                warnings.simplefilter("error")
            return COMMANDS[args.command](args)
    except (ConfigurationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MicropolarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except UserWarning as exc:
        print(f"error (strict): {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
