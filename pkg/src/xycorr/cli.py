"""Command-line front end: ``xycorr {sweep,cp,longrange,verify}``.

Options come from, in increasing priority: built-in defaults, a key=value
``--config`` file, ``XYCORR_<OPTION>`` environment variables, command-line flags.
"""

import argparse
import io
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from itertools import product

import numpy as np

from . import __version__, cpscan, plotting, verification
from .errors import FlatCurve, GridTooSmall, NotFound, XYCorrError
from .measures import MeasureKind, evaluate
from .xymodel import ModelParams, reduced_state

ENV_PREFIX = "XYCORR_"
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


class ConfigError(ValueError):
    pass


def _floats(text):
    try:
        return [float(t) for t in str(text).replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _ints(text):
    vals = _floats(text)
    if any(v != int(v) for v in vals):
        raise ConfigError(f"expected integers, got {text!r}")
    return [int(v) for v in vals]


def _int(text):
    (v,) = _ints(text) or [None]
    if v is None:
        raise ConfigError("missing integer value")
    return v


def _float(text):
    (v,) = _floats(text) or [None]
    if v is None:
        raise ConfigError("missing numeric value")
    return v


def _measures(text):
    names = [t for t in str(text).replace(";", ",").split(",") if t.strip()]
    if len(names) == 1 and names[0].strip().lower() == "all":
        return list(MeasureKind)
    try:
        return [MeasureKind.parse(n) for n in names]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _order(text):
    if str(text).strip().lower() == "auto":
        return "auto"
    v = _int(text)
    if v not in (1, 2):
        raise ConfigError(f"expected 1, 2 or auto, got {text!r}")
    return v


def _window(text):
    vals = _floats(text)
    if len(vals) != 2 or not vals[0] < vals[1]:
        raise ConfigError(f"window must be 'lo,hi' with lo < hi, got {text!r}")
    return tuple(vals)


def _names(text):
    return [t.strip() for t in str(text).split(",") if t.strip()]


# option name -> (parser, default, help)
OPTIONS = {
    "gamma": (_floats, "0.001,0.5,1", "anisotropy values"),
    "kt": (_floats, "0,0.1,0.5", "temperatures kT"),
    "lambda": (_floats, "0.75,0.95,1.05,1.5", "field strengths for longrange"),
    "lambda_min": (_float, "0", "sweep grid start"),
    "lambda_max": (_float, "2", "sweep grid end"),
    "lambda_step": (_float, "0.01", "grid spacing (sweep and cp)"),
    "r": (_ints, "1", "spin distances"),
    "rmax": (_int, "10", "largest distance for longrange"),
    "measures": (_measures, "MIN,WYSIM,OMQC,CONCURRENCE", "measures, or 'all'"),
    "deriv_order": (_order, "1", "derivative order for cp: 1, 2 or auto"),
    "window": (_window, "0.5,1.5", "cp search window lo,hi"),
    "out": (str, "-", "CSV output path ('-' for stdout) or report path for verify"),
    "svg": (str, "", "directory for SVG panels (empty: none)"),
    "workers": (_int, "1", "worker processes"),
    "seed": (_int, "0", "RNG seed"),
    "only": (_names, "", "verify: comma-separated suites"),
    "ring_size": (_int, "10", "verify: ring size of the ED oracle"),
    "n_dirs": (_int, "2000", "verify: measurement axes in brute-force searches"),
    "tol_scale": (_float, "1", "verify: multiply every tolerance (0 injects a fault)"),
}

COMMAND_OPTIONS = {
    "sweep": ["gamma", "kt", "lambda_min", "lambda_max", "lambda_step", "r", "measures"],
    "cp": ["gamma", "kt", "r", "measures", "deriv_order", "window", "lambda_step"],
    "longrange": ["gamma", "kt", "lambda", "rmax", "measures"],
    "verify": ["only", "ring_size", "n_dirs", "tol_scale"],
}
COMMON = ["out", "svg", "workers", "seed"]


def read_config_file(path):
    values = {}
    with open(path) as fh:
        for n, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{n}: expected key=value, got {raw.strip()!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key.lower().replace("-", "_")] = val
    return values


def resolve(command, flags, environ=None):
    """Merge defaults, config file, environment and flags into typed values."""
    environ = os.environ if environ is None else environ
    names = COMMAND_OPTIONS[command] + COMMON
    raw = {n: OPTIONS[n][1] for n in names}
    sources = []
    if flags.get("config"):
        try:
            sources.append(read_config_file(flags["config"]))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
    sources.append({
        k[len(ENV_PREFIX):].lower(): v for k, v in environ.items() if k.startswith(ENV_PREFIX)
    })
    sources.append({k: v for k, v in flags.items() if v is not None and k != "config"})
    for src in sources:
        for k, v in src.items():
            if k in raw:
                raw[k] = v
    cfg = {}
    for n in names:
        parser = OPTIONS[n][0]
        try:
            cfg[n] = parser(raw[n])
        except ConfigError as exc:
            raise ConfigError(f"--{n.replace('_', '-')}: {exc}") from None
    _validate(command, cfg)
    return cfg


def _validate(command, cfg):
    for g in cfg.get("gamma", []):
        if not 0 <= g <= 1:
            raise ConfigError(f"gamma must lie in [0, 1], got {g}")
    for kT in cfg.get("kt", []):
        if kT < 0:
            raise ConfigError(f"kT must be >= 0, got {kT}")
    if command == "cp" and any(kT <= 0 for kT in cfg["kt"]):
        raise ConfigError("cp needs every kT > 0")
    for r in cfg.get("r", []):
        if r < 1:
            raise ConfigError(f"r must be >= 1, got {r}")
    if command == "longrange" and cfg["rmax"] < 2:
        raise ConfigError("rmax must be >= 2")
    if any(lam < 0 for lam in cfg.get("lambda", [])):
        raise ConfigError("lambda must be >= 0")
    if command == "sweep":
        if cfg["lambda_min"] < 0 or cfg["lambda_max"] < cfg["lambda_min"]:
            raise ConfigError("need 0 <= lambda-min <= lambda-max")
    if "lambda_step" in cfg and cfg["lambda_step"] <= 0:
        raise ConfigError("lambda-step must be > 0")
    if cfg["workers"] < 1:
        raise ConfigError("workers must be >= 1")


# --- output -----------------------------------------------------------------

def fmt(v):
    if v is None or (isinstance(v, float) and np.isnan(v)):
        return ""
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, MeasureKind):
        return v.value
    return str(v)


def _cfg_text(cfg):
    parts = []
    for k in sorted(cfg):
        v = cfg[k]
        if isinstance(v, (list, tuple)):
            v = ",".join(fmt(x) for x in v)
        parts.append(f"{k}={fmt(v)}")
    return " ".join(parts)


def write_csv(path, command, cfg, columns, rows):
    buf = io.StringIO(newline="")
    buf.write(f"# xycorr {__version__} {command}\n")
    buf.write(f"# config: {_cfg_text(cfg)}\n")
    buf.write(f"# seed: {cfg['seed']}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) for v in row) + "\n")
    text = buf.getvalue()
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    return text


def _pmap(fn, items, workers):
    if workers <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


# --- commands ---------------------------------------------------------------

def _point_values(args):
    gamma, kT, r, lam, kinds = args
    try:
        s = reduced_state(ModelParams(gamma, lam, kT), r)
        return [evaluate(k, s) for k in kinds]
    except XYCorrError as exc:
        raise XYCorrError(f"at gamma={gamma}, lambda={lam}, kT={kT}, r={r}: {exc}") from exc


def cmd_sweep(cfg):
    lambdas = cpscan.lambda_grid(cfg["lambda_min"], cfg["lambda_max"], cfg["lambda_step"])
    kinds = cfg["measures"]
    blocks = list(product(cfg["gamma"], cfg["kt"], cfg["r"]))
    points = [(g, kT, r, lam, kinds) for g, kT, r in blocks for lam in lambdas]
    values = _pmap(_point_values, points, cfg["workers"])
    rows = []
    panels = {}
    for b, (g, kT, r) in enumerate(blocks):
        chunk = np.array(values[b * lambdas.size:(b + 1) * lambdas.size])
        for m, kind in enumerate(kinds):
            curve = cpscan.MeasureCurve(g, kT, r, kind, lambdas, chunk[:, m])
            try:
                d1 = cpscan.numeric_derivative(curve, 1).values
                d2 = cpscan.numeric_derivative(curve, 2).values
            except GridTooSmall:
                d1 = d2 = None
            for i, lam in enumerate(lambdas):
                rows.append((g, kT, lam, r, kind.value, curve.values[i],
                             None if d1 is None else d1[i], None if d2 is None else d2[i]))
            panels.setdefault((g, kT), {})[(kind.value, r)] = (lambdas, curve.values, d1)
    rows.sort(key=lambda row: row[:5])
    cols = ["gamma", "lambda", "kT", "r", "measure", "value", "d1", "d2"]
    rows = [(g, lam, kT, r, m, v, d1, d2) for g, kT, lam, r, m, v, d1, d2 in rows]
    write_csv(cfg["out"], "sweep", cfg, cols, rows)
    if cfg["svg"]:
        for (g, kT), curves in sorted(panels.items()):
            plotting.sweep_panel(cfg["svg"], g, kT, curves)
    return 0


def _cp_block(args):
    gamma, kT, r, kinds, window, step, order = args
    lambdas = cpscan.lambda_grid(window[0], window[1], step)
    try:
        curves = cpscan.measure_curves(gamma, kT, r, kinds, lambdas)
    except XYCorrError as exc:
        raise XYCorrError(f"at gamma={gamma}, kT={kT}, r={r}: {exc}") from exc
    out = []
    for k in kinds:
        k_order = cpscan.select_order(gamma, r, k, window, step) if order == "auto" else order
        try:
            est = cpscan.estimate_cp(gamma, kT, r, k, window, step, k_order, curve=curves[k])
            out.append((k.value, est.lambda_hat, est.deriv_order, est.extremum_value, ""))
        except (FlatCurve, NotFound) as exc:
            out.append((k.value, None, k_order, None, type(exc).__name__))
    return out


def cmd_cp(cfg):
    kinds = cfg["measures"]
    blocks = list(product(cfg["gamma"], cfg["kt"], cfg["r"]))
    args = [(g, kT, r, kinds, cfg["window"], cfg["lambda_step"], cfg["deriv_order"])
            for g, kT, r in blocks]
    results = _pmap(_cp_block, args, cfg["workers"])
    rows = []
    for (g, kT, r), res in zip(blocks, results):
        for measure, lam_hat, order, ext, reason in res:
            rows.append((g, kT, r, measure, lam_hat, order, ext, reason))
    rows.sort(key=lambda row: (row[0], row[1], row[2], row[3]))
    cols = ["gamma", "kT", "r", "measure", "lambda_hat", "deriv_order", "extremum_value", "reason"]
    write_csv(cfg["out"], "cp", cfg, cols, rows)
    if cfg["svg"]:
        panels = {}
        for g, kT, r, measure, lam_hat, *_ in rows:
            pts = panels.setdefault((g, r), {}).setdefault(measure, [])
            if lam_hat is not None:
                pts.append((kT, lam_hat))
        for (g, r), est in sorted(panels.items()):
            plotting.cp_panel(cfg["svg"], g, r, est)
    return 0


def _profile_block(args):
    gamma, kT, lam, kinds, rmax = args
    try:
        return cpscan.long_range_profile(gamma, kT, lam, kinds, rmax)
    except XYCorrError as exc:
        raise XYCorrError(f"at gamma={gamma}, lambda={lam}, kT={kT}: {exc}") from exc


def cmd_longrange(cfg):
    kinds = cfg["measures"]
    blocks = list(product(cfg["gamma"], cfg["kt"], cfg["lambda"]))
    profiles = _pmap(_profile_block, [(g, kT, lam, kinds, cfg["rmax"]) for g, kT, lam in blocks],
                     cfg["workers"])
    rows = []
    panels = {}
    for (g, kT, lam), prof in zip(blocks, profiles):
        for k, vals in prof.items():
            panels.setdefault((g, kT), {})[(k.value, lam)] = vals
            for r, v in enumerate(vals, 1):
                rows.append((g, kT, lam, r, k.value, v))
    rows.sort(key=lambda row: (row[0], row[1], row[2], row[3], row[4]))
    write_csv(cfg["out"], "longrange", cfg, ["gamma", "kT", "lambda", "r", "measure", "value"], rows)
    if cfg["svg"]:
        for (g, kT), prof in sorted(panels.items()):
            plotting.longrange_panel(cfg["svg"], g, kT, prof)
    return 0


def cmd_verify(cfg):
    try:
        checks = verification.run(
            only=cfg["only"], seed=cfg["seed"], tol_scale=cfg["tol_scale"],
            ring_size=cfg["ring_size"], n_dirs=cfg["n_dirs"],
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    lines = [f"# xycorr {__version__} verify seed={cfg['seed']}"]
    lines += [c.line() for c in checks]
    failed = [c for c in checks if not c.passed]
    lines.append(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    report = "\n".join(lines) + "\n"
    if cfg["out"] == "-":
        sys.stdout.write(report)
    else:
        with open(cfg["out"], "w", newline="\n") as fh:
            fh.write(report)
        sys.stdout.write(report)
    return 1 if failed else 0


COMMANDS = {"sweep": cmd_sweep, "cp": cmd_cp, "longrange": cmd_longrange, "verify": cmd_verify}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser():
    parser = _Parser(prog="xycorr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"xycorr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="key=value configuration file")
        for opt in COMMAND_OPTIONS[name] + COMMON:
            p.add_argument(f"--{opt.replace('_', '-')}", dest=opt, default=None,
                           help=f"{OPTIONS[opt][2]} (default {OPTIONS[opt][1]!r})")
    return parser


def main(argv=None):
    try:
        ns = build_parser().parse_args(argv)
        cfg = resolve(ns.command, vars(ns))
    except ConfigError as exc:
        print(f"xycorr: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[ns.command](cfg)
    except ConfigError as exc:
        print(f"xycorr: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except XYCorrError as exc:
        print(f"xycorr: numerical failure {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"xycorr: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
