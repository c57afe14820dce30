"""Command-line front end.

Subcommands read a JSON experiment config; a few flags override its fields.
Every CSV carries a header row and writes floats with ``repr`` so reruns with
the same config and seed are byte-identical.

CSV schemas:

  rates.csv        P, c, mode, inner_rate, inner_rate_raw, outer_bound,
                   bound_valid, min_gap, numeric_error
  conditions.csv   P, c, mode, min_gap, satisfied, i, s, a, s_tilde, a_tilde
  simulate.csv     mode, noise_mode, P, c, m, n, joint, state, input, seed
                   (rows are appended)
  appendix.csv     name, computed, reference
  fig2.csv         k, rate_2pam, rate_4pam, rate_6pam, rate_gaussian, capacity
  fig3.csv         c2, rate_2pam, rate_4pam, rate_6pam, capacity
  fig5.csv         P, plain_2pam, linear_2pam, plain_4pam, linear_4pam,
                   plain_6pam, linear_6pam, capacity

Exit status: 0 on success, 2 for a malformed config or command line, 3 when a
numerical routine fails to converge. Failures print a JSON error object on
stderr.
"""

import argparse
from concurrent.futures import ProcessPoolExecutor
import csv
from dataclasses import dataclass, field
import io
import json
import math
import os
import sys

import numpy as np

from . import gap, geometry, sim
from .channel import (ChannelParams, Constellation, GaussianLaw, constant_fading, fading_from_dict,
                      make_pam)
from .errors import ConvergenceError, InvalidInputError
from .rates import (CsiMode, LinearCancel, awgn_capacity, costa_mismatch_rate, no_csit_rate,
                    outer_bound, state_amplification_rate)

COMMANDS = ("rates", "conditions", "simulate", "verify-appendix", "figure")
FIGURES = (2, 3, 5)
PAM_ORDERS = (2, 4, 6)
SEED_ENV = "WFFD_SEED"

# figure recipes: fixed channel values and the default grid of the swept axis
FIGURE_AXIS = {2: "k", 3: "c2", 5: "P"}
FIGURE_DEFAULTS = {
    2: {"P": 10.0, "c": 5.0, "grid": [round(0.1 * i, 10) for i in range(21)]},
    3: {"P": 100.0, "grid": [100.0 * i for i in range(1, 11)]},
    5: {"c": 2.0, "grid": [10.0 * i for i in range(1, 8)]},
}
SWEEPABLE = ("P", "c")


class ConfigError(Exception):
    """Malformed command line or experiment config."""


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    channel: ChannelParams
    state: Constellation
    fading: object
    mode: CsiMode = CsiMode.NCSI
    sweep: tuple = ()
    sweep_parameter: str = ""
    output_path: str = "."
    seed: int = 0
    options: dict = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    p = _Parser(prog="wffd", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", metavar="{" + ",".join(COMMANDS) + "}")
    sub.required = True
    helps = {
        "rates": "state-amplification rate and outer-bound template -> rates.csv",
        "conditions": "separation checks for both CSI modes -> conditions.csv",
        "simulate": "uncoded joint decoding simulation -> simulate.csv (appended)",
        "verify-appendix": "gap constants table -> appendix.csv",
        "figure": "figure data -> figN.csv (optional figN.svg)",
    }
    for name in COMMANDS:
        sp = sub.add_parser(name, help=helps[name], description=helps[name])
        if name == "figure":
            sp.add_argument("number", type=int, choices=FIGURES)
            sp.add_argument("--svg", action="store_true", help="also write a minimal SVG line plot")
        sp.add_argument("--config", help="JSON experiment config")
        sp.add_argument("--P", type=float, dest="P")
        sp.add_argument("--c", type=float, dest="c")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--output", help="output directory")
        sp.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    return p


# -- config handling ----------------------------------------------------------

def _load_json(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return data


def _state_from(raw):
    if raw is None:
        return make_pam(2)
    if isinstance(raw, int):
        return make_pam(raw)
    if not isinstance(raw, dict):
        raise ConfigError("state must be an object or a PAM order")
    return Constellation.from_dict(raw)


def parse_config(raw, command, args):
    """Validate a raw config mapping and apply flag and environment overrides."""
    try:
        chan = dict(raw.get("channel", {}))
        for key in ("P", "c"):
            if getattr(args, key, None) is not None:
                chan[key] = getattr(args, key)
        channel = ChannelParams(float(chan.get("P", 10.0)), float(chan.get("c", 1.0)))
        state = _state_from(raw.get("state"))
        fading = fading_from_dict(raw["fading"]) if "fading" in raw else constant_fading(1.0)
        mode = CsiMode(raw.get("mode", "NCSI"))
        seed = int(raw.get("seed", 0))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if args.seed is not None:
        seed = args.seed
    if os.environ.get(SEED_ENV):
        try:
            seed = int(os.environ[SEED_ENV])
        except ValueError as exc:
            raise ConfigError(f"{SEED_ENV} must be an integer") from exc

    sweep, param = (), ""
    if raw.get("sweep") is not None:
        sw = raw["sweep"]
        if not isinstance(sw, dict) or "parameter" not in sw or "values" not in sw:
            raise ConfigError("sweep needs 'parameter' and 'values'")
        param = sw["parameter"]
        allowed = (FIGURE_AXIS[args.number],) if command == "figure" else SWEEPABLE
        if param not in allowed:
            raise ConfigError(f"sweep parameter {param!r} is not one of {allowed}")
        try:
            sweep = tuple(float(v) for v in sw["values"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"sweep values must be numbers: {exc}") from exc
        if not sweep:
            raise ConfigError("sweep values must not be empty")

    output = args.output or raw.get("output_path", ".")
    if os.path.exists(output) and not os.path.isdir(output):
        raise ConfigError(f"output path {output!r} is not a directory")
    options = {k: v for k, v in raw.items()
               if k not in ("channel", "state", "fading", "mode", "seed", "sweep", "output_path", "command")}
    return ExperimentConfig(command, channel, state, fading, mode, sweep, param, output, seed, options)


# -- output helpers -------------------------------------------------------------

def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _write(cfg, name, text):
    os.makedirs(cfg.output_path, exist_ok=True)
    path = os.path.join(cfg.output_path, name)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def _points(cfg):
    """Channel parameters of every sweep point (a single point without a sweep)."""
    if not cfg.sweep:
        return [cfg.channel]
    out = []
    for v in cfg.sweep:
        kw = {"P": cfg.channel.P, "c": cfg.channel.c, cfg.sweep_parameter: v}
        out.append(ChannelParams(kw["P"], kw["c"]))
    return out


def _pmap(fn, items, jobs):
    # results come back in grid order regardless of completion order
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(it) for it in items]


# -- subcommands ----------------------------------------------------------------

def _rates_point(job):
    params, state, fading, mode = job
    ob = outer_bound(params, state, fading, mode)
    raw = ob.details["inner_rate"]
    return [params.P, params.c, mode.value, max(raw, 0.0), raw, ob.rate,
            ob.details["valid"], ob.details["min_gap"], ob.numeric_error]


def cmd_rates(cfg, jobs):
    rows = _pmap(_rates_point, [(p, cfg.state, cfg.fading, cfg.mode) for p in _points(cfg)], jobs)
    header = ["P", "c", "mode", "inner_rate", "inner_rate_raw", "outer_bound", "bound_valid",
              "min_gap", "numeric_error"]
    _write(cfg, "rates.csv", _csv_text(header, rows))
    return {"rows": [dict(zip(header, r)) for r in rows]}


def cmd_conditions(cfg, jobs):
    rows, reports = [], []
    for params in _points(cfg):
        for rep in (geometry.ncsi_min_gap(params, cfg.state, cfg.fading,
                                          include_equal_states=bool(cfg.options.get("include_equal_states", False))),
                    geometry.rcsi_min_gap(params, cfg.state, cfg.fading)):
            w = rep.witness
            rows.append([params.P, params.c, rep.mode, rep.min_gap, rep.satisfied, w.i, w.s, w.a,
                         w.s_tilde, w.a_tilde])
            reports.append(dict(rep.to_dict(), P=params.P, c=params.c))
    header = ["P", "c", "mode", "min_gap", "satisfied", "i", "s", "a", "s_tilde", "a_tilde"]
    _write(cfg, "conditions.csv", _csv_text(header, rows))
    return {"reports": reports}


def _sim_inputs(cfg, params):
    if "input" in cfg.options:
        return Constellation.from_dict(cfg.options["input"])
    r = math.floor(math.sqrt(params.P))
    pts = np.arange(-r, r + 1, dtype=float)
    return Constellation(pts, np.full(pts.size, 1.0 / pts.size))


def cmd_simulate(cfg, jobs):
    try:
        sc = sim.SimConfig(int(cfg.options.get("n_symbols", 100_000)), cfg.seed,
                           cfg.options.get("noise_mode", "gaussian"), cfg.mode)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed simulation settings: {exc}") from exc
    jobs_list = [(params, _sim_inputs(cfg, params)) for params in _points(cfg)]
    results, rows = [], []
    for params, x_const in jobs_list:
        res = sim.run_decoding_sim(sc, params, x_const, cfg.state, cfg.fading, jobs=jobs)
        rows.append(sim.result_row(sc, params, cfg.state, res))
        results.append(dict(res.to_dict(), P=params.P, c=params.c))
    os.makedirs(cfg.output_path, exist_ok=True)
    sim.append_csv(os.path.join(cfg.output_path, "simulate.csv"), rows)
    return {"results": results}


def cmd_verify_appendix(cfg, jobs):
    rows = gap.appendix_table()
    lines = [f"{'quantity':<34}{'computed':>16}{'reference':>12}"]
    for name, computed, reference in rows:
        shown = "" if reference is None else f"{reference:.4g}"
        lines.append(f"{name:<34}{computed:>16.6f}{shown:>12}")
    print("\n".join(lines))
    _write(cfg, "appendix.csv", _csv_text(["name", "computed", "reference"],
                                          [[n, c, "" if p is None else p] for n, c, p in rows]))
    return {"table": [{"name": n, "computed": c, "reference": p} for n, c, p in rows],
            "terms": gap.entropy_bound_terms(),
            "breakdown": {m: gap.gap_breakdown(m).to_dict() for m in ("NCSI", "RCSI")}}


def _fig2_point(args):
    k, P, c = args
    params = ChannelParams(P, c)
    rates = [costa_mismatch_rate(params, k, make_pam(m)).rate for m in PAM_ORDERS]
    return [k, *rates, costa_mismatch_rate(params, k, "gaussian").rate, awgn_capacity(P)]


def _fig3_point(args):
    c2, P, mode = args
    params = ChannelParams(P, math.sqrt(c2))
    rates = [max(state_amplification_rate(params, make_pam(m), constant_fading(1.0), mode).rate, 0.0)
             for m in PAM_ORDERS]
    return [c2, *rates, awgn_capacity(P)]


def _fig5_point(args):
    P, c, fading, alphas = args
    params = ChannelParams(P, c)
    row = [P]
    for m in PAM_ORDERS:
        st = make_pam(m)
        row.append(no_csit_rate(params, st, fading).rate)
        row.append(no_csit_rate(params, st, fading, LinearCancel(alphas=alphas)).rate)
    return row + [awgn_capacity(P)]


FIGURE_HEADERS = {
    2: ["k", "rate_2pam", "rate_4pam", "rate_6pam", "rate_gaussian", "capacity"],
    3: ["c2", "rate_2pam", "rate_4pam", "rate_6pam", "capacity"],
    5: ["P", "plain_2pam", "linear_2pam", "plain_4pam", "linear_4pam", "plain_6pam", "linear_6pam",
        "capacity"],
}


def cmd_figure(cfg, jobs, number, svg=False):
    d = FIGURE_DEFAULTS[number]
    grid = list(cfg.sweep) if cfg.sweep else d["grid"]
    chan = cfg.options.get("figure_channel", {})
    if number == 2:
        P, c = float(chan.get("P", d["P"])), float(chan.get("c", d["c"]))
        rows = _pmap(_fig2_point, [(k, P, c) for k in grid], jobs)
    elif number == 3:
        P = float(chan.get("P", d["P"]))
        rows = _pmap(_fig3_point, [(c2, P, cfg.mode) for c2 in grid], jobs)
    else:
        c = float(chan.get("c", d["c"]))
        fading = GaussianLaw(0.0, 1.0)
        alphas = tuple(float(a) for a in cfg.options.get("alphas", LinearCancel().alphas))
        rows = _pmap(_fig5_point, [(P, c, fading, alphas) for P in grid], jobs)
    header = FIGURE_HEADERS[number]
    _write(cfg, f"fig{number}.csv", _csv_text(header, rows))
    if svg:
        _write(cfg, f"fig{number}.svg", line_plot_svg(header, rows))
    return {"figure": number, "rows": [dict(zip(header, r)) for r in rows]}


def line_plot_svg(header, rows, width=640, height=400, pad=50):
    """Bare-bones SVG with one polyline per column against the first column."""
    data = np.asarray(rows, dtype=float)
    x = data[:, 0]
    ys = data[:, 1:]
    x0, x1 = float(x.min()), float(x.max())
    if x1 <= x0:
        x1 = x0 + 1.0
    y0, y1 = float(ys.min()), float(ys.max())
    if y1 <= y0:
        y1 = y0 + 1.0
    colours = ["#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#d62728"]

    def px(v):
        return pad + (v - x0) / (x1 - x0) * (width - 2 * pad)

    def py(v):
        return height - pad - (v - y0) / (y1 - y0) * (height - 2 * pad)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
           f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" '
           'fill="none" stroke="black"/>',
           f'<text x="{width / 2:.0f}" y="{height - 10}" text-anchor="middle">{header[0]}</text>',
           f'<text x="{pad}" y="{pad - 8}">{y1:.3g}</text>',
           f'<text x="{pad}" y="{height - pad + 16}">{y0:.3g}</text>']
    for j in range(ys.shape[1]):
        col = colours[j % len(colours)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, ys[:, j]))
        out.append(f'<polyline fill="none" stroke="{col}" points="{pts}"/>')
        out.append(f'<text x="{width - pad + 4}" y="{pad + 14 * j + 10}" fill="{col}" '
                   f'font-size="10">{header[j + 1]}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# -- entry point ------------------------------------------------------------------

def _fail(code, kind, message, **extra):
    print(json.dumps({"error": kind, "message": message, "exit_code": code, **extra}), file=sys.stderr)
    return code


def run_command(argv):
    """Parse ``argv``, run the subcommand, and return the exit status."""
    try:
        args = build_parser().parse_args(argv)
        if args.jobs < 1:
            raise ConfigError("--jobs must be positive")
        cfg = parse_config(_load_json(args.config), args.command, args)
    except ConfigError as exc:
        return _fail(2, "config", str(exc))
    except InvalidInputError as exc:
        return _fail(2, "invalid_input", str(exc))

    handlers = {"rates": cmd_rates, "conditions": cmd_conditions, "simulate": cmd_simulate,
                "verify-appendix": cmd_verify_appendix}
    try:
        if cfg.command == "figure":
            payload = cmd_figure(cfg, args.jobs, args.number, args.svg)
        else:
            payload = handlers[cfg.command](cfg, args.jobs)
    except ConvergenceError as exc:
        return _fail(3, "convergence", str(exc), best_estimate=exc.best_estimate,
                     error_estimate=exc.error_estimate)
    except (ConfigError, InvalidInputError) as exc:
        return _fail(2, "invalid_input", str(exc))
    if cfg.command != "verify-appendix":
        print(json.dumps(_json_ready(payload), indent=2, sort_keys=True))
    else:
        print(json.dumps(_json_ready(payload), sort_keys=True))
    return 0


def _json_ready(obj):
    if isinstance(obj, dict):
        return {str(k): _json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_ready(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, CsiMode):
        return obj.value
    return obj


def main():
    sys.exit(run_command(sys.argv[1:]))
