"""Command-line front end.

Every subcommand produces a report with the parameters it resolved, a flat
map of numeric results, a map of boolean verdicts and the wall time. Reports
render as text, JSON or CSV. Exit status: 0 success, 1 I/O error, 2 domain or
validation error, 3 search exhausted.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import binary_erasure as be
from . import interaction_gain as ig
from . import two_message as tm
from . import wyner_ziv as wz
from .errors import DomainError, SearchExhaustedError
from .info_core import DistortionMatrix, JointPmf, binary_entropy, conditional_entropy, load_distortion, load_joint

SUBCOMMANDS = (
    "wz-rate",
    "rho1",
    "gain-detect",
    "gain-search",
    "two-msg",
    "ratio-search",
    "entropy-ratio",
    "sweep",
    "reproduce-paper",
)
FORMATS = ("text", "json", "csv")
MAX_SWEEP_POINTS = 1_000_000

EXIT_OK, EXIT_IO, EXIT_DOMAIN, EXIT_EXHAUSTED = 0, 1, 2, 3


class UsageError(DomainError):
    """Malformed command line."""


@dataclass
class CommandRequest:
    subcommand: str
    params: dict = field(default_factory=dict)
    output_format: str = "text"
    output_path: str | None = None

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise UsageError(f"unknown subcommand {self.subcommand!r}")
        if self.output_format not in FORMATS:
            raise UsageError(f"--format must be one of {', '.join(FORMATS)}")


@dataclass
class RunReport:
    command: str
    params: dict
    results: dict
    verdicts: dict
    runtime_s: float = 0.0
    rows: list | None = None  # sweep output: list of (column -> value) dicts
    columns: list | None = None


# --------------------------------------------------------------------------
# number formatting


def fmt_number(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _json_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        x = float(v)
        if math.isnan(x) or math.isinf(x):
            return json.dumps(fmt_number(x))
        return fmt_number(x)
    if isinstance(v, dict):
        items = (f"{json.dumps(str(k))}: {_json_value(v[k])}" for k in sorted(v))
        return "{" + ", ".join(items) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    return json.dumps(str(v))


def render_json(report: RunReport) -> str:
    doc = {
        "command": report.command,
        "params": report.params,
        "results": report.results,
        "verdicts": report.verdicts,
        "runtime_s": report.runtime_s,
    }
    if report.rows is not None:
        doc["rows"] = report.rows
    return _json_value(doc) + "\n"


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float, np.floating, np.integer)):
        return fmt_number(v)
    return str(v)


def render_csv(report: RunReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if report.rows is not None:
        writer.writerow(report.columns)
        for row in report.rows:
            writer.writerow([_cell(row[c]) for c in report.columns])
        return buf.getvalue()
    keys = sorted(report.results) + sorted(report.verdicts)
    writer.writerow(keys)
    merged = {**report.results, **report.verdicts}
    writer.writerow([_cell(merged[k]) for k in keys])
    return buf.getvalue()


def render_text(report: RunReport) -> str:
    if report.rows is not None:
        return render_csv(report)
    lines = [f"# {report.command}"]
    for k in sorted(report.params):
        lines.append(f"  {k} = {_cell(report.params[k])}")
    expected = {k[: -len("_expected")]: v for k, v in report.results.items() if k.endswith("_expected")}
    plain = [k for k in sorted(report.results) if not k.endswith("_expected")]
    if plain:
        width = max(len(k) for k in plain)
        lines.append("results:")
        for k in plain:
            line = f"  {k:<{width}}  {_cell(report.results[k]):>24}"
            if k in expected:
                line += f"   expected: {_cell(expected[k])}"
            lines.append(line)
    if report.verdicts:
        lines.append("verdicts:")
        for k in sorted(report.verdicts):
            lines.append(f"  {k}: {'PASS' if report.verdicts[k] else 'FAIL'}")
    lines.append(f"runtime_s: {report.runtime_s:.3f}")
    return "\n".join(lines) + "\n"


RENDERERS = {"text": render_text, "json": render_json, "csv": render_csv}


# --------------------------------------------------------------------------
# parameter access


def _get(params: dict, name: str, default=None, required=False) -> float | None:
    raw = params.get(name)
    if raw is None:
        if required:
            raise UsageError(f"missing required parameter --{name.replace('_', '-')}")
        return default
    try:
        return float(raw)
    except (TypeError, ValueError):
        raise UsageError(f"malformed parameter --{name.replace('_', '-')}: {raw!r} is not a number") from None


def _get_int(params, name, default):
    value = _get(params, name, default)
    if value != int(value):
        raise UsageError(f"malformed parameter --{name.replace('_', '-')}: {value!r} is not an integer")
    return int(value)


def _instance(params: dict):
    """Resolve (joint, distortion, binary-joint-or-None, label)."""
    if params.get("joint") is not None:
        joint = load_joint(params["joint"])
        d = load_distortion(params["dist"]) if params.get("dist") else DistortionMatrix.binary_erasure()
        binary = None
        is_erasure = d.values.shape == (2, 3) and np.array_equal(d.values, DistortionMatrix.binary_erasure().values)
        if joint.probs.shape == (2, 2) and is_erasure and np.all(joint.probs > 0):
            binary = be.BinaryJoint.from_joint(joint)
        return joint, d, binary, "file"
    if params.get("dist") is not None:
        raise UsageError("--dist requires --joint")
    dsbs_p = _get(params, "dsbs_p")
    if dsbs_p is not None:
        binary = be.BinaryJoint.dsbs(dsbs_p)
        return binary.to_joint(), DistortionMatrix.binary_erasure(), binary, "dsbs"
    p = _get(params, "p")
    if p is not None:
        q = _get(params, "q", required=True)
        binary = be.BinaryJoint.from_bsc(p, q)
        return binary.to_joint(), DistortionMatrix.binary_erasure(), binary, "bsc-bernoulli"
    raise UsageError("an instance is required: --dsbs-p, --p with --q, or --joint")


def _grid(params):
    return wz.GridSpec(resolution=_get_int(params, "grid_res", 64), refine_rounds=_get_int(params, "refine", 2))


def _lossless_total(joint: JointPmf) -> float:
    return conditional_entropy(joint) + conditional_entropy(joint.transpose())


# --------------------------------------------------------------------------
# handlers: params -> (resolved, results, verdicts)


def _cmd_rho1(params):
    joint, d, binary, source = _instance(params)
    D = _get(params, "distortion", required=True)
    resolved = {"source": source, "distortion": D}
    results, verdicts = {}, {}
    use_oracle = binary is None or params.get("grid_res") is not None
    if binary is not None:
        results["rho1_exact"] = be.rho1_exact(binary, D)
    if use_oracle:
        grid = _grid(params)
        resolved.update(grid_res=grid.resolution, refine=grid.refine_rounds)
        results["rho1_oracle"] = wz.rho1_oracle(joint, d, D, grid)
    if source == "dsbs" and D <= 1:
        results["rho1_closed_form"] = be.rho1_dsbs(_get(params, "dsbs_p"), D)
    resolved["solver"] = "binary_erasure.exact" if binary is not None else "wyner_ziv.grid_oracle"
    results["rho1"] = results["rho1_exact"] if binary is not None else results["rho1_oracle"]
    if binary is not None and use_oracle:
        verdicts["oracle_below_exact"] = results["rho1_oracle"] <= results["rho1_exact"] + 1e-9
    return resolved, results, verdicts


def _cmd_wz_rate(params):
    joint, d, binary, source = _instance(params)
    D = _get(params, "distortion", required=True)
    resolved = {"source": source, "distortion": D}
    results, verdicts = {}, {}
    total = _lossless_total(joint)
    use_oracle = binary is None or params.get("grid_res") is not None
    if binary is not None:
        results["rate_exact"] = total - be.rho1_exact(binary, D)
    if use_oracle:
        grid = _grid(params)
        resolved.update(grid_res=grid.resolution, refine=grid.refine_rounds)
        sol = wz.wz_rate_oracle(joint, d, D, grid)
        results["rate_oracle"] = sol.rate
        results["oracle_distortion"] = sol.distortion
        for (x, u), v in np.ndenumerate(sol.aux_channel.rows):
            results[f"p_u{u}_given_x{x}"] = float(v)
        verdicts["distortion_met"] = sol.distortion <= D + 1e-9
    if source == "dsbs" and D <= 1:
        results["rate_closed_form"] = be.rsum1_dsbs(_get(params, "dsbs_p"), D)
    resolved["solver"] = "binary_erasure.exact" if binary is not None else "wyner_ziv.grid_oracle"
    results["rate"] = results["rate_exact"] if binary is not None else results["rate_oracle"]
    return resolved, results, verdicts


def _cmd_gain_detect(params):
    p = _get(params, "p", required=True)
    q = _get(params, "q", required=True)
    a = _get(params, "alpha0e", required=True)
    margin = _get(params, "margin", ig.DEFAULT_MARGIN)
    cert = ig.midpoint_violation(p, q, a, margin=margin)
    results = cert.as_dict()
    results["limit_gap"] = ig.limit_gap(q, a)
    verdicts = {"valid": cert.valid, "exact_above_lower": cert.rhs_exact >= cert.rhs_lower - 1e-9}
    return {"p": p, "q": q, "alpha0e": a, "margin": margin}, results, verdicts


def _cmd_gain_search(params):
    q = _get(params, "q", required=True)
    a = _get(params, "alpha0e", required=True)
    margin = _get(params, "margin", ig.DEFAULT_MARGIN)
    cert = ig.find_gain_witness(q, a, margin=margin)
    results = cert.as_dict()
    results["limit_gap"] = ig.limit_gap(q, a)
    return {"q": q, "alpha0e": a, "margin": margin}, results, {"valid": cert.gap_lower > margin}


def _cmd_two_msg(params):
    p = _get(params, "p", required=True)
    q = _get(params, "q", required=True)
    a = _get(params, "alpha", required=True)
    diff, closed, direct = tm.table1_cross_check(tm.Table1Params(p, q, a))
    results = closed.as_dict()
    results["rsum1"] = be.rsum1_dsbs(p, closed.D)
    results["R1_direct"] = direct.R1
    results["R2_direct"] = direct.R2
    results["D_direct"] = direct.D
    results["cross_check_max_abs_diff"] = diff
    verdicts = {
        "closed_form_matches_direct": diff <= tm.CONSISTENCY_TOL,
        "two_messages_beat_one": closed.sum_rate < results["rsum1"],
    }
    return {"p": p, "q": q, "alpha": a}, results, verdicts


def _cmd_ratio_search(params):
    L = _get(params, "L", required=True)
    a = _get(params, "alpha", 0.5)
    q = _get(params, "q")
    found, point = tm.find_ratio_witness(L, alpha=a, q=q)
    results = {"p": found.p, "q": found.q, "alpha": found.alpha, **point.as_dict()}
    verdicts = {"sum_ratio_above_L": point.sum_ratio > L, "split_ratio_below_inv_L": point.split_ratio < 1.0 / L}
    return {"L": L, "alpha": a, "q": found.q}, results, verdicts


def _cmd_entropy_ratio(params):
    slope = _get(params, "slope", required=True)
    p = _get(params, "p", required=True)
    ratio = tm.entropy_ratio_check(slope, p)
    results = {"ratio": ratio, "slope": slope, "relative_deviation": abs(ratio - slope) / slope}
    return {"slope": slope, "p": p}, results, {}


REFERENCE_POINT = {"p": 1e-200, "q": 0.1, "alpha": 0.5, "ratio": 8.16}
DSBS_P_GRID = (0.05, 0.15, 0.25, 0.35, 0.45)
DSBS_D_GRID = (0.0, 0.25, 0.5, 0.75, 1.0)


def _cmd_reproduce(params):
    q, a = REFERENCE_POINT["q"], REFERENCE_POINT["alpha"]
    results, verdicts = {}, {}

    point = tm.table1_point(tm.Table1Params(REFERENCE_POINT["p"], q, a))
    results["remark2_ratio"] = point.sum_ratio
    results["remark2_ratio_expected"] = REFERENCE_POINT["ratio"]
    results["reference_split_ratio"] = point.split_ratio
    verdicts["reference_ratio_within_0.02"] = abs(point.sum_ratio - REFERENCE_POINT["ratio"]) <= 0.02

    tiny = tm.table1_point(tm.Table1Params(1e-300, q, a))
    results["sum_ratio_at_1e-300"] = tiny.sum_ratio
    results["sum_ratio_limit"] = (1 - q) / q
    results["sum_ratio_limit_expected"] = 9.0

    p_lim = 1e-100
    c_over_h = be.c_value(p_lim, q, a, 1.0) / binary_entropy(p_lim)
    one_plus_d = 1.0 + be.eta_value(p_lim, q, a, 1.0)
    results["c_over_h_at_1e-100"] = c_over_h
    results["c_over_h_at_1e-100_expected"] = 2 - q * (1 - a)
    results["one_plus_D_at_1e-100"] = one_plus_d
    results["one_plus_D_at_1e-100_expected"] = 2 - (1 - q) * (1 - a)
    verdicts["c_over_h_limit_within_0.05"] = abs(c_over_h - (2 - q * (1 - a))) < 0.05
    verdicts["one_plus_D_limit_within_1e-3"] = abs(one_plus_d - (2 - (1 - q) * (1 - a))) < 1e-3
    results["limit_gap"] = ig.limit_gap(q, a)
    results["limit_gap_expected"] = (1 - 2 * q) * (1 - a)

    cert = ig.midpoint_violation(1e-6, q, a)
    t1 = tm.table1_point(tm.Table1Params(1e-6, q, a))
    identity_err = abs(cert.gap_lower - (be.rsum1_dsbs(1e-6, cert.D) - t1.sum_rate))
    results["gain_certificate_gap_lower"] = cert.gap_lower
    results["gain_certificate_relative_gap"] = cert.relative_gap
    results["gain_certificate_identity_error"] = identity_err
    verdicts["gain_certificate_valid"] = cert.valid
    verdicts["gain_certificate_identity_within_1e-12"] = identity_err <= 1e-12

    worst = max(
        abs(be.rho1_exact(be.BinaryJoint.dsbs(p), D) - (1 + D) * binary_entropy(p))
        for p in DSBS_P_GRID
        for D in DSBS_D_GRID
    )
    results["dsbs_closed_form_max_error"] = worst
    verdicts["dsbs_closed_form_within_1e-9"] = worst <= 1e-9

    found, wit = tm.find_ratio_witness(5.0)
    results["ratio_witness_L5_p"] = found.p
    results["ratio_witness_L5_q"] = found.q
    results["ratio_witness_L5_sum_ratio"] = wit.sum_ratio
    results["ratio_witness_L5_split_ratio"] = wit.split_ratio
    verdicts["ratio_witness_L5_found"] = wit.sum_ratio > 5 and wit.split_ratio < 0.2

    ratios = [tm.entropy_ratio_check(2.0, p) for p in (1e-6, 1e-9, 1e-12)]
    results["entropy_ratio_at_1e-12"] = ratios[-1]
    results["entropy_ratio_at_1e-12_expected"] = 2.0
    verdicts["entropy_ratio_increasing_and_within_5pct"] = ratios[0] < ratios[1] < ratios[2] and abs(ratios[2] - 2) < 0.1
    return {"q": q, "alpha0e": a, "p": REFERENCE_POINT["p"]}, results, verdicts


HANDLERS = {
    "rho1": _cmd_rho1,
    "wz-rate": _cmd_wz_rate,
    "gain-detect": _cmd_gain_detect,
    "gain-search": _cmd_gain_search,
    "two-msg": _cmd_two_msg,
    "ratio-search": _cmd_ratio_search,
    "entropy-ratio": _cmd_entropy_ratio,
    "reproduce-paper": _cmd_reproduce,
}

# fixed result columns for sweeps, so that an empty grid still has a header
SWEEP_COLUMNS = {
    "rho1": ["rho1"],
    "wz-rate": ["rate"],
    "gain-detect": ["D", "lhs", "rhs_lower", "rhs_exact", "gap_lower", "gap_exact", "relative_gap", "valid"],
    "two-msg": ["R1", "R2", "D", "sum_rate", "rsum1", "sum_ratio", "split_ratio"],
    "entropy-ratio": ["ratio", "relative_deviation"],
}


# --------------------------------------------------------------------------
# sweep


def parse_range(spec: str):
    """``name=lin:start:stop:num`` or ``name=geom:start:stop:num`` -> (name, values)."""
    try:
        name, rest = spec.split("=", 1)
        kind, start, stop, num = rest.split(":")
        start, stop, num = float(start), float(stop), int(num)
    except ValueError:
        raise UsageError(f"malformed --range {spec!r}; expected name=lin|geom:start:stop:num") from None
    name = name.strip().replace("-", "_")
    if num < 0:
        raise UsageError(f"--range {spec!r}: number of points must be >= 0")
    if kind == "lin":
        values = np.linspace(start, stop, num)
    elif kind == "geom":
        if start <= 0 or stop <= 0:
            raise UsageError(f"--range {spec!r}: geometric grids need positive endpoints")
        values = np.geomspace(start, stop, num)
    else:
        raise UsageError(f"--range {spec!r}: kind must be 'lin' or 'geom'")
    return name, [float(v) for v in values]


def _cmd_sweep(params):
    target = params.get("target")
    if target not in SWEEP_COLUMNS:
        raise UsageError(f"--target must be one of {', '.join(SWEEP_COLUMNS)}")
    ranges = [parse_range(s) for s in params.get("range") or []]
    if not ranges:
        raise UsageError("sweep needs at least one --range")
    if len(ranges) > 2:
        raise UsageError("sweep supports at most two ranged parameters")
    names = [n for n, _ in ranges]
    if len(set(names)) != len(names):
        raise UsageError("the same parameter is ranged twice")
    total = math.prod(len(v) for _, v in ranges)
    if total > MAX_SWEEP_POINTS:
        raise UsageError(f"sweep grid has {total} points, limit is {MAX_SWEEP_POINTS}")
    base = {k: v for k, v in params.items() if k not in ("target", "range")}
    columns = names + SWEEP_COLUMNS[target]
    handler = HANDLERS[target]
    rows = []
    for combo in itertools.product(*[v for _, v in ranges]):
        local = dict(base)
        local.update({n: repr(v) for n, v in zip(names, combo)})
        _, results, verdicts = handler(local)
        merged = {**results, **verdicts, **dict(zip(names, combo))}
        rows.append({c: merged[c] for c in columns})
    resolved = {"target": target, "ranges": ";".join(params["range"]), "points": total}
    return resolved, {}, {}, rows, columns


# --------------------------------------------------------------------------
# entry points


def dispatch(request: CommandRequest) -> RunReport:
    """Run one request. Domain errors and search exhaustion propagate."""
    start = time.perf_counter()
    params = {k: v for k, v in request.params.items() if v is not None}
    if request.subcommand == "sweep":
        resolved, results, verdicts, rows, columns = _cmd_sweep(params)
    else:
        resolved, results, verdicts = HANDLERS[request.subcommand](params)
        rows = columns = None
    return RunReport(
        command=request.subcommand,
        params=resolved,
        results=results,
        verdicts=verdicts,
        runtime_s=time.perf_counter() - start,
        rows=rows,
        columns=columns,
    )


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="text", dest="output_format")
    common.add_argument("--out", dest="output_path", default=None)
    numeric = ("p", "q", "alpha0e", "alpha", "distortion", "dsbs-p", "grid-res", "refine", "margin", "L", "slope")

    parser = _Parser(prog="interactive-rd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser)
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name, parents=[common])
        for flag in numeric:
            sp.add_argument(f"--{flag}", dest=flag.replace("-", "_"), default=None)
        sp.add_argument("--joint", default=None)
        sp.add_argument("--dist", default=None)
        if name == "sweep":
            sp.add_argument("--target", default=None)
            sp.add_argument("--range", action="append", default=None)
    return parser


def request_from_argv(argv) -> CommandRequest:
    ns = vars(build_parser().parse_args(argv))
    sub = ns.pop("subcommand")
    if sub is None:
        raise UsageError(f"a subcommand is required: {', '.join(SUBCOMMANDS)}")
    fmt = ns.pop("output_format")
    out = ns.pop("output_path")
    return CommandRequest(sub, {k: v for k, v in ns.items() if v is not None}, fmt, out)


def _one_line(exc) -> str:
    return " ".join(str(exc).split()) or type(exc).__name__


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        request = request_from_argv(argv)
        report = dispatch(request)
        text = RENDERERS["csv" if report.rows is not None else request.output_format](report)
        if request.output_path:
            with open(request.output_path, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except SearchExhaustedError as exc:
        print(f"error: search exhausted: {_one_line(exc)}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except DomainError as exc:
        print(f"error: {_one_line(exc)}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {_one_line(exc)}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
