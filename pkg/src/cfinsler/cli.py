"""Command-line front end: ``cfinsler {list,report,verify,classify,scan,fd-check}``."""

from __future__ import annotations

import argparse
import itertools
import re
import sys
from pathlib import Path

import numpy as np

from . import metrics, report
from .classify import Sampler, aggregate, check_order, parallel_map, sample_points
from .errors import CFinslerError, DSLError
from .fdcheck import DEFAULT_STEP, fd_check_point, truncation_stability
from .tolerance import ToleranceConfig

FD_TOL = 1e-5
TRUNCATION_TOL = 1e-10
VERIFY_TOL = 1e-7


class UsageError(DSLError):
    """Malformed command-line input (flags, points, grids)."""

    kind = "usage error"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- input syntax ---------------------------------------------------------------------


def parse_complex(text: str) -> complex:
    """``a+bi`` style literal (``j`` accepted too)."""
    s = re.sub(r"\s+", "", text).replace("i", "j")
    if not s or re.search(r"[^0-9eE+\-.j]", s):
        raise UsageError(f"malformed complex number {text!r}")
    try:
        v = complex(s)
    except ValueError:
        raise UsageError(f"malformed complex number {text!r}") from None
    if not (np.isfinite(v.real) and np.isfinite(v.imag)):
        raise UsageError(f"non-finite complex number {text!r}")
    return v


def parse_point(text: str):
    """``z=a+bi,c+di; eta=e+fi,g+hi`` -> (z, eta)."""
    parts = {}
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        if "=" not in chunk:
            raise UsageError(f"expected key=value in point {text!r}")
        key, val = (s.strip() for s in chunk.split("=", 1))
        if key not in ("z", "eta") or key in parts:
            raise UsageError(f"point needs exactly one z= and one eta= entry, got {key!r}")
        vals = [parse_complex(v) for v in val.split(",")]
        if len(vals) != 2:
            raise UsageError(f"{key} needs two components, got {len(vals)}")
        parts[key] = tuple(vals)
    if set(parts) != {"z", "eta"}:
        raise UsageError(f"point {text!r} must give both z and eta")
    return parts["z"], parts["eta"]


_GRID_KEYS = ("z1", "z2", "eta1", "eta2")


def parse_grid(text: str) -> list:
    """``z1=LO..HI/N; z2=...; eta1=...; eta2=...``: each coordinate is a
    constant or N points on the segment LO..HI in the complex plane.  Points
    are the Cartesian product; eta defaults to (1, 1)."""
    axes = {"eta1": [1 + 0j], "eta2": [1 + 0j]}
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        if "=" not in chunk:
            raise UsageError(f"expected key=value in grid {text!r}")
        key, val = (s.strip() for s in chunk.split("=", 1))
        if key not in _GRID_KEYS:
            raise UsageError(f"unknown grid coordinate {key!r}; use {', '.join(_GRID_KEYS)}")
        m = re.fullmatch(r"(.+?)\.\.(.+?)/(\d+)", val.replace(" ", ""))
        if m:
            lo, hi, n = parse_complex(m.group(1)), parse_complex(m.group(2)), int(m.group(3))
            if n < 1:
                raise UsageError("grid segments need at least one point")
            axes[key] = list(np.linspace(lo, hi, n)) if n > 1 else [lo]
        else:
            axes[key] = [parse_complex(val)]
    missing = [k for k in ("z1", "z2") if k not in axes]
    if missing:
        raise UsageError(f"grid must specify {', '.join(missing)}")
    pts = []
    for z1, z2, e1, e2 in itertools.product(*(axes[k] for k in _GRID_KEYS)):
        pts.append(((complex(z1), complex(z2)), (complex(e1), complex(e2))))
    return pts


def parse_params(items) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def load_metric(source: str, params: dict) -> metrics.MetricSpec:
    if source.startswith("builtin:"):
        try:
            return metrics.builtin(source[len("builtin:"):], **params)
        except TypeError as exc:
            raise UsageError(f"bad --param for {source}: {exc}") from None
        except DSLError:
            raise
        except CFinslerError as exc:
            raise UsageError(str(exc)) from None
    if source.startswith("@"):
        if params:
            raise UsageError("--param applies to built-in metrics only")
        path = Path(source[1:])
        try:
            text = path.read_text()
        except OSError as exc:
            raise CFinslerError(f"cannot read metric file {path}: {exc}") from exc
        return metrics.parse_metric(text, name=path.stem)
    raise UsageError(f"--metric must be builtin:NAME or @FILE, got {source!r}")


# -- argument parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cfinsler", description="Numerical lab for 2-dimensional complex Finsler metrics.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def shared(sp, metric=True):
        if metric:
            sp.add_argument("--metric", required=True, help="builtin:NAME or @path/to/metric.cf")
            sp.add_argument("--param", action="append", default=[], metavar="K=V",
                            help="built-in metric parameter (repeatable)")
        sp.add_argument("--order", type=int, default=6, help="jet truncation order (4-10)")
        sp.add_argument("--tol", type=float, default=None, help="pass tolerance")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--samples", type=int, default=None, help="number of sampled points")
        sp.add_argument("--point", action="append", default=[], metavar="STR",
                        help='"z=a+bi,c+di; eta=e+fi,g+hi" (repeatable)')
        sp.add_argument("--grid", default=None, metavar="STR",
                        help='"z1=LO..HI/N; z2=...; eta1=...; eta2=..."')
        sp.add_argument("--box", default="-1,1", metavar="LO,HI",
                        help="sampling box for real and imaginary parts of z")
        sp.add_argument("--format", choices=("json", "csv", "text"), default=None)
        sp.add_argument("--out", default=None, help="write output to this file")
        sp.add_argument("--suite", action="append", default=[], help="identity suite (repeatable)")
        return sp

    sp = sub.add_parser("list", help="list built-in metrics")
    sp.add_argument("--format", choices=("json", "csv", "text"), default="text")
    sp.add_argument("--out", default=None)
    shared(sub.add_parser("report", help="full geometry report at points"))
    shared(sub.add_parser("verify", help="identity suites; exit 1 on any failure"))
    shared(sub.add_parser("classify", help="aggregated classification"))
    shared(sub.add_parser("scan", help="CSV rows over a grid"))
    fd = shared(sub.add_parser("fd-check", help="jet derivatives against finite differences"))
    fd.add_argument("--step", type=float, default=DEFAULT_STEP)
    return p


# -- helpers ---------------------------------------------------------------------------


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _box(text: str):
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--box expects LO,HI, got {text!r}") from None
    if not lo < hi:
        raise UsageError("--box needs LO < HI")
    return lo, hi


def _points(args, spec, default_samples: int):
    chosen = sum(bool(x) for x in (args.point, args.grid, args.samples is not None))
    if chosen > 1:
        raise UsageError("give only one of --point, --grid, --samples")
    if args.point:
        return [parse_point(p) for p in args.point]
    if args.grid:
        return parse_grid(args.grid)
    n = args.samples if args.samples is not None else default_samples
    if n < 1:
        raise UsageError("--samples must be positive")
    return sample_points(spec, Sampler(count=n, seed=args.seed, box=_box(args.box)))


def _config(args, tol) -> dict:
    cfg = {"order": args.order, "tol": tol, "seed": args.seed}
    if getattr(args, "samples", None) is not None:
        cfg["samples"] = args.samples
    return cfg


def _setup(args, default_tol: float):
    try:
        check_order(args.order)
    except CFinslerError as exc:
        raise UsageError(str(exc)) from None
    spec = load_metric(args.metric, parse_params(args.param))
    tol = args.tol if args.tol is not None else default_tol
    if not tol > 0:
        raise UsageError("--tol must be positive")
    return spec, tol


def _text_table(rows: list, cols: list) -> str:
    widths = [max(len(c), *(len(str(r.get(c, ""))) for r in rows)) for c in cols]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    for r in rows:
        lines.append("  ".join(str(r.get(c, "")).ljust(w) for c, w in zip(cols, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    if isinstance(x, complex):
        return f"{x.real:.10g}{x.imag:+.10g}i"
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


# -- commands --------------------------------------------------------------------------


def cmd_list(args) -> int:
    rows = []
    for spec in metrics.list_builtins():
        params = metrics.builtin_parameters(spec.name)
        rows.append({"name": spec.name,
                     "parameters": "; ".join(f"{k}: {v}" for k, v in params.items()) or "-",
                     "domain": "; ".join(c.description for c in spec.domain) or "C^2 x C^2",
                     "description": spec.description})
    if args.format == "json":
        text = report.dumps({"schema_version": report.SCHEMA_VERSION, "metrics": rows})
    elif args.format == "csv":
        text = report.to_csv(rows, ["name", "parameters", "domain", "description"])
    else:
        text = _text_table(rows, ["name", "parameters", "domain"])
    _emit(text, args.out)
    return 0


def cmd_report(args) -> int:
    spec, tol = _setup(args, ToleranceConfig().pass_tol)
    pts = _points(args, spec, 1)
    cfg = ToleranceConfig(pass_tol=tol)
    recs = parallel_map(lambda p: report.point_record(report.build(spec, p[0], p[1], args.order), cfg), pts)
    fmt = args.format or "json"
    if fmt == "json":
        text = report.dumps(report.document("report", spec, _config(args, tol), {"points": recs}))
    elif fmt == "csv":
        text = report.to_csv(recs)
    else:
        out = []
        for r in recs:
            out.append(f"point z={_fmt(r['point']['z'][0])},{_fmt(r['point']['z'][1])} "
                       f"eta={_fmt(r['point']['eta'][0])},{_fmt(r['point']['eta'][1])}")
            out.append(f"  L={_fmt(r['L'])} F={_fmt(r['F'])} det_g={_fmt(r['det_g'])}")
            out.append("  " + " ".join(f"{k}={_fmt(v)}" for k, v in r["invariants"].items()))
            out.append("  " + " ".join(f"{k}={_fmt(v)}" for k, v in r["scalars"].items()))
            out.append("  " + " ".join(f"{k}={v['verdict']}" for k, v in r["classification"].items()))
        text = "\n".join(out) + "\n"
    _emit(text, args.out)
    return 0


def cmd_verify(args) -> int:
    spec, tol = _setup(args, VERIFY_TOL)
    pts = _points(args, spec, 10)
    names = [report.suite_name(n) for n in args.suite] or list(report.SUITES)
    names = list(dict.fromkeys(names))
    for n in names:
        if n not in report.SUITES:
            raise UsageError(f"unknown suite {n!r}; choose from {', '.join(report.SUITES)}")
    per_point = parallel_map(
        lambda p: report.suite_summary(report.run_suites(report.build(spec, p[0], p[1], args.order), names), tol),
        pts)
    summary = {}
    for n in names:
        worst = max(pp[n]["max_residual"] for pp in per_point)
        item = max(per_point, key=lambda pp: pp[n]["max_residual"])[n]["worst_item"]
        summary[n] = {"max_residual": worst, "worst_item": item, "pass": worst <= tol}
    ok = all(v["pass"] for v in summary.values())
    fmt = args.format or "text"
    if fmt == "json":
        text = report.dumps(report.document("verify", spec, _config(args, tol),
                                            {"suites": summary, "pass": ok, "points": len(pts)}))
    elif fmt == "csv":
        rows = [{"suite": k, **v} for k, v in summary.items()]
        text = report.to_csv(rows, ["suite", "max_residual", "worst_item", "pass"])
    else:
        rows = [{"suite": k, "max_residual": f"{v['max_residual']:.3e}", "worst_item": v["worst_item"],
                 "result": "pass" if v["pass"] else "FAIL"} for k, v in summary.items()]
        text = _text_table(rows, ["suite", "max_residual", "worst_item", "result"])
        text += f"{len(pts)} point(s), tolerance {tol:g}: {'all suites pass' if ok else 'FAILURES'}\n"
    _emit(text, args.out)
    return 0 if ok else 1


def cmd_classify(args) -> int:
    spec, tol = _setup(args, ToleranceConfig().pass_tol)
    cfg = ToleranceConfig(pass_tol=tol)
    if args.point or args.grid:
        from .classify import _fold, classify_point
        pts = _points(args, spec, 0)
        entries = parallel_map(lambda p: classify_point(spec, p[0], p[1], args.order, cfg), pts)
        result = {"points": entries, "aggregate": _fold(entries)}
    else:
        n = args.samples if args.samples is not None else 20
        result = aggregate(spec, Sampler(count=n, seed=args.seed, box=_box(args.box)), args.order, cfg)
    fmt = args.format or "json"
    if fmt == "json":
        text = report.dumps(report.document("classify", spec, _config(args, tol), result))
    elif fmt == "csv":
        rows = [{"flag": k, **v} for k, v in result["aggregate"].items() if isinstance(v, dict) and "summary" in v]
        text = report.to_csv(rows, ["flag", "summary", "fraction_yes", "fraction_no", "worst_residual"])
    else:
        rows = [{"flag": k, "summary": v["summary"], "worst_residual": f"{v['worst_residual']:.3e}"}
                for k, v in result["aggregate"].items() if isinstance(v, dict) and "summary" in v]
        text = _text_table(rows, ["flag", "summary", "worst_residual"])
        agg = result["aggregate"]
        text += f"trichotomy branches: {agg['trichotomy']}\nmax I_|k residual: {agg['max_I_|k']:.3e}\n"
        if agg["violations"]:
            text += "implication violations: " + ", ".join(agg["violations"]) + "\n"
    _emit(text, args.out)
    return 0


SCAN_HEADER = (["index", "z1_re", "z1_im", "z2_re", "z2_im", "eta1_re", "eta1_im", "eta2_re", "eta2_im",
                "L", "I", "K", "W"]
               + [f"{k}_{r}" for k in report.SECTIONAL for r in ("contraction", "invariant")]
               + ["purely_hermitian", "weakly_kahler", "kahler", "holomorphic_spray", "berwald",
                  "landsberg", "weak_symmetry", "error"])


def _scan_row(i, spec, z, eta, order, cfg) -> dict:
    row = {"index": i}
    for name, v in zip(("z1", "z2", "eta1", "eta2"), (*z, *eta)):
        row[f"{name}_re"], row[f"{name}_im"] = v.real, v.imag
    try:
        rec = report.point_record(report.build(spec, z, eta, order), cfg, suites=False)
    except CFinslerError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    row["L"] = rec["L"]
    row.update(rec["invariants"])
    for k in report.SECTIONAL:
        row[f"{k}_contraction"] = rec["sectional"][k]["contraction"].real
        row[f"{k}_invariant"] = rec["sectional"][k]["invariant"].real
    for k, v in rec["classification"].items():
        row[k] = v["verdict"]
    row["error"] = ""
    return row


def cmd_scan(args) -> int:
    spec, tol = _setup(args, ToleranceConfig().pass_tol)
    if not args.grid and not args.point:
        raise UsageError("scan needs --grid (or --point)")
    pts = _points(args, spec, 0)
    cfg = ToleranceConfig(pass_tol=tol)
    rows = parallel_map(lambda ip: _scan_row(ip[0], spec, ip[1][0], ip[1][1], args.order, cfg),
                        list(enumerate(pts)))
    fmt = args.format or "csv"
    if fmt == "csv":
        text = report.to_csv(rows, SCAN_HEADER)
    elif fmt == "json":
        text = report.dumps(report.document("scan", spec, _config(args, tol), {"rows": rows}))
    else:
        text = _text_table([{k: _fmt(r.get(k, "")) for k in SCAN_HEADER} for r in rows],
                           ["index", "z1_re", "z1_im", "z2_re", "z2_im", "I", "K", "W", "error"])
    _emit(text, args.out)
    return 0


def cmd_fd_check(args) -> int:
    spec, tol = _setup(args, FD_TOL)
    pts = _points(args, spec, 5)

    def one(p):
        r = fd_check_point(spec, p[0], p[1], args.step, args.order)
        r["truncation"] = max(truncation_stability(spec, p[0], p[1], args.order, args.order + 2).values()) \
            if args.order + 2 <= 10 else 0.0
        return r

    rows = parallel_map(one, pts)
    worst = {k: max(r[k] for r in rows) for k in ("g", "N", "L", "truncation")}
    ok = max(worst["g"], worst["N"], worst["L"]) <= tol and worst["truncation"] <= TRUNCATION_TOL
    fmt = args.format or "text"
    body = {"points": [{"point": {"z": list(p[0]), "eta": list(p[1])}, **r} for p, r in zip(pts, rows)],
            "max_deviation": worst, "pass": ok, "step": args.step}
    if fmt == "json":
        text = report.dumps(report.document("fd-check", spec, _config(args, tol), body))
    elif fmt == "csv":
        text = report.to_csv(body["points"])
    else:
        table = [{"quantity": k, "max_rel_deviation": f"{v:.3e}",
                  "tolerance": f"{(TRUNCATION_TOL if k == 'truncation' else tol):g}"} for k, v in worst.items()]
        text = _text_table(table, ["quantity", "max_rel_deviation", "tolerance"])
        text += f"{len(pts)} point(s), step {args.step:g}: {'pass' if ok else 'FAIL'}\n"
    _emit(text, args.out)
    return 0 if ok else 1


COMMANDS = {"list": cmd_list, "report": cmd_report, "verify": cmd_verify,
            "classify": cmd_classify, "scan": cmd_scan, "fd-check": cmd_fd_check}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except CFinslerError as exc:
        print(f"cfinsler: {exc}", file=sys.stderr)
        return exc.exit_code
    except KeyError as exc:
        print(f"cfinsler: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
