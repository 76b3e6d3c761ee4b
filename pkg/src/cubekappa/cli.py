"""Command-line driver: ``cubekappa generate | analyze | verify``.

Exit status: 0 success, 1 usage error, 2 validation failure, 3 results that
are only lower bounds because a well-separation search ran out of budget.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import contraction as ctr
from . import hyperspaces as hyp
from .corpus import FAMILIES, FamilySpec, atomic_write, complex_to_json, geodesic, load_complex
from .errors import (
    CubeKappaError,
    DisconnectedGraphError,
    DuplicateEdgeError,
    KappaError,
    MedianViolationError,
    NoAdmissibleParameterError,
)
from .kappa import parse_kappa
from .separation import DEFAULT_BUDGET, crossing_mask, well_separation
from .verify import verify_complex

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_INEXACT = 0, 1, 2, 3
ANALYSES = ("contraction", "slimness", "divergence", "excursion", "contact-progress",
            "wellsep-progress", "separation-table")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_c_grid(spec: str) -> list[float]:
    """``a:b:step`` -> a, a+step, ... up to b inclusive."""
    try:
        a, b, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise UsageError(f"--c-grid expects a:b:step, got {spec!r}") from None
    if not (step > 0 and 0 < a <= b):
        raise UsageError("--c-grid needs 0 < a <= b and step > 0")
    n = int(math.floor((b - a) / step + 1e-9))
    return [round(a + i * step, 10) for i in range(n + 1)]


def _num(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, np.integer):
        return int(x)
    return x


def render(analysis: str, summary: dict, columns: Sequence[str], rows: list[dict], fmt: str) -> str:
    rows = [{c: _num(r.get(c)) for c in columns} for r in rows]
    if fmt == "json":
        doc = {"analysis": analysis, "summary": {k: _num(v) for k, v in summary.items()}, "rows": rows}
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


# -- analyses -------------------------------------------------------------------

def _contraction(cc, b, args, kappa):
    prof = ctr.contraction_profile(cc, b, kappa, args.samples, args.seed)
    rows = [{"geodesic": b.name, "kappa": kappa.label, "parameter": r["x"], "norm": r["norm"],
             "raw": r["diameter"], "ratio": r["ratio"], "ratio_projection": r["ratio_projection"]}
            for r in prof.rows()]
    summary = {"constant": prof.constant, "constant_projection": prof.constant_projection,
               "samples": len(rows), "skipped_on_path": prof.skipped}
    cols = ["geodesic", "kappa", "parameter", "norm", "raw", "ratio", "ratio_projection"]
    return summary, cols, rows, True


def _slimness(cc, b, args, kappa):
    rows = []
    for cond in (1, 2, 3, 4):
        c = ctr.slimness_profile(cc, b, kappa, cond, args.samples, args.seed)
        rows.append({"geodesic": b.name, "kappa": kappa.label, "parameter": cond, "raw": c, "ratio": c})
    summary = {f"condition_{r['parameter']}": r["ratio"] for r in rows}
    return summary, ["geodesic", "kappa", "parameter", "raw", "ratio"], rows, True


def _divergence(cc, b, args, kappa):
    rows, summary = [], {}
    for r in range(args.r_min, args.r_max + 1):
        try:
            curve = ctr.lower_divergence(cc, b, r, kappa)
        except NoAdmissibleParameterError:
            summary[f"div_r{r}"] = "no admissible t"
            continue
        summary[f"div_r{r}"] = curve.div
        for t, rad, rho, k in curve.rows:
            rows.append({"geodesic": b.name, "kappa": kappa.label, "r": r, "parameter": t,
                         "radius": rad, "raw": rho, "ratio": rho / k})
    if not rows:
        raise NoAdmissibleParameterError(f"no admissible t for any r in {args.r_min}..{args.r_max}")
    return summary, ["geodesic", "kappa", "r", "parameter", "radius", "raw", "ratio"], rows, True


def _excursion(cc, b, args, kappa):
    rows, exact, found = [], True, None
    witness = []
    for c in args.c_grid:
        res = ctr.excursion_detect(cc, b, kappa, c, args.budget)
        exact &= res.exact
        rows.append({"geodesic": b.name, "kappa": kappa.label, "parameter": c,
                     "raw": len(res.chain), "feasible": res.feasible, "exact": res.exact})
        if res.feasible and found is None:
            found, witness = c, res.chain
    summary = {"excursion_constant": "none up to grid max" if found is None else found,
               "feasible": found is not None, "exact": exact,
               "witness": json.dumps([[h, t] for h, t in witness])}
    return summary, ["geodesic", "kappa", "parameter", "raw", "feasible", "exact"], rows, exact


def _contact_progress(cc, b, args, kappa):
    prog = hyp.contact_progress(cc, b)
    rows = [{"geodesic": b.name, "parameter": t, "raw": d, "strongly_separated": n}
            for t, d, n in prog.rows]
    summary = {"lower_bound_holds": prog.holds, "clique_slack": prog.slack}
    return summary, ["geodesic", "parameter", "raw", "strongly_separated"], rows, True


def _wellsep_progress(cc, b, args, kappa):
    prog = hyp.wellsep_progress(cc, b, args.k, kappa, budget=args.budget)
    rows = [{"geodesic": b.name, "kappa": kappa.label, "k": args.k, "parameter": t, "raw": v,
             "exact": e} for t, v, e in prog.rows]
    summary = {"k": args.k, "d1": "unbounded" if prog.d1 is None else prog.d1,
               "d2": "unbounded" if prog.d2 is None else prog.d2, "exact": prog.exact}
    return summary, ["geodesic", "kappa", "k", "parameter", "raw", "exact"], rows, prog.exact


def _separation_table(cc, b, args, kappa):
    rows, exact = [], True
    for i in range(len(b.crossed) - 1):
        h1, h2 = b.crossed[i], b.crossed[i + 1]
        if cc.cross[h1, h2]:
            continue
        ws, ok = well_separation(cc, h1, h2, args.budget)
        exact &= ok
        k = crossing_mask(cc, h1, h2).bit_count()
        rows.append({"geodesic": b.name, "parameter": i, "h1": h1, "h2": h2, "crossing_count": k,
                     "well_separation": ws, "exact": ok, "strongly_separated": k == 0})
    cols = ["geodesic", "parameter", "h1", "h2", "crossing_count", "well_separation", "exact",
            "strongly_separated"]
    return {"pairs": len(rows), "exact": exact}, cols, rows, exact


DISPATCH = {
    "contraction": _contraction,
    "slimness": _slimness,
    "divergence": _divergence,
    "excursion": _excursion,
    "contact-progress": _contact_progress,
    "wellsep-progress": _wellsep_progress,
    "separation-table": _separation_table,
}


# -- commands -------------------------------------------------------------------

def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        atomic_write(out, text)


def cmd_generate(args) -> int:
    params = {"grid": {"n": args.n}, "tree_ball": {"valence": args.valence, "d": args.d},
              "ball_times_segment": {"d": args.d, "l": args.l},
              "example42": {"depth": args.depth}}[args.family]
    missing = [k for k, v in params.items() if v is None]
    if missing:
        raise UsageError(f"family {args.family} needs --{', --'.join(missing)}")
    try:
        cc = FamilySpec(args.family, params, args.seed).build()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(complex_to_json(cc), args.out)
    return EXIT_OK


def cmd_analyze(args) -> int:
    kappa = parse_kappa(args.kappa)
    if args.r_min < 1 or args.r_max < args.r_min:
        raise UsageError("need 1 <= --r-min <= --r-max")
    args.c_grid = parse_c_grid(args.c_grid)
    cc = load_complex(args.input)
    b = geodesic(cc, args.path)
    summary, cols, rows, exact = DISPATCH[args.analysis](cc, b, args, kappa)
    summary = {"complex": cc.name, "geodesic": b.name, "kappa": kappa.label, **summary}
    _emit(render(args.analysis, summary, cols, rows, args.format), args.out)
    return EXIT_OK if exact else EXIT_INEXACT


def _failure_label(exc: Exception) -> str:
    for cls, label in ((MedianViolationError, "median"), (DisconnectedGraphError, "connectivity"),
                       (DuplicateEdgeError, "duplicate-edge")):
        if isinstance(exc, cls):
            return label
    return "load"


def cmd_verify(args) -> int:
    try:
        cc = load_complex(args.input, validate="none")
    except OSError as exc:
        print(f"FAIL load: {exc}")
        return EXIT_INVALID
    except CubeKappaError as exc:
        print(f"FAIL {_failure_label(exc)}: {type(exc).__name__}: {exc}")
        return EXIT_INVALID
    results = verify_complex(cc, samples=args.samples or 500, seed=args.seed)
    text = "".join(r.line() + "\n" for r in results)
    _emit(text, args.out)
    return EXIT_OK if all(r.ok for r in results) else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cubekappa", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a built-in example complex as JSON")
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--depth", type=int, help="example42 depth N")
    g.add_argument("--n", type=int, help="grid size N")
    g.add_argument("--d", type=int, help="tree ball radius D")
    g.add_argument("--l", type=int, help="segment length L")
    g.add_argument("--valence", type=int, default=4, help="tree valence (default 4)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")

    a = sub.add_parser("analyze", help="run one analysis on a geodesic of a complex file")
    a.add_argument("input")
    a.add_argument("--analysis", required=True, choices=ANALYSES)
    a.add_argument("--path", default="b", help="name of the embedded geodesic (default b)")
    a.add_argument("--kappa", default="log2p1", help="constant | log2p1 | sqrt | power:<p>")
    a.add_argument("--r-min", type=int, default=1)
    a.add_argument("--r-max", type=int, default=4)
    a.add_argument("--k", type=int, default=0)
    a.add_argument("--c-grid", default="0.5:20:0.5")
    a.add_argument("--samples", type=int, default=None)
    a.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--format", choices=("csv", "json"), default="csv")
    a.add_argument("--out")

    v = sub.add_parser("verify", help="run the invariant suites on a complex file")
    v.add_argument("input")
    v.add_argument("--samples", type=int, default=None)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"generate": cmd_generate, "analyze": cmd_analyze, "verify": cmd_verify}[args.command]
    try:
        return handler(args)
    except (UsageError, KappaError) as exc:
        print(f"cubekappa: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"cubekappa: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (CubeKappaError, ValueError) as exc:
        print(f"cubekappa: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
