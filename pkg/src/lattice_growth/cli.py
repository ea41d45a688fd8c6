"""Command-line interface: ``lattice-growth <command> [flags]``.

Exit status: 0 success or PASS, 1 FAIL, 2 usage error, 3 INCONCLUSIVE.
Rationals are read and written as ``p/q``.  Every output starts with the
effective configuration (comment lines for table/csv, a ``config`` object
for json), and timings are only printed with ``--timing`` so that repeated
runs produce identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence

from . import __version__
from .exact_arith import DEFAULT_PRECISION, MAX_PRECISION, format_rational, parse_rational
from .growth_newton import (
    CoeffCache,
    coeffs_by_difference,
    coeffs_by_recursion,
    q_direct,
    q_newton,
)
from .harmonic_lattice import HalfPoint, eval_F, eval_Z
from .model_family import ModelParams, f_model, factors_positive, model_ratios
from .random_walk import monte_carlo_Q, walk_distribution
from .theorem_suite import (
    REGISTRY,
    CheckError,
    CheckReport,
    CheckVerdict,
    SearchReport,
    aggregate,
    n_multiples,
    run_all,
    run_check,
    sharpness_search,
)
from .theorem_suite.report import to_jsonable

log = logging.getLogger("lattice_growth")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3
VERDICT_EXIT = {CheckVerdict.PASS: EXIT_OK, CheckVerdict.FAIL: EXIT_FAIL, CheckVerdict.INCONCLUSIVE: EXIT_INCONCLUSIVE}


class UsageError(Exception):
    pass


def rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


class Table:
    def __init__(self, columns: Sequence[str], rows: list[dict]):
        self.columns = list(columns)
        self.rows = rows


def _cell(v: Any) -> str:
    v = to_jsonable(v)
    if v is None:
        return ""
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _config_lines(config: dict) -> list[str]:
    return [f"# {k}={_cell(v)}" for k, v in sorted(config.items())]


def render(result, fmt: str, config: dict, timing: bool) -> str:
    if fmt == "json":
        if isinstance(result, Table):
            payload = [{c: to_jsonable(r.get(c)) for c in result.columns} for r in result.rows]
        elif isinstance(result, list):
            payload = [r.to_dict(timing) for r in result]
        else:
            payload = result.to_dict(timing)
        return json.dumps({"config": to_jsonable(config), "result": payload}, indent=2, sort_keys=True) + "\n"

    out = io.StringIO()
    for line in _config_lines(config):
        out.write(line + "\n")
    if isinstance(result, (list, CheckReport)):
        reports = result if isinstance(result, list) else [result]
        table = Table(
            ["check_id", "verdict", "margin", "witnesses", "elapsed_ms"],
            [
                {
                    "check_id": r.check_id,
                    "verdict": r.verdict.value,
                    "margin": _margin_text(r),
                    "witnesses": len(r.witnesses),
                    "elapsed_ms": r.elapsed_ms if timing else None,
                }
                for r in reports
            ],
        )
        if fmt == "table":
            _write_table(out, table)
            for r in reports:
                for w in r.witnesses[:3]:
                    out.write(f"  {r.check_id} witness: {_cell(w)}\n")
            return out.getvalue()
        result = table
    elif isinstance(result, SearchReport):
        d = result.to_dict(timing)
        if fmt == "table":
            for key in ("A", "epsilon", "cells", "precision", "elapsed_ms"):
                out.write(f"{key}: {_cell(d[key])}\n")
            best = result.best_A
            out.write(f"best_A: {best if best is not None else '-'}\n")
            out.write(f"best_cell: {_cell(d['best_cell'])}\n")
            out.write(f"witnesses: {len(result.witnesses)}\n")
            out.write(f"inconclusive: {len(result.inconclusive)}\n")
        result = Table(
            ["k", "n", "margin_lo", "margin_hi", "precision"],
            [
                {"k": w["k"], "n": w["n"], "margin_lo": str(w["margin"].lo), "margin_hi": str(w["margin"].hi),
                 "precision": w["precision"]}
                for w in result.witnesses
            ],
        )
    if fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(result.columns)
        for r in result.rows:
            writer.writerow([_cell(r.get(c)) for c in result.columns])
    else:
        _write_table(out, result)
    return out.getvalue()


def _margin_text(r: CheckReport) -> str:
    from .exact_arith import DyadicInterval, to_scientific

    m = r.margin
    if m is None:
        return ""
    if isinstance(m, DyadicInterval):
        return f"[{to_scientific(m.lo, 8)}, {to_scientific(m.hi, 8)}]"
    return format_rational(m)


def _write_table(out, table: Table) -> None:
    cells = [[_cell(r.get(c)) for c in table.columns] for r in table.rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(table.columns)]
    out.write("  ".join(c.ljust(w) for c, w in zip(table.columns, widths)).rstrip() + "\n")
    for row in cells:
        out.write("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() + "\n")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _cache(args) -> CoeffCache:
    return CoeffCache.default(args.cache)


def cmd_fk(args):
    return Table(["k", "x", "value"], [{"k": args.k, "x": args.x, "value": eval_F(args.k, args.x)}]), EXIT_OK


def cmd_zk(args):
    if args.tilde:
        if args.x.denominator != 1 or args.y.denominator != 1:
            raise UsageError("--tilde needs integer coordinates")
        p = HalfPoint(int(args.x), int(args.y))  # Z~_k(x, y) = 2^k Z_k(x/2, y/2)
        z = eval_Z(args.k, p) * 2**args.k
    else:
        try:
            p = HalfPoint.of(args.x, args.y)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        z = eval_Z(args.k, p)
    return Table(["k", "x", "y", "re", "im"], [{"k": args.k, "x": args.x, "y": args.y, "re": z.re, "im": z.im}]), EXIT_OK


def cmd_walk(args):
    d = walk_distribution(args.n)
    rows = [{"x": x, "y": y, "count": c} for x, y, c in d.support()]
    table = Table(["x", "y", "count"], rows)
    if args.out:
        with open(args.out, "w", newline="", encoding="ascii") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(table.columns)
            for r in rows:
                w.writerow([r["x"], r["y"], r["count"]])
        return Table(["n", "points", "total", "file"], [{"n": args.n, "points": len(rows), "total": d.total(), "file": args.out}]), EXIT_OK
    return table, EXIT_OK


def cmd_qk(args):
    variant = "tilde" if args.tilde else "plain"
    row = {"k": args.k, "n": args.n, "method": args.method, "variant": variant}
    if args.method == "direct":
        row["value"] = q_direct(args.k, args.n, variant)
        return Table(["k", "n", "method", "variant", "value"], [row]), EXIT_OK
    if args.method == "newton":
        if args.tilde:
            raise UsageError("the Newton expansion is only available for the plain variant")
        cache = _cache(args)
        row["value"] = q_newton(coeffs_by_recursion(args.k, cache), args.n)
        cache.save()
        return Table(["k", "n", "method", "variant", "value"], [row]), EXIT_OK
    if args.seed is None:
        raise UsageError("--method montecarlo requires --seed")
    est = monte_carlo_Q(args.k, args.n, args.samples, args.seed, variant)
    row.update(est.as_dict())
    row["exact"] = q_direct(args.k, args.n, variant)
    return Table(["k", "n", "method", "variant", "mean", "standard_error", "samples", "seed", "exact"], [row]), EXIT_OK


def cmd_coeffs(args):
    rows = []
    status = EXIT_OK
    if args.method in ("recursion", "both"):
        cache = _cache(args)
        rec = coeffs_by_recursion(args.k, cache)
        cache.save()
    if args.method in ("difference", "both"):
        dif = coeffs_by_difference(args.k)
    series = rec if args.method != "difference" else dif
    if args.method == "both" and rec != dif:
        log.error("difference and recursion coefficients disagree at k=%d", args.k)
        status = EXIT_FAIL
    for j, v in enumerate(series.coeffs):
        row = {"k": args.k, "j": j, "numerator": v.numerator, "denominator": v.denominator}
        if args.method == "both":
            row["agree"] = rec[j] == dif[j]
        rows.append(row)
    cols = ["k", "j", "numerator", "denominator"] + (["agree"] if args.method == "both" else [])
    return Table(cols, rows), status


def cmd_model(args):
    try:
        p = ModelParams(args.k, args.alpha)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    row = {"k": args.k, "alpha": args.alpha, "n": args.n}
    cols = ["k", "alpha", "n", "f(n)", "f(2n)", "f(4n)"]
    for label, m in (("f(n)", args.n), ("f(2n)", 2 * args.n), ("f(4n)", 4 * args.n)):
        row[label] = f_model(p, m)
    if args.ratios:
        if args.n < 1 or not factors_positive(p, args.n):
            raise UsageError("ratios need n >= 1 with every factor n + alpha k - j positive")
        r = model_ratios(p, args.n, args.precision)
        row["logconv"], row["decay"] = r.logconv, r.decay
        cols += ["logconv", "decay"]
    return Table(cols, [row]), EXIT_OK


def _load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read configuration {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("configuration must be a JSON object")
    return data


def _global_overrides(check_id: str, args) -> dict:
    params = REGISTRY[check_id].params
    out = {}
    if args.precision is not None and "precision" in params:
        out["precision"] = args.precision
    if args.seed is not None and "seed" in params:
        out["seed"] = args.seed
    return out


def cmd_verify(args):
    config = _load_config(args.config)
    per_check = config.get("checks", {})
    if args.check_id == "all":
        level = args.level or config.get("level", "quick")
        overrides = {cid: {**_global_overrides(cid, args), **per_check.get(cid, {})} for cid in REGISTRY}
        reports = run_all(level, overrides, jobs=args.jobs)
        return reports, VERDICT_EXIT[aggregate(reports)]
    given = {**_global_overrides(args.check_id, args), **per_check.get(args.check_id, {})}
    for name, value in (args.check_params or {}).items():
        if value is not None:
            given[name] = value
    report = run_check(args.check_id, given, args.level or "full")
    return report, VERDICT_EXIT[report.verdict]


def cmd_sharpness(args):
    if args.n_min_mult is not None or args.n_max_mult is not None:
        if args.n_min_mult is None or args.n_max_mult is None:
            raise UsageError("--n-min-mult and --n-max-mult go together")
        n_range = n_multiples(args.n_min_mult, args.n_max_mult)
    else:
        if args.n_min is None or args.n_max is None:
            raise UsageError("give --n-min/--n-max or --n-min-mult/--n-max-mult")
        n_range = (args.n_min, args.n_max)
    cache = _cache(args)
    report = sharpness_search(
        args.A,
        args.epsilon,
        (args.k_min, args.k_max),
        n_range,
        precision=args.precision or DEFAULT_PRECISION,
        max_precision=args.max_precision,
        cache=cache,
        jobs=args.jobs,
    )
    return report, EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--format", choices=("table", "json", "csv"), default="table")
    g.add_argument("--precision", type=int, default=None, help="working precision in bits")
    g.add_argument("--cache", default=None, help="coefficient cache file (overrides $LATTICE_GROWTH_CACHE)")
    g.add_argument("--seed", type=int, default=None, help="seed for sampling checks")
    g.add_argument("--jobs", type=int, default=1, help="worker processes for grid evaluations")
    g.add_argument("--timing", action="store_true", help="include wall-clock timings (output is then not reproducible)")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def _add_check_parser(sub, check_id: str, common) -> None:
    defn = REGISTRY[check_id]
    sp = sub.add_parser(check_id, parents=[common], help=defn.summary, description=defn.summary)
    sp.set_defaults(check_id=check_id)
    sp.add_argument("--level", choices=("quick", "full"), default=None, help="grid defaults to start from")
    sp.add_argument("--config", default=None, help="JSON file with {'checks': {id: params}}")
    flags = {}
    for name, param in defn.params.items():
        if name == "precision":
            continue  # the common --precision flag feeds this parameter
        if name == "seed":
            continue
        flag = "--" + name.replace("_", "-")
        sp.add_argument(flag, dest=f"param_{name}", default=None, metavar=param.kind.upper(),
                        help=f"default {_cell(param.default)}")
        flags[name] = f"param_{name}"
    bases = {n[:-4] for n in defn.params if n.endswith("_min") or n.endswith("_max")}
    for base in sorted(bases):
        if base not in defn.params:
            sp.add_argument("--" + base.replace("_", "-"), dest=f"param_{base}", default=None,
                            help=f"shorthand for --{base}-min = --{base}-max")
            flags[base] = f"param_{base}"
    sp.set_defaults(_param_flags=flags)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="lattice-growth", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fk", parents=[common], help="F_k(x) exactly")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x", type=rational, required=True)
    p.set_defaults(func=cmd_fk)

    p = sub.add_parser("zk", parents=[common], help="Z_k(x, y) (or Z~_k) exactly")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--x", type=rational, required=True)
    p.add_argument("--y", type=rational, required=True)
    p.add_argument("--tilde", action="store_true")
    p.set_defaults(func=cmd_zk)

    p = sub.add_parser("walk", parents=[common], help="n-step path counts as x,y,count rows")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default=None, help="write the CSV here instead of stdout")
    p.set_defaults(func=cmd_walk, format="csv")

    p = sub.add_parser("qk", parents=[common], help="Q_k(n) exactly (or a seeded Monte Carlo estimate)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", choices=("direct", "newton", "montecarlo"), default="direct")
    p.add_argument("--tilde", action="store_true")
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=cmd_qk)

    p = sub.add_parser("coeffs", parents=[common], help="Newton coefficients a[k,j] as k,j,numerator,denominator")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=("difference", "recursion", "both"), default="recursion")
    p.set_defaults(func=cmd_coeffs, format="csv")

    p = sub.add_parser("model", parents=[common], help="C(n + alpha k, k) at n, 2n, 4n")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", type=rational, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ratios", action="store_true", help="also print the log-convexity and decay ratios")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("verify", help="run a named check, or all of them")
    vsub = p.add_subparsers(dest="check_id", required=True, parser_class=_Parser, metavar="CHECK_ID")
    va = vsub.add_parser("all", parents=[common], help="every registered check")
    va.add_argument("--level", choices=("quick", "full"), default=None)
    va.add_argument("--config", default=None)
    va.set_defaults(check_id="all")
    for cid in REGISTRY:
        _add_check_parser(vsub, cid, common)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sharpness", parents=[common], help="search (k, n) cells beating the three circles bound")
    p.add_argument("--A", type=rational, required=True)
    p.add_argument("--epsilon", type=rational, required=True)
    p.add_argument("--k-min", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    p.add_argument("--n-min", type=int, default=None)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--n-min-mult", type=rational, default=None, help="n from ceil(mult * k)")
    p.add_argument("--n-max-mult", type=rational, default=None, help="n up to floor(mult * k)")
    p.add_argument("--max-precision", type=int, default=MAX_PRECISION)
    p.set_defaults(func=cmd_sharpness)
    return parser


def _effective_config(args) -> dict:
    skip = {"func", "verbose", "timing", "_param_flags", "check_params"}
    cfg = {k: v for k, v in vars(args).items() if k not in skip and not k.startswith("param_")}
    for name, dest in getattr(args, "_param_flags", {}).items():
        if getattr(args, dest, None) is not None:
            cfg[name] = getattr(args, dest)
    if args.command in ("qk", "coeffs", "sharpness"):
        cfg["cache"] = str(CoeffCache.default(args.cache).path)
    return {k: v for k, v in cfg.items() if v is not None}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "verify" and args.check_id != "all":
        args.check_params = {name: getattr(args, dest) for name, dest in args._param_flags.items()}
    if args.jobs < 1:
        parser.error("--jobs must be positive")
    try:
        result, status = args.func(args)
    except (UsageError, CheckError) as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(render(result, args.format, _effective_config(args), args.timing))
    return status


if __name__ == "__main__":
    sys.exit(main())
