"""Command-line front end: ``condbound <subcommand> [options]``.

Exit status is 0 on success, 1 on invalid input and 2 on numerical failure.
Every option can also come from a JSON ``--config`` file (same names, with
dashes or underscores); explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from dataclasses import replace
from pathlib import Path
from typing import Any, Sequence

from condbound.bounds import (
    DEFAULT_GRID,
    FIELD_GRID,
    BoundQuery,
    LambdaGrid,
    Mode,
    ScanConfig,
    bound_abelian_q,
    bound_elliptic_q,
    bound_number_field,
    evaluate,
    lambda_scan,
    scan_fields,
)
from condbound.errors import NumericalError, ValidationError
from condbound.numberfield import RATIONALS
from condbound.optimizer import optimize_testfunc
from condbound.serialize import SCAN_COLUMNS, dumps, load_fields, result_to_dict, scan_to_dict, to_csv
from condbound.sums import CoeffModel, ReductionSpec, parse_reduction_spec
from condbound.tables import reference_rows
from condbound.testfunc import Odlyzko, testfunc_from_config

log = logging.getLogger("condbound")

REFERENCE_COLUMNS = ["table", "label", "lambda", "B_R", "B_Z", "ref_B_R", "ref_B_Z", "tol", "pass"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        raise ValidationError(message)


def _common(p: argparse.ArgumentParser, fields: bool = False):
    p.add_argument("--config", help="JSON file with default values for any option")
    p.add_argument("--lambda", dest="lam", type=float, help="evaluate at this lambda only")
    p.add_argument("--lambda-grid", help="scan lambda over lo:hi:step")
    p.add_argument("--rank", type=int, help="analytic rank (default 0)")
    p.add_argument("--dim", type=int, help="dimension g (default 1)")
    p.add_argument("--mode", choices=["grh", "uncond"], help="default grh")
    p.add_argument("--testfunc", help="odlyzko or poly:a0,a2,...")
    p.add_argument("--coeff-model", choices=["floor", "trace"], help="default floor")
    p.add_argument("--out", choices=["json", "csv"], help="output format (default json)")
    p.add_argument("--seed", type=int, help="recorded for reproducibility; default 0")
    p.add_argument("--workers", type=int, help="worker processes for scans (default 1)")
    if fields:
        p.add_argument("--fields", help="JSON-lines field file")


def _reduction_flags(p: argparse.ArgumentParser):
    for name in ("good", "mult", "add"):
        p.add_argument(f"--{name}", action="append", metavar="P[,P...]",
                       help=f"primes with {name} reduction")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="condbound", description="Explicit-formula conductor lower bounds.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bound-q", help="elliptic curves over Q")
    _common(p)
    _reduction_flags(p)

    p = sub.add_parser("bound-av", help="abelian varieties over Q")
    _common(p)
    _reduction_flags(p)
    p.add_argument("--type", action="append", metavar="P:K,N,M",
                   help="reduction type (g_ab, g_m, g_u) at P")

    p = sub.add_parser("bound-field", help="per-degree bound for each field in a file")
    _common(p, fields=True)

    p = sub.add_parser("scan-fields", help="everywhere-good-reduction scan of a field list")
    _common(p, fields=True)

    p = sub.add_parser("optimize-testfunc", help="best polynomial test function at fixed lambda")
    _common(p, fields=True)
    _reduction_flags(p)
    p.add_argument("--type", action="append", metavar="P:K,N,M")
    p.add_argument("--basis-degree", type=int, help="use x^0, x^2, ..., x^(2d) (default 1)")

    p = sub.add_parser("reproduce-tables", help="recompute the published reference tables")
    _common(p)
    p.add_argument("--table", help="1-5 or all (default all)")
    return parser


class _Options:
    """CLI flags layered over an optional JSON config."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.config: dict = {}
        if getattr(args, "config", None):
            path = Path(args.config)
            if not path.exists():
                raise ValidationError(f"config file not found: {path}")
            try:
                raw = json.loads(path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: {exc}") from exc
            if not isinstance(raw, dict):
                raise ValidationError(f"{path}: config must be a JSON object")
            self.config = {k.replace("-", "_"): v for k, v in raw.items()}

    def get(self, name: str, default: Any = None) -> Any:
        value = getattr(self.args, name, None)
        if value is not None:
            return value
        key = "lambda" if name == "lam" else name
        return self.config.get(key, default)


def _prime_list(values) -> list[int]:
    out = []
    for v in values or []:
        if isinstance(v, int):
            out.append(v)
            continue
        for part in str(v).split(","):
            if part.strip():
                try:
                    out.append(int(part))
                except ValueError:
                    raise ValidationError(f"not a prime: {part!r}") from None
    return out


def _spec(opts: _Options, dim: int) -> ReductionSpec:
    mapping: dict[int, Any] = {}
    for name in ("good", "mult", "add"):
        for p in _prime_list(opts.get(name)):
            if p in mapping:
                raise ValidationError(f"prime {p} given more than one reduction type")
            mapping[p] = name
    for item in opts.get("type") or []:
        try:
            p, triple = str(item).split(":")
            mapping[int(p)] = [int(v) for v in triple.split(",")]
        except ValueError:
            raise ValidationError(f"--type expects P:K,N,M, got {item!r}") from None
    spec_cfg = opts.config.get("spec")
    if spec_cfg:
        mapping = {**{int(k): v for k, v in spec_cfg.items()}, **mapping}
    if any(isinstance(v, list) for v in mapping.values()):
        mapping = {p: (v if isinstance(v, list) else list(ReductionSpec.elliptic({p: v}).triple(p, dim)))
                   for p, v in mapping.items()}
    return parse_reduction_spec({str(p): v for p, v in mapping.items()}, dim)


def _query(opts: _Options, default_grid: LambdaGrid = DEFAULT_GRID, spec: bool = True) -> BoundQuery:
    dim = int(opts.get("dim", 1))
    lam = opts.get("lam")
    grid_text = opts.get("lambda_grid")
    grid = None
    if grid_text is not None:
        grid = LambdaGrid.parse(grid_text) if isinstance(grid_text, str) else LambdaGrid(*grid_text)
    elif lam is None:
        grid = default_grid
    try:
        mode = Mode(opts.get("mode", "grh"))
        model = CoeffModel(opts.get("coeff_model", "floor"))
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    return BoundQuery(
        dim=dim,
        rank=int(opts.get("rank", 0)),
        spec=_spec(opts, dim) if spec else ReductionSpec(dim=dim),
        testfunc=testfunc_from_config(opts.get("testfunc")),
        lam=None if lam is None else float(lam),
        grid=grid,
        mode=mode,
        model=model,
    )


def _fields(opts: _Options):
    path = opts.get("fields")
    if not path:
        raise ValidationError("--fields is required")
    try:
        return load_fields(path)
    except FileNotFoundError as exc:
        raise ValidationError(str(exc)) from None


def _emit(payload: Any, out: str, columns: list[str] | None = None, rows: list[dict] | None = None) -> str:
    if out == "csv":
        if rows is None:
            rows = payload if isinstance(payload, list) else [payload]
            rows = [_flatten(r) for r in rows]
            columns = list(rows[0]) if rows else []
        return to_csv(rows, columns)
    return dumps(payload)


def _flatten(d: dict) -> dict:
    out = {}
    for k, v in d.items():
        if isinstance(v, dict):
            out.update(v)
        elif isinstance(v, list):
            out[k] = ";".join(map(str, v))
        else:
            out[k] = v
    return out


def cmd_bound_q(opts: _Options) -> str:
    query = _query(opts)
    if query.dim != 1:
        raise ValidationError("bound-q is for elliptic curves; use bound-av for dim > 1")
    return _emit(result_to_dict(bound_elliptic_q(query)), opts.get("out", "json"))


def cmd_bound_av(opts: _Options) -> str:
    return _emit(result_to_dict(bound_abelian_q(_query(opts))), opts.get("out", "json"))


def cmd_bound_field(opts: _Options) -> str:
    base = _query(opts, FIELD_GRID, spec=False)
    results = [result_to_dict(bound_number_field(replace(base, field=K))) for K in _fields(opts)]
    payload: Any = results[0] if len(results) == 1 else results
    return _emit(payload, opts.get("out", "json"))


def cmd_scan_fields(opts: _Options) -> str:
    base = _query(opts, FIELD_GRID, spec=False)
    protocol = ScanConfig(grid=base.grid or LambdaGrid(base.lam, base.lam, 1.0), testfunc=base.testfunc,
                          mode=base.mode, model=base.model, workers=int(opts.get("workers", 1)))
    report = scan_to_dict(scan_fields(_fields(opts), protocol))
    if opts.get("out", "json") == "csv":
        return to_csv(report["fields"], SCAN_COLUMNS)
    return dumps(report)


def cmd_optimize(opts: _Options) -> str:
    query = _query(opts)
    if opts.get("fields"):
        fields = _fields(opts)
        if len(fields) != 1:
            raise ValidationError("optimize-testfunc takes exactly one field")
        query = replace(query, field=fields[0])
    if query.lam is None:
        prelim = lambda_scan(replace(query, testfunc=Odlyzko()))
        query = replace(query, lam=prelim.lambda_star)
        log.info("lambda %.2f chosen by an Odlyzko scan", query.lam)
    d = int(opts.get("basis_degree", 1))
    opt = optimize_testfunc(query, d)
    payload = {
        "lambda": query.lam,
        "basis_degree": d,
        "coeff_model": query.model.value,
        "coeffs": list(opt.coeffs),
        "constraint_residual": opt.constraint_residual,
        "quadratic_value": opt.value,
        "polynomial": result_to_dict(opt.result),
        "odlyzko": result_to_dict(opt.odlyzko),
    }
    return _emit(payload, opts.get("out", "json"))


def reproduce(tables: Sequence[int]) -> list[dict]:
    rows = []
    for t in tables:
        for ref in reference_rows(t):
            if ref.lam is None:
                res = lambda_scan(replace(ref.query, grid=DEFAULT_GRID))
            else:
                res = evaluate(ref.query, ref.lam)
            ok = ref.within(res.B_R) and (ref.B_Z is None or t != 1 or res.B_Z == ref.B_Z)
            rows.append({
                "table": t,
                "label": ref.label,
                "lambda": res.lambda_star,
                "B_R": res.B_R,
                "B_Z": res.B_Z,
                "ref_B_R": ref.B_R,
                "ref_B_Z": ref.B_Z,
                "tol": f"{ref.tol * 100:g}%" if ref.relative else f"{ref.tol:g}",
                "pass": ok,
            })
    return rows


def cmd_reproduce(opts: _Options) -> str:
    which = str(opts.get("table", "all")).lower()
    if which == "all":
        tables = [1, 2, 3, 4, 5]
    else:
        try:
            tables = [int(t) for t in which.split(",")]
        except ValueError:
            raise ValidationError(f"--table expects 1-5 or all, got {which!r}") from None
        if any(t not in range(1, 6) for t in tables):
            raise ValidationError(f"--table expects 1-5 or all, got {which!r}")
    rows = reproduce(tables)
    if opts.get("out", "csv") == "json":
        return dumps(rows)
    return to_csv(rows, REFERENCE_COLUMNS)


COMMANDS = {
    "bound-q": cmd_bound_q,
    "bound-av": cmd_bound_av,
    "bound-field": cmd_bound_field,
    "scan-fields": cmd_scan_fields,
    "optimize-testfunc": cmd_optimize,
    "reproduce-tables": cmd_reproduce,
}


def run(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(message)s")
        opts = _Options(args)
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            text = COMMANDS[args.command](opts)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
