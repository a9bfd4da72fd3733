"""JSON/CSV output and JSON-lines field input.

Floats are written with 12 significant digits and keys in a fixed order, so
identical runs give byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from pathlib import Path
from typing import Any, Iterable

from condbound.bounds import BoundResult, ScanReport
from condbound.errors import ConductorBoundError, MalformedRecord
from condbound.numberfield import NumberField, parse_field

SIG_DIGITS = 12


class MalformedRecordWarning(UserWarning):
    pass


def round_sig(x: float, digits: int = SIG_DIGITS) -> float:
    if not math.isfinite(x) or x == 0.0:
        return x
    return float(f"{x:.{digits}g}")


def clean(obj: Any) -> Any:
    """Round every float in a nested structure; tuples become lists."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return round_sig(obj)
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalars
        return clean(obj.item())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(clean(obj), indent=2, allow_nan=False) + "\n"


def result_to_dict(r: BoundResult) -> dict:
    out = {
        "label": r.label,
        "dim": r.dim,
        "rank": r.rank,
        "lambda_star": r.lambda_star,
        "B_R": r.B_R,
        "log_bound": r.log_bound,
    }
    if r.B_Z is not None:
        out["B_Z"] = r.B_Z
    out["egr_excluded"] = r.egr_excluded
    out["breakdown"] = {
        "rank_term": r.rank_term,
        "prime_sum": r.prime_sum,
        "arch_term": r.arch_term,
        "disc_term": r.disc_term,
    }
    out["flags"] = list(r.flags)
    return out


def result_from_dict(d: dict) -> BoundResult:
    b = d["breakdown"]
    return BoundResult(
        lambda_star=float(d["lambda_star"]),
        rank_term=float(b["rank_term"]),
        prime_sum=float(b["prime_sum"]),
        arch_term=float(b["arch_term"]),
        disc_term=float(b["disc_term"]),
        log_bound=float(d["log_bound"]),
        B_R=float(d["B_R"]),
        B_Z=int(d["B_Z"]) if d.get("B_Z") is not None else None,
        egr_excluded=bool(d["egr_excluded"]),
        flags=tuple(d.get("flags", ())),
        label=str(d["label"]),
        dim=int(d["dim"]),
        rank=int(d["rank"]),
    )


SCAN_COLUMNS = ["label", "degree", "root_disc", "prefilter", "B", "lambda_star",
                "direct", "via", "excluded"]


def scan_to_dict(report: ScanReport) -> dict:
    rows = []
    for row in report.rows:
        rows.append({
            "label": row.label,
            "degree": row.degree,
            "root_disc": row.root_disc,
            "prefilter": row.prefilter,
            "B": row.B,
            "lambda_star": row.lambda_star,
            "direct": row.direct,
            "via": row.via,
            "excluded": row.excluded,
        })
    counts = {str(k): v for k, v in report.counts().items()}
    return {"fields": rows, "counts": counts}


def to_csv(rows: Iterable[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if row.get(c) is None else _csv_cell(row.get(c)) for c in columns])
    return buf.getvalue()


def _csv_cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(round_sig(v))
    return str(v)


def load_fields(path: str | Path) -> list[NumberField]:
    """Parse a JSON-lines field file; bad lines are reported and skipped."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such field file: {path}")
    fields = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                record = json.loads(line)
                if not isinstance(record, dict):
                    raise MalformedRecord("record is not a JSON object")
                fields.append(parse_field(record))
            except (json.JSONDecodeError, ConductorBoundError) as exc:
                warnings.warn(f"{path}:{lineno}: {exc}", MalformedRecordWarning, stacklevel=2)
    return fields


def field_to_record(K: NumberField) -> dict:
    record = {"label": K.label, "degree": K.degree, "poly": list(K.poly), "disc": K.disc}
    if K.splitting_overrides:
        record["splitting"] = {str(p): [list(ef) for ef in fs] for p, fs in K.splitting_overrides}
    if K.subfield_labels:
        record["subfields"] = list(K.subfield_labels)
    return record
