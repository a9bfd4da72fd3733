"""Regenerate the JSON-lines field fixtures under fixtures/.

Polynomials are chosen monogenic wherever possible (cyclotomic polynomials,
quadratic minimal polynomials, cubics with squarefree discriminant), so the
field discriminant equals the polynomial discriminant. The sextic for the
Hilbert class field of Q(sqrt(-23)) is not monogenic and carries explicit
splitting data at the primes dividing its index.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from sympy import Poly, cyclotomic_poly, discriminant, factorint, symbols, totient

x = symbols("x")
OUT = Path(__file__).resolve().parent.parent / "fixtures"


def record(label, coeffs_high_first, disc=None, **extra):
    """coeffs_high_first includes the leading 1."""
    poly = Poly(coeffs_high_first, x)
    d = int(discriminant(poly)) if disc is None else disc
    rec = {"label": label, "degree": poly.degree(), "poly": list(reversed(coeffs_high_first))[:-1], "disc": d}
    rec.update(extra)
    return rec


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorint(abs(n)).values())


def fundamental(d: int) -> bool:
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return is_squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def quadratic(d: int) -> dict:
    label = f"2.{2 if d > 0 else 0}.{abs(d)}.1"
    if d % 4 == 1:
        return record(label, [1, -1, (1 - d) // 4])
    return record(label, [1, 0, -d // 4])


def quadratics(limit: int) -> list[dict]:
    ds = [d for d in range(-limit, limit + 1) if fundamental(d)]
    return [quadratic(d) for d in sorted(ds, key=lambda d: (abs(d), d))]


def cyclotomic(f: int) -> dict:
    coeffs = [int(c) for c in Poly(cyclotomic_poly(f, x), x).all_coeffs()]
    n = int(totient(f))
    d = int(discriminant(Poly(coeffs, x)))
    signature = 0 if f > 2 else n
    return record(f"{n}.{signature}.{abs(d)}.1", coeffs, d, name=f"Q(zeta_{f})")


def cubics(count: int) -> list[dict]:
    out, seen = [], set()
    for b in range(1, 40):
        for a in range(-6, 7):
            d = -4 * a ** 3 - 27 * b ** 2
            poly = Poly([1, 0, a, b], x)
            if d == 0 or not is_squarefree(d) or not poly.is_irreducible or d in seen:
                continue
            seen.add(d)
            real = 3 if d > 0 else 1
            out.append(record(f"3.{real}.{abs(d)}.1", [1, 0, a, b], d))
            if len(out) == count:
                return out
    return out


HCF_M23 = record(
    "6.0.12167.1",
    [1, -3, 19, -35, 127, -73, 271],
    -12167,
    splitting={"3": [[1, 3], [1, 3]], "5": [[1, 2], [1, 2], [1, 2]], "23": [[2, 1], [2, 1], [2, 1]]},
    subfields=["2.0.23.1", "3.1.23.1"],
    name="Hilbert class field of Q(sqrt(-23))",
)

CYCLOTOMIC_CONDUCTORS = [3, 4, 5, 7, 8, 9, 12, 15]


def write(name: str, records: list[dict]):
    path = OUT / name
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, separators=(", ", ": ")) + "\n")
    print(f"{path}: {len(records)} fields", file=sys.stderr)


def main():
    OUT.mkdir(exist_ok=True)
    rationals = {"label": "1.1.1.1", "degree": 1, "poly": [0], "disc": 1}
    gaussian = quadratic(-4)
    sqrt_m23 = quadratic(-23)
    cubic_m23 = record("3.1.23.1", [1, 0, -1, -1])
    write("q.jsonl", [rationals, gaussian])
    write("q_sqrt_m23.jsonl", [sqrt_m23])
    write("hcf_m23.jsonl", [sqrt_m23, cubic_m23, HCF_M23])
    write("cyclotomic.jsonl", [cyclotomic(f) for f in CYCLOTOMIC_CONDUCTORS])
    # root discriminant at most 11.135, i.e. |d| <= 123
    write("quadratic_rd11.135.jsonl", quadratics(123))
    mixed = quadratics(123) + [cyclotomic(f) for f in CYCLOTOMIC_CONDUCTORS] + [cubic_m23, HCF_M23]
    mixed += cubics(100 - len(mixed))
    write("mixed_100.jsonl", mixed)


if __name__ == "__main__":
    main()
