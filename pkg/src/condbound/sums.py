"""Prime and prime-ideal sums of the explicit formula.

Each prime-power term is bounded from below using only what is known about
the reduction at p. The sums below return the *magnitude* that the bound
assembly subtracts: sum over (q, m) with q^m <= e^lambda of

    count * coefficient(q^m) * |F_lambda(m log q)| * log q / q^m

where the coefficient is

    good / unconstrained       g * floor(2 sqrt(q^m))
    bad, type (g_ab, g_m, g_u) g_ab * floor(2 sqrt(q^m)) + g_m

so multiplicative parts contribute 1 per dimension and unipotent parts 0.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np

from condbound.errors import ValidationError
from condbound.numberfield import RATIONALS, NumberField, SplitSource, prime_ideal_classes


class Reduction(str, enum.Enum):
    GOOD = "good"
    MULT = "mult"
    ADD = "add"


_REDUCTION_ALIASES = {
    "good": Reduction.GOOD,
    "g": Reduction.GOOD,
    "mult": Reduction.MULT,
    "multiplicative": Reduction.MULT,
    "m": Reduction.MULT,
    "add": Reduction.ADD,
    "additive": Reduction.ADD,
    "a": Reduction.ADD,
}


class CoeffModel(str, enum.Enum):
    FLOOR = "floor"  # per-term worst case floor(2 sqrt(q^m))
    TRACE = "trace"  # fixed Euler factors with a_q = floor(2 sqrt q), worst sign


@dataclass(frozen=True)
class ReductionSpec:
    """Per-prime reduction constraints, keyed by rational prime.

    ``entries`` holds (p, Reduction) pairs for elliptic specs and
    (p, (g_ab, g_m, g_u)) pairs for abelian ones.
    """

    abelian: bool = False
    dim: int = 1
    entries: tuple = ()

    def __post_init__(self):
        primes = [p for p, _ in self.entries]
        if len(set(primes)) != len(primes):
            raise ValidationError(f"duplicate primes in reduction spec: {primes}")
        if self.dim < 1:
            raise ValidationError("dimension must be >= 1")
        for p, c in self.entries:
            if p < 2:
                raise ValidationError(f"not a prime: {p}")
            if self.abelian:
                if len(c) != 3 or any(v < 0 for v in c) or sum(c) != self.dim:
                    raise ValidationError(f"type {c} at {p} must be non-negative and sum to {self.dim}")
            elif not isinstance(c, Reduction):
                raise ValidationError(f"bad elliptic constraint {c!r} at {p}")

    @classmethod
    def elliptic(cls, mapping: Mapping[int, str | Reduction] | None = None) -> "ReductionSpec":
        mapping = mapping or {}
        entries = tuple(sorted((int(p), _parse_reduction(v)) for p, v in mapping.items()))
        return cls(abelian=False, dim=1, entries=entries)

    @classmethod
    def abelian_types(cls, dim: int, mapping: Mapping[int, tuple[int, int, int]] | None = None):
        mapping = mapping or {}
        entries = tuple(sorted((int(p), tuple(int(v) for v in t)) for p, t in mapping.items()))
        return cls(abelian=True, dim=dim, entries=entries)

    @property
    def as_dict(self) -> dict:
        return dict(self.entries)

    def primes(self) -> list[int]:
        return [p for p, _ in self.entries]

    def triple(self, p: int, g: int) -> tuple[int, int, int]:
        """(g_ab, g_m, g_u) at p for a variety of dimension g; unlisted primes are good."""
        c = self.as_dict.get(p)
        if c is None:
            return (g, 0, 0)
        if self.abelian:
            if g != self.dim:
                raise ValidationError(f"spec is for dimension {self.dim}, asked for {g}")
            return c
        return {Reduction.GOOD: (g, 0, 0), Reduction.MULT: (0, g, 0), Reduction.ADD: (0, 0, g)}[c]

    def to_config(self) -> dict:
        if self.abelian:
            return {str(p): list(t) for p, t in self.entries}
        return {str(p): r.value for p, r in self.entries}


def _parse_reduction(value) -> Reduction:
    if isinstance(value, Reduction):
        return value
    try:
        return _REDUCTION_ALIASES[str(value).strip().lower()]
    except KeyError:
        raise ValidationError(f"unknown reduction type {value!r}") from None


def parse_reduction_spec(obj: Mapping | None, dim: int = 1) -> ReductionSpec:
    """{"2": "mult", "3": "add"} (elliptic) or {"2": [0, 2, 0]} (abelian)."""
    if not obj:
        return ReductionSpec(dim=dim)
    values = list(obj.values())
    if all(isinstance(v, (list, tuple)) for v in values):
        return ReductionSpec.abelian_types(dim, {int(p): tuple(v) for p, v in obj.items()})
    if any(isinstance(v, (list, tuple)) for v in values):
        raise ValidationError("cannot mix elliptic and abelian constraints")
    spec = ReductionSpec.elliptic({int(p): v for p, v in obj.items()})
    if dim != 1:
        return ReductionSpec.abelian_types(dim, {p: spec.triple(p, dim) for p in spec.primes()})
    return spec


def two_sqrt_floor(n: int) -> int:
    """floor(2 sqrt(n)) in exact integer arithmetic."""
    return math.isqrt(4 * n)


def fixed_trace_sum(q: int, m: int) -> int:
    """(-alpha)^m + (-alpha')^m where alpha + alpha' = floor(2 sqrt q), alpha alpha' = q."""
    a = -two_sqrt_floor(q)
    s_prev, s = 2, a
    for _ in range(m - 1):
        s_prev, s = s, a * s - q * s_prev
    return s


def coefficient(q: int, m: int, triple: tuple[int, int, int], model: CoeffModel = CoeffModel.FLOOR) -> int:
    g_ab, g_m, _ = triple
    if model == CoeffModel.FLOOR:
        return g_ab * two_sqrt_floor(q ** m) + g_m
    return -g_ab * fixed_trace_sum(q, m) + g_m


@dataclass(frozen=True)
class Term:
    q: int
    m: int
    count: int
    coefficient: int
    weight: float
    signed_term: float


@dataclass(frozen=True)
class SumBreakdown:
    terms: tuple[Term, ...]
    total: float
    fallback_primes: tuple[int, ...] = ()


class TermTable:
    """All (q, m) terms with q^m <= e^lam_max, vectorised for fast lambda scans."""

    def __init__(self, K: NumberField, spec: ReductionSpec, g: int, lam_max: float,
                 model: CoeffModel = CoeffModel.FLOOR):
        rows = []
        fallback = []
        for p, f, count, source in prime_ideal_classes(K, math.exp(lam_max)):
            if source == SplitSource.FALLBACK and p not in fallback:
                fallback.append(p)
            triple = spec.triple(p, g)
            q = p ** f
            log_q = math.log(q)
            m = 1
            while m * log_q <= lam_max:
                c = coefficient(q, m, triple, model)
                rows.append((q, m, count, c, m * log_q, count * c * log_q / q ** m))
                m += 1
        self.lam_max = lam_max
        self.rows = rows
        self.fallback_primes = tuple(fallback)
        self.points = np.array([r[4] for r in rows], dtype=float)
        self.prefactor = np.array([r[5] for r in rows], dtype=float)

    def total(self, F, lam: float, signed: bool = False) -> float:
        if lam > self.lam_max + 1e-12:
            raise ValueError(f"table built up to lambda={self.lam_max}, asked for {lam}")
        mask = self.points <= lam
        if not mask.any():
            return 0.0
        values = np.asarray(F(self.points[mask] / lam), dtype=float)
        if not signed:
            values = np.abs(values)
        return float(np.dot(self.prefactor[mask], values))

    def breakdown(self, F, lam: float, signed: bool = False) -> SumBreakdown:
        terms = []
        total = 0.0
        for q, m, count, c, point, _ in self.rows:
            if point > lam:
                continue
            value = float(F(point / lam))
            if not signed:
                value = abs(value)
            weight = value * math.log(q) / q ** m
            term = count * c * weight
            total += term
            terms.append(Term(q, m, count, c, weight, term))
        return SumBreakdown(tuple(terms), total, self.fallback_primes)


@lru_cache(maxsize=1024)
def term_table(K: NumberField, spec: ReductionSpec, g: int, lam_max: float,
               model: CoeffModel = CoeffModel.FLOOR) -> TermTable:
    return TermTable(K, spec, g, lam_max, model)


def worst_case_sum_field(K: NumberField, F, lam: float, g: int, spec: ReductionSpec,
                         model: CoeffModel = CoeffModel.FLOOR) -> SumBreakdown:
    """Sum over prime ideals of K of the worst-case terms (magnitude, |F| weights)."""
    if not lam > 0:
        raise ValidationError(f"lambda must be positive, got {lam}")
    table = term_table(K, spec, g, float(lam), CoeffModel(model))
    return table.breakdown(F, lam, signed=CoeffModel(model) == CoeffModel.TRACE)


def worst_case_sum_q(spec: ReductionSpec, F, lam: float, g: int = 1,
                     model: CoeffModel = CoeffModel.FLOOR) -> SumBreakdown:
    return worst_case_sum_field(RATIONALS, F, lam, g, spec, model)
