"""Assembly of conductor lower bounds.

For a number field K of degree n (K = Q included), dimension g, analytic rank
r and a test function F, the per-degree log bound at a given lambda is

    rank_term - prime_sum + arch_term - disc_term
      = lambda r Phi(1/2) / n - (2/n) S + g M(lambda, F) - 2 g log delta_K

where S is the worst-case prime-ideal sum and delta_K the root
discriminant. exp of it bounds N(f)^(1/n) from below; over Q it bounds N.
"""

from __future__ import annotations

import enum
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from condbound.congruence import refine_integer_bound
from condbound.errors import UnresolvedSubfieldLabel, ValidationError
from condbound.numberfield import RATIONALS, NumberField
from condbound.quadrature import DEFAULT_CONFIG, EULER_GAMMA, QuadratureConfig, m_lambda
from condbound.sums import CoeffModel, ReductionSpec, term_table
from condbound.testfunc import DampedAt, Odlyzko, PolyAutocorr, TestFunction, fourier_min, phi_half

ROOT_DISC_LIMIT = 2.0 * math.pi * math.exp(EULER_GAMMA)


class Mode(str, enum.Enum):
    GRH = "grh"
    UNCONDITIONAL = "uncond"


@dataclass(frozen=True)
class LambdaGrid:
    lo: float
    hi: float
    step: float

    def __post_init__(self):
        if not self.step > 0:
            raise ValidationError("grid step must be positive")
        if not 0 < self.lo <= self.hi:
            raise ValidationError(f"need 0 < lo <= hi, got {self.lo}, {self.hi}")

    @classmethod
    def parse(cls, text: str) -> "LambdaGrid":
        try:
            lo, hi, step = (float(v) for v in text.split(":"))
        except ValueError:
            raise ValidationError(f"lambda grid must be lo:hi:step, got {text!r}") from None
        return cls(lo, hi, step)

    def points(self) -> list[float]:
        count = int(math.floor((self.hi - self.lo) / self.step + 1e-9))
        return [round(self.lo + k * self.step, 10) for k in range(count + 1)]


DEFAULT_GRID = LambdaGrid(1.0, 4.0, 0.01)
FIELD_GRID = LambdaGrid(1.0, 6.0, 0.01)


@dataclass(frozen=True)
class BoundQuery:
    field: NumberField = RATIONALS
    dim: int = 1
    rank: int = 0
    spec: ReductionSpec = ReductionSpec()
    testfunc: TestFunction = Odlyzko()
    lam: float | None = None
    grid: LambdaGrid | None = None
    mode: Mode = Mode.GRH
    model: CoeffModel = CoeffModel.FLOOR
    quad: QuadratureConfig = DEFAULT_CONFIG

    def __post_init__(self):
        if self.rank < 0:
            raise ValidationError("rank must be non-negative")
        if self.dim < 1:
            raise ValidationError("dimension must be >= 1")
        if self.lam is not None and not self.lam > 0:
            raise ValidationError("lambda must be positive")
        if self.spec.abelian and self.spec.dim != self.dim:
            raise ValidationError(f"reduction types are for dimension {self.spec.dim}, query has {self.dim}")

    def effective_testfunc(self, lam: float) -> TestFunction:
        """The weight actually used at ``lam``: damped by cosh(x) without GRH."""
        if self.mode == Mode.UNCONDITIONAL:
            return DampedAt(self.testfunc, float(lam))
        return self.testfunc

    def lambdas(self) -> list[float]:
        if self.grid is not None:
            return self.grid.points()
        if self.lam is not None:
            return [float(self.lam)]
        return DEFAULT_GRID.points()


@dataclass(frozen=True)
class BoundResult:
    lambda_star: float
    rank_term: float
    prime_sum: float
    arch_term: float
    disc_term: float
    log_bound: float
    B_R: float
    B_Z: int | None = None
    egr_excluded: bool = False
    flags: tuple[str, ...] = ()
    label: str = RATIONALS.label
    dim: int = 1
    rank: int = 0


@dataclass
class _Context:
    """Per-query data shared across the lambda grid."""

    query: BoundQuery
    lam_max: float
    flags: list[str] = field(init=False)

    def __post_init__(self):
        q = self.query
        flags = []
        if q.mode == Mode.UNCONDITIONAL:
            flags.append("unconditional_cosh_damped")
        elif isinstance(q.testfunc, PolyAutocorr):
            flags.append("positivity_by_construction")
        else:
            ok = fourier_min(q.testfunc, 50.0, 0.05) >= -1e-6
            flags.append("positivity_checked_numerically" if ok else "fourier_positivity_violated")
        if q.model == CoeffModel.TRACE:
            flags.append("heuristic_fixed_trace")
        self.flags = flags
        self.table = term_table(q.field, q.spec, q.dim, self.lam_max, q.model)
        self.egr_table = term_table(q.field, ReductionSpec(), 1, self.lam_max, q.model)
        for p in self.table.fallback_primes:
            self.flags.append(f"conservative_fallback_splitting:{p}")


def _evaluate(ctx: _Context, lam: float) -> BoundResult:
    q = ctx.query
    K = q.field
    n = K.degree
    g = q.dim
    signed = q.model == CoeffModel.TRACE
    F = q.effective_testfunc(lam)
    M = m_lambda(F, lam, q.quad)
    S = ctx.table.total(F, lam, signed=signed)
    rank_term = 0.0
    if q.mode == Mode.GRH and q.rank:
        rank_term = lam * q.rank * phi_half(F) / n
    prime_sum = 2.0 * S / n
    arch_term = g * M
    log_delta = math.log(abs(K.disc)) / n
    disc_term = 2.0 * g * log_delta
    log_bound = rank_term - prime_sum + arch_term - disc_term
    if q.spec.entries or g != 1:
        S_good = ctx.egr_table.total(F, lam, signed=signed)
    else:
        S_good = S
    egr_log = M - 2.0 * S_good / n - 2.0 * log_delta
    B_R = math.exp(log_bound)
    B_Z = None
    if K.is_rationals() and g == 1 and not q.spec.abelian and B_R >= 1:
        B_Z = refine_integer_bound(B_R, q.spec)
    return BoundResult(
        lambda_star=lam,
        rank_term=rank_term,
        prime_sum=prime_sum,
        arch_term=arch_term,
        disc_term=disc_term,
        log_bound=log_bound,
        B_R=B_R,
        B_Z=B_Z,
        egr_excluded=egr_log > 0,
        flags=tuple(ctx.flags),
        label=K.label,
        dim=g,
        rank=q.rank,
    )


def evaluate(query: BoundQuery, lam: float) -> BoundResult:
    """The bound at a single lambda."""
    return _evaluate(_Context(query, float(lam)), float(lam))


def lambda_scan(query: BoundQuery) -> BoundResult:
    """Best bound over the query's lambda grid; ties go to the smaller lambda."""
    lams = query.lambdas()
    ctx = _Context(query, max(lams))
    best = None
    for lam in lams:
        result = _evaluate(ctx, lam)
        if best is None or result.log_bound > best.log_bound:
            best = result
    return best


def lambda_profile(query: BoundQuery) -> list[BoundResult]:
    lams = query.lambdas()
    ctx = _Context(query, max(lams))
    return [_evaluate(ctx, lam) for lam in lams]


def _require_q(query: BoundQuery):
    if not query.field.is_rationals():
        raise ValidationError(f"expected the rational field, got {query.field.label}")


def bound_elliptic_q(query: BoundQuery) -> BoundResult:
    _require_q(query)
    if query.dim != 1 or query.spec.abelian:
        raise ValidationError("elliptic bounds need dimension 1 and an elliptic spec")
    return lambda_scan(query)


def bound_abelian_q(query: BoundQuery) -> BoundResult:
    _require_q(query)
    return lambda_scan(query)


def bound_number_field(query: BoundQuery) -> BoundResult:
    return lambda_scan(query)


def disc_prefilter(K: NumberField) -> bool:
    """False means B(K, F, lambda) <= 1 for every compact F and lambda."""
    return K.root_disc <= ROOT_DISC_LIMIT


@dataclass(frozen=True)
class ScanConfig:
    grid: LambdaGrid = FIELD_GRID
    testfunc: TestFunction = Odlyzko()
    mode: Mode = Mode.GRH
    model: CoeffModel = CoeffModel.FLOOR
    workers: int = 1


@dataclass(frozen=True)
class ScanRow:
    label: str
    degree: int
    root_disc: float
    prefilter: bool
    B: float | None
    lambda_star: float | None
    direct: bool
    via: str | None
    flags: tuple[str, ...] = ()

    @property
    def excluded(self) -> bool:
        return self.direct or self.via is not None


@dataclass(frozen=True)
class ScanReport:
    rows: tuple[ScanRow, ...]

    def counts(self) -> dict[int, dict[str, int]]:
        out: dict[int, dict[str, int]] = {}
        for row in self.rows:
            c = out.setdefault(row.degree, {"direct": 0, "with_subfields": 0})
            c["direct"] += row.direct
            c["with_subfields"] += row.excluded
        return dict(sorted(out.items()))


def _scan_one(args) -> tuple[float | None, float | None, bool, tuple[str, ...]]:
    K, protocol = args
    if not disc_prefilter(K):
        return None, None, False, ()
    query = BoundQuery(field=K, testfunc=protocol.testfunc, grid=protocol.grid,
                       mode=protocol.mode, model=protocol.model)
    best = lambda_scan(query)
    return best.B_R, best.lambda_star, best.egr_excluded, best.flags


def scan_fields(fields: Sequence[NumberField], protocol: ScanConfig = ScanConfig()) -> ScanReport:
    """EGR scan: prefilter, lambda scan, then propagate exclusions to declared subfields."""
    jobs = [(K, protocol) for K in fields]
    if protocol.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=protocol.workers) as pool:
            outcomes = list(pool.map(_scan_one, jobs))
    else:
        outcomes = [_scan_one(job) for job in jobs]

    by_label = {K.label: i for i, K in enumerate(fields)}
    via: list[str | None] = [None] * len(fields)
    excluded = [o[2] for o in outcomes]
    changed = True
    while changed:
        changed = False
        for i, K in enumerate(fields):
            if not excluded[i]:
                continue
            for sub in K.subfield_labels:
                j = by_label.get(sub)
                if j is None:
                    continue
                if not excluded[j]:
                    excluded[j] = True
                    via[j] = K.label
                    changed = True
    for K in fields:
        for sub in K.subfield_labels:
            if sub not in by_label:
                warnings.warn(f"{K.label}: subfield {sub} not in the scanned list",
                              UnresolvedSubfieldLabel, stacklevel=2)
    rows = []
    for K, (B, lam, direct, flags), v in zip(fields, outcomes, via):
        rows.append(ScanRow(K.label, K.degree, K.root_disc, disc_prefilter(K), B, lam,
                            direct, v, flags))
    return ScanReport(tuple(rows))


def with_lambda(query: BoundQuery, lam: float) -> BoundQuery:
    return replace(query, lam=lam, grid=None)


def dimension_profile(query: BoundQuery, dims: Sequence[int]) -> np.ndarray:
    return np.array([lambda_scan(replace(query, dim=d)).log_bound for d in dims])
