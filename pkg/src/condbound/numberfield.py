"""Number fields given by defining data, and the splitting of rational primes.

Residue degrees come from factoring the defining polynomial modulo p
(Dedekind). Where p may divide the index [O_K : Z[theta]] and the Dedekind
criterion fails, we fall back to complete splitting: n ideals of norm p. That
can only shrink the computed conductor bound, so it stays a lower bound.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Mapping

from sympy import Poly, symbols
from sympy import discriminant as sym_discriminant
from sympy import sieve
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor, gf_from_int_poly, gf_gcd, gf_mul, gf_pow

from condbound.errors import MalformedRecord, NonMonicPolynomial, ZeroDiscriminant

_X = symbols("x")


class SplitSource(str, enum.Enum):
    DEDEKIND = "dedekind"
    OVERRIDE = "override"
    FALLBACK = "conservative_fallback"


@dataclass(frozen=True)
class PrimeSplit:
    p: int
    factors: tuple[tuple[int, int], ...]  # (e, f) per prime ideal above p
    source: SplitSource

    def norms(self) -> list[int]:
        return [self.p ** f for _, f in self.factors]


@dataclass(frozen=True)
class NumberField:
    label: str
    degree: int
    poly: tuple[int, ...]  # c_0 .. c_{n-1} of x^n + c_{n-1} x^{n-1} + ... + c_0
    disc: int
    splitting_overrides: tuple[tuple[int, tuple[tuple[int, int], ...]], ...] = ()
    subfield_labels: tuple[str, ...] = ()
    _cache: dict = field(default_factory=dict, init=False, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if self.degree < 1:
            raise MalformedRecord(f"{self.label}: degree must be >= 1")
        if len(self.poly) != self.degree:
            raise MalformedRecord(
                f"{self.label}: degree {self.degree} needs {self.degree} non-leading coefficients, "
                f"got {len(self.poly)}")
        if self.disc == 0:
            raise ZeroDiscriminant(f"{self.label}: discriminant is zero")
        for p, factors in self.splitting_overrides:
            total = sum(e * f for e, f in factors)
            if total != self.degree or any(e < 1 or f < 1 for e, f in factors):
                raise MalformedRecord(
                    f"{self.label}: override at p={p} has sum e*f = {total}, expected {self.degree}")

    @property
    def full_poly(self) -> list[int]:
        """Coefficients highest degree first, leading 1 included."""
        return [1] + list(reversed(self.poly))

    @property
    def overrides(self) -> dict[int, tuple[tuple[int, int], ...]]:
        return dict(self.splitting_overrides)

    @property
    def root_disc(self) -> float:
        return math.exp(math.log(abs(self.disc)) / self.degree)

    @cached_property
    def poly_disc(self) -> int:
        if self.degree == 1:
            return 1
        return int(sym_discriminant(Poly(self.full_poly, _X)))

    @cached_property
    def index(self) -> int | None:
        """[O_K : Z[theta]] from disc(poly) = index^2 d_K, or None if inconsistent."""
        q, r = divmod(self.poly_disc, self.disc)
        if r or q <= 0:
            return None
        root = math.isqrt(q)
        return root if root * root == q else None

    def is_rationals(self) -> bool:
        return self.degree == 1


RATIONALS = NumberField(label="1.1.1.1", degree=1, poly=(0,), disc=1)


def parse_field(record: Mapping) -> NumberField:
    """Validate a field record {label, degree, poly, disc, splitting?, subfields?}."""
    try:
        degree = int(record["degree"])
        poly = [int(c) for c in record["poly"]]
        disc = int(record["disc"])
    except KeyError as exc:
        raise MalformedRecord(f"missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise MalformedRecord(f"non-integer data: {exc}") from exc
    label = str(record.get("label", f"{degree}.?.{abs(disc)}.?"))
    if len(poly) == degree + 1:
        if poly[-1] != 1:
            raise NonMonicPolynomial(f"{label}: leading coefficient {poly[-1]} != 1")
        poly = poly[:-1]
    raw_split = record.get("splitting") or {}
    try:
        overrides = tuple(sorted(
            (int(p), tuple((int(e), int(f)) for e, f in factors))
            for p, factors in raw_split.items()))
    except (TypeError, ValueError, AttributeError) as exc:
        raise MalformedRecord(f"{label}: bad splitting data: {exc}") from exc
    K = NumberField(
        label=label,
        degree=degree,
        poly=tuple(poly),
        disc=disc,
        splitting_overrides=overrides,
        subfield_labels=tuple(str(s) for s in record.get("subfields") or ()),
    )
    if K.index is None:
        raise MalformedRecord(
            f"{label}: disc(poly) = {K.poly_disc} is not a square multiple of d_K = {disc}")
    return K


def factor_mod_p(poly: Iterable[int], p: int) -> list[tuple[int, int]]:
    """Degrees and multiplicities of the irreducible factors of ``poly`` mod p.

    ``poly`` is given highest degree first. Returns sorted (degree, multiplicity).
    """
    return sorted((len(g) - 1, e) for g, e in _factor_gf(tuple(poly), p))


def _factor_gf(poly: tuple[int, ...], p: int):
    f = gf_from_int_poly(list(poly), p)
    if len(f) <= 1:
        raise MalformedRecord(f"polynomial is constant modulo {p}")
    _, factors = gf_factor(f, p, ZZ)
    return factors


def _zx_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def dedekind_criterion(poly: tuple[int, ...], p: int, factors) -> bool:
    """True when p does not divide the index of Z[theta] (so Dedekind is exact at p)."""
    g = [1]
    h = [1]
    for fac, e in factors:
        lift = [int(c) for c in fac]
        g = _zx_mul(g, lift)
        for _ in range(e - 1):
            h = _zx_mul(h, lift)
    gh = _zx_mul(g, h)
    f = list(poly)
    width = max(len(f), len(gh))
    f = [0] * (width - len(f)) + f
    gh = [0] * (width - len(gh)) + gh
    diff = [a - b for a, b in zip(f, gh)]
    if any(c % p for c in diff):
        raise ArithmeticError("lifted factorisation is not congruent to f mod p")
    big_f = gf_from_int_poly([c // p for c in diff], p)
    if not big_f:
        # F = 0 mod p: gcd is g-bar-h-bar gcd, nontrivial whenever some e >= 2
        return all(e == 1 for _, e in factors)
    common = gf_gcd(gf_gcd(big_f, gf_from_int_poly(g, p), p, ZZ), gf_from_int_poly(h, p), p, ZZ)
    return len(common) == 1


def _split(K: NumberField, p: int) -> PrimeSplit:
    overrides = K.overrides
    if p in overrides:
        return PrimeSplit(p, tuple(sorted(overrides[p])), SplitSource.OVERRIDE)
    if K.degree == 1:
        return PrimeSplit(p, ((1, 1),), SplitSource.DEDEKIND)
    poly = tuple(K.full_poly)
    factors = _factor_gf(poly, p)
    found = tuple(sorted((e, len(g) - 1) for g, e in factors))
    squarefree = all(e == 1 for _, e in factors)
    index = K.index
    exact = squarefree or (index is not None and index % p != 0)
    if not exact:
        exact = dedekind_criterion(poly, p, factors)
    if exact:
        return PrimeSplit(p, found, SplitSource.DEDEKIND)
    return PrimeSplit(p, tuple([(1, 1)] * K.degree), SplitSource.FALLBACK)


def split_prime(K: NumberField, p: int) -> PrimeSplit:
    """Splitting of the rational prime p in K (memoised per field)."""
    cache = K._cache
    hit = cache.get(p)
    if hit is None:
        hit = _split(K, p)
        cache[p] = hit
    return hit


@lru_cache(maxsize=64)
def primes_up_to(x_max: float) -> tuple[int, ...]:
    if x_max < 2:
        return ()
    return tuple(int(p) for p in sieve.primerange(2, int(math.floor(x_max)) + 1))


def prime_ideal_classes(K: NumberField, x_max: float) -> list[tuple[int, int, int, SplitSource]]:
    """(p, f, count, source) for prime ideals of K with norm p^f <= x_max."""
    out = []
    for p in primes_up_to(x_max):
        split = split_prime(K, p)
        by_f = Counter(f for _, f in split.factors)
        for f in sorted(by_f):
            if p ** f <= x_max:
                out.append((p, f, by_f[f], split.source))
    return out


def prime_ideals_up_to(K: NumberField, x_max: float) -> list[tuple[int, int]]:
    """(norm, count) for the prime ideals of K of norm at most x_max, ascending."""
    counts: Counter = Counter()
    for p, f, count, _ in prime_ideal_classes(K, x_max):
        counts[p ** f] += count
    return sorted(counts.items())
