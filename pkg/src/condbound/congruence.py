"""Integer refinement of a real conductor bound using reduction types.

Good reduction at p means p does not divide N, multiplicative means p || N,
additive means p^2 || N for p >= 5. At 2 and 3 the additive exponent ranges
over 2..8 and 2..5 respectively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from condbound.errors import ValidationError
from condbound.sums import Reduction, ReductionSpec

ADDITIVE_CAP = {2: 8, 3: 5}


def valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def allowed_valuations(p: int, reduction: Reduction) -> range:
    if reduction == Reduction.GOOD:
        return range(0, 1)
    if reduction == Reduction.MULT:
        return range(1, 2)
    return range(2, ADDITIVE_CAP.get(p, 2) + 1)


@dataclass(frozen=True)
class CongruenceConstraint:
    allowed: tuple[tuple[int, range], ...]

    @classmethod
    def from_spec(cls, spec: ReductionSpec) -> "CongruenceConstraint":
        if spec.abelian:
            raise ValidationError("integer refinement is only defined for elliptic specs")
        return cls(tuple((p, allowed_valuations(p, r)) for p, r in spec.entries))

    @property
    def base(self) -> int:
        return math.prod(p ** v.start for p, v in self.allowed)

    def admits(self, n: int) -> bool:
        return all(valuation(n, p) in v for p, v in self.allowed)


@lru_cache(maxsize=512)
def _constraint(spec: ReductionSpec) -> CongruenceConstraint:
    return CongruenceConstraint.from_spec(spec)


def refine_integer_bound(B_R: float, spec: ReductionSpec) -> int:
    """Least integer N >= B_R whose valuations match the reduction types in ``spec``."""
    if not B_R >= 1:
        raise ValidationError(f"B_R must be >= 1, got {B_R}")
    constraint = _constraint(spec)
    base = constraint.base
    k = max(1, math.ceil(B_R / base))
    while True:
        n = base * k
        if n >= B_R and constraint.admits(n):
            return n
        k += 1
