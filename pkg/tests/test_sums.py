import cmath
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from condbound.errors import ValidationError
from condbound.sums import (
    CoeffModel,
    Reduction,
    ReductionSpec,
    coefficient,
    fixed_trace_sum,
    parse_reduction_spec,
    two_sqrt_floor,
    worst_case_sum_field,
    worst_case_sum_q,
)
from condbound.testfunc import Odlyzko

REDUCTIONS = [Reduction.GOOD, Reduction.MULT, Reduction.ADD]


@given(st.integers(min_value=1, max_value=10 ** 30))
def test_two_sqrt_floor_exact(n):
    r = two_sqrt_floor(n)
    assert r * r <= 4 * n < (r + 1) ** 2


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7, 9, 11, 25])
def test_fixed_trace_sum_against_roots(q):
    a = two_sqrt_floor(q)
    disc = cmath.sqrt(a * a - 4 * q)
    alpha, beta = (a + disc) / 2, (a - disc) / 2
    for m in range(1, 6):
        expected = (-alpha) ** m + (-beta) ** m
        assert fixed_trace_sum(q, m) == pytest.approx(expected.real, abs=1e-6)
        assert abs(fixed_trace_sum(q, m)) <= 2 * q ** (m / 2) + 1e-9


def test_elliptic_coefficients():
    assert coefficient(2, 1, (1, 0, 0)) == 2
    assert coefficient(2, 3, (1, 0, 0)) == 5
    assert coefficient(3, 2, (0, 1, 0)) == 1
    assert coefficient(3, 2, (0, 0, 1)) == 0


def test_abelian_coefficient_mix():
    # type (1, 1, 0) at 3 in dimension 2
    assert coefficient(3, 1, (1, 1, 0)) == 3 + 1


def test_spec_triples():
    spec = ReductionSpec.elliptic({2: "mult", 3: "additive", 5: "g"})
    assert spec.triple(2, 1) == (0, 1, 0)
    assert spec.triple(3, 1) == (0, 0, 1)
    assert spec.triple(5, 1) == (1, 0, 0)
    assert spec.triple(7, 1) == (1, 0, 0)
    assert spec.triple(2, 3) == (0, 3, 0)


def test_parse_reduction_spec():
    ab = parse_reduction_spec({"2": [0, 2, 0], "3": [1, 1, 0]}, dim=2)
    assert ab.abelian and ab.triple(3, 2) == (1, 1, 0)
    ell = parse_reduction_spec({"2": "mult"})
    assert not ell.abelian and ell.as_dict == {2: Reduction.MULT}
    lifted = parse_reduction_spec({"2": "add"}, dim=3)
    assert lifted.triple(2, 3) == (0, 0, 3)
    assert ReductionSpec.elliptic().to_config() == {}
    assert parse_reduction_spec(ab.to_config(), dim=2) == ab


@pytest.mark.parametrize("bad", [
    lambda: ReductionSpec.abelian_types(2, {2: (1, 0, 0)}),
    lambda: ReductionSpec.abelian_types(2, {2: (3, -1, 0)}),
    lambda: ReductionSpec.elliptic({2: "weird"}),
    lambda: ReductionSpec(entries=((2, Reduction.GOOD), (2, Reduction.ADD))),
    lambda: parse_reduction_spec({"2": "add", "3": [0, 1, 0]}),
])
def test_spec_validation(bad):
    with pytest.raises(ValidationError):
        bad()


def direct_sum(spec, lam, g=1):
    """Straight double loop over p^m <= e^lam."""
    F = Odlyzko()
    total = 0.0
    p = 2
    while math.log(p) <= lam:
        if all(p % d for d in range(2, int(p ** 0.5) + 1)):
            m = 1
            while m * math.log(p) <= lam:
                g_ab, g_m, _ = spec.triple(p, g)
                c = g_ab * math.isqrt(4 * p ** m) + g_m
                total += c * abs(F(m * math.log(p) / lam)) * math.log(p) / p ** m
                m += 1
        p += 1
    return total


@pytest.mark.parametrize("mapping,lam", [({}, 1.68), ({3: "good", 2: "mult"}, 1.47), ({2: "add", 3: "mult"}, 2.49),
                                         ({2: "good", 5: "mult", 3: "add"}, 2.53), ({}, 5.0)])
def test_worst_case_sum_matches_direct_loop(mapping, lam):
    spec = ReductionSpec.elliptic(mapping)
    got = worst_case_sum_q(spec, Odlyzko(), lam)
    assert got.total == pytest.approx(direct_sum(spec, lam), rel=1e-12)
    assert all(t.q ** t.m <= math.exp(lam) for t in got.terms)


def test_no_terms_below_log_two():
    assert worst_case_sum_q(ReductionSpec(), Odlyzko(), 0.69).total == 0.0


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(st.sampled_from([2, 3, 5, 7, 11]), st.sampled_from(REDUCTIONS), max_size=5),
       st.sampled_from([2, 3, 5, 7, 11]), st.floats(min_value=0.8, max_value=4.0))
def test_bad_reduction_lowers_the_sum(mapping, p, lam):
    sums = []
    for r in REDUCTIONS:
        spec = ReductionSpec.elliptic({**mapping, p: r})
        sums.append(worst_case_sum_q(spec, Odlyzko(), lam).total)
    assert sums[0] >= sums[1] - 1e-15 >= sums[2] - 2e-15


def test_trace_model_is_signed_sum():
    spec = ReductionSpec()
    lam = 2.0
    got = worst_case_sum_q(spec, Odlyzko(), lam, model=CoeffModel.TRACE)
    F = Odlyzko()
    expected = 0.0
    for q, m in [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2)]:
        expected += -fixed_trace_sum(q, m) * F(m * math.log(q) / lam) * math.log(q) / q ** m
    assert got.total == pytest.approx(expected, rel=1e-12)


def test_field_sum_uses_ideal_norms(fields_by_label):
    K = fields_by_label["2.0.4.1"]
    lam = math.log(10)
    got = worst_case_sum_field(K, Odlyzko(), lam, 1, ReductionSpec())
    norms = sorted((t.q, t.m, t.count) for t in got.terms)
    assert norms == [(2, 1, 1), (2, 2, 1), (2, 3, 1), (5, 1, 2), (9, 1, 1)]
