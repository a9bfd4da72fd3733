import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from condbound.congruence import allowed_valuations, refine_integer_bound, valuation
from condbound.errors import ValidationError
from condbound.sums import Reduction, ReductionSpec

specs = st.dictionaries(st.sampled_from([2, 3, 5, 7]), st.sampled_from(list(Reduction)), max_size=4)


def brute_force(B, spec):
    n = max(1, math.ceil(B))
    while True:
        if all(valuation(n, p) in allowed_valuations(p, r) for p, r in spec.entries):
            return n
        n += 1


@pytest.mark.parametrize("B,mapping,expected", [
    (12.956, {3: "good", 2: "mult"}, 14),
    (17.293, {3: "good", 2: "add"}, 20),
    (10.394, {2: "good", 3: "good", 5: "add"}, 25),
    (15.037, {2: "mult", 3: "mult"}, 30),
    (17.444, {2: "mult", 3: "add"}, 18),
])
def test_examples(B, mapping, expected):
    assert refine_integer_bound(B, ReductionSpec.elliptic(mapping)) == expected


def test_valuation_sets():
    assert list(allowed_valuations(2, Reduction.ADD)) == list(range(2, 9))
    assert list(allowed_valuations(3, Reduction.ADD)) == list(range(2, 6))
    assert list(allowed_valuations(5, Reduction.ADD)) == [2]
    assert list(allowed_valuations(7, Reduction.MULT)) == [1]


@given(specs, st.floats(min_value=1, max_value=5000))
def test_matches_linear_scan(mapping, B):
    spec = ReductionSpec.elliptic(mapping)
    assert refine_integer_bound(B, spec) == brute_force(B, spec)


@given(specs, st.floats(min_value=1, max_value=1e6))
def test_properties(mapping, B):
    spec = ReductionSpec.elliptic(mapping)
    n = refine_integer_bound(B, spec)
    assert n >= math.ceil(B)
    assert refine_integer_bound(n, spec) == n


@given(st.floats(min_value=1, max_value=1e9))
def test_empty_spec_is_ceiling(B):
    assert refine_integer_bound(B, ReductionSpec()) == math.ceil(B)


def test_rejects_bad_input():
    with pytest.raises(ValidationError):
        refine_integer_bound(0.5, ReductionSpec())
    with pytest.raises(ValidationError):
        refine_integer_bound(10.0, ReductionSpec.abelian_types(2, {2: (0, 2, 0)}))
