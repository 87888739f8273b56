from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from cantorval.exactnum import QuadValue as Q
from cantorval.kakeya import CANTOR_SET, FINITE_UNION, INTERVAL, MIXED, classify
from cantorval.series import Explicit, MultiGeometric, SelfSimilarity, SeriesError, SeriesSpec, geometric
from conftest import Q57, gn, mg432, root2


def test_halves_interval():
    assert classify(geometric(F(1, 2))).cls == INTERVAL


def test_thirds_cantor():
    v = classify(geometric(F(1, 3)))
    assert v.cls == CANTOR_SET
    assert v.to_json()["class"] == "CantorSet"


def test_432_one_fifth_interval():
    q = F(1, 5)
    # the three delta closed forms, up to the positive factor q^n/(1-q)
    assert 8 * q + 1 > 0 and 10 * q - 1 > 0 and 11 * q - 2 > 0
    assert classify(mg432(q)).cls == INTERVAL


class HeadThenHalves(SeriesSpec):
    """``a_1 = 10`` followed by ``1/2, 1/4, ...``: one big term, then equality."""

    def term(self, n):
        return Q(10) if n == 1 else Q(F(1, 2 ** (n - 1)))

    def remainder(self, n):
        return Q(11) if n == 0 else Q(F(1, 2 ** (n - 1)))

    def self_similarity(self):
        return SelfSimilarity(2, 1, Q(F(1, 2)))


def test_finite_union():
    v = classify(HeadThenHalves())
    assert v.cls == FINITE_UNION
    assert v.witness["exceptions"] == [1]


def test_scaled_halves_interval():
    s = MultiGeometric((Q(1),), Q(F(1, 2))).scaled(3)
    assert classify(s).cls == INTERVAL


def test_boundary_zero_counts_as_interval_side():
    # delta_2 = 0 and delta_{odd} < 0: never strictly positive, not a Cantor set
    v = classify(MultiGeometric((Q(8), Q(1)), Q(F(1, 10))))
    assert v.cls == MIXED
    assert v.witness["pattern"] == "-0-"


@pytest.mark.parametrize("make", [gn, root2, lambda: mg432(Q57), lambda: mg432(F(1, 8))])
def test_known_cantorvals_are_mixed(make):
    assert classify(make()).cls == MIXED


def test_explicit_rejected():
    with pytest.raises(SeriesError):
        classify(Explicit((Q(2), Q(1))))


def test_witness_pattern():
    w = classify(mg432(F(1, 6))).witness
    assert w["period"] == 3
    assert w["pattern"].count("-") == 1


qs = st.fractions(min_value=F(1, 1000), max_value=F(49, 100), max_denominator=1000)


@given(qs)
def test_432_threshold(q):
    cls = classify(mg432(q)).cls
    if q >= F(2, 11):
        assert cls == INTERVAL
    elif q > F(1, 10):
        # delta_{3n} < 0 while the other two stay positive
        assert cls == MIXED
    else:
        assert cls in (MIXED, CANTOR_SET)


@given(qs, st.fractions(min_value=F(1, 100), max_value=100, max_denominator=100))
def test_scaling_invariance(q, c):
    s = mg432(q)
    assert classify(s).cls == classify(s.scaled(Q(c))).cls
