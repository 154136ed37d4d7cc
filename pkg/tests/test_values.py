import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gdlog.values import coerce, format_value, is_rational, tuple_key, value_key, value_tag
from gdlog.parser import tokenize

values = st.one_of(
    st.text(max_size=8),
    st.integers(-10**6, 10**6),
    st.fractions(max_denominator=50),
    st.floats(allow_nan=False),
)


def test_tags():
    assert value_tag("x") == "sym"
    assert value_tag(3) == "int"
    assert value_tag(Fraction(1, 2)) == "rat"
    assert value_tag(0.5) == "real"
    with pytest.raises(TypeError):
        value_tag(True)
    with pytest.raises(TypeError):
        value_tag(float("nan"))
    with pytest.raises(TypeError):
        value_tag(None)


def test_coerce_widens_int_only():
    assert coerce(3, "rat") == Fraction(3) and type(coerce(3, "rat")) is Fraction
    assert type(coerce(63000, "real")) is float
    with pytest.raises(TypeError):
        coerce(Fraction(1, 2), "int")
    with pytest.raises(TypeError):
        coerce("a", "int")
    with pytest.raises(TypeError):
        coerce(2**60 + 1, "real")


def test_is_rational():
    assert is_rational(1) and is_rational(Fraction(1, 3))
    assert not is_rational(0.1)


def test_symbols_sort_before_numbers():
    vals = [2, "b", Fraction(1, 2), "a", 0.25, -1]
    assert sorted(vals, key=value_key) == ["a", "b", -1, 0.25, Fraction(1, 2), 2]


def test_equal_numbers_of_different_kinds_are_ordered_by_kind():
    assert sorted([1.0, Fraction(1), 1], key=value_key) == [1, Fraction(1), 1.0]
    assert value_key(-0.0) < value_key(0.0)


@given(st.lists(values, max_size=6))
def test_order_is_total_and_consistent(vs):
    keys = sorted(vs, key=value_key)
    for a, b in zip(keys, keys[1:]):
        assert value_key(a) <= value_key(b)


@given(values)
def test_format_round_trips_through_the_tokenizer(v):
    toks = tokenize(format_value(v))
    assert len(toks) == 2
    got = toks[0].value
    assert type(got) is type(v)
    if isinstance(v, float):
        assert got == v and math.copysign(1, got) == math.copysign(1, v)
    else:
        assert got == v


def test_rat_rendering_is_p_over_q():
    assert format_value(Fraction(3)) == "3/1"
    assert format_value(Fraction(-1, 10)) == "-1/10"
    assert format_value(float("-inf")) == "-inf"
    assert format_value('a"b\\') == '"a\\"b\\\\"'


def test_tuple_key():
    assert tuple_key(("a", 1)) < tuple_key(("a", 2))
