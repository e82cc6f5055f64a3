import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oplax3.chains import (
    Chain,
    chain_add,
    chain_sum,
    decompose_pm,
    format_chain,
    is_positive,
    negate,
    simplex_name,
    support,
)

NAMES = ["0-1", "0-2", "1-2", "0-3", "2-10"]


def chains(degree=1):
    coeffs = st.dictionaries(st.sampled_from(NAMES), st.integers(-5, 5), max_size=len(NAMES))
    return coeffs.map(lambda c: Chain(degree, c))


@pytest.mark.parametrize(
    "a, b, expected",
    [
        ({"0-1": 1}, {"1-2": 1}, {"0-1": 1, "1-2": 1}),
        ({"0-2": 1}, {"0-2": -1}, {}),
        ({"0-1-2": 2}, {"0-1-2": -3}, {"0-1-2": -1}),
    ],
)
def test_chain_add(a, b, expected):
    deg = 2 if "0-1-2" in a else 1
    assert chain_add(Chain(deg, a), Chain(deg, b)) == Chain(deg, expected)


def test_zero_coefficients_are_pruned():
    x = Chain(1, {"0-1": 0, "1-2": 3})
    assert x.coeffs == {"1-2": 3}
    assert Chain(1, {"0-2": 1}) + Chain(1, {"0-2": -1}) == Chain.zero(1)
    assert not Chain.zero(1)


def test_degree_mismatch():
    with pytest.raises(ValueError):
        chain_add(Chain(1, {"0-1": 1}), Chain(2, {"0-1-2": 1}))


@pytest.mark.parametrize(
    "coeffs, expected",
    [({"0-1": 1, "1-2": 1}, {"0-1", "1-2"}), ({}, set()), ({"0-2": 1, "0-1": -1}, {"0-2", "0-1"})],
)
def test_support(coeffs, expected):
    assert support(Chain(1, coeffs)) == expected


@pytest.mark.parametrize(
    "coeffs, plus, minus",
    [
        ({"0-2": 1, "0-1": -1}, {"0-2": 1}, {"0-1": 1}),
        ({}, {}, {}),
        ({"0-1-2": 2, "0-1-3": -3}, {"0-1-2": 2}, {"0-1-3": 3}),
    ],
)
def test_decompose_pm(coeffs, plus, minus):
    deg = len(next(iter(coeffs), "0-1").split("-")) - 1
    p, m = decompose_pm(Chain(deg, coeffs))
    assert p == Chain(deg, plus)
    assert m == Chain(deg, minus)


@pytest.mark.parametrize(
    "coeffs, expected",
    [({"0-1": 1, "1-2": 1}, True), ({"0-2": -1}, False), ({}, True)],
)
def test_is_positive(coeffs, expected):
    assert is_positive(Chain(1, coeffs)) is expected


def test_names_and_formatting():
    assert simplex_name((0, 1, 12)) == "0-1-12"
    x = Chain(1, {"1-2": 1, "0-1": 1, "2-10": -2})
    # "2" sorts before "10"
    assert [n for n, _ in x.items()] == ["0-1", "1-2", "2-10"]
    assert format_chain(x) == "(0-1)+(1-2)-(2*2-10)"
    assert format_chain(Chain.zero(3)) == "0"


def test_json_round_trip():
    x = Chain(1, {"0-1": 2, "1-2": -1})
    assert Chain.from_json(x.to_json()) == x
    with pytest.raises(ValueError):
        Chain.from_json({"degree": 1, "coeffs": {"0-1": 0}})


def test_immutable():
    x = Chain(0, {"0": 1})
    with pytest.raises(AttributeError):
        x.degree = 3


@settings(max_examples=1000)
@given(chains())
def test_pm_recomposes(x):
    p, m = decompose_pm(x)
    assert chain_add(p, negate(m)) == x
    assert not (support(p) & support(m))
    assert is_positive(p) and is_positive(m)


@settings(max_examples=1000)
@given(chains(), chains(), chains())
def test_addition_is_associative_and_commutative(a, b, c):
    assert chain_add(chain_add(a, b), c) == chain_add(a, chain_add(b, c))
    assert chain_add(a, b) == chain_add(b, a)
    assert chain_sum([a, b, c], 1) == a + b + c
    assert hash(a + b) == hash(b + a)
