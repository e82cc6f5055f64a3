import itertools
from math import comb

import numpy as np
import pytest

from oplax3.adc import (
    ADC,
    ADCError,
    Poset,
    atom,
    basis_atoms,
    is_loop_free,
    is_strongly_loop_free,
    is_unital_basis,
    loop_free_relations,
    oriental_complex,
    simplex_complex,
    strong_relation,
)
from oplax3.chains import Chain, support


def C(degree, **coeffs):
    return Chain(degree, {k.replace("_", "-"): v for k, v in coeffs.items()})


def point():
    return ADC([["a"]], {}, {"a": 1})


def heavy_arrow():
    return ADC([["a", "b"], ["f"]], {"f": Chain(0, {"b": 2, "a": -2})}, {"a": 2, "b": 2})


def loop_complex():
    return ADC(
        [["a", "b"], ["f", "g"]],
        {"f": Chain(0, {"b": 1, "a": -1}), "g": Chain(0, {"a": 1, "b": -1})},
        {"a": 1, "b": 1},
    )


def grid():
    return Poset(["00", "01", "10", "11"], [("00", "01"), ("00", "10"), ("01", "11"), ("10", "11"), ("00", "11")])


def has_two_cycle(edges, nodes):
    """Warshall closure on a boolean matrix, independent of the graph library."""
    idx = {n: i for i, n in enumerate(nodes)}
    m = np.zeros((len(nodes), len(nodes)), dtype=bool)
    for a, b in edges:
        if a != b:
            m[idx[a], idx[b]] = True
    for k in range(len(nodes)):
        m |= np.outer(m[:, k], m[k, :])
    return bool((m & m.T).any())


@pytest.mark.parametrize("n", range(6))
def test_simplex_complex_sizes(n):
    K = simplex_complex(n)
    assert [len(b) for b in K.basis] == [comb(n + 1, k + 1) for k in range(n + 1)]
    assert all(K.aug[v] == 1 for v in K.basis[0])
    # oracle: increasing tuples
    for k, names in enumerate(K.basis):
        assert set(names) == {"-".join(map(str, t)) for t in itertools.combinations(range(n + 1), k + 1)}


def test_small_simplex_examples():
    assert [len(b) for b in simplex_complex(0).basis] == [1]
    assert [len(b) for b in simplex_complex(2).basis] == [3, 3, 1]
    assert [len(b) for b in simplex_complex(4).basis] == [5, 10, 10, 5, 1]
    K = simplex_complex(2)
    assert K.d(C(2, **{"0_1_2": 1})) == C(1, **{"1_2": 1, "0_2": -1, "0_1": 1})


def test_oriental_complex_of_posets():
    assert oriental_complex(Poset.chain(3)) == simplex_complex(3)
    assert [len(b) for b in oriental_complex(Poset(["a", "b"], [])).basis] == [2]
    K = oriental_complex(grid())
    assert [len(b) for b in K.basis] == [4, 5, 2]
    assert set(K.basis[2]) == {"00-01-11", "00-10-11"}


@pytest.mark.parametrize(
    "elements, less",
    [
        (["a", "b"], [("a", "b"), ("b", "a")]),
        (["a"], [("a", "a")]),
        (["a", "b", "c"], [("a", "b"), ("b", "c")]),
        (["a-b"], []),
    ],
)
def test_poset_rejects_non_orders(elements, less):
    with pytest.raises(ADCError):
        Poset(elements, less)


def test_displayed_two_simplex_atom():
    m = atom(simplex_complex(2), C(2, **{"0_1_2": 1}))
    assert m.row0 == (C(0, **{"0": 1}), C(1, **{"0_2": 1}), C(2, **{"0_1_2": 1}))
    assert m.row1 == (C(0, **{"2": 1}), C(1, **{"0_1": 1, "1_2": 1}), C(2, **{"0_1_2": 1}))


def test_three_simplex_atom_follows_the_recursion():
    m = atom(simplex_complex(3), C(3, **{"0_1_2_3": 1}))
    assert m.row0[2] == C(2, **{"0_1_2": 1, "0_2_3": 1})
    assert m.row1[2] == C(2, **{"1_2_3": 1, "0_1_3": 1})
    assert m.row0[1] == C(1, **{"0_3": 1})
    assert m.row1[1] == C(1, **{"0_1": 1, "1_2": 1, "2_3": 1})
    assert (m.row0[0], m.row1[0]) == (C(0, **{"0": 1}), C(0, **{"3": 1}))


def test_vertex_atom():
    m = atom(simplex_complex(1), C(0, **{"1": 1}))
    assert m.dim == 0 and m.row0 == m.row1 == (C(0, **{"1": 1}),)


@pytest.mark.parametrize("n", range(5))
def test_simplices_are_strong_steiner(n):
    K = simplex_complex(n)
    assert is_unital_basis(K)
    assert is_loop_free(K)
    assert is_strongly_loop_free(K)
    for m in basis_atoms(K).values():
        for corner in (m.row0[0], m.row1[0]):
            assert len(corner.coeffs) == 1 and set(corner.coeffs.values()) == {1}


def test_unitality_examples():
    assert is_unital_basis(point())
    assert not is_unital_basis(heavy_arrow())


def test_loop_complex():
    K = loop_complex()
    assert not is_loop_free(K)
    assert not is_strongly_loop_free(K)
    nodes = list(K.degree_of)
    assert has_two_cycle(strong_relation(K), nodes)
    assert any(has_two_cycle(e, nodes) for e in loop_free_relations(K).values())


def test_no_positive_degree_is_loop_free():
    assert is_loop_free(point())
    assert is_strongly_loop_free(point())
    assert is_loop_free(oriental_complex(Poset(["a", "b"], [])))


@pytest.mark.parametrize(
    "K",
    [simplex_complex(n) for n in range(5)] + [oriental_complex(grid()), point(), loop_complex(), heavy_arrow()],
)
def test_strong_implies_loop_free_and_oracle_agrees(K):
    nodes = list(K.degree_of)
    assert is_strongly_loop_free(K) == (not has_two_cycle(strong_relation(K), nodes))
    if is_strongly_loop_free(K):
        assert is_loop_free(K)


def test_construction_rejects_broken_complexes():
    K = simplex_complex(3)
    diff = dict(K.diff)
    diff["0-1-2"] = C(1, **{"0_1": 1, "1_2": 1})
    with pytest.raises(ADCError, match="d\\(d"):
        ADC(K.basis, diff, K.aug)
    aug = dict(K.aug)
    aug["3"] = 2
    with pytest.raises(ADCError, match="e\\(d"):
        ADC(K.basis, K.diff, aug)
    with pytest.raises(ADCError):
        K.d(C(0, **{"0": 1}))


def test_json_round_trip():
    K = oriental_complex(grid())
    assert ADC.from_json(K.to_json()) == K


def test_diff_matrix_squares_to_zero():
    K = simplex_complex(4)
    for k in range(2, 5):
        assert not (K.diff_matrix(k - 1) @ K.diff_matrix(k)).any()
