import random

import pytest

from oplax3.cat3 import from_generators, validate_cat
from oplax3.nerve import Nerve, check_simplex, compose_maps, enumerate_maps, enumerate_strict_functors
from oplax3.oplax import (
    COHERENCE_FAMILIES,
    OplaxData,
    OplaxError,
    compose,
    from_simplicial,
    from_strict,
    identity_functor,
    nerve_image,
    sup_functor,
    to_simplicial,
    validate,
    validate_w_entry,
)
from oplax3.simplicial import is_simplicial_oplax
from oplax3.strictify import SplitFreeCat, eta, strictify
from oplax3.trees import NORMALISATION_FAMILIES


@pytest.fixture(scope="module")
def parallel3():
    """D3 with a second 3-cell parallel to the principal one."""
    gens = [
        ("a", 0, None, None), ("b", 0, None, None),
        ("f", 1, "a", "b"), ("g", 1, "a", "b"),
        ("alpha", 2, "f", "g"), ("beta", 2, "f", "g"),
        ("gamma", 3, "alpha", "beta"), ("delta", 3, "alpha", "beta"),
    ]
    return from_generators(gens, name="P3")


@pytest.fixture(scope="module")
def oplax_d2_d3sharp(disks, d3sharp):
    return [from_simplicial(F) for F in enumerate_maps(disks[2], d3sharp) if is_simplicial_oplax(F)]


def test_family_names():
    assert len(COHERENCE_FAMILIES) == 14
    assert len(NORMALISATION_FAMILIES) == 7


@pytest.mark.parametrize("name", ["D3sharp", "O3"])
def test_identity_is_valid(d3sharp, orientals3, name):
    A = {"D3sharp": d3sharp, "O3": orientals3[3]}[name]
    report = validate(identity_functor(A))
    assert report.ok
    assert set(report.checked) == set(COHERENCE_FAMILIES)


def test_strict_functors_are_valid(orientals3, d3sharp):
    functors = list(enumerate_strict_functors(orientals3[3], d3sharp))
    assert len(functors) == 40
    for u in functors[::7]:
        assert validate(from_strict(u)).ok


def test_sup_on_a_point(disks):
    F = sup_functor(disks[0], 2)
    assert validate(F).ok
    B = F.target
    for table in ("V", "W", "VR", "VL"):
        assert all(B.is_identity(v) for v in F.table(table).values())


def test_sup_units(orientals3):
    F = sup_functor(orientals3[2], 2)
    A = F.source
    top = [x for x in A.cells[0] if F.sup.simplex_of[x].k == 2 and len(set(F.sup.simplex_of[x].labels[0])) == 3]
    assert top
    for x in top:
        assert F.f1(A.ident[x]) == F.target.ident[F.f0(x)]
    assert validate(F).ok


def test_sup_on_the_three_simplex_up_to_dimension_three(orientals3):
    F = sup_functor(orientals3[3], 3)
    assert validate(F).ok
    assert any(not F.target.is_identity(v) for v in F.W.values())


def test_sup_nerve_image_reads_last_vertices(orientals3):
    F = sup_functor(orientals3[2], 2)
    N = Nerve(F.source)
    rng = random.Random(2)
    for x in rng.sample(N.simplices(3), 40):
        img = nerve_image(F, x)
        assert check_simplex(F.target, img) == []
        for i in range(4):
            obj = F.sup.simplex_of[x.v(i)]
            assert img.v(i) == obj.v(obj.k)


def test_parallel_w_mutations_hit_the_pentagon(parallel3):
    F = sup_functor(parallel3, 4)
    swap = {"gamma": "delta", "delta": "gamma"}
    keys = [k for k, v in F.W.items() if v in swap]
    assert len(keys) == 44
    caught = []
    for k in keys:
        with F.mutated("W", k, swap[F.W[k]]):
            report = validate_w_entry(F, k)
        if not report.ok:
            assert report.families() == {"VV"}
            caught.append(k)
    assert len(caught) == 40
    full = validate(F.replace("W", caught[0], swap[F.W[caught[0]]]))
    assert full.families() == {"VV"}
    # every witness is a quadruple with the mutated triple as a factor
    for v in full.violations:
        assert len(v.witness) == 4


def test_boundary_mutation_is_reported(orientals3):
    F = sup_functor(orientals3[3], 3)
    key = next(k for k, v in F.W.items() if not F.target.is_identity(v))
    wrong = F.target.ident[F.target.src[F.W[key]]]
    report = validate(F.replace("W", key, wrong))
    assert not report.ok
    assert {v.kind for v in report.violations} == {"boundary"}


def test_normalisation_mutation_is_reported(disks):
    # an idempotent 3-cell on 1(f) gives W entries a wrong parallel value
    gens = [("a", 0, None, None), ("b", 0, None, None), ("f", 1, "a", "b"), ("w", 3, "1(f)", "1(f)")]
    B = from_generators(gens, {(2, "w", "w"): "w", (1, "w", "w"): "w"}, name="idempotent")
    assert validate_cat(B) == []
    D1 = disks[1]
    F = from_strict({x: x for x in D1.dim}, D1, B)
    assert validate(F).ok
    report = validate(F.replace("W", ("1(b)", "f", "1(a)"), "w"))
    assert [(v.kind, v.family) for v in report.violations] == [("normalisation", "W")]


def test_json_round_trip(orientals3):
    F = sup_functor(orientals3[2], 2)
    assert OplaxData.from_json(F.to_json()) == F
    assert validate(F).to_json()["verdict"] == "pass"


def test_round_trips_on_maps(disks, d3sharp, oplax_d2_d3sharp):
    assert len(oplax_d2_d3sharp) == 6
    for F in oplax_d2_d3sharp:
        assert validate(F).ok
        assert from_simplicial(to_simplicial(F)) == F
    for Fm in enumerate_maps(disks[2], d3sharp):
        if is_simplicial_oplax(Fm):
            assert to_simplicial(from_simplicial(Fm)) == Fm


def test_round_trip_on_sup(orientals3):
    F = sup_functor(orientals3[2], 2)
    assert from_simplicial(to_simplicial(F)) == F


def test_from_simplicial_rejects_non_oplax(disks, d3sharp):
    bad = [F for F in enumerate_maps(disks[2], d3sharp) if not is_simplicial_oplax(F)]
    assert bad
    with pytest.raises(OplaxError):
        from_simplicial(bad[0])


def test_identity_is_a_unit_for_compose(oplax_d2_d3sharp, disks, d3sharp):
    for F in oplax_d2_d3sharp:
        assert compose(identity_functor(d3sharp), F) == F
        assert compose(F, identity_functor(disks[2])) == F


def test_compose_of_strict_functors_is_strict(orientals3, d3sharp):
    O1, O2 = orientals3[1], orientals3[2]
    u = next(iter(enumerate_strict_functors(O1, O2)))
    vs = list(enumerate_strict_functors(O2, d3sharp))
    for v in vs:
        uv = {x: v(u(x)) for x in O1.dim}
        assert compose(from_strict(v), from_strict(u)) == from_strict(uv, O1, d3sharp)


def test_compose_checks_the_middle(disks, d3sharp):
    with pytest.raises(OplaxError):
        compose(identity_functor(disks[2]), identity_functor(d3sharp))


def test_unit_of_a_poset_then_strict(d3sharp):
    A = SplitFreeCat.chain(2)
    T = strictify(A)
    E = eta(A, T)
    assert validate(E).ok
    functors = list(enumerate_strict_functors(T.category, d3sharp))
    assert len(functors) == 10
    for u in functors:
        G = from_strict(u)
        GE = compose(G, E)
        assert validate(GE).ok
        assert to_simplicial(GE) == compose_maps(to_simplicial(G), to_simplicial(E))


def test_compose_is_associative_and_functorial(disks, orientals3, d3sharp):
    D2, O2, O3 = disks[2], orientals3[2], orientals3[3]
    first = [from_simplicial(F) for F in enumerate_maps(D2, O2) if is_simplicial_oplax(F)]
    second = [from_simplicial(F) for F in enumerate_maps(O2, O3) if is_simplicial_oplax(F)]
    third = [from_strict(u) for u in enumerate_strict_functors(O3, d3sharp)]
    rng = random.Random(1)
    for _ in range(20):
        f, g, h = rng.choice(first), rng.choice(second), rng.choice(third)
        gf = compose(g, f)
        assert validate(gf).ok
        assert to_simplicial(gf) == compose_maps(to_simplicial(g), to_simplicial(f))
        assert compose(h, gf) == compose(compose(h, g), f)
