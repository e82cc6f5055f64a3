import random

import pytest

from oplax3.adc import Poset
from oplax3.cat3 import validate_cat
from oplax3.oplax import validate
from oplax3.strictify import (
    SplitFreeCat,
    StrictifyError,
    check_universal_property,
    epsilon,
    eta,
    has_endomorphisms,
    hom_emptiness_problems,
    is_split_free,
    one_truncation_problems,
    oriental_isomorphism,
    random_poset,
    refines,
    strictify,
    tuple_composite,
)


def one_object(arrows, composite):
    """A monoid on the object ``*``; ``composite`` lists the non-identity products."""
    names = {"1": ("*", "*")}
    names.update({f: ("*", "*") for f in arrows})
    table = {}
    for g in names:
        for f in names:
            table[(g, f)] = f if g == "1" else g if f == "1" else composite[(g, f)]
    return SplitFreeCat(("*",), names, {"*": "1"}, table, name="monoid")


def section_retraction():
    """``r o s = 1_a`` while ``s o r = e`` is a non-identity idempotent on ``b``."""
    arrows = {"1a": ("a", "a"), "1b": ("b", "b"), "s": ("a", "b"), "r": ("b", "a"), "e": ("b", "b")}
    comp = {
        ("1a", "1a"): "1a", ("1b", "1b"): "1b",
        ("s", "1a"): "s", ("1b", "s"): "s", ("r", "1b"): "r", ("1a", "r"): "r",
        ("e", "1b"): "e", ("1b", "e"): "e", ("e", "e"): "e",
        ("r", "s"): "1a", ("s", "r"): "e", ("e", "s"): "s", ("r", "e"): "r",
    }
    return SplitFreeCat(("a", "b"), arrows, {"a": "1a", "b": "1b"}, comp)


def test_split_free_examples():
    assert is_split_free(SplitFreeCat.chain(3))
    involution = one_object(["g"], {("g", "g"): "1"})
    assert involution.check() == []
    assert not is_split_free(involution)
    A = section_retraction()
    assert A.check() == []
    assert not is_split_free(A)


def test_rejections():
    with pytest.raises(StrictifyError, match="split-free"):
        strictify(section_retraction())
    idem = one_object(["e"], {("e", "e"): "e"})
    assert is_split_free(idem) and has_endomorphisms(idem)
    with pytest.raises(StrictifyError, match="endomorphisms"):
        strictify(idem)
    broken = SplitFreeCat.chain(1)
    broken.composite[("01", "1(0)")] = "1(0)"
    with pytest.raises(StrictifyError, match="not a category"):
        strictify(broken)


def test_interval():
    T = strictify(SplitFreeCat.chain(1))
    assert T.category.nontrivial_counts() == [2, 1, 0, 0]
    assert validate_cat(T.category) == []


def test_triangle():
    T = strictify(SplitFreeCat.chain(2))
    C = T.category
    assert sorted(x for x in C.cells[1] if C.src[x] == "0" and C.tgt[x] == "2") == ["(02)", "(12,01)"]
    fillers = [x for x in C.cells[2] if not C.is_identity(x)]
    assert len(fillers) == 1
    assert (C.src[fillers[0]], C.tgt[fillers[0]]) == ("(02)", "(12,01)")
    assert C.hom("(12,01)", "(02)") == []


@pytest.mark.parametrize(
    "n, counts",
    [(0, [1, 1, 1, 1]), (1, [2, 3, 3, 3]), (2, [3, 7, 8, 8]), (3, [4, 15, 23, 24])],
)
def test_orientals_are_recovered(n, counts):
    T = strictify(SplitFreeCat.chain(n))
    assert T.category.counts() == counts
    assert validate_cat(T.category) == []
    u, problems = oriental_isomorphism(n, T)
    assert problems == []
    assert len(set(u.values())) == len(u)


def test_concatenation():
    T = strictify(SplitFreeCat.chain(3))
    C = T.category
    assert C.compose(0, "(23)", "(12,01)") == "(23,12,01)"
    assert C.compose(0, "(23)", "()@2") == "(23)"
    for x in C.cells[1]:
        for y in C.cells[1]:
            for z in C.cells[1]:
                if C.tgt[z] == C.src[y] and C.tgt[y] == C.src[x]:
                    assert C.compose(0, C.compose(0, x, y), z) == C.compose(0, x, C.compose(0, y, z))


def test_counit():
    A = SplitFreeCat.chain(2)
    T = strictify(A)
    e = epsilon(T)
    assert e.check() == []
    assert e("(01)") == "01"
    assert e("()@1") == "1(1)"
    assert e("(12,01)") == e("(02)") == "02"
    assert tuple_composite(T, "(12,01)") == "02"


def test_unit_of_the_interval_is_strict():
    F = eta(SplitFreeCat.chain(1))
    assert validate(F).ok
    B = F.target
    assert all(B.is_identity(v) for t in ("V", "W") for v in F.table(t).values())
    assert F.f1("01") == "(01)" and F.f1("1(0)") == "()@0"


def test_unit_of_the_triangle():
    A = SplitFreeCat.chain(2)
    T = strictify(A)
    F = eta(A, T)
    C = T.category
    assert C.hom("(02)", "(12,01)") == [F.V[("12", "01")]]
    assert validate(F).ok


def test_unit_of_the_three_simplex():
    F = eta(SplitFreeCat.chain(3))
    report = validate(F)
    assert report.ok
    assert report.checked["VV"] > 0
    w = F.W[("23", "12", "01")]
    assert not F.target.is_identity(w)


@pytest.mark.parametrize("n", range(4))
def test_truncation_certificates(n):
    T = strictify(SplitFreeCat.chain(n))
    assert one_truncation_problems(T) == []
    assert hom_emptiness_problems(T) == []


def test_refinement_examples():
    T = strictify(SplitFreeCat.chain(2))
    assert refines(T, "(02)", "(12,01)")
    assert not refines(T, "(12,01)", "(02)")
    assert refines(T, "(12,01)", "(12,01)")
    assert T.refinement(T.category.hom("(02)", "(12,01)")[0]) == (0, 2)


@pytest.mark.parametrize("seed", range(5))
def test_random_posets(seed):
    P = random_poset(random.Random(seed), max_size=5)
    A = SplitFreeCat.from_poset(P)
    assert is_split_free(A)
    T = strictify(A)
    assert validate_cat(T.category) == []
    assert one_truncation_problems(T) == []
    assert hom_emptiness_problems(T) == []
    assert validate(eta(A, T)).ok


def test_grid_poset():
    grid = Poset(["00", "01", "10", "11"], [("00", "01"), ("00", "10"), ("01", "11"), ("10", "11"), ("00", "11")])
    A = SplitFreeCat.from_poset(grid)
    assert "00>11" in A.arrows
    T = strictify(A)
    assert one_truncation_problems(T) == []
    # the two maximal tuples are not linked by any 2-cell
    C = T.category
    assert C.hom("(01>11,00>01)", "(10>11,00>10)") == []


@pytest.mark.parametrize(
    "A, B, count",
    [("[0]", "D2", 2), ("[1]", "D1", 3), ("[1]", "D3sharp", 4), ("[2]", "D3sharp", 10), ("[2]", "O2", 15)],
)
def test_universal_property(disks, d3sharp, orientals3, A, B, count):
    base = SplitFreeCat.chain(int(A[1]))
    target = {"D1": disks[1], "D2": disks[2], "D3sharp": d3sharp, "O2": orientals3[2]}[B]
    report = check_universal_property(base, target)
    assert report.ok
    assert report.strict_functors == report.simplicial_maps == count


def test_json_forms():
    A = SplitFreeCat.chain(2)
    assert SplitFreeCat.from_json(A.to_json()) == A
    short = SplitFreeCat.from_json({"elements": ["0", "1", "2"], "less": [["0", "1"], ["1", "2"]], "name": "[2]"})
    assert short == A
    T = strictify(A)
    data = T.to_json()
    assert data["tuples"]["(12,01)"] == {"start": "0", "arrows": ["01", "12"]}
