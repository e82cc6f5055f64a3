"""Normalised oplax 3-functors between finite strict 3-categories.

An :class:`OplaxData` stores eight total tables over the finite source.
Whiskered composites follow the usual conventions: ``x o_j y`` is defined
when ``t_j(y) = s_j(x)``, lower-dimensional arguments are lifted through
identities, and in the formulas below ``o_0`` binds tighter than ``o_1``,
which binds tighter than ``o_2``.

Boundaries of the structure cells:

* ``V(g, f): L(gf) => Lg o_0 Lf``
* ``W(h, g, f): Lh o_0 V(g, f) o_1 V(h, gf) => V(h, g) o_0 Lf o_1 V(hg, f)``
* ``VR(g, a): Lg o_0 LL(a) o_1 V(g, f) => V(g, f') o_1 LL(g o_0 a)`` for ``a: f => f'``
* ``VL(b, f): V(g', f) o_1 LL(b o_0 f) => LL(b) o_0 Lf o_1 V(g, f)`` for ``b: g => g'``
"""

from __future__ import annotations

import random
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .cat3 import CompositionError, FiniteThreeCat, from_one_category
from .nerve import (
    MAX_DIM,
    Nerve,
    Simplex,
    SimplicialMap34,
    StrictFunctor,
    faces_of,
    label_along,
    make_simplex,
    map_from_function,
)

TABLES = ("dot", "L", "LL", "LLL", "V", "W", "VR", "VL")


class OplaxError(ValueError):
    pass


# -- domains over a finite source ------------------------------------------------


class Domains:
    """Composable configurations of cells of a finite 3-category."""

    def __init__(self, A: FiniteThreeCat):
        self.A = A
        self.out_of: dict[str, list[str]] = {a: [] for a in A.objects}
        for f in A.cells[1]:
            self.out_of[A.src[f]].append(f)
        self.twos_from: dict[str, list[str]] = {a: [] for a in A.objects}
        self.twos_into: dict[str, list[str]] = {a: [] for a in A.objects}
        for a in A.cells[2]:
            self.twos_from[A.s(a, 0)].append(a)
            self.twos_into[A.t(a, 0)].append(a)
        self.twos_with_src: dict[str, list[str]] = {}
        for a in A.cells[2]:
            self.twos_with_src.setdefault(A.src[a], []).append(a)
        self.threes_with_src: dict[str, list[str]] = {}
        for g in A.cells[3]:
            self.threes_with_src.setdefault(A.src[g], []).append(g)

    # chains of 1-cells, listed last-first as in g o f
    def pairs(self) -> Iterator[tuple[str, str]]:
        A = self.A
        for f in A.cells[1]:
            for g in self.out_of[A.tgt[f]]:
                yield g, f

    def triples(self) -> Iterator[tuple[str, str, str]]:
        A = self.A
        for g, f in self.pairs():
            for h in self.out_of[A.tgt[g]]:
                yield h, g, f

    def quadruples(self) -> Iterator[tuple[str, str, str, str]]:
        A = self.A
        for h, g, f in self.triples():
            for i in self.out_of[A.tgt[h]]:
                yield i, h, g, f

    def vr(self) -> Iterator[tuple[str, str]]:
        """``(g, a)`` with ``g o_0 a`` defined."""
        A = self.A
        for a in A.cells[2]:
            for g in self.out_of[A.t(a, 0)]:
                yield g, a

    def vl(self) -> Iterator[tuple[str, str]]:
        """``(b, f)`` with ``b o_0 f`` defined."""
        A = self.A
        for f in A.cells[1]:
            for b in self.twos_from[A.tgt[f]]:
                yield b, f

    def vertical_pairs(self) -> Iterator[tuple[str, str]]:
        A = self.A
        for a in A.cells[2]:
            for b in self.twos_with_src.get(A.tgt[a], ()):
                yield b, a

    def vertical_triples(self) -> Iterator[tuple[str, str, str]]:
        A = self.A
        for b, a in self.vertical_pairs():
            for c in self.twos_with_src.get(A.tgt[b], ()):
                yield c, b, a

    def three_pairs(self) -> Iterator[tuple[str, str]]:
        A = self.A
        for g in A.cells[3]:
            for d in self.threes_with_src.get(A.tgt[g], ()):
                yield d, g

    def _index3(self):
        if not hasattr(self, "_by_s1"):
            A = self.A
            self._by_s1, self._by_t1, self._by_s0, self._by_t0 = {}, {}, {}, {}
            for G in A.cells[3]:
                self._by_s1.setdefault(A.s(G, 1), []).append(G)
                self._by_t1.setdefault(A.t(G, 1), []).append(G)
                self._by_s0.setdefault(A.s(G, 0), []).append(G)
                self._by_t0.setdefault(A.t(G, 0), []).append(G)

    def three_after_two(self) -> Iterator[tuple[str, str]]:
        """``(G, a)`` with ``G o_1 a`` defined."""
        self._index3()
        for a in self.A.cells[2]:
            for G in self._by_s1.get(self.A.tgt[a], ()):
                yield G, a

    def two_after_three(self) -> Iterator[tuple[str, str]]:
        """``(b, G)`` with ``b o_1 G`` defined."""
        self._index3()
        for b in self.A.cells[2]:
            for G in self._by_t1.get(self.A.src[b], ()):
                yield b, G

    def three_then_one(self) -> Iterator[tuple[str, str]]:
        """``(G, f)`` with ``G o_0 f`` defined."""
        self._index3()
        for f in self.A.cells[1]:
            for G in self._by_s0.get(self.A.tgt[f], ()):
                yield G, f

    def one_then_three(self) -> Iterator[tuple[str, str]]:
        """``(g, G)`` with ``g o_0 G`` defined."""
        self._index3()
        for G in self.A.cells[3]:
            for g in self.out_of[self.A.t(G, 0)]:
                yield g, G

    def factorisations(self) -> dict[str, list[tuple[str, str]]]:
        """Each 1-cell with the composable pairs composing to it."""
        if not hasattr(self, "_factor"):
            self._factor: dict[str, list[tuple[str, str]]] = {}
            for g, f in self.pairs():
                self._factor.setdefault(self.A.compose(0, g, f), []).append((g, f))
        return self._factor

    def ones_into(self, a: str) -> list[str]:
        if not hasattr(self, "_into"):
            self._into: dict[str, list[str]] = {x: [] for x in self.A.objects}
            for f in self.A.cells[1]:
                self._into[self.A.tgt[f]].append(f)
        return self._into[a]


# -- the data -----------------------------------------------------------------------


@dataclass
class OplaxData:
    source: FiniteThreeCat
    target: FiniteThreeCat
    dot: dict[tuple[str], str]
    L: dict[tuple[str], str]
    LL: dict[tuple[str], str]
    LLL: dict[tuple[str], str]
    V: dict[tuple[str, str], str]
    W: dict[tuple[str, str, str], str]
    VR: dict[tuple[str, str], str]
    VL: dict[tuple[str, str], str]
    _domains: Domains | None = field(default=None, repr=False, compare=False)

    @property
    def domains(self) -> Domains:
        if self._domains is None:
            self._domains = Domains(self.source)
        return self._domains

    def table(self, name: str) -> dict:
        return getattr(self, name)

    # short accessors used by the formulas
    def f0(self, a: str) -> str:
        return self.dot[(a,)]

    def f1(self, f: str) -> str:
        return self.L[(f,)]

    def f2(self, a: str) -> str:
        return self.LL[(a,)]

    def f3(self, g: str) -> str:
        return self.LLL[(g,)]

    def __eq__(self, other):
        if not isinstance(other, OplaxData):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and all(self.table(t) == other.table(t) for t in TABLES)
        )

    __hash__ = None

    def replace(self, table: str, key: tuple, value: str) -> "OplaxData":
        """A copy with one entry changed (for mutation tests)."""
        tables = {t: dict(self.table(t)) for t in TABLES}
        if key not in tables[table]:
            raise KeyError(key)
        tables[table][key] = value
        return OplaxData(self.source, self.target, **tables, _domains=self._domains)

    @contextmanager
    def mutated(self, table: str, key: tuple, value: str):
        """Temporarily change one entry in place."""
        t = self.table(table)
        old = t[key]
        t[key] = value
        try:
            yield self
        finally:
            t[key] = old

    def to_json(self) -> dict:
        out: dict = {"source": self.source.to_json(), "target": self.target.to_json()}
        for t in TABLES:
            out[t] = sorted(([list(k), v] for k, v in self.table(t).items()), key=lambda r: r[0])
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "OplaxData":
        src = FiniteThreeCat.from_json(data["source"])
        tgt = FiniteThreeCat.from_json(data["target"])
        tables = {t: {tuple(k): v for k, v in data[t]} for t in TABLES}
        return cls(src, tgt, **tables)


def from_strict(u: StrictFunctor | Mapping[str, str], source: FiniteThreeCat | None = None, target: FiniteThreeCat | None = None) -> OplaxData:
    """A strict 3-functor with identity structure cells."""
    if isinstance(u, StrictFunctor):
        source, target, cells = u.source, u.target, dict(u.cells)
    else:
        cells = dict(u)
    A, B = source, target
    D = Domains(A)
    lift3 = lambda x: B.lift(x, 3)
    V = {(g, f): B.ident[B.compose(0, cells[g], cells[f])] for g, f in D.pairs()}
    W = {(h, g, f): lift3(B.comp_chain(0, cells[h], cells[g], cells[f])) for h, g, f in D.triples()}
    VR = {(g, a): B.ident[B.compose(0, cells[g], cells[a])] for g, a in D.vr()}
    VL = {(b, f): B.ident[B.compose(0, cells[b], cells[f])] for b, f in D.vl()}
    return OplaxData(
        A,
        B,
        {(x,): cells[x] for x in A.cells[0]},
        {(x,): cells[x] for x in A.cells[1]},
        {(x,): cells[x] for x in A.cells[2]},
        {(x,): cells[x] for x in A.cells[3]},
        V,
        W,
        VR,
        VL,
        _domains=D,
    )


def identity_functor(A: FiniteThreeCat) -> OplaxData:
    return from_strict({x: x for x in A.dim}, A, A)


def from_one_category_data(
    source: FiniteThreeCat,
    target: FiniteThreeCat,
    dot: Mapping[str, str],
    L: Mapping[str, str],
    V: Mapping[tuple[str, str], str],
    W: Mapping[tuple[str, str, str], str],
) -> OplaxData:
    """Fill in the structure forced by normalisation when the source has only identity 2-cells."""
    A, B = source, target
    if any(not A.is_identity(a) for a in A.cells[2]):
        raise OplaxError("source has non-identity 2-cells")
    D = Domains(A)
    base = {A.ident[f]: f for f in A.cells[1]}
    base3 = {A.ident[A.ident[f]]: f for f in A.cells[1]}
    LL = {(a,): B.ident[L[base[a]]] for a in A.cells[2]}
    LLL = {(g,): B.lift(L[base3[g]], 3) for g in A.cells[3]}
    VR = {(g, a): B.ident[V[(g, base[a])]] for g, a in D.vr()}
    VL = {(b, f): B.ident[V[(base[b], f)]] for b, f in D.vl()}
    return OplaxData(
        A,
        B,
        {(x,): dot[x] for x in A.cells[0]},
        {(f,): L[f] for f in A.cells[1]},
        LL,
        LLL,
        dict(V),
        dict(W),
        VR,
        VL,
        _domains=D,
    )


# -- validation ----------------------------------------------------------------------


@dataclass(frozen=True)
class OplaxViolation:
    kind: str  # boundary, missing, normalisation, coherence, ill-typed
    family: str
    witness: tuple[str, ...]
    detail: str = ""

    def to_json(self) -> dict:
        return {"kind": self.kind, "family": self.family, "witness": list(self.witness), "detail": self.detail}


@dataclass
class OplaxReport:
    violations: list[OplaxViolation]
    checked: dict[str, int]

    @property
    def ok(self) -> bool:
        return not self.violations

    def families(self, kind: str | None = None) -> set[str]:
        return {v.family for v in self.violations if kind is None or v.kind == kind}

    def to_json(self) -> dict:
        return {
            "verdict": "pass" if self.ok else "fail",
            "checked": dict(sorted(self.checked.items())),
            "violations": [v.to_json() for v in self.violations],
        }


BAD = "<ill-typed>"
_EMPTY: dict = {}


class _Alg:
    """Whiskered composites in the target, phrased like the formulas.

    Every cell is replaced by its iterated identity in dimension 3, so that
    whiskering becomes plain composition of 3-cells.  Undefined composites
    yield ``BAD``, which absorbs everything after it.
    """

    def __init__(self, B: FiniteThreeCat):
        self.B = B
        self.up = {x: B.lift(x, 3) for x in B.dim}
        self.up[BAD] = BAD
        self.tab: list[dict[str, dict[str, str]]] = [{}, {}, {}]
        top = set(B.cells[3])
        for (j, x, y), o in B.comp.items():
            if x in top:
                self.tab[j].setdefault(x, {})[y] = o

    @classmethod
    def of(cls, B: FiniteThreeCat) -> "_Alg":
        alg = B.__dict__.get("_lifted_alg")
        if alg is None:
            alg = B.__dict__["_lifted_alg"] = cls(B)
        return alg

    def chain(self, j: int, xs) -> str:
        up, tab = self.up, self.tab[j]
        acc = up[xs[-1]]
        for x in reversed(xs[:-1]):
            acc = tab.get(up[x], _EMPTY).get(acc, BAD)
        return acc

    def c0(self, *xs):
        return self.chain(0, xs)

    def c1(self, *xs):
        return self.chain(1, xs)

    def c2(self, *xs):
        return self.chain(2, xs)

    def down(self, x: str, d: int) -> str:
        """The ``d``-cell whose iterated identity is ``x``."""
        if x == BAD:
            raise CompositionError("ill-typed composite")
        B = self.B
        while B.dim[x] > d:
            y = B.src[x]
            if B.ident[y] != x:
                raise CompositionError(f"{x} is not an identity")
            x = y
        return x


def boundary_problems(F: OplaxData) -> list[OplaxViolation]:
    """Totality and source/target contracts of all eight tables."""
    A, B, D = F.source, F.target, F.domains
    m = _Alg.of(B)
    out: list[OplaxViolation] = []

    def expect(table: str, key: tuple, dim: int, src=None, tgt=None):
        val = F.table(table).get(key)
        if val is None:
            out.append(OplaxViolation("missing", table, key))
            return
        if B.dim.get(val) != dim:
            out.append(OplaxViolation("boundary", table, key, f"{val} is not a {dim}-cell"))
            return
        if dim > 0:
            try:
                s, t = src(), tgt()
            except (CompositionError, KeyError) as exc:
                out.append(OplaxViolation("ill-typed", table, key, str(exc)))
                return
            if BAD in (s, t):
                out.append(OplaxViolation("ill-typed", table, key, "boundary composite undefined"))
                return
            up = m.up
            if up[B.src[val]] != up[s] or up[B.tgt[val]] != up[t]:
                out.append(OplaxViolation("boundary", table, key, f"{val}: {B.src[val]} -> {B.tgt[val]}, expected {s} -> {t}"))

    for a in A.cells[0]:
        expect("dot", (a,), 0)
    if out:
        return out
    for f in A.cells[1]:
        expect("L", (f,), 1, lambda: F.f0(A.src[f]), lambda: F.f0(A.tgt[f]))
    if out:
        return out
    for a in A.cells[2]:
        expect("LL", (a,), 2, lambda: F.f1(A.src[a]), lambda: F.f1(A.tgt[a]))
    for g, f in D.pairs():
        expect("V", (g, f), 2, lambda: F.f1(A.compose(0, g, f)), lambda: m.c0(F.f1(g), F.f1(f)))
    if out:
        return out
    for G in A.cells[3]:
        expect("LLL", (G,), 3, lambda: F.f2(A.src[G]), lambda: F.f2(A.tgt[G]))
    V = lambda g, f: F.V[(g, f)]
    L = F.f1
    for h, g, f in D.triples():
        expect(
            "W",
            (h, g, f),
            3,
            lambda: m.c1(m.c0(L(h), V(g, f)), V(h, A.compose(0, g, f))),
            lambda: m.c1(m.c0(V(h, g), L(f)), V(A.compose(0, h, g), f)),
        )
    for g, a in D.vr():
        f, f2 = A.src[a], A.tgt[a]
        expect(
            "VR",
            (g, a),
            3,
            lambda: m.c1(m.c0(L(g), F.f2(a)), V(g, f)),
            lambda: m.c1(V(g, f2), F.f2(A.compose(0, g, a))),
        )
    for b, f in D.vl():
        g, g2 = A.src[b], A.tgt[b]
        expect(
            "VL",
            (b, f),
            3,
            lambda: m.c1(V(g2, f), F.f2(A.compose(0, b, f))),
            lambda: m.c1(m.c0(F.f2(b), L(f)), V(g, f)),
        )
    return out


def normalisation_problems(F: OplaxData) -> list[OplaxViolation]:
    A, B, D = F.source, F.target, F.domains
    out = []
    ids1 = {A.ident[a] for a in A.cells[0]}
    ids2 = {A.ident[f] for f in A.cells[1]}
    ids3 = {A.ident[a] for a in A.cells[2]}

    def need(family, key, value, expected):
        if value != expected:
            out.append(OplaxViolation("normalisation", family, key, f"{value} != {expected}"))

    for a in A.cells[0]:
        need("L", (A.ident[a],), F.f1(A.ident[a]), B.ident[F.f0(a)])
    for f in A.cells[1]:
        need("LL", (A.ident[f],), F.f2(A.ident[f]), B.ident[F.f1(f)])
    for a in A.cells[2]:
        need("LLL", (A.ident[a],), F.f3(A.ident[a]), B.ident[F.f2(a)])
    for g, f in D.pairs():
        if g in ids1 or f in ids1:
            need("V", (g, f), F.V[(g, f)], B.ident[F.f1(A.compose(0, g, f))])
    for h, g, f in D.triples():
        if h in ids1 or g in ids1 or f in ids1:
            v = F.V[(A.compose(0, h, g), f)] if h in ids1 or g in ids1 else F.V[(h, A.compose(0, g, f))]
            need("W", (h, g, f), F.W[(h, g, f)], B.ident[v])
    for g, a in D.vr():
        if g in ids1 or a in ids2:
            need("VR", (g, a), F.VR[(g, a)], B.ident[F.V[(g, A.src[a])]] if a in ids2 else B.ident[F.f2(a)])
    for b, f in D.vl():
        if f in ids1 or b in ids2:
            need("VL", (b, f), F.VL[(b, f)], B.ident[F.V[(A.src[b], f)]] if b in ids2 else B.ident[F.f2(b)])
    return out


# Each coherence: (instances, lhs, rhs) with lhs/rhs mapping an instance to a target cell.
Coherence = tuple[Callable[[], Iterable[tuple]], Callable[..., str], Callable[..., str]]


def coherences(F: OplaxData) -> dict[str, Coherence]:
    A, D = F.source, F.domains
    m = _Alg.of(F.target)
    c0, c1, c2 = m.c0, m.c1, m.c2
    a0 = lambda *xs: A.comp_chain(0, *xs)
    a1 = lambda *xs: A.comp_chain(1, *xs)
    a2 = lambda *xs: A.comp_chain(2, *xs)
    L, LL, LLL = F.f1, F.f2, F.f3
    V = lambda g, f: F.V[(g, f)]
    W = lambda h, g, f: F.W[(h, g, f)]
    VR = lambda g, a: F.VR[(g, a)]
    VL = lambda b, f: F.VL[(b, f)]
    s, t = A.src.__getitem__, A.tgt.__getitem__

    def vv_lhs(i, h, g, f):
        return c2(
            c1(c0(V(i, h), L(g), L(f)), W(a0(i, h), g, f)),
            c1(c0(L(i), L(h), V(g, f)), W(i, h, a0(g, f))),
        )

    def vv_rhs(i, h, g, f):
        return c2(
            c1(c0(W(i, h, g), L(f)), V(a0(i, h, g), f)),
            c1(c0(L(i), V(h, g), L(f)), W(i, a0(h, g), f)),
            c1(c0(L(i), W(h, g, f)), V(i, a0(h, g, f))),
        )

    def w_left_lhs(al, g, f):
        h, h2 = s(al), t(al)
        return c2(
            c1(c0(LL(al), L(g), L(f)), W(h, g, f)),
            c1(c0(L(h2), V(g, f)), VL(al, a0(g, f))),
        )

    def w_left_rhs(al, g, f):
        h, h2 = s(al), t(al)
        return c2(
            c1(c0(VL(al, g), L(f)), V(a0(h, g), f)),
            c1(c0(V(h2, g), L(f)), VL(a0(al, g), f)),
            c1(W(h2, g, f), LL(a0(al, g, f))),
        )

    def w_mid_lhs(h, al, f):
        g, g2 = s(al), t(al)
        return c2(
            c1(c0(V(h, g2), L(f)), VL(a0(h, al), f)),
            c1(W(h, g2, f), LL(a0(h, al, f))),
            c1(c0(L(h), V(g2, f)), VR(h, a0(al, f))),
        )

    def w_mid_rhs(h, al, f):
        g, g2 = s(al), t(al)
        return c2(
            c1(c0(VR(h, al), L(f)), V(a0(h, g), f)),
            c1(c0(L(h), LL(al), L(f)), W(h, g, f)),
            c1(c0(L(h), VL(al, f)), V(h, a0(g, f))),
        )

    def w_right_lhs(h, g, al):
        f, f2 = s(al), t(al)
        return c2(
            c1(c0(V(h, g), L(f2)), VR(a0(h, g), al)),
            c1(c0(L(h), L(g), LL(al)), W(h, g, f)),
        )

    def w_right_rhs(h, g, al):
        f, f2 = s(al), t(al)
        return c2(
            c1(W(h, g, f2), LL(a0(h, g, al))),
            c1(c0(L(h), V(g, f2)), VR(h, a0(g, al))),
            c1(c0(L(h), VR(g, al)), V(h, a0(g, f))),
        )

    def vr_y_rhs(g, be, al):
        return c2(c1(VR(g, be), LL(a0(g, al))), c1(c0(L(g), LL(be)), VR(g, al)))

    def vl_y_rhs(be, al, f):
        return c2(c1(c0(LL(be), L(f)), VL(al, f)), c1(VL(be, f), LL(a0(al, f))))

    def vlr_lhs(be, al):
        f2, g2 = t(al), t(be)
        return c2(c1(c0(LL(be), L(f2)), VR(s(be), al)), c1(c0(L(g2), LL(al)), VL(be, s(al))))

    def vlr_rhs(be, al):
        f2, g, g2 = t(al), s(be), t(be)
        return c2(c1(VL(be, f2), LL(a0(g, al))), c1(VR(g2, al), LL(a0(be, s(al)))))

    def lll_l_lhs(G, f):
        be = s(G)
        g = s(be)
        return c2(c1(c0(LLL(G), L(f)), V(g, f)), VL(be, f))

    def lll_l_rhs(G, f):
        be2 = t(G)
        g2 = t(be2)
        return c2(VL(be2, f), c1(V(g2, f), LLL(a0(G, f))))

    def l_lll_lhs(g, G):
        al = s(G)
        f2 = t(al)
        return c2(c1(V(g, f2), LLL(a0(g, G))), VR(g, al))

    def l_lll_rhs(g, G):
        al, al2 = s(G), t(G)
        return c2(VR(g, al2), c1(c0(L(g), LLL(G)), V(g, s(al))))

    return {
        "Y": (D.vertical_pairs, lambda b, a: c1(LL(b), LL(a)), lambda b, a: LL(a1(b, a))),
        "VV": (D.quadruples, vv_lhs, vv_rhs),
        "W_left": (lambda: ((al, g, f) for g, f in D.pairs() for al in D.twos_from[A.tgt[g]]), w_left_lhs, w_left_rhs),
        "W_mid": (lambda: ((h, al, f) for al, f in D.vl() for h in D.out_of[A.t(al, 0)]), w_mid_lhs, w_mid_rhs),
        "W_right": (lambda: ((h, g, al) for g, al in D.vr() for h in D.out_of[A.tgt[g]]), w_right_lhs, w_right_rhs),
        "VR_Y": (
            lambda: ((g, be, al) for be, al in D.vertical_pairs() for g in D.out_of[A.t(al, 0)]),
            lambda g, be, al: VR(g, a1(be, al)),
            vr_y_rhs,
        ),
        "VL_Y": (
            lambda: ((be, al, f) for be, al in D.vertical_pairs() for f in D.ones_into(A.s(al, 0))),
            lambda be, al, f: VL(a1(be, al), f),
            vl_y_rhs,
        ),
        "VLR": (
            lambda: ((be, al) for al in A.cells[2] for be in D.twos_from[A.t(al, 0)]),
            vlr_lhs,
            vlr_rhs,
        ),
        "YY": (
            D.vertical_triples,
            lambda c, b, a: c1(LL(c), LL(a1(b, a))),
            lambda c, b, a: c1(LL(a1(c, b)), LL(a)),
        ),
        "LLLL": (D.three_pairs, lambda d, g: LLL(a2(d, g)), lambda d, g: c2(LLL(d), LLL(g))),
        "LLL_LL": (D.three_after_two, lambda G, a: c1(LLL(G), LL(a)), lambda G, a: LLL(a1(G, a))),
        "LL_LLL": (D.two_after_three, lambda b, G: c1(LL(b), LLL(G)), lambda b, G: LLL(a1(b, G))),
        "LLL_L": (D.three_then_one, lll_l_lhs, lll_l_rhs),
        "L_LLL": (D.one_then_three, l_lll_lhs, l_lll_rhs),
    }


COHERENCE_FAMILIES = (
    "Y", "VV", "W_left", "W_mid", "W_right", "VR_Y", "VL_Y", "VLR",
    "YY", "LLLL", "LLL_LL", "LL_LLL", "LLL_L", "L_LLL",
)


def coherence_problems(
    F: OplaxData,
    families: Sequence[str] = COHERENCE_FAMILIES,
    instances: Mapping[str, Iterable[tuple]] | None = None,
    checked: dict[str, int] | None = None,
) -> list[OplaxViolation]:
    table = coherences(F)
    up = _Alg.of(F.target).up
    out = []
    for name in families:
        gen, lhs, rhs = table[name]
        n = 0
        for inst in (instances[name] if instances and name in instances else gen()):
            n += 1
            try:
                left, right = up[lhs(*inst)], up[rhs(*inst)]
            except (CompositionError, KeyError) as exc:
                out.append(OplaxViolation("ill-typed", name, inst, str(exc)))
                continue
            if BAD in (left, right):
                out.append(OplaxViolation("ill-typed", name, inst, "a whiskered composite is undefined"))
            elif left != right:
                out.append(OplaxViolation("coherence", name, inst, f"{left} != {right}"))
        if checked is not None:
            checked[name] = n
    return out


def validate(F: OplaxData) -> OplaxReport:
    """Boundaries first; normalisation and coherences only once boundaries hold."""
    checked: dict[str, int] = {}
    bad = boundary_problems(F)
    if bad:
        return OplaxReport(bad, checked)
    bad = normalisation_problems(F)
    bad += coherence_problems(F, checked=checked)
    return OplaxReport(bad, checked)


def w_instances_touching(F: OplaxData, key: tuple[str, str, str]) -> dict[str, list[tuple]]:
    """Coherence instances that read ``W[key]``; used for incremental re-validation."""
    A, D = F.source, F.domains
    h, g, f = key
    factor = D.factorisations()
    vv: set[tuple] = set()
    for i in D.out_of[A.tgt[h]]:
        vv.add((i, h, g, f))
    for e in D.ones_into(A.src[f]):
        vv.add((h, g, f, e))
    for x, y in factor.get(h, ()):
        vv.add((x, y, g, f))
    for x, y in factor.get(g, ()):
        vv.add((h, x, y, f))
    for x, y in factor.get(f, ()):
        vv.add((h, g, x, y))
    out = {"VV": sorted(vv)}
    out["W_left"] = [(al, g, f) for al in D.twos_from[A.tgt[g]] if h in (A.src[al], A.tgt[al])]
    out["W_mid"] = [(h, al, f) for al in D.twos_from[A.tgt[f]] if g in (A.src[al], A.tgt[al]) and A.t(al, 0) == A.src[h]]
    out["W_right"] = [(h, g, al) for al in D.twos_into[A.src[g]] if f in (A.src[al], A.tgt[al])]
    return out


def validate_w_entry(F: OplaxData, key: tuple[str, str, str]) -> OplaxReport:
    """Every check that reads ``W[key]``, assuming all other entries were already validated."""
    checked: dict[str, int] = {}
    A, B = F.source, F.target
    bad = [v for v in boundary_problems_for_w(F, key)]
    if bad:
        return OplaxReport(bad, checked)
    h, g, f = key
    if any(A.is_identity(x) for x in key):
        v = F.V[(A.compose(0, h, g), f)] if A.is_identity(h) or A.is_identity(g) else F.V[(h, A.compose(0, g, f))]
        if F.W[key] != B.ident[v]:
            bad.append(OplaxViolation("normalisation", "W", key, f"{F.W[key]} != {B.ident[v]}"))
    inst = w_instances_touching(F, key)
    bad += coherence_problems(F, families=tuple(inst), instances=inst, checked=checked)
    return OplaxReport(bad, checked)


def boundary_problems_for_w(F: OplaxData, key: tuple[str, str, str]) -> list[OplaxViolation]:
    A, B = F.source, F.target
    m = _Alg.of(B)
    h, g, f = key
    val = F.W.get(key)
    if val is None:
        return [OplaxViolation("missing", "W", key)]
    L, V = F.f1, lambda x, y: F.V[(x, y)]
    try:
        s = m.c1(m.c0(L(h), V(g, f)), V(h, A.compose(0, g, f)))
        t = m.c1(m.c0(V(h, g), L(f)), V(A.compose(0, h, g), f))
    except (CompositionError, KeyError) as exc:
        return [OplaxViolation("ill-typed", "W", key, str(exc))]
    if BAD in (s, t):
        return [OplaxViolation("ill-typed", "W", key, "boundary composite undefined")]
    if B.dim.get(val) != 3 or m.up[B.src[val]] != s or m.up[B.tgt[val]] != t:
        return [OplaxViolation("boundary", "W", key, f"{val} has the wrong boundary")]
    return []


# -- the sup functor -------------------------------------------------------------------


@dataclass
class SupSource:
    """The category of elements of a truncated nerve, with simplex bookkeeping."""

    category: FiniteThreeCat
    simplex_of: dict[str, Simplex]
    arrow_of: dict[str, tuple[str, str, tuple[int, ...]]]


def _monotone_maps(m: int, n: int, injective: bool) -> Iterator[tuple[int, ...]]:
    from itertools import combinations, combinations_with_replacement

    pool = combinations(range(n + 1), m + 1) if injective else combinations_with_replacement(range(n + 1), m + 1)
    yield from pool


def sup_source(C: FiniteThreeCat, max_dim: int, nondegenerate: bool = True) -> SupSource:
    """Objects are simplices ``(m, x)``; arrows ``(m, x) -> (n, y)`` are ``theta`` with ``theta^* y = x``.

    With ``nondegenerate`` only non-degenerate simplices are kept; arrows
    between them are then exactly the injective ``theta``.
    """
    from .nerve import pullback

    N = Nerve(C)
    simplices = [x for k in range(max_dim + 1) for x in (N.nondegenerate(k) if nondegenerate else N.simplices(k))]
    name_of = {x: f"x{x.k}.{n}" for n, x in enumerate(simplices)}
    names_by_dim: dict[int, list[str]] = {}
    for x in simplices:
        names_by_dim.setdefault(x.k, []).append(name_of[x])
    arrows: dict[str, tuple[str, str]] = {}
    arrow_of: dict[str, tuple[str, str, tuple[int, ...]]] = {}
    by_key: dict[tuple[str, str, tuple[int, ...]], str] = {}
    identity: dict[str, str] = {}
    for y in simplices:
        for m in range(y.k + 1):
            for theta in _monotone_maps(m, y.k, nondegenerate):
                x = pullback(C, y, theta)
                if x not in name_of:
                    continue
                a = f"{name_of[x]}>{name_of[y]}@{''.join(map(str, theta))}"
                arrows[a] = (name_of[x], name_of[y])
                arrow_of[a] = (name_of[x], name_of[y], theta)
                by_key[(name_of[x], name_of[y], theta)] = a
                if theta == tuple(range(y.k + 1)):
                    identity[name_of[y]] = a
    composite = {}
    out_of: dict[str, list[str]] = {}
    for a, (s, _, _) in arrow_of.items():
        out_of.setdefault(s, []).append(a)
    for f, (x, y, th) in arrow_of.items():
        for g in out_of.get(y, ()):
            _, z, ph = arrow_of[g]
            composite[(g, f)] = by_key[(x, z, tuple(ph[i] for i in th))]
    objects = [name_of[x] for x in simplices]
    cat = from_one_category(objects, arrows, identity, composite, name=f"elements({C.name})")
    return SupSource(cat, {name_of[x]: x for x in simplices}, arrow_of)


def sup_functor(C: FiniteThreeCat, max_dim: int, nondegenerate: bool = True) -> OplaxData:
    """The normalised oplax functor from simplices of ``N(C)`` to ``C`` taking last vertices."""
    S = sup_source(C, max_dim, nondegenerate)
    A = S.category
    D = Domains(A)
    simp, arr = S.simplex_of, S.arrow_of
    dot = {a: simp[a].v(simp[a].k) for a in A.cells[0]}
    L = {}
    for f in A.cells[1]:
        x, y, th = arr[f]
        Y = simp[y]
        L[f] = label_along(C, Y, (th[-1], Y.k))
    V = {}
    for g, f in D.pairs():
        x, y, th = arr[f]
        _, z, ph = arr[g]
        Z = simp[z]
        V[(g, f)] = label_along(C, Z, (ph[th[-1]], ph[simp[y].k], Z.k))
    W = {}
    for h, g, f in D.triples():
        x, y, th = arr[f]
        _, z, ph = arr[g]
        _, w, ps = arr[h]
        T = simp[w]
        W[(h, g, f)] = label_along(C, T, (ps[ph[th[-1]]], ps[ph[simp[y].k]], ps[simp[z].k], T.k))
    F = from_one_category_data(A, C, dot, L, V, W)
    F.sup = S  # keep the bookkeeping for callers that need simplices back
    return F


# -- the nerve of an oplax functor --------------------------------------------------------


def image_label(F: OplaxData, x: Simplex, s: Sequence[int]) -> str:
    """Label of ``SN(F)(x)`` on the face spanned by ``s``."""
    m = _Alg.of(F.target)
    c0, c1, c2 = m.c0, m.c1, m.c2
    r = len(s) - 1
    if r == 0:
        return F.f0(x.label(s))
    if r == 1:
        return F.f1(x.label(s))
    if r == 2:
        i, j, k = s
        return m.down(c1(F.V[(x.e(j, k), x.e(i, j))], F.f2(x.t(i, j, k))), 2)
    i, j, k, l = s
    f, g, h = x.e(i, j), x.e(j, k), x.e(k, l)
    beta, alpha, delta, gamma = x.t(i, j, k), x.t(i, k, l), x.t(j, k, l), x.t(i, j, l)
    Gam = x.h(i, j, k, l)
    L, LL = F.f1, F.f2
    V = lambda b, a: F.V[(b, a)]
    out = c2(
        c1(c0(V(h, g), L(f)), F.VL[(delta, f)], LL(gamma)),
        c1(F.W[(h, g, f)], F.f3(Gam)),
        c1(c0(L(h), V(g, f)), F.VR[(h, beta)], LL(alpha)),
    )
    return m.down(out, 3)


def nerve_image(F: OplaxData, x: Simplex) -> Simplex:
    return make_simplex(x.k, lambda s: image_label(F, x, s))


def to_simplicial(F: OplaxData, check: bool = True, nerve: Nerve | None = None) -> SimplicialMap34:
    """``SN(F)`` on non-degenerate simplices up to dimension 4."""
    if check:
        rep = validate(F)
        if not rep.ok:
            raise OplaxError(f"input does not validate: {rep.violations[:3]}")
    return map_from_function(F.source, F.target, lambda y: nerve_image(F, y), nerve=nerve)


# -- from simplicial maps --------------------------------------------------------------


def simplex_from_labels(A: FiniteThreeCat, k: int, labels: Mapping[str, str]) -> Simplex:
    """Build a simplex from edge/triangle/tetrahedron labels keyed like ``"01"``; vertices are inferred.

    Faces not listed must be determined: vertices from edges, identities are
    never guessed.
    """
    lab: dict[tuple[int, ...], str] = {}
    for key, val in labels.items():
        lab[tuple(int(c) for c in key)] = val
    for i in range(k + 1):
        if (i,) in lab:
            continue
        for (a, b), f in [(key, v) for key, v in lab.items() if len(key) == 2]:
            if a == i:
                lab[(i,)] = A.src[f]
                break
            if b == i:
                lab[(i,)] = A.tgt[f]
                break
    return make_simplex(k, lambda s: lab[s])


class Templates:
    """The source simplices whose images define the cellular data."""

    def __init__(self, A: FiniteThreeCat):
        self.A = A

    def one(self, f: str) -> Simplex:
        return simplex_from_labels(self.A, 1, {"01": f})

    def pair(self, g: str, f: str) -> Simplex:
        A = self.A
        gf = A.compose(0, g, f)
        return simplex_from_labels(A, 2, {"01": f, "12": g, "02": gf, "012": A.ident[gf]})

    def left(self, a: str) -> Simplex:
        """``a: f => g`` on the triangle with edges ``1, g`` and long edge ``f``."""
        A = self.A
        f, g = A.src[a], A.tgt[a]
        return simplex_from_labels(A, 2, {"01": A.ident[A.src[f]], "12": g, "02": f, "012": a})

    def right(self, a: str) -> Simplex:
        A = self.A
        f, g = A.src[a], A.tgt[a]
        return simplex_from_labels(A, 2, {"01": g, "12": A.ident[A.tgt[f]], "02": f, "012": a})

    def triple(self, h: str, g: str, f: str) -> Simplex:
        A = self.A
        gf, hg, hgf = A.compose(0, g, f), A.compose(0, h, g), A.comp_chain(0, h, g, f)
        i2 = A.ident
        return simplex_from_labels(
            A,
            3,
            {
                "01": f, "12": g, "23": h, "02": gf, "03": hgf, "13": hg,
                "012": i2[gf], "023": i2[hgf], "123": i2[hg], "013": i2[hgf],
                "0123": i2[i2[hgf]],
            },
        )

    def whisker_right(self, g: str, a: str) -> Simplex:
        """The template read by ``VR(g, a)``, ``a: f => f'``."""
        A = self.A
        f, f2 = A.src[a], A.tgt[a]
        gf, gf2 = A.compose(0, g, f), A.compose(0, g, f2)
        ga = A.compose(0, g, a)
        i = A.ident
        return simplex_from_labels(
            A,
            3,
            {
                "01": i[A.src[f]], "12": f2, "23": g, "02": f, "03": gf, "13": gf2,
                "012": a, "023": i[gf], "123": i[gf2], "013": ga,
                "0123": i[ga],
            },
        )

    def whisker_left(self, b: str, f: str) -> Simplex:
        """The template read by ``VL(b, f)``, ``b: g => g'``."""
        A = self.A
        g, g2 = A.src[b], A.tgt[b]
        gf, g2f = A.compose(0, g, f), A.compose(0, g2, f)
        bf = A.compose(0, b, f)
        i = A.ident
        return simplex_from_labels(
            A,
            3,
            {
                "01": f, "12": g2, "23": i[A.tgt[g]], "02": g2f, "03": gf, "13": g,
                "012": i[g2f], "023": bf, "123": b, "013": i[gf],
                "0123": i[bf],
            },
        )

    def three(self, G: str) -> Simplex:
        """The template read by ``LLL(G)``, ``G: a => a'`` with ``a, a': f => g``."""
        A = self.A
        a, a2 = A.src[G], A.tgt[G]
        f, g = A.src[a], A.tgt[a]
        i = A.ident
        one_a, one_b = i[A.src[f]], i[A.tgt[f]]
        return simplex_from_labels(
            A,
            3,
            {
                "01": one_a, "12": g, "23": one_b, "02": g, "03": f, "13": f,
                "012": i[g], "023": a, "013": i[f], "123": a2,
                "0123": G,
            },
        )


def from_simplicial(Fm: SimplicialMap34, check: bool = True) -> OplaxData:
    """Read the cellular data off the images of the template simplices."""
    A, B = Fm.source, Fm.target
    if check:
        from .simplicial import is_simplicial_oplax

        if not is_simplicial_oplax(Fm):
            raise OplaxError("map is not simplicial oplax")
    T = Templates(A)
    D = Domains(A)
    dot = {(a,): Fm(Simplex(0, ((a,),))).v(0) for a in A.cells[0]}
    L = {(f,): Fm(T.one(f)).e(0, 1) for f in A.cells[1]}
    LL = {(a,): Fm(T.left(a)).t(0, 1, 2) for a in A.cells[2]}
    LLL = {(G,): Fm(T.three(G)).h(0, 1, 2, 3) for G in A.cells[3]}
    V = {(g, f): Fm(T.pair(g, f)).t(0, 1, 2) for g, f in D.pairs()}
    W = {(h, g, f): Fm(T.triple(h, g, f)).h(0, 1, 2, 3) for h, g, f in D.triples()}
    VR = {(g, a): Fm(T.whisker_right(g, a)).h(0, 1, 2, 3) for g, a in D.vr()}
    VL = {(b, f): Fm(T.whisker_left(b, f)).h(0, 1, 2, 3) for b, f in D.vl()}
    return OplaxData(A, B, dot, L, LL, LLL, V, W, VR, VL, _domains=D)


# -- composition ------------------------------------------------------------------------


def compose(G: OplaxData, F: OplaxData) -> OplaxData:
    """``G o F`` by the explicit composition formulas."""
    if F.target != G.source:
        raise OplaxError("target of the first functor differs from the source of the second")
    A, B, C = F.source, F.target, G.target
    D = F.domains
    m = _Alg.of(C)
    c0, c1, c2 = m.c0, m.c1, m.c2
    a0 = lambda *xs: A.comp_chain(0, *xs)
    GL, GLL, GLLL = G.f1, G.f2, G.f3
    GV = lambda g, f: G.V[(g, f)]
    FL, FV = F.f1, lambda g, f: F.V[(g, f)]
    GFL = lambda f: GL(FL(f))

    dot = {k: G.f0(v) for k, v in F.dot.items()}
    L = {k: GL(v) for k, v in F.L.items()}
    LL = {k: GLL(v) for k, v in F.LL.items()}
    LLL = {k: GLLL(v) for k, v in F.LLL.items()}
    V = {(g, f): m.down(c1(GV(FL(g), FL(f)), GLL(FV(g, f))), 2) for g, f in D.pairs()}
    W = {}
    for h, g, f in D.triples():
        Fh, Fg, Ff = FL(h), FL(g), FL(f)
        W[(h, g, f)] = c2(
            c1(c0(GV(Fh, Fg), GFL(f)), G.VL[(FV(h, g), Ff)], GLL(FV(a0(h, g), f))),
            c1(G.W[(Fh, Fg, Ff)], GLLL(F.W[(h, g, f)])),
            c1(c0(GFL(h), GV(Fg, Ff)), G.VR[(Fh, FV(g, f))], GLL(FV(h, a0(g, f)))),
        )
    VR = {}
    for g, a in D.vr():
        f, f2 = A.src[a], A.tgt[a]
        Fg = FL(g)
        VR[(g, a)] = c2(
            c1(GV(Fg, FL(f2)), GLLL(F.VR[(g, a)])),
            c1(G.VR[(Fg, F.f2(a))], GLL(FV(g, f))),
        )
    VL = {}
    for b, f in D.vl():
        g, g2 = A.src[b], A.tgt[b]
        Ff = FL(f)
        VL[(b, f)] = c2(
            c1(G.VL[(F.f2(b), Ff)], GLL(FV(g, f))),
            c1(GV(FL(g2), Ff), GLLL(F.VL[(b, f)])),
        )
    W, VR, VL = ({k: m.down(v, 3) for k, v in T.items()} for T in (W, VR, VL))
    return OplaxData(A, C, dot, L, LL, LLL, V, W, VR, VL, _domains=D)


def random_strict_oplax(A: FiniteThreeCat, B: FiniteThreeCat, rng: random.Random) -> OplaxData | None:
    from .nerve import enumerate_strict_functors

    fs = list(enumerate_strict_functors(A, B))
    if not fs:
        return None
    return from_strict(rng.choice(fs))
