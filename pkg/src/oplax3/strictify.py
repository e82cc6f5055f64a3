"""Strictification of finite split-free categories.

The strictification ``T`` of a 1-category ``A`` has the objects of ``A``; its
1-cells ``a -> a'`` are tuples of composable non-identity arrows, the empty
tuple being the identity.  A higher cell with 1-target ``y = (g_1, ..., g_n)``
is a cell ``c`` of the oriental ``O_n`` whose 1-target is the path
``<01> + ... + <n-1 n>``; its 1-source is a path through ``0 = p_0 < ... < p_m = n``
and that refinement determines the source tuple, whose ``i``-th arrow is the
composite of the ``g_k`` with ``p_{i-1} < k <= p_i``.

Vertical composition renames the earlier cell along its refinement before
composing in the oriental; ``o_0`` shifts the later cell and composes in the
oriental of the concatenated tuple.  3-cells joined by a 4-cell are
identified, and every composite of classes is checked to be independent of
the representatives.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .adc import Poset, simplex_complex
from .cat3 import FiniteThreeCat, QuotientError, _UnionFind, fill_table, from_one_category, truncate_with_data
from .nerve import BudgetExceeded, SimplicialMap34, StrictFunctor, enumerate_maps, enumerate_strict_functors
from .nu import NuCell, cell_compose, cell_identity, cell_key, cell_source, cell_target, is_identity, iterated_source, iterated_target, map_cell
from .oplax import Domains, OplaxData, from_one_category_data, to_simplicial
from .orientals import OrientalHandle, chain_map

TOP_HOM = 4  # ambient dimension kept before the 3-truncation


class StrictifyError(ValueError):
    pass


# -- split-free categories -------------------------------------------------------------


@dataclass
class SplitFreeCat:
    """A finite 1-category: objects, arrows with endpoints, identities and a composition table.

    ``composite[(g, f)]`` is ``g o f`` and covers every composable pair,
    identities included.
    """

    objects: tuple[str, ...]
    arrows: dict[str, tuple[str, str]]
    identity: dict[str, str]
    composite: dict[tuple[str, str], str]
    name: str = ""
    _three: FiniteThreeCat | None = field(default=None, repr=False, compare=False)

    @classmethod
    def from_poset(cls, poset: Poset, name: str = "") -> "SplitFreeCat":
        elems = [str(e) for e in poset.elements]
        short = all(len(e) == 1 for e in elems)

        def arrow(a, b):
            return f"{a}{b}" if short else f"{a}>{b}"

        objects = tuple(elems)
        identity = {e: f"1({e})" for e in elems}
        arrows = {identity[e]: (e, e) for e in elems}
        for a, b in sorted(poset.less, key=lambda p: (poset.elements.index(p[0]), poset.elements.index(p[1]))):
            arrows[arrow(a, b)] = (str(a), str(b))
        composite = {}
        for g, (b, c) in arrows.items():
            for f, (a, b2) in arrows.items():
                if b != b2:
                    continue
                composite[(g, f)] = identity[a] if a == c else arrow(a, c)
        return cls(objects, arrows, identity, composite, name)

    @classmethod
    def chain(cls, n: int) -> "SplitFreeCat":
        """The poset ``[n]``."""
        return cls.from_poset(Poset.chain(n), name=f"[{n}]")

    def is_identity(self, f: str) -> bool:
        return self.identity[self.arrows[f][0]] == f

    @property
    def non_identity_arrows(self) -> list[str]:
        return [f for f in self.arrows if not self.is_identity(f)]

    def src(self, f: str) -> str:
        return self.arrows[f][0]

    def tgt(self, f: str) -> str:
        return self.arrows[f][1]

    def compose(self, *fs: str) -> str:
        """``f_1 o f_2 o ... o f_k`` (the last one first)."""
        acc = fs[-1]
        for g in reversed(fs[:-1]):
            acc = self.composite[(g, acc)]
        return acc

    def check(self) -> list[str]:
        """Category axioms of the table."""
        problems = []
        for a in self.objects:
            i = self.identity.get(a)
            if i is None or self.arrows.get(i) != (a, a):
                problems.append(f"identity of {a}")
        if problems:
            return problems
        for g, (b, c) in self.arrows.items():
            for f, (a, b2) in self.arrows.items():
                if b != b2:
                    continue
                out = self.composite.get((g, f))
                if out is None or self.arrows.get(out) != (a, c):
                    problems.append(f"composite {g} o {f}")
        if problems:
            return problems
        for f, (a, b) in self.arrows.items():
            if self.composite[(self.identity[b], f)] != f or self.composite[(f, self.identity[a])] != f:
                problems.append(f"unit law at {f}")
        for (g, f), gf in self.composite.items():
            for h, (c, _) in self.arrows.items():
                if c == self.tgt(g) and self.composite[(h, gf)] != self.composite[(self.composite[(h, g)], f)]:
                    problems.append(f"associativity at {h}, {g}, {f}")
        return problems

    def as_three_cat(self) -> FiniteThreeCat:
        if self._three is None:
            self._three = from_one_category(self.objects, self.arrows, self.identity, self.composite, self.name)
        return self._three

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "objects": list(self.objects),
            "arrows": {f: list(st) for f, st in sorted(self.arrows.items())},
            "identity": dict(sorted(self.identity.items())),
            "composite": [{"g": g, "f": f, "out": o} for (g, f), o in sorted(self.composite.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "SplitFreeCat":
        """Either the full table or a poset ``{"elements": [...], "less": [[a, b], ...]}``."""
        if "elements" in data:
            less = [tuple(map(str, p)) for p in data.get("less", [])]
            closure = nx.transitive_closure_dag(nx.DiGraph(less)) if less else nx.DiGraph()
            poset = Poset([str(e) for e in data["elements"]], list(closure.edges))
            return cls.from_poset(poset, data.get("name", ""))
        composite = {(str(r["g"]), str(r["f"])): str(r["out"]) for r in data["composite"]}
        return cls(
            tuple(map(str, data["objects"])),
            {str(f): (str(st[0]), str(st[1])) for f, st in data["arrows"].items()},
            {str(a): str(f) for a, f in data["identity"].items()},
            composite,
            data.get("name", ""),
        )


def is_split_free(A: SplitFreeCat) -> bool:
    """No pair of non-identity arrows composes to an identity."""
    for (g, f), out in A.composite.items():
        if A.is_identity(out) and not A.is_identity(g) and not A.is_identity(f):
            return False
    return True


def has_endomorphisms(A: SplitFreeCat) -> bool:
    """Whether some non-identity arrow has equal endpoints; such an arrow makes tuples unbounded."""
    return any(a == b and not A.is_identity(f) for f, (a, b) in A.arrows.items())


def random_poset(rng: random.Random, max_size: int = 5, density: float = 0.5) -> Poset:
    size = rng.randint(1, max_size)
    edges = [(i, j) for i in range(size) for j in range(i + 1, size) if rng.random() < density]
    g = nx.DiGraph()
    g.add_nodes_from(range(size))
    g.add_edges_from(edges)
    closure = nx.transitive_closure_dag(g)
    return Poset(range(size), list(closure.edges))


# -- orientals ----------------------------------------------------------------------------


def path_vertices(c: NuCell) -> tuple[int, ...]:
    """Vertices of a path 1-cell of a simplex oriental."""
    if c.dim != 1:
        raise StrictifyError("expected a 1-cell")
    edges = [tuple(int(v) for v in name.split("-")) for name, _ in c.row0[1].items()]
    if not edges:
        return (int(c.row0[0].items()[0][0]),)
    verts = sorted({v for e in edges for v in e})
    return tuple(verts)


@lru_cache(maxsize=None)
def _oriental(n: int) -> OrientalHandle:
    return OrientalHandle.simplex(n)


@lru_cache(maxsize=None)
def _full_path(n: int) -> NuCell:
    return _oriental(n).path(list(range(n + 1)))


@lru_cache(maxsize=None)
def _hom_table(n: int) -> tuple[tuple[NuCell, ...], ...]:
    """Cells of ``O_n`` of dimensions 2..4 whose 1-target is the unit-step path."""
    levels = _oriental(n).cells(TOP_HOM)
    full = _full_path(n)
    out = []
    for d in range(2, TOP_HOM + 1):
        out.append(tuple(c for c in levels[d] if iterated_target(c, 1) == full))
    return tuple(out)


@lru_cache(maxsize=None)
def _rename(phi: tuple[int, ...]):
    return chain_map({i: v for i, v in enumerate(phi)})


def _along(c: NuCell, phi: Sequence[int]) -> NuCell:
    return map_cell(c, _rename(tuple(phi)))


# -- the strictification -----------------------------------------------------------------


Tuple = tuple[str, ...]


@dataclass
class TildeCat:
    """The 3-truncated strictification together with its cell bookkeeping."""

    base: SplitFreeCat
    category: FiniteThreeCat
    tuples: dict[str, tuple[str, Tuple]]  # 1-cell -> (start object, arrows in order of application)
    one_cell_of: dict[tuple[str, Tuple], str]
    reps: dict[str, tuple[tuple[str, Tuple], NuCell]]  # every enumerated cell of dimension >= 2
    class_of: dict[str, str]
    members: dict[str, list[str]]

    def one_cell(self, start: str, arrows: Sequence[str]) -> str:
        return self.one_cell_of[(start, tuple(arrows))]

    def cell(self, y: tuple[str, Tuple], c: NuCell) -> str:
        """Name of the cell (or class) of ``c`` over the target tuple ``y``."""
        if c.dim == 1:
            return self.one_cell_of[y]
        return self.class_of[_cell_name(y, c)]

    def refinement(self, x: str) -> tuple[int, ...]:
        """Vertices of the 1-source path of a 2- or 3-cell inside its oriental."""
        _, c = self.reps[x]
        return path_vertices(iterated_source(c, 1))

    def to_json(self) -> dict:
        return {
            "base": self.base.to_json(),
            "category": self.category.to_json(),
            "tuples": {k: {"start": s, "arrows": list(t)} for k, (s, t) in sorted(self.tuples.items())},
            "refinements": {
                x: list(self.refinement(x)) for d in (2, 3) for x in sorted(self.category.cells[d])
            },
        }


def tuple_name(A: SplitFreeCat, start: str, arrows: Tuple) -> str:
    """``(g, f)`` style name, the last applied arrow first; ``()@a`` for the empty tuple."""
    if not arrows:
        return f"()@{start}"
    return "(" + ",".join(reversed(arrows)) + ")"


def _cell_name(y: tuple[str, Tuple], c: NuCell) -> str:
    start, arrows = y
    head = "(" + ",".join(reversed(arrows)) + ")" if arrows else f"()@{start}"
    return f"{head}/{cell_key(c)}"


def _tuples(A: SplitFreeCat) -> list[tuple[str, Tuple]]:
    out: list[tuple[str, Tuple]] = [(a, ()) for a in A.objects]
    frontier = [(A.src(f), (f,)) for f in A.non_identity_arrows]
    while frontier:
        out.extend(frontier)
        nxt = []
        for start, arrows in frontier:
            end = A.tgt(arrows[-1])
            for f in A.non_identity_arrows:
                if A.src(f) == end:
                    nxt.append((start, arrows + (f,)))
        frontier = nxt
    return out


def _source_tuple(A: SplitFreeCat, y: tuple[str, Tuple], phi: Sequence[int]) -> tuple[str, Tuple]:
    start, g = y
    parts = []
    for lo, hi in zip(phi, phi[1:]):
        f = A.compose(*reversed(g[lo:hi]))
        if A.is_identity(f):
            raise StrictifyError(f"the composite of {g[lo:hi]} is an identity")
        parts.append(f)
    return start, tuple(parts)


def strictify(A: SplitFreeCat, check: bool = True) -> TildeCat:
    """The 3-truncated strictification of a finite split-free category without endomorphisms."""
    if check:
        problems = A.check()
        if problems:
            raise StrictifyError(f"not a category: {problems[:3]}")
    if not is_split_free(A):
        raise StrictifyError("category is not split-free")
    if has_endomorphisms(A):
        raise StrictifyError("non-identity endomorphisms give infinitely many 1-cells")

    tuples = _tuples(A)
    one_cell_of = {y: tuple_name(A, *y) for y in tuples}
    tuple_of = {name: y for y, name in one_cell_of.items()}
    reps: dict[str, tuple[tuple[str, Tuple], NuCell]] = {}
    by_dim: list[list[str]] = [[] for _ in range(TOP_HOM + 1)]
    for y in tuples:
        for level in _hom_table(len(y[1])):
            for c in level:
                name = _cell_name(y, c)
                reps[name] = (y, c)
                by_dim[c.dim].append(name)

    uf = _UnionFind(by_dim[3])
    for z in by_dim[4]:
        y, c = reps[z]
        if not is_identity(c):
            uf.union(_cell_name(y, cell_source(c)), _cell_name(y, cell_target(c)))
    class_of: dict[str, str] = {}
    members: dict[str, list[str]] = {}
    for d in (2, 3):
        for x in by_dim[d]:
            k = uf.find(x) if d == 3 else x
            class_of[x] = k
            members.setdefault(k, []).append(x)

    cells = [
        list(A.objects),
        [one_cell_of[y] for y in tuples],
        list(by_dim[2]),
        [x for x in by_dim[3] if class_of[x] == x],
    ]
    src: dict[str, str] = {}
    tgt: dict[str, str] = {}
    ident: dict[str, str] = {}
    for y in tuples:
        name = one_cell_of[y]
        src[name] = y[0]
        tgt[name] = A.tgt(y[1][-1]) if y[1] else y[0]
        ident[name] = _cell_name(y, cell_identity(_full_path(len(y[1]))))
    for a in A.objects:
        ident[a] = one_cell_of[(a, ())]
    for x in cells[2]:
        y, c = reps[x]
        src[x] = one_cell_of[_source_tuple(A, y, path_vertices(cell_source(c)))]
        tgt[x] = one_cell_of[y]
        ident[x] = class_of[_cell_name(y, cell_identity(c))]
    for x in cells[3]:
        y, c = reps[x]
        src[x] = _cell_name(y, cell_source(c))
        tgt[x] = _cell_name(y, cell_target(c))

    def representative(x: str) -> tuple[tuple[str, Tuple], NuCell]:
        if x in tuple_of:
            y = tuple_of[x]
            return y, _full_path(len(y[1]))
        return reps[x]

    def compose_reps(j: int, x: tuple, y: tuple) -> tuple[tuple[str, Tuple], NuCell]:
        (ty_x, cx), (ty_y, cy) = x, y
        if j == 0:
            n = len(ty_y[1])
            shifted = _along(cx, range(n, n + len(ty_x[1]) + 1))
            return (ty_y[0], ty_y[1] + ty_x[1]), cell_compose(shifted, cy, 0)
        if j == 1:
            phi = path_vertices(iterated_source(cx, 1))
            return ty_x, cell_compose(cx, _along(cy, phi), 1)
        return ty_x, cell_compose(cx, cy, j)

    def compose(j: int, x: str, y: str) -> str:
        if x in tuple_of:
            ty, c = compose_reps(j, representative(x), representative(y))
            return one_cell_of[ty]
        outs = set()
        for xr in members[x]:
            for yr in members[y]:
                ty, c = compose_reps(j, reps[xr], reps[yr])
                key = _cell_name(ty, c)
                if key not in class_of:
                    raise QuotientError(f"composite {key} is outside the enumerated cells")
                outs.add(class_of[key])
        if len(outs) != 1:
            raise QuotientError(f"{x} o_{j} {y} is not well defined on classes: {sorted(outs)}")
        return outs.pop()

    comp = fill_table(cells, src, tgt, compose)
    name = f"strictify({A.name})" if A.name else "strictify"
    T = FiniteThreeCat(cells, src, tgt, ident, comp, name)
    tuples_by_name = {one_cell_of[y]: y for y in tuples}
    return TildeCat(A, T, tuples_by_name, one_cell_of, reps, class_of, members)


# -- counit and unit -------------------------------------------------------------------


def tuple_composite(T: TildeCat, x: str) -> str:
    start, arrows = T.tuples[x]
    if not arrows:
        return T.base.identity[start]
    return T.base.compose(*reversed(arrows))


def epsilon(T: TildeCat) -> StrictFunctor:
    """The counit: objects fixed, tuples sent to their composite, higher cells to identities."""
    A = T.base.as_three_cat()
    C = T.category
    u = {a: a for a in C.cells[0]}
    for x in C.cells[1]:
        u[x] = tuple_composite(T, x)
    for d in (2, 3):
        for x in C.cells[d]:
            u[x] = A.lift(u[C.s(x, 1)], d)
    return StrictFunctor(C, A, u)


def eta(A: SplitFreeCat, T: TildeCat | None = None) -> OplaxData:
    """The unit as a normalised oplax 3-functor from ``A`` into its strictification."""
    T = T or strictify(A)
    C = T.category
    A3 = A.as_three_cat()
    gen2 = _oriental(2).generator(0, 1, 2)
    gen3 = _oriental(3).generator(0, 1, 2, 3)
    L = {}
    for f, (a, _) in A.arrows.items():
        L[f] = T.one_cell(a, ()) if A.is_identity(f) else T.one_cell(a, (f,))
    V = {}
    W = {}
    D = Domains(A3)
    for g, f in D.pairs():
        if A.is_identity(f) or A.is_identity(g):
            V[(g, f)] = C.ident[L[A.composite[(g, f)]]]
        else:
            V[(g, f)] = T.cell((A.src(f), (f, g)), gen2)
    for h, g, f in D.triples():
        if any(A.is_identity(z) for z in (h, g, f)):
            lhs = C.compose(1, C.compose(0, L[h], V[(g, f)]), V[(h, A.composite[(g, f)])])
            W[(h, g, f)] = C.ident[lhs]
        else:
            W[(h, g, f)] = T.cell((A.src(f), (f, g, h)), gen3)
    dot = {a: a for a in A.objects}
    return from_one_category_data(A3, C, dot, L, V, W)


# -- certificates ---------------------------------------------------------------------------


def one_truncation_problems(T: TildeCat) -> list[str]:
    """Check that 2-connected classes of tuples match the arrows of the base, hom by hom."""
    C, A = T.category, T.base
    problems = []
    uf = _UnionFind(C.cells[1])
    for x in C.cells[2]:
        uf.union(C.src[x], C.tgt[x])
    for x in C.cells[2]:
        if tuple_composite(T, C.src[x]) != tuple_composite(T, C.tgt[x]):
            problems.append(f"2-cell {x} joins tuples with different composites")
    classes: dict[str, set[str]] = {}
    for x in C.cells[1]:
        classes.setdefault(tuple_composite(T, x), set()).add(uf.find(x))
    for f in A.arrows:
        got = classes.get(f, set())
        if len(got) != 1:
            problems.append(f"arrow {f} has {len(got)} classes of tuples")
    for (j, x, y), o in C.comp.items():
        if j == 0 and C.dim[x] == 1:
            if tuple_composite(T, o) != A.composite[(tuple_composite(T, x), tuple_composite(T, y))]:
                problems.append(f"composite of {x} o_0 {y}")
    return problems


def refines(T: TildeCat, x: str, y: str) -> bool:
    """Whether some refinement map takes the tuple ``x`` to the tuple ``y``."""
    (sx, fx), (sy, gy) = T.tuples[x], T.tuples[y]
    if sx != sy or tuple_composite(T, x) != tuple_composite(T, y):
        return False
    if not fx:
        return not gy
    A = T.base

    def go(i: int, k: int) -> bool:
        if i == len(fx):
            return k == len(gy)
        for k2 in range(k + 1, len(gy) + 1):
            if A.compose(*reversed(gy[k:k2])) == fx[i] and go(i + 1, k2):
                return True
        return False

    return go(0, 0)


def hom_emptiness_problems(T: TildeCat) -> list[str]:
    """A hom of 2-cells is non-empty exactly when the target refines the source."""
    C = T.category
    occupied = {(C.src[x], C.tgt[x]) for x in C.cells[2]}
    problems = []
    by_ends: dict[tuple[str, str], list[str]] = {}
    for x in C.cells[1]:
        by_ends.setdefault((C.src[x], C.tgt[x]), []).append(x)
    for group in by_ends.values():
        for x in group:
            for y in group:
                if ((x, y) in occupied) != refines(T, x, y):
                    problems.append(f"hom({x}, {y})")
    return problems


def oriental_isomorphism(n: int, T: TildeCat | None = None) -> tuple[dict[str, str], list[str]]:
    """Cell map from the strictification of ``[n]`` to the truncated oriental, with its problems.

    A cell over the tuple through ``v_0 < ... < v_k`` is the image of its
    ``O_k`` cell under ``i -> v_i``.
    """
    T = T or strictify(SplitFreeCat.chain(n))
    O, data = truncate_with_data(simplex_complex(n))
    C = T.category
    vertex = {str(i): cell_key(iterated_source(_oriental(n).path([i]), 0)) for i in range(n + 1)}
    u: dict[str, str] = {}
    for a in C.cells[0]:
        u[a] = vertex[a]
    for x, (start, arrows) in T.tuples.items():
        u[x] = cell_key(_oriental(n).path(_vertices_of(start, arrows, T.base)))
    for d in (2, 3):
        for x in C.cells[d]:
            (start, arrows), c = T.reps[x]
            verts = _vertices_of(start, arrows, T.base)
            u[x] = data.class_of[cell_key(_along(c, verts))]
    problems = StrictFunctor(C, O, u).check()
    for d in range(4):
        image = [u[x] for x in C.cells[d]]
        if len(set(image)) != len(image) or set(image) != set(O.cells[d]):
            problems.append(f"not a bijection in dimension {d}")
    return u, problems


def _vertices_of(start: str, arrows: Tuple, A: SplitFreeCat) -> list[int]:
    return [int(start)] + [int(A.tgt(f)) for f in arrows]


@dataclass
class UniversalReport:
    strict_functors: int
    simplicial_maps: int
    injective: bool
    surjective: bool

    @property
    def ok(self) -> bool:
        return self.injective and self.surjective

    def to_json(self) -> dict:
        return {
            "strict_functors": self.strict_functors,
            "simplicial_maps": self.simplicial_maps,
            "injective": self.injective,
            "surjective": self.surjective,
            "verdict": "pass" if self.ok else "fail",
        }


def _map_key(F: SimplicialMap34) -> str:
    return json.dumps(F.to_json(), sort_keys=True)


def check_universal_property(A: SplitFreeCat, B: FiniteThreeCat, budget: int = 10**6) -> UniversalReport:
    """Precomposition with the nerve of the unit, compared against all maps of nerves.

    Both sides are enumerated independently; raises ``BudgetExceeded`` when
    either search grows past ``budget`` nodes.
    """
    T = strictify(A)
    unit = to_simplicial(eta(A, T))
    A3 = A.as_three_cat()
    images = []
    for u in enumerate_strict_functors(T.category, B, budget=budget):
        images.append(_map_key(SimplicialMap34(A3, B, {y: u.nerve_image(z) for y, z in unit.images.items()})))
    maps = {_map_key(F) for F in enumerate_maps(A3, B, budget=budget)}
    return UniversalReport(len(images), len(maps), len(set(images)) == len(images), set(images) == maps)


__all__ = [
    "BudgetExceeded",
    "SplitFreeCat",
    "StrictifyError",
    "TildeCat",
    "UniversalReport",
    "check_universal_property",
    "epsilon",
    "eta",
    "has_endomorphisms",
    "hom_emptiness_problems",
    "is_split_free",
    "one_truncation_problems",
    "oriental_isomorphism",
    "random_poset",
    "refines",
    "strictify",
    "tuple_composite",
]
