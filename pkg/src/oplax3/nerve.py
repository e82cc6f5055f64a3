"""The Street nerve of a finite strict 3-category in dimensions 0..4.

A ``k``-simplex is a strict functor from the oriental ``O_k`` and is stored
fully expanded: an object per vertex, a 1-cell per edge, a 2-cell per
triangle and a 3-cell per tetrahedron.  The conventions are those of the
atoms of ``O_3``:

* ``t(ijk): e(ik) -> e(jk) o_0 e(ij)``
* ``h(ijkl): e(kl) o_0 t(ijk) o_1 t(ikl) -> t(jkl) o_0 e(ij) o_1 t(ijl)``

and a 4-simplex must satisfy the equation carried by the atom of ``O_4``.
Higher labels are determined by these, since the nerve of a 3-category is
4-coskeletal.
"""

from __future__ import annotations

import random
import weakref
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, product
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .cat3 import CompositionError, FiniteThreeCat

MAX_DIM = 4


class NerveError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@lru_cache(maxsize=None)
def faces_of(k: int, r: int) -> tuple[tuple[int, ...], ...]:
    """Strictly increasing ``(r + 1)``-tuples of vertices of ``[k]`` in canonical order."""
    return tuple(combinations(range(k + 1), r + 1))


@lru_cache(maxsize=None)
def _positions(k: int, r: int) -> dict[tuple[int, ...], int]:
    return {s: n for n, s in enumerate(faces_of(k, r))}


@dataclass(frozen=True)
class Simplex:
    """Labels of a ``k``-simplex; ``labels[r]`` follows ``faces_of(k, r)``."""

    k: int
    labels: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if not 0 <= self.k <= MAX_DIM:
            raise NerveError("simplices are kept in dimensions 0..4")
        if len(self.labels) != min(self.k, 3) + 1:
            raise NerveError("wrong number of label levels")
        for r, level in enumerate(self.labels):
            if len(level) != len(faces_of(self.k, r)):
                raise NerveError(f"level {r} has the wrong size")

    def label(self, idx: Sequence[int]) -> str:
        """Label of the face spanned by the strictly increasing vertices ``idx``."""
        idx = tuple(idx)
        return self.labels[len(idx) - 1][_positions(self.k, len(idx) - 1)[idx]]

    def v(self, i: int) -> str:
        return self.labels[0][i]

    def e(self, i: int, j: int) -> str:
        return self.label((i, j))

    def t(self, i: int, j: int, l: int) -> str:
        return self.label((i, j, l))

    def h(self, i: int, j: int, l: int, m: int) -> str:
        return self.label((i, j, l, m))

    @property
    def principal(self) -> str | None:
        """Label of the top face (``None`` for 4-simplices, which have no 4-cell)."""
        if self.k > 3:
            return None
        return self.labels[self.k][0]

    def to_json(self) -> dict:
        out = {}
        for r, level in enumerate(self.labels):
            for s, lab in zip(faces_of(self.k, r), level):
                out["-".join(map(str, s))] = lab
        return {"k": self.k, "labels": out}

    @classmethod
    def from_json(cls, data: Mapping) -> "Simplex":
        k = int(data["k"])
        labels = data["labels"]
        levels = tuple(
            tuple(labels["-".join(map(str, s))] for s in faces_of(k, r)) for r in range(min(k, 3) + 1)
        )
        return cls(k, levels)

    def __str__(self) -> str:
        return f"{self.k}-simplex" + str(self.to_json()["labels"])


def make_simplex(k: int, label: Callable[[tuple[int, ...]], str]) -> Simplex:
    return Simplex(k, tuple(tuple(label(s) for s in faces_of(k, r)) for r in range(min(k, 3) + 1)))


# -- simplicial structure ------------------------------------------------------


def label_along(A: FiniteThreeCat, x: Simplex, seq: Sequence[int]) -> str:
    """Label of the (possibly degenerate) face of ``x`` on the weakly increasing vertices ``seq``."""
    distinct = tuple(sorted(set(seq)))
    return A.lift(x.label(distinct), len(seq) - 1)


def pullback(A: FiniteThreeCat, x: Simplex, theta: Sequence[int]) -> Simplex:
    """``theta^* x`` for a monotone ``theta: [m] -> [k]`` given by its values."""
    theta = tuple(theta)
    if any(a > b for a, b in zip(theta, theta[1:])) or (theta and not 0 <= theta[0] <= theta[-1] <= x.k):
        raise NerveError(f"{theta} is not a monotone map into [{x.k}]")
    m = len(theta) - 1
    return make_simplex(m, lambda s: label_along(A, x, [theta[i] for i in s]))


def face(x: Simplex, i: int) -> Simplex:
    """``d_i x``: drop vertex ``i``."""
    if x.k == 0 or not 0 <= i <= x.k:
        raise NerveError(f"face index {i} out of range for a {x.k}-simplex")
    keep = [j for j in range(x.k + 1) if j != i]
    return make_simplex(x.k - 1, lambda s: x.label([keep[a] for a in s]))


def degeneracy(A: FiniteThreeCat, x: Simplex, i: int) -> Simplex:
    """``s_i x``: repeat vertex ``i``."""
    if not 0 <= i <= x.k or x.k >= MAX_DIM:
        raise NerveError(f"degeneracy index {i} out of range for a {x.k}-simplex")
    theta = [j if j <= i else j - 1 for j in range(x.k + 2)]
    return pullback(A, x, theta)


_EZ_CACHE: "weakref.WeakKeyDictionary[FiniteThreeCat, dict]" = weakref.WeakKeyDictionary()


def ez_decompose(A: FiniteThreeCat, x: Simplex) -> tuple[tuple[int, ...], Simplex]:
    """``(pi, y)`` with ``y`` non-degenerate and ``x = pi^* y``; ``pi`` is a monotone surjection."""
    memo = _EZ_CACHE.setdefault(A, {})
    out = memo.get(x)
    if out is None:
        out = memo[x] = _ez_decompose(A, x)
    return out


def _ez_decompose(A: FiniteThreeCat, x: Simplex) -> tuple[tuple[int, ...], Simplex]:
    pi = list(range(x.k + 1))
    y = x
    changed = True
    while changed:
        changed = False
        for i in range(y.k):
            d = face(y, i + 1)
            if degeneracy(A, d, i) == y:
                # y = s_i d, so vertex i+1 of y collapses onto i
                pi = [p if p <= i else p - 1 for p in pi]
                y = d
                changed = True
                break
    return tuple(pi), y


_PULLBACK_CACHE: "weakref.WeakKeyDictionary[FiniteThreeCat, dict]" = weakref.WeakKeyDictionary()


def _pullback_memo(A: FiniteThreeCat, x: Simplex, theta: tuple[int, ...]) -> Simplex:
    memo = _PULLBACK_CACHE.setdefault(A, {})
    out = memo.get((x, theta))
    if out is None:
        out = memo[(x, theta)] = pullback(A, x, theta)
    return out


def is_degenerate(A: FiniteThreeCat, x: Simplex) -> bool:
    return any(degeneracy(A, face(x, i + 1), i) == x for i in range(x.k))


# -- enumeration -----------------------------------------------------------------


class Nerve:
    """Cached simplices of ``N(A)`` in dimensions 0..4."""

    def __init__(self, A: FiniteThreeCat):
        self.A = A
        self._homs: list[dict[tuple[str, str], list[str]]] = []
        for d in range(1, 4):
            homs: dict[tuple[str, str], list[str]] = {}
            for c in A.cells[d]:
                homs.setdefault((A.src[c], A.tgt[c]), []).append(c)
            self._homs.append(homs)
        self._levels: dict[int, list[Simplex]] = {}
        self._nondeg: dict[int, list[Simplex]] = {}

    def hom(self, d: int, s: str, t: str) -> list[str]:
        return self._homs[d - 1].get((s, t), [])

    def simplices(self, k: int) -> list[Simplex]:
        if k not in self._levels:
            if k == 0:
                self._levels[0] = [Simplex(0, ((a,),)) for a in self.A.objects]
            else:
                out: list[Simplex] = []
                for y in self.simplices(k - 1):
                    out.extend(self.extensions(y))
                self._levels[k] = out
        return self._levels[k]

    def nondegenerate(self, k: int) -> list[Simplex]:
        if k not in self._nondeg:
            self._nondeg[k] = [x for x in self.simplices(k) if not is_degenerate(self.A, x)]
        return self._nondeg[k]

    def extensions(self, y: Simplex) -> Iterator[Simplex]:
        """All ``(k+1)``-simplices whose last face ``d_{k+1}`` is ``y``."""
        A = self.A
        k = y.k + 1
        old = {s: y.label(s) for r in range(min(y.k, 3) + 1) for s in faces_of(y.k, r)}
        for top in A.objects:
            edge_choices = [self.hom(1, y.v(i), top) for i in range(k)]
            for edges in product(*edge_choices):
                lab = dict(old)
                lab[(k,)] = top
                for i in range(k):
                    lab[(i, k)] = edges[i]
                yield from self._fill_triangles(k, lab)

    def _fill_triangles(self, k: int, lab: dict) -> Iterator[Simplex]:
        A = self.A
        tris = [(i, j, k) for i, j in combinations(range(k), 2)]
        choices = []
        for i, j, l in tris:
            tgt = A.compose(0, lab[(j, l)], lab[(i, j)])
            choices.append(self.hom(2, lab[(i, l)], tgt))
        for fill in product(*choices):
            lab2 = dict(lab)
            lab2.update(zip(tris, fill))
            yield from self._fill_tetrahedra(k, lab2)

    def _fill_tetrahedra(self, k: int, lab: dict) -> Iterator[Simplex]:
        A = self.A
        tets = [(i, j, l, k) for i, j, l in combinations(range(k), 3)]
        choices = []
        for s in tets:
            src, tgt = tetrahedron_boundary(A, lambda idx: lab[idx], s)
            choices.append(self.hom(3, src, tgt))
        for fill in product(*choices):
            lab2 = dict(lab)
            lab2.update(zip(tets, fill))
            x = make_simplex(k, lambda s: lab2[s])
            if k == 4 and not pentagon_holds(A, x):
                continue
            yield x


def tetrahedron_boundary(A: FiniteThreeCat, lab: Callable[[tuple], str], s: Sequence[int]) -> tuple[str, str]:
    i, j, k, l = s
    src = A.compose(1, A.compose(0, lab((k, l)), lab((i, j, k))), lab((i, k, l)))
    tgt = A.compose(1, A.compose(0, lab((j, k, l)), lab((i, j))), lab((i, j, l)))
    return src, tgt


def pentagon_sides(A: FiniteThreeCat, x: Simplex, s: Sequence[int] = (0, 1, 2, 3, 4)) -> tuple[str, str]:
    """The two 3-cells a 4-simplex on vertices ``s`` must identify."""
    a0, a1, a2, a3, a4 = s
    e = lambda p, q: x.label((p, q))
    t = lambda p, q, r: x.label((p, q, r))
    h = lambda p, q, r, u: x.label((p, q, r, u))
    c0 = lambda *xs: A.comp_chain(0, *xs)
    c1 = lambda *xs: A.comp_chain(1, *xs)
    lhs = A.comp_chain(
        2,
        c1(c0(h(a1, a2, a3, a4), e(a0, a1)), t(a0, a1, a4)),
        c1(c0(e(a3, a4), t(a1, a2, a3), e(a0, a1)), h(a0, a1, a3, a4)),
        c1(c0(e(a3, a4), h(a0, a1, a2, a3)), t(a0, a3, a4)),
    )
    rhs = A.comp_chain(
        2,
        c1(c0(t(a2, a3, a4), e(a1, a2), e(a0, a1)), h(a0, a1, a2, a4)),
        c1(c0(e(a3, a4), e(a2, a3), t(a0, a1, a2)), h(a0, a2, a3, a4)),
    )
    return lhs, rhs


def pentagon_holds(A: FiniteThreeCat, x: Simplex) -> bool:
    try:
        lhs, rhs = pentagon_sides(A, x)
    except CompositionError:
        return False
    return lhs == rhs


def check_simplex(A: FiniteThreeCat, x: Simplex) -> list[str]:
    """Reasons why ``x`` is not a simplex of ``N(A)`` (empty when it is)."""
    problems = []
    try:
        for i, j in faces_of(x.k, 1):
            f = x.e(i, j)
            if A.dim.get(f) != 1 or A.src[f] != x.v(i) or A.tgt[f] != x.v(j):
                problems.append(f"edge {i}{j}")
        if problems:
            return problems
        for i, j, l in faces_of(x.k, 2):
            a = x.t(i, j, l)
            if A.dim.get(a) != 2 or A.src[a] != x.e(i, l) or A.tgt[a] != A.compose(0, x.e(j, l), x.e(i, j)):
                problems.append(f"triangle {i}{j}{l}")
        if problems:
            return problems
        for s in faces_of(x.k, 3):
            g = x.label(s)
            src, tgt = tetrahedron_boundary(A, x.label, s)
            if A.dim.get(g) != 3 or A.src[g] != src or A.tgt[g] != tgt:
                problems.append("tetrahedron " + "".join(map(str, s)))
        if problems:
            return problems
        for s in faces_of(x.k, 4):
            lhs, rhs = pentagon_sides(A, x, s)
            if lhs != rhs:
                problems.append("pentagon " + "".join(map(str, s)))
    except (CompositionError, KeyError) as exc:
        problems.append(f"ill-typed: {exc}")
    return problems


def simplices(A: FiniteThreeCat, k: int) -> list[Simplex]:
    return Nerve(A).simplices(k)


def nondegenerate_counts(A: FiniteThreeCat, max_dim: int = MAX_DIM) -> list[int]:
    N = Nerve(A)
    return [len(N.nondegenerate(k)) for k in range(max_dim + 1)]


# -- simplicial maps ----------------------------------------------------------------


class SimplicialMapError(ValueError):
    pass


@dataclass
class SimplicialMap34:
    """A map ``N(A) -> N(B)`` given on non-degenerate simplices of dimension <= 4."""

    source: FiniteThreeCat
    target: FiniteThreeCat
    images: dict[Simplex, Simplex]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __call__(self, x: Simplex) -> Simplex:
        out = self._cache.get(x)
        if out is None:
            pi, y = ez_decompose(self.source, x)
            img = self.images.get(y)
            if img is None:
                raise SimplicialMapError(f"no image for the non-degenerate simplex {y}")
            out = _pullback_memo(self.target, img, pi) if y != x else img
            self._cache[x] = out
        return out

    def check(self) -> list[str]:
        """Dimension and face compatibility on the stored simplices."""
        problems = []
        for y, img in self.images.items():
            if img.k != y.k:
                problems.append(f"dimension mismatch at {y}")
                continue
            bad = check_simplex(self.target, img)
            if bad:
                problems.append(f"image of {y} is not a simplex: {bad}")
                continue
            for i in range(y.k + 1 if y.k else 0):
                if self(face(y, i)) != face(img, i):
                    problems.append(f"face {i} of {y}")
        return problems

    def to_json(self) -> dict:
        rows = [{"simplex": y.to_json(), "image": img.to_json()} for y, img in self.images.items()]
        rows.sort(key=lambda r: (r["simplex"]["k"], sorted(r["simplex"]["labels"].items())))
        return {"images": rows}

    @classmethod
    def from_json(cls, data: Mapping, source: FiniteThreeCat, target: FiniteThreeCat) -> "SimplicialMap34":
        images = {Simplex.from_json(r["simplex"]): Simplex.from_json(r["image"]) for r in data["images"]}
        return cls(source, target, images)

    def __eq__(self, other):
        return (
            isinstance(other, SimplicialMap34)
            and self.source == other.source
            and self.target == other.target
            and self.images == other.images
        )

    __hash__ = None


def map_from_function(
    source: FiniteThreeCat,
    target: FiniteThreeCat,
    fn: Callable[[Simplex], Simplex],
    max_dim: int = MAX_DIM,
    nerve: Nerve | None = None,
) -> SimplicialMap34:
    N = nerve or Nerve(source)
    images = {y: fn(y) for k in range(max_dim + 1) for y in N.nondegenerate(k)}
    return SimplicialMap34(source, target, images)


def identity_map(A: FiniteThreeCat) -> SimplicialMap34:
    return map_from_function(A, A, lambda y: y)


def enumerate_maps(
    source: FiniteThreeCat,
    target: FiniteThreeCat,
    fixed: Mapping[Simplex, Simplex] | None = None,
    budget: int = 10**6,
    rng: random.Random | None = None,
    limit: int | None = None,
) -> Iterator[SimplicialMap34]:
    """Simplicial maps ``N(source) -> N(target)`` by backtracking over non-degenerate simplices.

    ``fixed`` pins the images of some simplices.  With ``rng`` the candidates
    are shuffled, which turns the search into a random sampler.
    """
    NA, NB = Nerve(source), Nerve(target)
    order = [y for k in range(MAX_DIM + 1) for y in NA.nondegenerate(k)]
    by_dim = {k: NB.simplices(k) for k in range(MAX_DIM + 1)}
    # index target simplices by their tuple of faces for fast filtering
    face_index: dict[int, dict[tuple, list[Simplex]]] = {}
    for k in range(1, MAX_DIM + 1):
        idx: dict[tuple, list[Simplex]] = {}
        for z in by_dim[k]:
            idx.setdefault(tuple(face(z, i) for i in range(k + 1)), []).append(z)
        face_index[k] = idx
    fixed = dict(fixed or {})
    images: dict[Simplex, Simplex] = {}
    nodes = 0
    emitted = 0

    def image(x: Simplex) -> Simplex:
        pi, y = ez_decompose(source, x)
        return pullback(target, images[y], pi)

    def go(n: int) -> Iterator[SimplicialMap34]:
        nonlocal nodes, emitted
        if limit is not None and emitted >= limit:
            return
        if n == len(order):
            emitted += 1
            yield SimplicialMap34(source, target, dict(images))
            return
        y = order[n]
        if y.k == 0:
            cands = by_dim[0]
        else:
            cands = face_index[y.k].get(tuple(image(face(y, i)) for i in range(y.k + 1)), [])
        if y in fixed:
            cands = [c for c in cands if c == fixed[y]]
        if rng is not None:
            cands = list(cands)
            rng.shuffle(cands)
        for c in cands:
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"more than {budget} search nodes")
            images[y] = c
            yield from go(n + 1)
            del images[y]
            if limit is not None and emitted >= limit:
                return

    yield from go(0)


def random_map(
    source: FiniteThreeCat,
    target: FiniteThreeCat,
    rng: random.Random,
    budget: int = 10**6,
) -> SimplicialMap34 | None:
    for F in enumerate_maps(source, target, rng=rng, budget=budget, limit=1):
        return F
    return None


def compose_maps(G: SimplicialMap34, F: SimplicialMap34) -> SimplicialMap34:
    """``G o F`` on non-degenerate simplices of the source of ``F``."""
    if F.target != G.source:
        raise SimplicialMapError("middle nerves do not match")
    return SimplicialMap34(F.source, G.target, {y: G(img) for y, img in F.images.items()})


# -- strict functors --------------------------------------------------------------


@dataclass(frozen=True)
class StrictFunctor:
    """A strict 3-functor as a cell-to-cell assignment."""

    source: FiniteThreeCat
    target: FiniteThreeCat
    cells: Mapping[str, str]

    def __call__(self, x: str) -> str:
        return self.cells[x]

    def check(self) -> list[str]:
        A, B, u = self.source, self.target, self.cells
        problems = []
        for d, level in enumerate(A.cells):
            for x in level:
                if x not in u or B.dim.get(u[x]) != d:
                    problems.append(f"bad image of {x}")
        if problems:
            return problems
        for x in A.src:
            if B.src[u[x]] != u[A.src[x]] or B.tgt[u[x]] != u[A.tgt[x]]:
                problems.append(f"boundary of {x}")
        for x, i in A.ident.items():
            if B.ident[u[x]] != u[i]:
                problems.append(f"identity of {x}")
        for (j, x, y), o in A.comp.items():
            if B.comp.get((j, u[x], u[y])) != u[o]:
                problems.append(f"composite {x} o_{j} {y}")
        return problems

    def nerve_image(self, x: Simplex) -> Simplex:
        return Simplex(x.k, tuple(tuple(self.cells[c] for c in level) for level in x.labels))

    def to_map(self, nerve: Nerve | None = None) -> SimplicialMap34:
        return map_from_function(self.source, self.target, self.nerve_image, nerve=nerve)

    def __hash__(self):
        return hash(tuple(sorted(self.cells.items())))


def _forcing_order(A: FiniteThreeCat) -> list[str]:
    """Cells by dimension, each composite placed as soon as its factors are."""
    ident_of = {i: x for x, i in A.ident.items()}
    made_from: dict[str, list[tuple[str, str]]] = {}
    for (j, x, y), o in A.comp.items():
        if o not in (x, y):
            made_from.setdefault(o, []).append((x, y))
    order: list[str] = []
    placed: set[str] = set()

    def forced(c: str) -> bool:
        if c in ident_of and ident_of[c] in placed:
            return True
        return any(x in placed and y in placed for x, y in made_from.get(c, ()))

    for level in A.cells:
        pending = list(level)
        while pending:
            pick = next((c for c in pending if forced(c)), pending[0])
            pending.remove(pick)
            order.append(pick)
            placed.add(pick)
    return order


def enumerate_strict_functors(
    A: FiniteThreeCat,
    B: FiniteThreeCat,
    fixed: Mapping[str, str] | None = None,
    budget: int = 10**6,
) -> Iterator[StrictFunctor]:
    """All strict 3-functors ``A -> B`` by backtracking with forced composites."""
    order = _forcing_order(A)
    as_input: dict[str, list[tuple[int, str, str, str]]] = {x: [] for x in order}
    for (j, x, y), o in A.comp.items():
        for c in {x, y, o}:
            as_input[c].append((j, x, y, o))
    ident_of = {i: x for x, i in A.ident.items()}
    homs: dict[tuple[int, str, str], list[str]] = {}
    for d in range(1, 4):
        for c in B.cells[d]:
            homs.setdefault((d, B.src[c], B.tgt[c]), []).append(c)
    fixed = dict(fixed or {})
    u: dict[str, str] = {}
    nodes = 0

    def consistent(c: str) -> bool:
        for j, x, y, o in as_input[c]:
            if x in u and y in u and o in u and B.comp.get((j, u[x], u[y])) != u[o]:
                return False
        return True

    def candidates(c: str) -> list[str]:
        d = A.dim[c]
        if c in ident_of and ident_of[c] in u:
            return [B.ident[u[ident_of[c]]]]
        for j, x, y, o in as_input[c]:
            if o == c and x in u and y in u:
                out = B.comp.get((j, u[x], u[y]))
                return [out] if out is not None else []
        if d == 0:
            cands = list(B.objects)
        else:
            cands = homs.get((d, u[A.src[c]], u[A.tgt[c]]), [])
        if c in fixed:
            cands = [z for z in cands if z == fixed[c]]
        return cands

    def go(n: int) -> Iterator[StrictFunctor]:
        nonlocal nodes
        if n == len(order):
            yield StrictFunctor(A, B, dict(u))
            return
        c = order[n]
        for z in candidates(c):
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"more than {budget} search nodes")
            if A.dim[c] > 0 and (B.src[z] != u[A.src[c]] or B.tgt[z] != u[A.tgt[c]]):
                continue
            u[c] = z
            if consistent(c):
                yield from go(n + 1)
            del u[c]

    yield from go(0)
