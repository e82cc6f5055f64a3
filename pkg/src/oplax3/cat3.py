"""Finite strict 3-categories as explicit cell tables.

Cells are opaque string identifiers.  Identities are cells in their own
right and compositions are stored for every composable pair of cells of the
same dimension; whiskerings are obtained by lifting the lower-dimensional
argument along identities.  ``x o_j y`` always means ``y`` first: it is
defined when the ``j``-target of ``y`` is the ``j``-source of ``x``.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .adc import ADC
from .chains import Chain
from .nu import NuCell, cell_compose, cell_identity, cell_key, cell_source, cell_target, enumerate_cells, is_identity

TOP = 3


class CompositionError(ValueError):
    pass


class QuotientError(ValueError):
    pass


class FiniteThreeCat:
    """A finite strict 3-category given by explicit tables."""

    def __init__(
        self,
        cells: Sequence[Sequence[str]],
        src: Mapping[str, str],
        tgt: Mapping[str, str],
        ident: Mapping[str, str],
        comp: Mapping[tuple[int, str, str], str],
        name: str = "",
    ):
        if len(cells) != TOP + 1:
            raise ValueError("expected cell lists for dimensions 0..3")
        self.cells: tuple[tuple[str, ...], ...] = tuple(tuple(c) for c in cells)
        self.dim: dict[str, int] = {}
        for d, level in enumerate(self.cells):
            for x in level:
                if x in self.dim:
                    raise ValueError(f"cell {x!r} listed twice")
                self.dim[x] = d
        self.src = dict(src)
        self.tgt = dict(tgt)
        self.ident = dict(ident)
        self.comp = dict(comp)
        self.name = name
        self._identity_set = None

    # -- structure -----------------------------------------------------------

    @property
    def objects(self) -> tuple[str, ...]:
        return self.cells[0]

    def s(self, x: str, j: int | None = None) -> str:
        """Iterated source of ``x`` in dimension ``j`` (default: one below)."""
        if j is None:
            j = self.dim[x] - 1
        while self.dim[x] > j:
            x = self.src[x]
        return x

    def t(self, x: str, j: int | None = None) -> str:
        if j is None:
            j = self.dim[x] - 1
        while self.dim[x] > j:
            x = self.tgt[x]
        return x

    def identity(self, x: str) -> str:
        return self.ident[x]

    def lift(self, x: str, d: int) -> str:
        while self.dim[x] < d:
            x = self.ident[x]
        return x

    @property
    def identities(self) -> frozenset[str]:
        if self._identity_set is None:
            self._identity_set = frozenset(self.ident.values())
        return self._identity_set

    def is_identity(self, x: str) -> bool:
        return x in self.identities

    def is_trivial_over(self, x: str, j: int) -> bool:
        """Whether ``x`` is an iterated identity of a ``j``-cell."""
        return self.lift(self.s(x, j), self.dim[x]) == x

    def composable(self, j: int, x: str, y: str) -> bool:
        d = max(self.dim[x], self.dim[y])
        if not 0 <= j < d:
            return False
        return self.t(y, j) == self.s(x, j)

    def compose(self, j: int, x: str, y: str) -> str:
        """``x o_j y``, lifting the lower-dimensional argument if needed."""
        d = max(self.dim[x], self.dim[y])
        if not 0 <= j < d:
            raise CompositionError(f"o_{j} undefined in dimension {d}")
        x, y = self.lift(x, d), self.lift(y, d)
        out = self.comp.get((j, x, y))
        if out is None:
            raise CompositionError(f"{x} o_{j} {y} is undefined")
        return out

    def comp_chain(self, j: int, *xs: str) -> str:
        """``x_1 o_j x_2 o_j ... o_j x_n`` (the last one first)."""
        acc = xs[-1]
        for x in reversed(xs[:-1]):
            acc = self.compose(j, x, acc)
        return acc

    def hom(self, x: str, y: str) -> list[str]:
        """Cells one dimension up with source ``x`` and target ``y``."""
        d = self.dim[x] + 1
        if d > TOP:
            return []
        return [c for c in self.cells[d] if self.src[c] == x and self.tgt[c] == y]

    def counts(self) -> list[int]:
        return [len(level) for level in self.cells]

    def nontrivial_counts(self) -> list[int]:
        return [sum(1 for x in level if not self.is_identity(x)) for level in self.cells]

    def __repr__(self):
        return f"FiniteThreeCat({self.name or '?'}, cells={self.counts()})"

    def __eq__(self, other):
        return (
            isinstance(other, FiniteThreeCat)
            and self.cells == other.cells
            and self.src == other.src
            and self.tgt == other.tgt
            and self.ident == other.ident
            and self.comp == other.comp
        )

    def __hash__(self):
        return hash(self.cells)

    # -- serialisation -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "cells": [list(level) for level in self.cells],
            "src": dict(sorted(self.src.items())),
            "tgt": dict(sorted(self.tgt.items())),
            "id": dict(sorted(self.ident.items())),
            "comp": [
                {"j": j, "x": x, "y": y, "out": out}
                for (j, x, y), out in sorted(self.comp.items())
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "FiniteThreeCat":
        comp = {(int(r["j"]), str(r["x"]), str(r["y"])): str(r["out"]) for r in data["comp"]}
        return cls(data["cells"], data["src"], data["tgt"], data["id"], comp, data.get("name", ""))

    def renamed(self, names: Mapping[str, str], name: str | None = None) -> "FiniteThreeCat":
        r = lambda x: names.get(x, x)
        return FiniteThreeCat(
            [[r(x) for x in level] for level in self.cells],
            {r(k): r(v) for k, v in self.src.items()},
            {r(k): r(v) for k, v in self.tgt.items()},
            {r(k): r(v) for k, v in self.ident.items()},
            {(j, r(x), r(y)): r(o) for (j, x, y), o in self.comp.items()},
            self.name if name is None else name,
        )


# -- building tables ---------------------------------------------------------


def composable_pairs(
    cells: Sequence[Sequence[str]],
    s_j: Callable[[str, int], str],
    t_j: Callable[[str, int], str],
) -> Iterable[tuple[int, str, str]]:
    """All ``(j, x, y)`` with ``x, y`` of equal dimension ``d > j`` and ``t_j(y) = s_j(x)``."""
    for d in range(1, TOP + 1):
        level = cells[d]
        for j in range(d):
            by_source = defaultdict(list)
            for x in level:
                by_source[s_j(x, j)].append(x)
            for y in level:
                for x in by_source.get(t_j(y, j), ()):
                    yield j, x, y


def fill_table(
    cells: Sequence[Sequence[str]],
    src: Mapping[str, str],
    tgt: Mapping[str, str],
    compose: Callable[[int, str, str], str],
) -> dict[tuple[int, str, str], str]:
    dim = {x: d for d, level in enumerate(cells) for x in level}

    def s_j(x, j):
        while dim[x] > j:
            x = src[x]
        return x

    def t_j(x, j):
        while dim[x] > j:
            x = tgt[x]
        return x

    return {(j, x, y): compose(j, x, y) for j, x, y in composable_pairs(cells, s_j, t_j)}


def _identity_name(x: str) -> str:
    return f"1({x})"


def from_generators(
    gens: Sequence[tuple[str, int, str | None, str | None]],
    extra: Mapping[tuple[int, str, str], str] | None = None,
    name: str = "",
) -> FiniteThreeCat:
    """Category on the given cells plus iterated identities.

    Composites with an identity argument follow the unit laws; every other
    composable pair must be listed in ``extra``.
    """
    extra = dict(extra or {})
    cells: list[list[str]] = [[] for _ in range(TOP + 1)]
    src: dict[str, str] = {}
    tgt: dict[str, str] = {}
    ident: dict[str, str] = {}
    base: dict[str, str] = {}
    for gname, d, s, t in gens:
        cells[d].append(gname)
        if d > 0:
            src[gname], tgt[gname] = s, t
    for d in range(TOP):
        for x in list(cells[d]):
            i = _identity_name(x)
            cells[d + 1].append(i)
            src[i] = tgt[i] = x
            ident[x] = i
            base[i] = base.get(x, x)
    dim = {x: d for d, level in enumerate(cells) for x in level}

    def s_j(x, j):
        while dim[x] > j:
            x = src[x]
        return x

    def compose(j, x, y):
        d = dim[x]
        if x == _lift(ident, dim, s_j(x, j), d):
            return y
        if y == _lift(ident, dim, _t_j(tgt, dim, y, j), d):
            return x
        if (j, x, y) in extra:
            return extra[(j, x, y)]
        raise CompositionError(f"no rule for {x} o_{j} {y}")

    comp = fill_table(cells, src, tgt, compose)
    return FiniteThreeCat(cells, src, tgt, ident, comp, name)


def from_one_category(
    objects: Sequence[str],
    arrows: Mapping[str, tuple[str, str]],
    identity: Mapping[str, str],
    composite: Mapping[tuple[str, str], str],
    name: str = "",
) -> FiniteThreeCat:
    """A 1-category seen as a 3-category whose 2- and 3-cells are identities.

    ``arrows`` includes the identity arrows named by ``identity``;
    ``composite[(g, f)]`` is ``g o f`` and must cover every composable pair.
    """
    cells: list[list[str]] = [list(objects), list(arrows), [], []]
    src = {f: st[0] for f, st in arrows.items()}
    tgt = {f: st[1] for f, st in arrows.items()}
    ident = dict(identity)
    base = {f: f for f in arrows}
    dim = {f: 1 for f in arrows}
    for d in (1, 2):
        for x in cells[d]:
            i = _identity_name(x)
            cells[d + 1].append(i)
            src[i] = tgt[i] = x
            ident[x] = i
            base[i] = base[x]
            dim[i] = d + 1

    def compose(j: int, x: str, y: str) -> str:
        if j > 0:
            # parallel identities: both sides agree
            return y if j < dim[x] - 1 else x
        try:
            out = composite[(base[x], base[y])]
        except KeyError:
            raise CompositionError(f"no composite for {base[x]} o {base[y]}") from None
        for _ in range(dim[x] - 1):
            out = ident[out]
        return out

    comp = fill_table(cells, src, tgt, compose)
    return FiniteThreeCat(cells, src, tgt, ident, comp, name)


def _lift(ident, dim, x, d):
    while dim[x] < d:
        x = ident[x]
    return x


def _t_j(tgt, dim, x, j):
    while dim[x] > j:
        x = tgt[x]
    return x


def make_disk(i: int) -> FiniteThreeCat:
    """The disk ``D_i``: one principal ``i``-cell with its iterated sources and targets."""
    if not 0 <= i <= TOP:
        raise ValueError("disk dimension must be in 0..3")
    lower = [("a", "b"), ("f", "g"), ("alpha", "beta")]
    gens: list[tuple[str, int, str | None, str | None]] = []
    top_names = ["a", "f", "alpha", "gamma"]
    for d in range(i):
        s, t = lower[d]
        ps, pt = (lower[d - 1][0], lower[d - 1][1]) if d > 0 else (None, None)
        gens.append((s, d, ps, pt))
        gens.append((t, d, ps, pt))
    if i == 0:
        gens.append(("a", 0, None, None))
    else:
        gens.append((top_names[i], i, lower[i - 1][0], lower[i - 1][1]))
    return from_generators(gens, name=f"D{i}")


def make_invertible_disk3() -> FiniteThreeCat:
    """Two parallel 2-cells joined by an invertible 3-cell ``tau_d`` with inverse ``tau_u``."""
    gens = [
        ("a", 0, None, None),
        ("b", 0, None, None),
        ("f", 1, "a", "b"),
        ("g", 1, "a", "b"),
        ("alpha_l", 2, "f", "g"),
        ("alpha_r", 2, "f", "g"),
        ("tau_d", 3, "alpha_l", "alpha_r"),
        ("tau_u", 3, "alpha_r", "alpha_l"),
    ]
    extra = {
        (2, "tau_u", "tau_d"): "1(alpha_l)",
        (2, "tau_d", "tau_u"): "1(alpha_r)",
    }
    return from_generators(gens, extra, name="D3sharp")


# -- truncation of nu(K) ---------------------------------------------------------


class _UnionFind:
    def __init__(self, items: Iterable[str]):
        self.parent = {x: x for x in items}

    def find(self, x: str) -> str:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: str, b: str) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass
class TruncationData:
    """Bookkeeping kept alongside a truncated category."""

    cells: dict[str, NuCell] = field(default_factory=dict)
    class_of: dict[str, str] = field(default_factory=dict)
    members: dict[str, list[str]] = field(default_factory=dict)


def truncate_cells(levels: Sequence[Sequence[NuCell]], name: str = "") -> tuple[FiniteThreeCat, TruncationData]:
    """Intelligent 3-truncation of a family of nu cells given up to dimension 4.

    3-cells connected by a 4-cell are identified; compositions of classes are
    computed on every pair of representatives and must agree.
    """
    data = TruncationData()
    for level in levels[: TOP + 2]:
        for c in level:
            data.cells[cell_key(c)] = c
    keys3 = [cell_key(c) for c in levels[3]] if len(levels) > 3 else []
    uf = _UnionFind(keys3)
    if len(levels) > 4:
        for z in levels[4]:
            if is_identity(z):
                continue
            uf.union(cell_key(cell_source(z)), cell_key(cell_target(z)))
    for k in keys3:
        data.class_of[k] = uf.find(k)
        data.members.setdefault(uf.find(k), []).append(k)
    for d in range(TOP):
        for c in levels[d]:
            k = cell_key(c)
            data.class_of[k] = k
            data.members[k] = [k]
    cells: list[list[str]] = [[cell_key(c) for c in levels[d]] for d in range(TOP)]
    cells.append([k for k in keys3 if data.class_of[k] == k])
    src: dict[str, str] = {}
    tgt: dict[str, str] = {}
    ident: dict[str, str] = {}
    for d in range(1, TOP + 1):
        for k in cells[d]:
            c = data.cells[k]
            src[k] = cell_key(cell_source(c))
            tgt[k] = cell_key(cell_target(c))
    for d in range(TOP):
        for k in cells[d]:
            ident[k] = data.class_of[cell_key(cell_identity(data.cells[k]))]

    def compose(j: int, x: str, y: str) -> str:
        outs = set()
        for xr in data.members[x]:
            for yr in data.members[y]:
                out = cell_key(cell_compose(data.cells[xr], data.cells[yr], j))
                if out not in data.class_of:
                    raise QuotientError(f"composite {out} is outside the enumerated cells")
                outs.add(data.class_of[out])
        if len(outs) != 1:
            raise QuotientError(f"{x} o_{j} {y} is not well defined on classes: {sorted(outs)}")
        return outs.pop()

    comp = fill_table(cells, src, tgt, compose)
    return FiniteThreeCat(cells, src, tgt, ident, comp, name), data


def truncate_from_adc(K: ADC, coeff_cap: int = 1, name: str = "") -> FiniteThreeCat:
    return truncate_with_data(K, coeff_cap, name)[0]


def truncate_with_data(K: ADC, coeff_cap: int = 1, name: str = "") -> tuple[FiniteThreeCat, TruncationData]:
    levels = enumerate_cells(K, TOP + 1, coeff_cap)
    return truncate_cells(levels, name)


# -- validation --------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str
    witness: tuple

    def to_json(self) -> dict:
        return {"kind": self.kind, "witness": list(self.witness)}


def validate_cat(A: FiniteThreeCat, sample: int | None = None, seed: int = 0) -> list[Violation]:
    """Exhaustive check of the strict 3-category axioms.

    Structural and per-entry checks run first; the associativity and exchange
    laws are only checked once those pass.  With ``sample`` set, at most that
    many triples/quadruples are drawn at random for the last two laws.
    """
    out: list[Violation] = []
    dim = A.dim
    for d in range(1, TOP + 1):
        for x in A.cells[d]:
            if x not in A.src or x not in A.tgt:
                out.append(Violation("missing-boundary", (x,)))
                continue
            if dim.get(A.src[x]) != d - 1 or dim.get(A.tgt[x]) != d - 1:
                out.append(Violation("boundary-dimension", (x,)))
    if out:
        return out
    for d in range(2, TOP + 1):
        for x in A.cells[d]:
            if A.src[A.src[x]] != A.src[A.tgt[x]] or A.tgt[A.src[x]] != A.tgt[A.tgt[x]]:
                out.append(Violation("globularity", (x,)))
    for d in range(TOP):
        for x in A.cells[d]:
            i = A.ident.get(x)
            if i is None or dim.get(i) != d + 1:
                out.append(Violation("missing-identity", (x,)))
            elif A.src[i] != x or A.tgt[i] != x:
                out.append(Violation("identity-boundary", (x,)))
    if out:
        return out

    expected = set(composable_pairs(A.cells, A.s, A.t))
    for key in sorted(expected - set(A.comp)):
        out.append(Violation("composite-missing", key))
    for key in sorted(set(A.comp) - expected):
        out.append(Violation("composite-spurious", key))
    if out:
        return out

    for (j, x, y), o in sorted(A.comp.items()):
        reasons = _entry_problems(A, j, x, y, o)
        if reasons:
            out.append(Violation("composite-entry", (j, x, y, o, ",".join(reasons))))
    if out:
        return out

    out.extend(_associativity(A, sample, seed))
    out.extend(_exchange(A, sample, seed))
    return out


def _entry_problems(A: FiniteThreeCat, j: int, x: str, y: str, o: str) -> list[str]:
    reasons = []
    d = A.dim[x]
    if A.dim.get(o) != d:
        return ["dimension"]
    if A.s(o, j) != A.s(y, j) or A.t(o, j) != A.t(x, j):
        reasons.append("j-boundary")
    elif j == d - 1:
        if A.src[o] != A.src[y] or A.tgt[o] != A.tgt[x]:
            reasons.append("boundary")
    else:
        try:
            if A.src[o] != A.compose(j, A.src[x], A.src[y]) or A.tgt[o] != A.compose(j, A.tgt[x], A.tgt[y]):
                reasons.append("boundary")
        except CompositionError:
            reasons.append("boundary-undefined")
    if A.is_trivial_over(x, j) and o != y:
        reasons.append("left-unit")
    if A.is_trivial_over(y, j) and o != x:
        reasons.append("right-unit")
    if j < d - 1 and A.is_identity(x) and A.is_identity(y):
        # checked on the upper entry so that each corrupted entry is reported once
        x0, y0 = A.src[x], A.src[y]
        if A.comp.get((j, x0, y0)) is not None and o != A.ident[A.comp[(j, x0, y0)]]:
            reasons.append("identity-functoriality")
    return reasons


def _maybe_sample(items: list, sample: int | None, seed: int) -> list:
    if sample is None or len(items) <= sample:
        return items
    return random.Random(seed).sample(items, sample)


def _associativity(A: FiniteThreeCat, sample: int | None, seed: int) -> list[Violation]:
    out = []
    by_first = defaultdict(list)
    for (j, x, y), o in A.comp.items():
        by_first[(j, x)].append((y, o))
    triples = []
    for (j, x, y), xy in A.comp.items():
        for z, yz in by_first.get((j, y), ()):
            triples.append((j, x, y, z, xy, yz))
    for j, x, y, z, xy, yz in _maybe_sample(sorted(triples), sample, seed):
        if A.comp.get((j, xy, z)) != A.comp.get((j, x, yz)):
            out.append(Violation("associativity", (j, x, y, z)))
    return out


def _exchange(A: FiniteThreeCat, sample: int | None, seed: int) -> list[Violation]:
    """``(x o_j y) o_k (x' o_j y') = (x o_k x') o_j (y o_k y')`` for ``k < j``."""
    out = []
    cases = []
    for d in range(2, TOP + 1):
        for j in range(1, d):
            pairs = [(x, y, o) for (jj, x, y), o in A.comp.items() if jj == j and A.dim[x] == d]
            for k in range(j):
                by_src = defaultdict(list)
                for x, y, o in pairs:
                    by_src[A.s(o, k)].append((x, y, o))
                for xp, yp, op in pairs:
                    for x, y, o in by_src.get(A.t(op, k), ()):
                        cases.append((k, j, x, y, xp, yp, o, op))
    for k, j, x, y, xp, yp, o, op in _maybe_sample(sorted(cases), sample, seed):
        lhs = A.comp.get((k, o, op))
        xx = A.comp.get((k, x, xp))
        yy = A.comp.get((k, y, yp))
        rhs = A.comp.get((j, xx, yy)) if xx is not None and yy is not None else None
        if lhs is None or lhs != rhs:
            out.append(Violation("exchange", (k, j, x, y, xp, yp)))
    return out
