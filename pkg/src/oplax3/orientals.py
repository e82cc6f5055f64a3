"""Orientals of finite posets, their hom cells and two structural isomorphisms.

The oriental of a poset ``E`` is ``nu`` of the chain complex of strictly
increasing chains of ``E``.  Hom objects between parallel 1-cells are kept
as filtered lists of ambient cells: a ``k``-cell of ``Hom(f, g)`` is an
ambient ``(k + 2)``-cell whose iterated 1-source is ``f`` and 1-target ``g``.
"""

from __future__ import annotations

from functools import cached_property
from itertools import product
from typing import Callable, Hashable, Mapping, Sequence

from .adc import ADC, Poset, atom, oriental_complex
from .chains import Chain, simplex_name
from .nu import (
    NuCell,
    cell_compose,
    enumerate_cells,
    from_atom,
    iterated_source,
    iterated_target,
    map_cell,
)


class OrientalError(ValueError):
    pass


class OrientalHandle:
    """The oriental ``O_E`` with a lazily enumerated cell cache."""

    def __init__(self, poset: Poset, coeff_cap: int = 1):
        self.poset = poset
        self.complex: ADC = oriental_complex(poset)
        self.coeff_cap = coeff_cap
        self._levels: list[list[NuCell]] = []

    @classmethod
    def simplex(cls, n: int, coeff_cap: int = 1) -> "OrientalHandle":
        return cls(Poset.chain(n), coeff_cap)

    def cells(self, max_dim: int) -> list[list[NuCell]]:
        if len(self._levels) <= max_dim:
            self._levels = enumerate_cells(self.complex, max_dim, self.coeff_cap)
        return self._levels[: max_dim + 1]

    def generator(self, *vertices: Hashable) -> NuCell:
        """The atom ``<v0 ... vk>``."""
        name = simplex_name(vertices)
        if name not in self.complex.degree_of:
            raise OrientalError(f"{vertices!r} is not a chain of the poset")
        return from_atom(atom(self.complex, Chain.basis(name, len(vertices) - 1)))

    def path(self, vertices: Sequence[Hashable]) -> NuCell:
        """The 1-cell ``<v0 v1> + <v1 v2> + ...`` (an identity for one vertex)."""
        vertices = list(vertices)
        if len(vertices) == 1:
            v = Chain.basis(simplex_name(vertices), 0)
            return NuCell(1, (v, Chain(1)), (v, Chain(1)))
        edges = {}
        for a, b in zip(vertices, vertices[1:]):
            if not self.poset.lt(a, b):
                raise OrientalError(f"{a!r} < {b!r} fails")
            edges[simplex_name((a, b))] = 1
        x1 = Chain(1, edges)
        return NuCell(
            1,
            (Chain.basis(str(vertices[0]), 0), x1),
            (Chain.basis(str(vertices[-1]), 0), x1),
        )

    @cached_property
    def vertex_index(self) -> dict[str, Hashable]:
        return {str(e): e for e in self.poset.elements}


def hom_cells(O: OrientalHandle, f: NuCell, g: NuCell, max_dim: int = 3) -> list[NuCell]:
    """Ambient cells forming ``Hom(f, g)`` up to hom-dimension ``max_dim``."""
    if f.dim != 1 or g.dim != 1:
        raise OrientalError("hom_cells expects 1-cells")
    if iterated_source(f, 0) != iterated_source(g, 0) or iterated_target(f, 0) != iterated_target(g, 0):
        raise OrientalError("hom_cells expects parallel 1-cells")
    levels = O.cells(max_dim + 2)
    out = []
    for level in levels[2:]:
        for c in level:
            if iterated_source(c, 1) == f and iterated_target(c, 1) == g:
                out.append(c)
    return out


def hom_dimension(c: NuCell) -> int:
    return c.dim - 2


def _by_hom_dim(cells: Sequence[NuCell], max_dim: int) -> list[list[NuCell]]:
    out: list[list[NuCell]] = [[] for _ in range(max_dim + 1)]
    for c in cells:
        out[hom_dimension(c)].append(c)
    return out


def chain_map(j: Mapping[Hashable, Hashable]) -> Callable[[Chain], Chain]:
    """Chain map induced by a monotone poset map; degenerate images are zero."""
    names = {str(k): str(v) for k, v in j.items()}

    def apply(x: Chain) -> Chain:
        out: dict[str, int] = {}
        for name, c in x.items():
            verts = [names[v] for v in name.split("-")]
            if len(set(verts)) < len(verts):
                continue
            key = simplex_name(verts)
            out[key] = out.get(key, 0) + c
        return Chain(x.degree, out)

    return apply


def induced_functor(j: Mapping[Hashable, Hashable], source: Poset | None = None, target: Poset | None = None):
    """The strict functor ``O_E -> O_F`` of a monotone map, acting entry-wise on cells."""
    if source is not None and target is not None:
        for a in source.elements:
            for b in source.elements:
                if source.lt(a, b) and not target.le(j[a], j[b]):
                    raise OrientalError("map is not monotone")
    f = chain_map(j)
    return lambda x: map_cell(x, f)


def _bijective(mapping: Callable[[object], NuCell], domain: Sequence, codomain: Sequence[NuCell]) -> bool:
    images = [mapping(x) for x in domain]
    return len(set(images)) == len(images) and set(images) == set(codomain)


def check_horizontal_iso(n: int, cuts: Sequence[int], max_dim: int = 3, O: OrientalHandle | None = None) -> bool:
    """Horizontal composition ``Prod Hom(a_k, b_k) -> Hom(a, b)`` is a bijection on cells.

    ``a_k`` is the atom between consecutive cuts and ``b_k`` the unit-step path
    between them; ``a`` and ``b`` are their composites.
    """
    cuts = list(cuts)
    if n < 1 or len(cuts) < 2 or cuts[0] != 0 or cuts[-1] != n:
        raise OrientalError("cuts must run from 0 to n")
    if any(a >= b for a, b in zip(cuts, cuts[1:])):
        raise OrientalError("cuts must be strictly increasing")
    O = O or OrientalHandle.simplex(n)
    pieces = list(zip(cuts, cuts[1:]))
    factors = []
    for lo, hi in pieces:
        a_k = O.path([lo, hi])
        b_k = O.path(list(range(lo, hi + 1)))
        factors.append(_by_hom_dim(hom_cells(O, a_k, b_k, max_dim), max_dim))
    a = O.path(cuts)
    b = O.path(list(range(n + 1)))
    whole = _by_hom_dim(hom_cells(O, a, b, max_dim), max_dim)

    def compose(tup: Sequence[NuCell]) -> NuCell:
        acc = tup[0]
        for x in tup[1:]:
            acc = cell_compose(x, acc, 0)
        return acc

    for k in range(max_dim + 1):
        domain = list(product(*(f[k] for f in factors)))
        if not _bijective(compose, domain, whole[k]):
            return False
    return True


def check_suboriental_iso(
    j: Mapping[Hashable, Hashable],
    E: Poset,
    F: Poset,
    f: NuCell,
    g: NuCell,
    max_dim: int = 3,
) -> bool:
    """An injective monotone ``j: E -> F`` induces a bijection ``Hom(f, g) -> Hom(jf, jg)``."""
    if len(set(j[e] for e in E.elements)) != len(E.elements):
        raise OrientalError("map is not injective")
    for a in E.elements:
        for b in E.elements:
            if E.lt(a, b) and not F.lt(j[a], j[b]):
                raise OrientalError("map is not strictly monotone")
    OE, OF = OrientalHandle(E), OrientalHandle(F)
    J = induced_functor(j)
    src = _by_hom_dim(hom_cells(OE, f, g, max_dim), max_dim)
    tgt = _by_hom_dim(hom_cells(OF, J(f), J(g), max_dim), max_dim)
    return all(_bijective(J, src[k], tgt[k]) for k in range(max_dim + 1))
