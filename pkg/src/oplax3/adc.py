"""Augmented directed complexes with basis.

An ADC here is always free on a finite graded basis: the positivity
submonoid in each degree is the cone of non-negative combinations of the
basis, so it is determined by the basis and not stored separately.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Mapping, Sequence

import networkx as nx
import numpy as np

from .chains import (
    Chain,
    chain_sum,
    decompose_pm,
    name_key,
    scale,
    simplex_name,
    support,
)


class ADCError(ValueError):
    pass


class Poset:
    """A finite poset given by its elements and strict order relation.

    Elements are listed in a fixed linear extension, which fixes the
    canonical names of chains.
    """

    def __init__(self, elements: Sequence[Hashable], less: Iterable[tuple[Hashable, Hashable]]):
        elements = list(elements)
        if len(set(elements)) != len(elements):
            raise ADCError("duplicate poset elements")
        for e in elements:
            if "-" in str(e):
                raise ADCError(f"element name {e!r} may not contain '-'")
        index = {e: i for i, e in enumerate(elements)}
        rel = set()
        for a, b in less:
            if a not in index or b not in index:
                raise ADCError(f"relation mentions unknown element {(a, b)!r}")
            rel.add((a, b))
        for a, b in rel:
            if a == b:
                raise ADCError(f"strict order is not irreflexive at {a!r}")
            if (b, a) in rel:
                raise ADCError(f"relation is not antisymmetric at {(a, b)!r}")
        for a, b in rel:
            for c, d in rel:
                if b == c and (a, d) not in rel:
                    raise ADCError(f"relation is not transitive at {(a, b, d)!r}")
        graph = nx.DiGraph()
        graph.add_nodes_from(elements)
        graph.add_edges_from(rel)
        order = list(nx.lexicographical_topological_sort(graph, key=lambda e: index[e]))
        self.elements: tuple = tuple(order)
        self.less: frozenset = frozenset(rel)

    @classmethod
    def chain(cls, n: int) -> "Poset":
        """The totally ordered set ``[n] = {0 < 1 < ... < n}``."""
        return cls(range(n + 1), [(i, j) for i in range(n + 1) for j in range(i + 1, n + 1)])

    def lt(self, a, b) -> bool:
        return (a, b) in self.less

    def le(self, a, b) -> bool:
        return a == b or (a, b) in self.less

    def chains(self, length: int) -> list[tuple]:
        """Strictly increasing tuples of ``length`` elements, in canonical order."""
        out = []
        for combo in combinations(self.elements, length):
            if all(self.lt(combo[i], combo[i + 1]) for i in range(length - 1)):
                out.append(combo)
        return out

    def __eq__(self, other):
        return isinstance(other, Poset) and self.elements == other.elements and self.less == other.less

    def __hash__(self):
        return hash((self.elements, self.less))

    def __repr__(self):
        return f"Poset({list(self.elements)!r}, {sorted(self.less, key=str)!r})"

    def to_json(self) -> dict:
        return {
            "elements": [str(e) for e in self.elements],
            "less": sorted([[str(a), str(b)] for a, b in self.less]),
        }


class ADC:
    """Augmented directed complex with a finite basis.

    ``basis[k]`` lists the names of degree-``k`` basis elements,
    ``diff`` maps every basis element of positive degree to its boundary,
    ``aug`` maps degree-0 basis elements to integers.
    """

    def __init__(
        self,
        basis: Sequence[Sequence[str]],
        diff: Mapping[str, Chain],
        aug: Mapping[str, int],
    ):
        self.basis: tuple[tuple[str, ...], ...] = tuple(tuple(b) for b in basis)
        while len(self.basis) > 1 and not self.basis[-1]:
            self.basis = self.basis[:-1]
        self.degree_of: dict[str, int] = {}
        for k, names in enumerate(self.basis):
            for name in names:
                if name in self.degree_of:
                    raise ADCError(f"basis name {name!r} is repeated")
                self.degree_of[name] = k
        self.index: list[dict[str, int]] = [{n: i for i, n in enumerate(b)} for b in self.basis]
        self.diff: dict[str, Chain] = {}
        for k, names in enumerate(self.basis):
            for name in names:
                if k == 0:
                    continue
                if name not in diff:
                    raise ADCError(f"missing differential for {name!r}")
                ch = diff[name]
                if ch.degree != k - 1:
                    raise ADCError(f"d({name}) has degree {ch.degree}, expected {k - 1}")
                for n in support(ch):
                    if self.degree_of.get(n) != k - 1:
                        raise ADCError(f"d({name}) mentions unknown element {n!r}")
                self.diff[name] = ch
        self.aug: dict[str, int] = {}
        for name in self.basis[0] if self.basis else ():
            if name not in aug:
                raise ADCError(f"missing augmentation for {name!r}")
            self.aug[name] = int(aug[name])
        self._check_complex()
        self._matrices: dict[int, np.ndarray] = {}

    @property
    def top(self) -> int:
        return len(self.basis) - 1

    def basis_at(self, k: int) -> tuple[str, ...]:
        if 0 <= k < len(self.basis):
            return self.basis[k]
        return ()

    def d(self, x: Chain) -> Chain:
        """Linearised differential; ``d`` of a degree-0 chain is rejected."""
        if x.degree == 0:
            raise ADCError("no differential in degree 0")
        return chain_sum((scale(self.diff[n], c) for n, c in x.items()), x.degree - 1)

    def e(self, x: Chain) -> int:
        if x.degree != 0:
            raise ADCError("augmentation only applies in degree 0")
        return sum(self.aug[n] * c for n, c in x.items())

    def _check_complex(self) -> None:
        for k in range(2, len(self.basis)):
            for name in self.basis[k]:
                if not self.d(self.diff[name]).is_zero():
                    raise ADCError(f"d(d({name})) != 0")
        if len(self.basis) > 1:
            for name in self.basis[1]:
                if self.e(self.diff[name]) != 0:
                    raise ADCError(f"e(d({name})) != 0")

    def diff_matrix(self, k: int) -> np.ndarray:
        """Integer matrix of ``d: K_k -> K_{k-1}`` in the basis order."""
        if k not in self._matrices:
            rows, cols = len(self.basis_at(k - 1)), len(self.basis_at(k))
            mat = np.zeros((rows, cols), dtype=np.int64)
            for j, name in enumerate(self.basis_at(k)):
                for n, c in self.diff[name].items():
                    mat[self.index[k - 1][n], j] = c
            self._matrices[k] = mat
        return self._matrices[k]

    def vector(self, x: Chain) -> np.ndarray:
        vec = np.zeros(len(self.basis_at(x.degree)), dtype=np.int64)
        for n, c in x.items():
            vec[self.index[x.degree][n]] = c
        return vec

    def chain(self, k: int, vec: Sequence[int]) -> Chain:
        names = self.basis_at(k)
        return Chain(k, {names[i]: int(c) for i, c in enumerate(vec) if c})

    def __eq__(self, other):
        return (
            isinstance(other, ADC)
            and self.basis == other.basis
            and self.diff == other.diff
            and self.aug == other.aug
        )

    def __hash__(self):
        return hash(self.basis)

    def __repr__(self):
        return f"ADC(sizes={[len(b) for b in self.basis]})"

    def to_json(self) -> dict:
        return {
            "basis": [list(b) for b in self.basis],
            "diff": {n: ch.to_json() for n, ch in sorted(self.diff.items(), key=lambda kv: name_key(kv[0]))},
            "aug": dict(sorted(self.aug.items(), key=lambda kv: name_key(kv[0]))),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ADC":
        diff = {str(n): Chain.from_json(ch) for n, ch in data.get("diff", {}).items()}
        return cls(data["basis"], diff, {str(k): int(v) for k, v in data["aug"].items()})


def _chain_complex_of_poset(poset: Poset) -> ADC:
    basis: list[list[str]] = []
    diff: dict[str, Chain] = {}
    length = 1
    while True:
        chains = poset.chains(length)
        if not chains:
            break
        basis.append([simplex_name(c) for c in chains])
        if length > 1:
            for c in chains:
                coeffs: dict[str, int] = {}
                for k in range(length):
                    face = simplex_name(c[:k] + c[k + 1:])
                    coeffs[face] = coeffs.get(face, 0) + (-1) ** k
                diff[simplex_name(c)] = Chain(length - 2, coeffs)
        length += 1
    if not basis:
        basis = [[]]
    aug = {name: 1 for name in basis[0]}
    return ADC(basis, diff, aug)


def simplex_complex(n: int) -> ADC:
    """The complex of the standard ``n``-simplex: alternating face sums, unit augmentation."""
    if n < 0:
        raise ADCError("n must be non-negative")
    return _chain_complex_of_poset(Poset.chain(n))


def oriental_complex(poset: Poset) -> ADC:
    """Complex generated by the strictly increasing chains of a finite poset."""
    return _chain_complex_of_poset(poset)


@dataclass(frozen=True)
class AtomMatrix:
    dim: int
    row0: tuple[Chain, ...]
    row1: tuple[Chain, ...]


def atom(K: ADC, x: Chain) -> AtomMatrix:
    """The matrix obtained from ``x`` by iterating negative/positive parts of boundaries."""
    i = x.degree
    row0 = [x]
    row1 = [x]
    for _ in range(i):
        _, minus = decompose_pm(K.d(row0[-1]))
        plus, _ = decompose_pm(K.d(row1[-1]))
        row0.append(minus)
        row1.append(plus)
    return AtomMatrix(i, tuple(reversed(row0)), tuple(reversed(row1)))


def basis_atoms(K: ADC) -> dict[str, AtomMatrix]:
    return {
        name: atom(K, Chain.basis(name, k))
        for k, names in enumerate(K.basis)
        for name in names
    }


def is_unital_basis(K: ADC) -> bool:
    for m in basis_atoms(K).values():
        if K.e(m.row0[0]) != 1 or K.e(m.row1[0]) != 1:
            return False
    return True


def _antisymmetric(edges: Iterable[tuple[str, str]], nodes: Iterable[str]) -> bool:
    graph = nx.DiGraph()
    graph.add_nodes_from(nodes)
    graph.add_edges_from((a, b) for a, b in edges if a != b)
    return nx.is_directed_acyclic_graph(graph)


def loop_free_relations(K: ADC) -> dict[int, list[tuple[str, str]]]:
    """Generating edges of the preorders ``<=_i``, one list per ``i``."""
    atoms = basis_atoms(K)
    rel: dict[int, list[tuple[str, str]]] = {}
    for i in range(K.top):
        high = [n for n, m in atoms.items() if m.dim > i]
        edges = []
        for x in high:
            sx = support(atoms[x].row1[i])
            for y in high:
                if sx & support(atoms[y].row0[i]):
                    edges.append((x, y))
        rel[i] = edges
    return rel


def is_loop_free(K: ADC) -> bool:
    nodes = list(K.degree_of)
    return all(_antisymmetric(edges, nodes) for edges in loop_free_relations(K).values())


def strong_relation(K: ADC) -> list[tuple[str, str]]:
    """Generating edges of the preorder ``<=_N``."""
    edges = []
    for y, dy in K.diff.items():
        plus, minus = decompose_pm(dy)
        for x in support(minus):
            edges.append((x, y))
        for z in support(plus):
            edges.append((y, z))
    return edges


def is_strongly_loop_free(K: ADC) -> bool:
    return _antisymmetric(strong_relation(K), K.degree_of)
