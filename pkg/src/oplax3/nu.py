"""Cells of the strict omega-category nu(K) of an augmented directed complex.

An ``i``-cell is a pair of rows ``(x^0_0, ..., x^0_i)`` and
``(x^1_0, ..., x^1_i)`` of positive chains with ``d(x^e_k) = x^1_{k-1} - x^0_{k-1}``,
augmentation 1 in degree 0 and equal top entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .adc import ADC, AtomMatrix
from .chains import Chain, chain_add, format_chain, is_positive


class NuError(ValueError):
    pass


@dataclass(frozen=True)
class NuCell:
    dim: int
    row0: tuple[Chain, ...]
    row1: tuple[Chain, ...]

    def __post_init__(self):
        if len(self.row0) != self.dim + 1 or len(self.row1) != self.dim + 1:
            raise NuError("rows must have dim + 1 entries")
        for k in range(self.dim + 1):
            if self.row0[k].degree != k or self.row1[k].degree != k:
                raise NuError(f"entry {k} has the wrong degree")

    @property
    def top(self) -> Chain:
        return self.row0[-1]

    def entry(self, eps: int, k: int) -> Chain:
        """``x^eps_k``, zero above the dimension."""
        if k > self.dim:
            return Chain(k)
        return (self.row0 if eps == 0 else self.row1)[k]

    @property
    def key(self) -> str:
        return cell_key(self)

    def __str__(self) -> str:
        return self.key

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "row0": [c.to_json() for c in self.row0],
            "row1": [c.to_json() for c in self.row1],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "NuCell":
        return cls(
            int(data["dim"]),
            tuple(Chain.from_json(c) for c in data["row0"]),
            tuple(Chain.from_json(c) for c in data["row1"]),
        )


def cell_key(x: NuCell) -> str:
    """Readable canonical identifier, e.g. ``2:(0)|(0-2)|(0-1-2);(2)|(0-1)+(1-2)|(0-1-2)``."""
    r0 = "|".join(format_chain(c) for c in x.row0)
    r1 = "|".join(format_chain(c) for c in x.row1)
    return f"{x.dim}:{r0};{r1}"


def from_atom(m: AtomMatrix) -> NuCell:
    return NuCell(m.dim, tuple(m.row0), tuple(m.row1))


def is_cell(K: ADC, m: NuCell | AtomMatrix) -> bool:
    """The four defining conditions of a cell of nu(K)."""
    rows = (m.row0, m.row1)
    i = m.dim
    for row in rows:
        for k in range(i + 1):
            if not is_positive(row[k]):
                return False
        for k in range(1, i + 1):
            if K.d(row[k]) != chain_add(m.row1[k - 1], -m.row0[k - 1]):
                return False
        if K.e(row[0]) != 1:
            return False
    return m.row0[i] == m.row1[i]


def cell_source(x: NuCell) -> NuCell:
    if x.dim == 0:
        raise NuError("a 0-cell has no source")
    i = x.dim
    return NuCell(i - 1, x.row0[:i], x.row1[: i - 1] + (x.row0[i - 1],))


def cell_target(x: NuCell) -> NuCell:
    if x.dim == 0:
        raise NuError("a 0-cell has no target")
    i = x.dim
    return NuCell(i - 1, x.row0[: i - 1] + (x.row1[i - 1],), x.row1[:i])


def iterated_source(x: NuCell, j: int) -> NuCell:
    while x.dim > j:
        x = cell_source(x)
    return x


def iterated_target(x: NuCell, j: int) -> NuCell:
    while x.dim > j:
        x = cell_target(x)
    return x


def cell_identity(x: NuCell) -> NuCell:
    z = Chain(x.dim + 1)
    return NuCell(x.dim + 1, x.row0 + (z,), x.row1 + (z,))


def lift(x: NuCell, dim: int) -> NuCell:
    """Iterated identity of ``x`` in dimension ``dim``."""
    while x.dim < dim:
        x = cell_identity(x)
    return x


def is_identity(x: NuCell) -> bool:
    return x.dim > 0 and x.top.is_zero()


def composable(x: NuCell, y: NuCell, j: int) -> bool:
    """Whether ``x *_j y`` is defined: the ``j``-target of ``y`` is the ``j``-source of ``x``."""
    if not 0 <= j < max(x.dim, y.dim):
        return False
    return iterated_target(y, j) == iterated_source(x, j)


def cell_compose(x: NuCell, y: NuCell, j: int) -> NuCell:
    """``x *_j y`` (``y`` first).

    Cells of different dimension are first lifted to the larger dimension by
    identities, which is how whiskerings are written.
    """
    dim = max(x.dim, y.dim)
    if not 0 <= j < dim:
        raise NuError(f"j={j} out of range for dimension {dim}")
    x, y = lift(x, dim), lift(y, dim)
    if iterated_target(y, j) != iterated_source(x, j):
        raise NuError(f"cells are not {j}-composable")
    row0 = list(y.row0[: j + 1])
    row1 = list(x.row1[: j + 1])
    for k in range(j + 1, dim + 1):
        row0.append(chain_add(x.row0[k], y.row0[k]))
        row1.append(chain_add(x.row1[k], y.row1[k]))
    return NuCell(dim, tuple(row0), tuple(row1))


def map_cell(x: NuCell, f) -> NuCell:
    """Apply a chain map ``f`` entry-wise."""
    return NuCell(x.dim, tuple(f(c) for c in x.row0), tuple(f(c) for c in x.row1))


def _vectors(n: int, cap: int) -> np.ndarray:
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(product(range(cap + 1), repeat=n)), dtype=np.int64)


def _zero_cells(K: ADC, cap: int) -> list[NuCell]:
    names = K.basis_at(0)
    aug = np.array([K.aug[n] for n in names], dtype=np.int64)
    out = []
    for vec in _vectors(len(names), cap):
        if int(vec @ aug) == 1:
            ch = K.chain(0, vec)
            out.append(NuCell(0, (ch,), (ch,)))
    return out


def enumerate_cells(K: ADC, max_dim: int = 3, coeff_cap: int = 1) -> list[list[NuCell]]:
    """All cells of nu(K) of dimension <= ``max_dim`` with coefficients in ``[0, coeff_cap]``.

    An ``i``-cell is determined by its source and its top entry, the target
    top entry being ``s_top + d(x_i)``; so cells are generated dimension by
    dimension from their sources.  Returns one list per dimension.
    """
    if coeff_cap < 1:
        raise NuError("coeff_cap must be at least 1")
    levels = [_zero_cells(K, coeff_cap)]
    for i in range(1, max_dim + 1):
        prev = levels[-1]
        if not prev:
            levels.append([])
            continue
        names = K.basis_at(i)
        cand = _vectors(len(names), coeff_cap)
        tops = [K.chain(i, v) for v in cand]
        D = K.diff_matrix(i) if names else np.zeros((len(K.basis_at(i - 1)), 0), dtype=np.int64)
        boundary = cand @ D.T
        out = []
        for s in prev:
            s_top = K.vector(s.top)
            t_tops = boundary + s_top
            ok = np.all((t_tops >= 0) & (t_tops <= coeff_cap), axis=1)
            for idx in np.nonzero(ok)[0]:
                t_top = K.chain(i - 1, t_tops[idx])
                x_i = tops[idx]
                row0 = s.row0 + (x_i,)
                row1 = s.row1[:-1] + (t_top, x_i)
                out.append(NuCell(i, row0, row1))
        levels.append(out)
    return levels


def hom_filter(cells: Sequence[NuCell], f: NuCell, g: NuCell) -> list[NuCell]:
    """Cells whose 1-dimensional source is ``f`` and 1-dimensional target is ``g``."""
    return [c for c in cells if c.dim >= 1 and iterated_source(c, 1) == f and iterated_target(c, 1) == g]


def law_violations(K: ADC, levels: Sequence[Sequence[NuCell]]) -> list[tuple[str, tuple]]:
    """Exhaustive check of the strict omega-category laws on a finite family of cells.

    Covers cell conditions, globularity, units, associativity, exchange and
    closure of composites under the family.  Returns ``(law, witness)`` pairs.
    """
    out: list[tuple[str, tuple]] = []
    known = {c for level in levels for c in level}
    for level in levels:
        for x in level:
            if not is_cell(K, x):
                out.append(("cell", (x.key,)))
            if x.dim >= 2:
                s, t = cell_source(x), cell_target(x)
                if cell_source(s) != cell_source(t) or cell_target(s) != cell_target(t):
                    out.append(("globularity", (x.key,)))
    for level in levels:
        for x in level:
            for j in range(x.dim):
                left = lift(iterated_target(x, j), x.dim)
                right = lift(iterated_source(x, j), x.dim)
                if cell_compose(left, x, j) != x or cell_compose(x, right, j) != x:
                    out.append(("unit", (x.key, j)))
    for d, level in enumerate(levels):
        for j in range(d):
            by_source: dict[NuCell, list[NuCell]] = {}
            for x in level:
                by_source.setdefault(iterated_source(x, j), []).append(x)
            pairs = [(x, y) for y in level for x in by_source.get(iterated_target(y, j), ())]
            composite = {}
            for x, y in pairs:
                xy = cell_compose(x, y, j)
                composite[(x, y)] = xy
                if xy not in known or not is_cell(K, xy):
                    out.append(("closure", (x.key, y.key, j)))
            after: dict[NuCell, list[NuCell]] = {}
            for x, y in pairs:
                after.setdefault(y, []).append(x)
            for (y, z), yz in composite.items():
                for x in after.get(y, ()):
                    if cell_compose(composite[(x, y)], z, j) != cell_compose(x, yz, j):
                        out.append(("associativity", (x.key, y.key, z.key, j)))
            for k in range(j):
                for x, y in pairs:
                    for xp, yp in pairs:
                        if not composable(composite[(x, y)], composite[(xp, yp)], k):
                            continue
                        lhs = cell_compose(composite[(x, y)], composite[(xp, yp)], k)
                        rhs = cell_compose(cell_compose(x, xp, k), cell_compose(y, yp, k), j)
                        if lhs != rhs:
                            out.append(("exchange", (x.key, y.key, xp.key, yp.key, k, j)))
    return out
