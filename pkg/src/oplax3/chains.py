"""Integer chains over named graded bases.

A chain is a finite formal sum of basis elements of a single degree with
integer coefficients.  Basis elements are named by strings; for simplicial
complexes the canonical name of a vertex tuple ``(0, 1, 2)`` is ``"0-1-2"``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping


def simplex_name(vertices: Iterable[object]) -> str:
    """Canonical dash-separated name of a vertex tuple."""
    return "-".join(str(v) for v in vertices)


def name_key(name: str) -> tuple:
    """Sort key putting ``"2"`` before ``"10"`` and tuples in lexicographic order."""
    parts = name.split("-")
    return tuple((0, int(p), "") if p.lstrip("-").isdigit() else (1, 0, p) for p in parts)


@dataclass(frozen=True, slots=True)
class BasisElement:
    name: str
    degree: int

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise ValueError("basis element degree must be non-negative")


class Chain:
    """Immutable integer chain of a fixed degree.

    Zero coefficients are never stored, so equality and hashing are
    structural on the pruned coefficient map.
    """

    __slots__ = ("degree", "_items", "_hash")

    def __init__(self, degree: int, coeffs: Mapping[str, int] | None = None):
        if degree < 0:
            raise ValueError("chain degree must be non-negative")
        items = []
        if coeffs:
            for name, c in coeffs.items():
                c = int(c)
                if c:
                    items.append((name, c))
        items.sort(key=lambda kv: name_key(kv[0]))
        object.__setattr__(self, "degree", degree)
        object.__setattr__(self, "_items", tuple(items))
        object.__setattr__(self, "_hash", hash((degree, self._items)))

    def __setattr__(self, key, value):
        raise AttributeError("Chain is immutable")

    @classmethod
    def zero(cls, degree: int) -> "Chain":
        return cls(degree)

    @classmethod
    def basis(cls, name: str, degree: int) -> "Chain":
        return cls(degree, {name: 1})

    @classmethod
    def _from_items(cls, degree: int, items: tuple) -> "Chain":
        obj = object.__new__(cls)
        object.__setattr__(obj, "degree", degree)
        object.__setattr__(obj, "_items", items)
        object.__setattr__(obj, "_hash", hash((degree, items)))
        return obj

    @property
    def coeffs(self) -> dict[str, int]:
        return dict(self._items)

    def items(self) -> tuple[tuple[str, int], ...]:
        return self._items

    def __getitem__(self, name: str) -> int:
        for n, c in self._items:
            if n == name:
                return c
        return 0

    def is_zero(self) -> bool:
        return not self._items

    def __bool__(self) -> bool:
        return bool(self._items)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Chain):
            return NotImplemented
        return self.degree == other.degree and self._items == other._items

    def __hash__(self) -> int:
        return self._hash

    def __add__(self, other: "Chain") -> "Chain":
        return chain_add(self, other)

    def __neg__(self) -> "Chain":
        return negate(self)

    def __sub__(self, other: "Chain") -> "Chain":
        return chain_add(self, negate(other))

    def __rmul__(self, k: int) -> "Chain":
        return scale(self, k)

    def __repr__(self) -> str:
        return f"Chain({self.degree}, {dict(self._items)!r})"

    def __str__(self) -> str:
        return format_chain(self)

    def to_json(self) -> dict:
        return {"degree": self.degree, "coeffs": dict(self._items)}

    @classmethod
    def from_json(cls, data: Mapping) -> "Chain":
        coeffs = data.get("coeffs", {})
        if any(int(c) == 0 for c in coeffs.values()):
            raise ValueError("zero coefficient in serialised chain")
        return cls(int(data["degree"]), {str(k): int(v) for k, v in coeffs.items()})


def chain_add(a: Chain, b: Chain) -> Chain:
    if a.degree != b.degree:
        raise ValueError(f"degree mismatch: {a.degree} vs {b.degree}")
    if not b._items:
        return a
    if not a._items:
        return b
    acc = dict(a._items)
    for name, c in b._items:
        acc[name] = acc.get(name, 0) + c
    return Chain(a.degree, acc)


def negate(a: Chain) -> Chain:
    return Chain._from_items(a.degree, tuple((n, -c) for n, c in a._items))


def scale(a: Chain, k: int) -> Chain:
    if k == 0:
        return Chain(a.degree)
    return Chain._from_items(a.degree, tuple((n, k * c) for n, c in a._items))


def chain_sum(chains: Iterable[Chain], degree: int) -> Chain:
    acc: dict[str, int] = {}
    for ch in chains:
        if ch.degree != degree:
            raise ValueError(f"degree mismatch: {ch.degree} vs {degree}")
        for name, c in ch._items:
            acc[name] = acc.get(name, 0) + c
    return Chain(degree, acc)


def support(x: Chain) -> frozenset[str]:
    return frozenset(n for n, _ in x._items)


def decompose_pm(x: Chain) -> tuple[Chain, Chain]:
    """Split ``x`` as ``plus - minus`` with disjointly supported positive parts."""
    plus = tuple((n, c) for n, c in x._items if c > 0)
    minus = tuple((n, -c) for n, c in x._items if c < 0)
    return Chain._from_items(x.degree, plus), Chain._from_items(x.degree, minus)


def is_positive(x: Chain) -> bool:
    return all(c >= 0 for _, c in x._items)


def max_coeff(x: Chain) -> int:
    return max((abs(c) for _, c in x._items), default=0)


def format_chain(x: Chain) -> str:
    """Compact human-readable form, e.g. ``0-1+1-2`` or ``2*0-2``; zero is ``0``."""
    if not x._items:
        return "0"
    out = []
    for name, c in x._items:
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        term = name if mag == 1 else f"{mag}*{name}"
        out.append((sign, term))
    first_sign, first = out[0]
    text = ("-" if first_sign == "-" else "") + "(" + first + ")"
    for sign, term in out[1:]:
        text += f"{sign}({term})"
    return text
