"""Planar rooted trees as shapes of globular pasting schemes.

A tree with root children ``T_1 .. T_r`` is the gluing over objects of the
suspensions of the ``T_k``; its matrix of dimensions lists the dimensions
``i_1 .. i_l`` of the glued disks and the dimensions ``j_1 .. j_{l-1}`` of
the cells they are glued along.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence


class TreeError(ValueError):
    pass


@dataclass(frozen=True)
class Tree:
    children: tuple["Tree", ...] = ()

    @classmethod
    def parse(cls, text: str) -> "Tree":
        """Read the bracket notation, e.g. ``[ [] [[]] ]``."""
        tokens = [c for c in text if c in "[]"]
        pos = 0

        def node() -> Tree:
            nonlocal pos
            if pos >= len(tokens) or tokens[pos] != "[":
                raise TreeError(f"malformed tree {text!r}")
            pos += 1
            kids = []
            while pos < len(tokens) and tokens[pos] == "[":
                kids.append(node())
            if pos >= len(tokens) or tokens[pos] != "]":
                raise TreeError(f"malformed tree {text!r}")
            pos += 1
            return Tree(tuple(kids))

        out = node()
        if pos != len(tokens):
            raise TreeError(f"trailing input in {text!r}")
        return out

    def __str__(self) -> str:
        if not self.children:
            return "[]"
        return "[" + " ".join(str(c) for c in self.children) + "]"


@dataclass(frozen=True)
class DimensionMatrix:
    upper: tuple[int, ...]
    lower: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.upper) != len(self.lower) + 1:
            raise TreeError("need exactly one more upper entry than lower entries")
        if any(x < 0 for x in self.upper + self.lower):
            raise TreeError("dimensions are non-negative")
        for k, j in enumerate(self.lower):
            if not (self.upper[k] > j < self.upper[k + 1]):
                raise TreeError(f"inequality fails at position {k}: {self.upper[k]} > {j} < {self.upper[k + 1]}")

    def __str__(self) -> str:
        up = " ".join(map(str, self.upper))
        if not self.lower:
            return f"({up})"
        return f"({up} / {' '.join(map(str, self.lower))})"


def tree_dimension(t: Tree) -> int:
    """Number of edges."""
    return sum(1 + tree_dimension(c) for c in t.children)


def tree_height(t: Tree) -> int:
    if not t.children:
        return 0
    return 1 + max(tree_height(c) for c in t.children)


def matrix_from_tree(t: Tree) -> DimensionMatrix:
    if not t.children:
        return DimensionMatrix((0,))
    upper: list[int] = []
    lower: list[int] = []
    for k, child in enumerate(t.children):
        m = matrix_from_tree(child)
        if k:
            lower.append(0)
        upper.extend(i + 1 for i in m.upper)
        lower.extend(j + 1 for j in m.lower)
    return DimensionMatrix(tuple(upper), tuple(lower))


def tree_from_matrix(m: DimensionMatrix) -> Tree:
    if m.upper == (0,):
        return Tree()
    if 0 in m.upper:
        raise TreeError(f"{m} mixes a 0-disk with higher disks")
    # split at the positions glued along objects
    children = []
    start = 0
    cuts = [k for k, j in enumerate(m.lower) if j == 0] + [len(m.lower)]
    for cut in cuts:
        upper = tuple(i - 1 for i in m.upper[start:cut + 1])
        lower = tuple(j - 1 for j in m.lower[start:cut])
        children.append(tree_from_matrix(DimensionMatrix(upper, lower)))
        start = cut + 1
    return Tree(tuple(children))


def matrix_dimension(m: DimensionMatrix) -> int:
    return sum(m.upper) - sum(m.lower)


def random_matrix(rng: random.Random, max_len: int = 6, max_dim: int = 4) -> DimensionMatrix:
    """A random valid matrix, used for round-trip tests."""
    length = rng.randint(1, max_len)
    upper = [rng.randint(1, max_dim) for _ in range(length)]
    lower = [rng.randint(0, min(upper[k], upper[k + 1]) - 1) for k in range(length - 1)]
    return DimensionMatrix(tuple(upper), tuple(lower))


def _m(upper: Sequence[int], lower: Sequence[int] = ()) -> Tree:
    return tree_from_matrix(DimensionMatrix(tuple(upper), tuple(lower)))


# Shapes of the data of a normalised oplax 3-functor.
DATA_TREES: dict[str, Tree] = {
    "DOT": Tree(),
    "L": _m([1]),
    "LL": _m([2]),
    "LLL": _m([3]),
    "V": _m([1, 1], [0]),
    "W": _m([1, 1, 1], [0, 0]),
    "VR": _m([1, 2], [0]),
    "VL": _m([2, 1], [0]),
}

# Shapes of the coherences; Y has dimension 3, all others dimension 4.
COHERENCE_TREES: dict[str, Tree] = {
    "Y": _m([2, 2], [1]),
    "VV": _m([1, 1, 1, 1], [0, 0, 0]),
    "W_left": _m([2, 1, 1], [0, 0]),
    "W_mid": _m([1, 2, 1], [0, 0]),
    "W_right": _m([1, 1, 2], [0, 0]),
    "VR_Y": _m([1, 2, 2], [0, 1]),
    "VL_Y": _m([2, 2, 1], [1, 0]),
    "VLR": _m([2, 2], [0]),
    "YY": _m([2, 2, 2], [1, 1]),
    "LLLL": _m([3, 3], [2]),
    "LLL_LL": _m([3, 2], [1]),
    "LL_LLL": _m([2, 3], [1]),
    "LLL_L": _m([3, 1], [0]),
    "L_LLL": _m([1, 3], [0]),
}

NORMALISATION_FAMILIES: tuple[str, ...] = ("L", "LL", "V", "LLL", "W", "VR", "VL")
