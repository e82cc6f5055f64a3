"""Constraint cells of simplicial maps between nerves and the simplicial-oplax condition.

Each constraint cell is the tetrahedron label of the image of a fixed
3-simplex of the source nerve.  Templates list the edges ``01, 12, 23, 02,
03, 13`` and the triangles ``012, 023, 123, 013``; their tetrahedron label
is always an identity.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field
from functools import wraps
from typing import Iterator, Mapping

from .cat3 import CompositionError, FiniteThreeCat
from .nerve import Nerve, Simplex, SimplicialMap34, compose_maps, face, is_degenerate
from .oplax import Domains, simplex_from_labels

CONDITIONS = {1: "tau_d", 2: "gamma_l", 3: "eps_l"}


class SimplicialError(ValueError):
    pass


def _tet(A: FiniteThreeCat, edges: tuple[str, ...], tris: tuple[str, ...]) -> Simplex:
    e01, e12, e23, e02, e03, e13 = edges
    t012, t023, t123, t013 = tris
    # the tetrahedron carries an identity; its boundary fixes which one
    src = A.compose(1, A.compose(0, e23, t012), t023)
    return simplex_from_labels(
        A,
        3,
        {
            "01": e01, "12": e12, "23": e23, "02": e02, "03": e03, "13": e13,
            "012": t012, "023": t023, "123": t123, "013": t013,
            "0123": A.ident[src],
        },
    )


def _tri(A: FiniteThreeCat, e01: str, e12: str, e02: str, t: str) -> Simplex:
    return simplex_from_labels(A, 2, {"01": e01, "12": e12, "02": e02, "012": t})


_TEMPLATES: "weakref.WeakKeyDictionary[FiniteThreeCat, ConstraintTemplates]" = weakref.WeakKeyDictionary()


def _memo(method):
    @wraps(method)
    def cached(self, *args):
        key = (method.__name__, args)
        out = self._built.get(key)
        if out is None:
            out = self._built[key] = method(self, *args)
        return out

    return cached


class ConstraintTemplates:
    """Source 3-simplices of the constraint cells, and the 2-simplices bounding them.

    One instance is shared per source category, so every map out of it
    reuses the same template simplices.
    """

    def __new__(cls, A: FiniteThreeCat):
        # equal categories have equal templates
        self = _TEMPLATES.get(A)
        if self is None:
            self = _TEMPLATES[A] = super().__new__(cls)
            self.A = A
            self._built = {}
        return self

    def _unit(self, f: str, at: str = "src") -> str:
        A = self.A
        return A.ident[A.src[f] if at == "src" else A.tgt[f]]

    # 2-simplices
    @_memo
    def alpha_l(self, a: str) -> Simplex:
        A = self.A
        f, g = A.src[a], A.tgt[a]
        return _tri(A, self._unit(f), g, f, a)

    @_memo
    def alpha_r(self, a: str) -> Simplex:
        A = self.A
        f, g = A.src[a], A.tgt[a]
        return _tri(A, g, self._unit(f, "tgt"), f, a)

    @_memo
    def triangle(self, a: str, h: str, g: str) -> Simplex:
        """``a: f => h o g`` as a filled triangle."""
        return _tri(self.A, g, h, self.A.src[a], a)

    @_memo
    def composite_triangle(self, h: str, g: str) -> Simplex:
        A = self.A
        hg = A.compose(0, h, g)
        return _tri(A, g, h, hg, A.ident[hg])

    # 3-simplices
    @_memo
    def tau_u(self, a: str) -> Simplex:
        A = self.A
        f, g = A.src[a], A.tgt[a]
        u, v = self._unit(f), self._unit(f, "tgt")
        return _tet(A, (u, g, v, g, f, g), (A.ident[g], a, A.ident[g], a))

    @_memo
    def tau_d(self, a: str) -> Simplex:
        A = self.A
        f, g = A.src[a], A.tgt[a]
        u, v = self._unit(f), self._unit(f, "tgt")
        return _tet(A, (u, g, v, f, f, f), (a, A.ident[f], a, A.ident[f]))

    @_memo
    def gamma_l(self, a: str, h: str, g: str) -> Simplex:
        A = self.A
        f, hg = A.src[a], A.compose(0, h, g)
        u = self._unit(f)
        return _tet(A, (u, g, h, g, f, hg), (A.ident[g], a, A.ident[hg], a))

    @_memo
    def gamma_r(self, a: str, h: str, g: str) -> Simplex:
        A = self.A
        f, hg = A.src[a], A.compose(0, h, g)
        v = self._unit(f, "tgt")
        return _tet(A, (g, h, v, hg, f, h), (A.ident[hg], a, A.ident[h], a))

    @_memo
    def sigma(self, b: str, a: str) -> Simplex:
        A = self.A
        f, g, h = A.src[a], A.tgt[a], A.tgt[b]
        u, v = self._unit(f), self._unit(f, "tgt")
        return _tet(A, (u, h, v, g, f, g), (b, a, b, a))

    @_memo
    def eps_l(self, b: str, a: str, i: str, h: str) -> Simplex:
        """``a: f => g``, ``b: g => i o h``."""
        A = self.A
        f, g = A.src[a], A.tgt[a]
        v = self._unit(f, "tgt")
        return _tet(A, (h, i, v, g, f, i), (b, a, A.ident[i], A.compose(1, b, a)))

    @_memo
    def eps_r(self, b: str, a: str, i: str, h: str) -> Simplex:
        A = self.A
        f, g = A.src[a], A.tgt[a]
        u = self._unit(f)
        return _tet(A, (u, h, i, h, f, g), (A.ident[h], A.compose(1, b, a), b, a))

    @_memo
    def omega_r(self, b: str, a: str) -> Simplex:
        A = self.A
        f, g, h = A.src[a], A.tgt[a], A.tgt[b]
        u, v = self._unit(f), self._unit(f, "tgt")
        return _tet(A, (u, h, v, g, f, f), (b, a, A.compose(1, b, a), A.ident[f]))

    @_memo
    def omega_l(self, b: str, a: str) -> Simplex:
        A = self.A
        f, g, h = A.src[a], A.tgt[a], A.tgt[b]
        u, v = self._unit(f), self._unit(f, "tgt")
        return _tet(A, (u, h, v, f, f, g), (A.compose(1, b, a), A.ident[f], b, a))

    @_memo
    def f_gamma(self, G: str, which: int) -> Simplex:
        """The four 3-simplices carrying ``G: a => b`` (``a, b: f => g``) as tetrahedron."""
        A = self.A
        a, b = A.src[G], A.tgt[G]
        f, g = A.src[a], A.tgt[a]
        u, v = self._unit(f), self._unit(f, "tgt")
        i_f, i_g = A.ident[f], A.ident[g]
        e02, e13, tris = {
            1: (f, f, (a, i_f, b, i_f)),
            2: (f, g, (a, i_f, i_g, b)),
            3: (g, f, (i_g, a, b, i_f)),
            4: (g, g, (i_g, a, i_g, b)),
        }[which]
        return simplex_from_labels(
            A,
            3,
            {
                "01": u, "12": g, "23": v, "02": e02, "03": f, "13": e13,
                "012": tris[0], "023": tris[1], "123": tris[2], "013": tris[3],
                "0123": G,
            },
        )


# -- data of the source ------------------------------------------------------------


def triangle_data(A: FiniteThreeCat, D: Domains | None = None) -> Iterator[tuple[str, str, str]]:
    """``(a, h, g)`` with ``a: f => h o g``."""
    D = D or Domains(A)
    factor = D.factorisations()
    for a in A.cells[2]:
        for h, g in factor.get(A.tgt[a], ()):
            yield a, h, g


def eps_data(A: FiniteThreeCat, D: Domains | None = None) -> Iterator[tuple[str, str, str, str]]:
    """``(b, a, i, h)`` with ``a: f => g`` and ``b: g => i o h``."""
    D = D or Domains(A)
    factor = D.factorisations()
    for b, a in D.vertical_pairs():
        for i, h in factor.get(A.tgt[b], ()):
            yield b, a, i, h


# -- extraction -------------------------------------------------------------------------


@dataclass
class ConstraintCells:
    """Named principal 3-cells of the images of the constraint templates."""

    cells: dict[str, str] = field(default_factory=dict)

    def __getitem__(self, name: str) -> str:
        return self.cells[name]

    def to_json(self) -> dict:
        return dict(sorted(self.cells.items()))


def principal(F: SimplicialMap34, x: Simplex) -> str:
    return F(x).h(0, 1, 2, 3)


def extract_constraints(F: SimplicialMap34, kind: str, datum: tuple[str, ...]) -> ConstraintCells:
    """Constraint cells for one datum.

    ``kind`` is ``"two"`` for a 2-cell ``(a,)``, ``"triangle"`` for
    ``(a, h, g)``, ``"pair"`` for a vertical pair ``(b, a)``, ``"eps"`` for
    ``(b, a, i, h)`` and ``"three"`` for a 3-cell ``(G,)``.
    """
    T = ConstraintTemplates(F.source)
    out: dict[str, str] = {}
    if kind == "two":
        (a,) = datum
        out["tau_u"] = principal(F, T.tau_u(a))
        out["tau_d"] = principal(F, T.tau_d(a))
    elif kind == "triangle":
        out["gamma_l"] = principal(F, T.gamma_l(*datum))
        out["gamma_r"] = principal(F, T.gamma_r(*datum))
    elif kind == "pair":
        out["sigma"] = principal(F, T.sigma(*datum))
        out["omega_l"] = principal(F, T.omega_l(*datum))
        out["omega_r"] = principal(F, T.omega_r(*datum))
    elif kind == "eps":
        out["eps_l"] = principal(F, T.eps_l(*datum))
        out["eps_r"] = principal(F, T.eps_r(*datum))
    elif kind == "three":
        (G,) = datum
        for k in range(1, 5):
            out[f"F_gamma_{k}"] = principal(F, T.f_gamma(G, k))
    else:
        raise SimplicialError(f"unknown datum kind {kind!r}")
    return ConstraintCells(out)


@dataclass(frozen=True)
class ConditionViolation:
    condition: int
    witness: tuple[str, ...]
    cell: str

    def to_json(self) -> dict:
        return {"condition": self.condition, "name": CONDITIONS[self.condition], "witness": list(self.witness), "cell": self.cell}


def simplicial_oplax_violations(F: SimplicialMap34) -> list[ConditionViolation]:
    """Data where ``tau_d``, ``gamma_l`` or ``eps_l`` fails to be an identity."""
    A, B = F.source, F.target
    T = ConstraintTemplates(A)
    D = Domains(A)
    out = []
    for a in A.cells[2]:
        c = principal(F, T.tau_d(a))
        if not B.is_identity(c):
            out.append(ConditionViolation(1, (a,), c))
    for datum in triangle_data(A, D):
        c = principal(F, T.gamma_l(*datum))
        if not B.is_identity(c):
            out.append(ConditionViolation(2, datum, c))
    for datum in eps_data(A, D):
        c = principal(F, T.eps_l(*datum))
        if not B.is_identity(c):
            out.append(ConditionViolation(3, datum, c))
    return out


def is_simplicial_oplax(F: SimplicialMap34) -> bool:
    return not simplicial_oplax_violations(F)


def compose_simplicial(G: SimplicialMap34, F: SimplicialMap34) -> SimplicialMap34:
    return compose_maps(G, F)


# -- relations among constraint cells ------------------------------------------------


def find_inverse(B: FiniteThreeCat, x: str) -> str | None:
    """A two-sided ``o_2`` inverse of the 3-cell ``x``, if any."""
    for y in B.cells[3]:
        if B.src[y] != B.tgt[x] or B.tgt[y] != B.src[x]:
            continue
        if B.compose(2, y, x) == B.ident[B.src[x]] and B.compose(2, x, y) == B.ident[B.tgt[x]]:
            return y
    return None


@dataclass(frozen=True)
class RelationFailure:
    relation: str
    datum: tuple[str, ...]
    detail: str


def check_relations(F: SimplicialMap34) -> list[RelationFailure]:
    """The identities that hold for every simplicial map between nerves.

    Images of 2-simplices are computed independently of the constraint
    cells and used to type the expected sides.
    """
    A, B = F.source, F.target
    T = ConstraintTemplates(A)
    D = Domains(A)
    c1 = lambda *xs: B.comp_chain(1, *xs)
    c2 = lambda *xs: B.comp_chain(2, *xs)
    tri = lambda x: F(x).t(0, 1, 2)
    out: list[RelationFailure] = []

    def expect(name, datum, got, want):
        if got != want:
            out.append(RelationFailure(name, datum, f"{got} != {want}"))

    def attempt(name, datum, fn):
        try:
            fn()
        except CompositionError as exc:
            out.append(RelationFailure(name, datum, f"ill-typed: {exc}"))

    tau = {}
    for a in A.cells[2]:
        tu, td = principal(F, T.tau_u(a)), principal(F, T.tau_d(a))
        tau[a] = (tu, td)
        al, ar = tri(T.alpha_l(a)), tri(T.alpha_r(a))
        attempt("tau_d.tau_u", (a,), lambda: expect("tau_d.tau_u", (a,), B.compose(2, td, tu), B.ident[ar]))
        attempt("tau_u.tau_d", (a,), lambda: expect("tau_u.tau_d", (a,), B.compose(2, tu, td), B.ident[al]))
    for b, a in D.vertical_pairs():
        s = principal(F, T.sigma(b, a))
        attempt("sigma", (b, a), lambda: expect("sigma", (b, a), s, B.compose(1, tau[b][1], tau[a][0])))
        for name in ("omega_l", "omega_r"):
            w = principal(F, getattr(T, name)(b, a))
            if find_inverse(B, w) is None:
                out.append(RelationFailure(name, (b, a), f"{w} has no inverse"))
    for a, h, g in triangle_data(A, D):
        gl, gr = principal(F, T.gamma_l(a, h, g)), principal(F, T.gamma_r(a, h, g))
        Fhg = tri(T.composite_triangle(h, g))
        Fbar = tri(T.triangle(a, h, g))
        tu, td = tau[a]
        d = (a, h, g)
        attempt("gamma_l.gamma_r", d, lambda: expect("gamma_l.gamma_r", d, c2(gl, gr), c1(Fhg, tu)))
        attempt("gamma_r.tau_d.gamma_l", d, lambda: expect("gamma_r.tau_d.gamma_l", d, c2(gr, c1(Fhg, td), gl), B.ident[Fbar]))
    for b, a, i, h in eps_data(A, D):
        el, er = principal(F, T.eps_l(b, a, i, h)), principal(F, T.eps_r(b, a, i, h))
        Fb = tri(T.triangle(b, i, h))
        Fba = tri(T.triangle(A.compose(1, b, a), i, h))
        tu, td = tau[a]
        d = (b, a, i, h)
        attempt("eps_r.eps_l", d, lambda: expect("eps_r.eps_l", d, c2(er, el), c1(Fb, tu)))
        attempt("eps_l.tau_d.eps_r", d, lambda: expect("eps_l.tau_d.eps_r", d, c2(el, c1(Fb, td), er), B.ident[Fba]))
    return out


def check_f_gamma_relations(F: SimplicialMap34) -> list[RelationFailure]:
    """``F_gamma_k`` are ``F_gamma_1`` conjugated by the ``tau_u`` cells of its boundary."""
    A, B = F.source, F.target
    T = ConstraintTemplates(A)
    out = []
    for G in A.cells[3]:
        a, b = A.src[G], A.tgt[G]
        fg = {k: principal(F, T.f_gamma(G, k)) for k in range(1, 5)}
        tua, tub = principal(F, T.tau_u(a)), principal(F, T.tau_u(b))
        want = {
            2: lambda: B.compose(2, tub, fg[1]),
            3: lambda: B.compose(2, fg[1], tua),
            4: lambda: B.compose(2, tub, fg[3]),
        }
        for k, fn in want.items():
            try:
                w = fn()
            except CompositionError as exc:
                out.append(RelationFailure(f"F_gamma_{k}", (G,), f"ill-typed: {exc}"))
                continue
            if fg[k] != w:
                out.append(RelationFailure(f"F_gamma_{k}", (G,), f"{fg[k]} != {w}"))
    return out


def linking_simplices(A: FiniteThreeCat, G: str, nerve: Nerve | None = None) -> list[Simplex]:
    """4-simplices having the ``F_gamma_1`` and ``F_gamma_2`` templates of ``G`` among their faces.

    Brute-force search; the pentagon equation of the image of such a simplex
    ties the two constraint cells together.
    """
    T = ConstraintTemplates(A)
    t1, t2 = T.f_gamma(G, 1), T.f_gamma(G, 2)
    N = nerve or Nerve(A)
    out = []
    for x in N.simplices(4):
        faces = [face(x, i) for i in range(5)]
        if t1 in faces and t2 in faces:
            out.append(x)
    return out


def trivial_when_oplax(F: SimplicialMap34) -> list[tuple[str, tuple[str, ...], str]]:
    """Constraint cells breaking the triviality expected of a simplicial oplax map.

    The invertible cells must be identities and the four ``F_gamma_k`` of a
    3-cell must coincide.
    """
    A, B = F.source, F.target
    D = Domains(A)
    out = []
    data = [("two", (a,)) for a in A.cells[2]]
    data += [("triangle", d) for d in triangle_data(A, D)]
    data += [("pair", d) for d in D.vertical_pairs()]
    data += [("eps", d) for d in eps_data(A, D)]
    data += [("three", (G,)) for G in A.cells[3]]
    for kind, d in data:
        cells = extract_constraints(F, kind, d).cells
        if kind == "three":
            # not identities, but all four agree once tau_u is trivial
            if len(set(cells.values())) != 1:
                out.append(("F_gamma", d, " ".join(cells[k] for k in sorted(cells))))
            continue
        for name, c in cells.items():
            if not B.is_identity(c):
                out.append((name, d, c))
    return out


__all__ = [
    "ConstraintCells",
    "ConstraintTemplates",
    "ConditionViolation",
    "RelationFailure",
    "check_f_gamma_relations",
    "check_relations",
    "compose_simplicial",
    "extract_constraints",
    "find_inverse",
    "is_simplicial_oplax",
    "linking_simplices",
    "simplicial_oplax_violations",
    "trivial_when_oplax",
    "triangle_data",
    "eps_data",
]
