"""Command-line front end.

Every command reads UTF-8 JSON and writes sorted-key JSON.  Exit codes:
0 success or passing verdict, 1 failing verdict (the certificate is still
written), 2 malformed input, 3 enumeration budget exceeded.
"""

from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path
from typing import Any

import click

from .adc import Poset, is_loop_free, is_strongly_loop_free, is_unital_basis, oriental_complex
from .cat3 import CompositionError, FiniteThreeCat
from .nerve import BudgetExceeded, Nerve, NerveError, SimplicialMap34, SimplicialMapError
from .nu import enumerate_cells, is_identity
from .oplax import OplaxData, OplaxError, compose, from_simplicial, to_simplicial, validate
from .orientals import OrientalError, OrientalHandle, hom_cells
from .simplicial import simplicial_oplax_violations
from .strictify import SplitFreeCat, StrictifyError, eta, strictify

DEFAULT_BUDGET = 10**6

EXIT_OK, EXIT_FAIL, EXIT_MALFORMED, EXIT_BUDGET = 0, 1, 2, 3


class Malformed(Exception):
    pass


def dumps(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _read(path: str) -> tuple[Any, str]:
    try:
        raw = Path(path).read_bytes()
        return json.loads(raw.decode("utf-8")), hashlib.sha256(raw).hexdigest()
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise Malformed(f"{path}: {exc}") from exc


def _load(path: str, kind):
    data, digest = _read(path)
    try:
        return kind(data), digest
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise Malformed(f"{path}: {exc!r}") from exc


def _category(data) -> FiniteThreeCat:
    return FiniteThreeCat.from_json(data)


def _map_document(F: SimplicialMap34) -> dict:
    return {"source": F.source.to_json(), "target": F.target.to_json(), "map": F.to_json()}


def _map_from_document(data, source: FiniteThreeCat | None = None, target: FiniteThreeCat | None = None) -> SimplicialMap34:
    source = source or FiniteThreeCat.from_json(data["source"])
    target = target or FiniteThreeCat.from_json(data["target"])
    body = data.get("map", data)
    return SimplicialMap34.from_json(body, source, target)


def certificate(command: str, inputs: dict[str, str], violations: list[dict], extra: dict | None = None) -> dict:
    doc = {
        "command": command,
        "inputs": dict(sorted(inputs.items())),
        "verdict": "pass" if not violations else "fail",
        "violations": violations,
    }
    if extra:
        doc.update(extra)
    return doc


def _emit(ctx: click.Context, docs: dict[str, Any]) -> None:
    """Print the documents, or write them as ``<name>.json`` under ``--out``."""
    out = ctx.obj.get("out")
    if out is None:
        if len(docs) == 1:
            click.echo(dumps(next(iter(docs.values()))), nl=False)
        else:
            click.echo(dumps(docs), nl=False)
        return
    folder = Path(out)
    folder.mkdir(parents=True, exist_ok=True)
    for name, doc in sorted(docs.items()):
        (folder / f"{name}.json").write_text(dumps(doc), encoding="utf-8")
        click.echo(str(folder / f"{name}.json"))


def _oplax_violations(report) -> list[dict]:
    return [
        {"kind": v.kind, "tree": v.family, "witness": list(v.witness), "detail": v.detail}
        for v in report.violations
    ]


def _condition_violations(F: SimplicialMap34) -> list[dict]:
    out = []
    for v in simplicial_oplax_violations(F):
        d = v.to_json()
        d["kind"] = "condition"
        out.append(d)
    return out


class _Group(click.Group):
    """Maps library errors to the documented exit codes."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except Malformed as exc:
            click.echo(f"malformed input: {exc}", err=True)
            ctx.exit(EXIT_MALFORMED)
        except BudgetExceeded as exc:
            click.echo(f"budget exceeded: {exc}", err=True)
            ctx.exit(EXIT_BUDGET)
        except (OplaxError, NerveError, SimplicialMapError, StrictifyError, OrientalError, CompositionError, KeyError, ValueError) as exc:
            click.echo(f"malformed input: {exc}", err=True)
            ctx.exit(EXIT_MALFORMED)


@click.group(cls=_Group)
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Write artifacts into this directory.")
@click.pass_context
def main(ctx: click.Context, out: str | None) -> None:
    """Finite strict 3-categories, orientals, nerves and oplax 3-functors."""
    ctx.ensure_object(dict)
    ctx.obj["out"] = out


@main.command()
@click.argument("n", type=click.IntRange(0, 6))
@click.option("--max-dim", default=3, type=click.IntRange(0, 6), show_default=True)
@click.option("--coeff-cap", default=1, type=click.IntRange(1, 3), show_default=True)
@click.pass_context
def oriental(ctx, n: int, max_dim: int, coeff_cap: int) -> None:
    """The chain complex of the n-simplex and the cells of its oriental."""
    K = oriental_complex(Poset.chain(n))
    levels = enumerate_cells(K, max_dim, coeff_cap)
    census = {
        "cells": [len(level) for level in levels],
        "non_identity": [sum(1 for c in level if not is_identity(c)) for level in levels],
    }
    doc = {
        "n": n,
        "max_dim": max_dim,
        "coeff_cap": coeff_cap,
        "complex": K.to_json(),
        "census": census,
        "unital": is_unital_basis(K),
        "loop_free": is_loop_free(K),
        "strongly_loop_free": is_strongly_loop_free(K),
    }
    _emit(ctx, {"oriental": doc})


@main.command()
@click.argument("category", type=click.Path(dir_okay=False))
@click.option("--dim", "k", default=2, type=click.IntRange(0, 4), show_default=True)
@click.option("--budget", default=DEFAULT_BUDGET, show_default=True, help="Maximum number of simplices listed.")
@click.pass_context
def nerve(ctx, category: str, k: int, budget: int) -> None:
    """Simplices of the nerve of a category in one dimension."""
    A, _ = _load(category, _category)
    N = Nerve(A)
    every = N.simplices(k)
    if len(every) > budget:
        raise BudgetExceeded(f"{len(every)} simplices exceed the budget {budget}")
    nondeg = N.nondegenerate(k)
    doc = {
        "category": A.name,
        "dim": k,
        "simplices": len(every),
        "nondegenerate": len(nondeg),
        "nondegenerate_simplices": sorted((x.to_json() for x in nondeg), key=lambda d: sorted(d["labels"].items())),
    }
    _emit(ctx, {"nerve": doc})


@main.command("validate-oplax")
@click.argument("functor", type=click.Path(dir_okay=False))
@click.pass_context
def validate_oplax(ctx, functor: str) -> None:
    """Check the normalisation conditions and the fourteen coherences."""
    F, digest = _load(functor, OplaxData.from_json)
    report = validate(F)
    cert = certificate("validate-oplax", {"functor": digest}, _oplax_violations(report), {"checked": dict(sorted(report.checked.items()))})
    _emit(ctx, {"certificate": cert})
    ctx.exit(EXIT_OK if report.ok else EXIT_FAIL)


@main.command("compose-oplax")
@click.argument("second", type=click.Path(dir_okay=False))
@click.argument("first", type=click.Path(dir_okay=False))
@click.pass_context
def compose_oplax(ctx, second: str, first: str) -> None:
    """Compose ``second o first`` and validate the result."""
    G, dg = _load(second, OplaxData.from_json)
    F, df = _load(first, OplaxData.from_json)
    GF = compose(G, F)
    report = validate(GF)
    cert = certificate("compose-oplax", {"first": df, "second": dg}, _oplax_violations(report))
    _emit(ctx, {"composite": GF.to_json(), "certificate": cert})
    ctx.exit(EXIT_OK if report.ok else EXIT_FAIL)


@main.command("to-simplicial")
@click.argument("functor", type=click.Path(dir_okay=False))
@click.pass_context
def to_simplicial_cmd(ctx, functor: str) -> None:
    """The simplicial map between nerves of an oplax 3-functor."""
    F, digest = _load(functor, OplaxData.from_json)
    report = validate(F)
    if not report.ok:
        cert = certificate("to-simplicial", {"functor": digest}, _oplax_violations(report))
        _emit(ctx, {"certificate": cert})
        ctx.exit(EXIT_FAIL)
    _emit(ctx, {"map": _map_document(to_simplicial(F, check=False))})


@main.command("to-cellular")
@click.argument("mapping", type=click.Path(dir_okay=False))
@click.pass_context
def to_cellular(ctx, mapping: str) -> None:
    """The oplax 3-functor of a simplicial oplax map."""
    Fm, digest = _load(mapping, _map_from_document)
    violations = _condition_violations(Fm)
    if violations:
        _emit(ctx, {"certificate": certificate("to-cellular", {"map": digest}, violations)})
        ctx.exit(EXIT_FAIL)
    _emit(ctx, {"functor": from_simplicial(Fm, check=False).to_json()})


@main.command("check-simplicial")
@click.argument("source", type=click.Path(dir_okay=False))
@click.argument("target", type=click.Path(dir_okay=False))
@click.argument("mapping", type=click.Path(dir_okay=False))
@click.pass_context
def check_simplicial(ctx, source: str, target: str, mapping: str) -> None:
    """Decide whether a map of nerves is simplicial oplax."""
    A, da = _load(source, _category)
    B, db = _load(target, _category)
    Fm, dm = _load(mapping, lambda d: _map_from_document(d, A, B))
    problems = Fm.check()
    if problems:
        raise Malformed(f"not a simplicial map: {problems[:3]}")
    violations = _condition_violations(Fm)
    cert = certificate("check-simplicial", {"map": dm, "source": da, "target": db}, violations)
    _emit(ctx, {"certificate": cert})
    ctx.exit(EXIT_OK if not violations else EXIT_FAIL)


@main.command("strictify")
@click.argument("category", type=click.Path(dir_okay=False))
@click.pass_context
def strictify_cmd(ctx, category: str) -> None:
    """The 3-truncated strictification of a split-free category and its unit."""
    A, _ = _load(category, SplitFreeCat.from_json)
    T = strictify(A)
    unit = eta(A, T)
    _emit(ctx, {"strictification": T.category.to_json(), "eta": unit.to_json()})


@main.command()
@click.argument("shape")
@click.argument("f")
@click.argument("g")
@click.option("--max-dim", default=2, type=click.IntRange(0, 3), show_default=True, help="Largest hom-dimension listed.")
@click.pass_context
def hom(ctx, shape: str, f: str, g: str, max_dim: int) -> None:
    """Hom of an oriental between two paths, e.g. ``hom 2 0-2 0-1-2``.

    ``shape`` is either ``n`` for the simplex ``[n]`` or a poset JSON file.
    """
    if shape.isdigit():
        O = OrientalHandle.simplex(int(shape))
    else:
        data, _ = _read(shape)
        try:
            O = OrientalHandle(Poset(data["elements"], [tuple(p) for p in data["less"]]))
        except (KeyError, TypeError, ValueError) as exc:
            raise Malformed(f"{shape}: {exc!r}") from exc
    index = O.vertex_index

    def path(text: str):
        try:
            return O.path([index[v] for v in text.split("-")])
        except KeyError as exc:
            raise Malformed(f"unknown vertex in {text!r}") from exc

    cells = hom_cells(O, path(f), path(g), max_dim)
    by_dim = [[c for c in cells if c.dim - 2 == k] for k in range(max_dim + 1)]
    doc = {
        "source": f,
        "target": g,
        "counts": [len(level) for level in by_dim],
        "non_identity": [sum(1 for c in level if not is_identity(c)) for level in by_dim],
        "cells": [[c.to_json() for c in level] for level in by_dim],
    }
    _emit(ctx, {"hom": doc})


def run(argv: list[str]) -> int:
    """Run the CLI in-process and return its exit code."""
    try:
        code = main.main(args=list(argv), prog_name="oplax3", standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return EXIT_MALFORMED
    return code if isinstance(code, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
