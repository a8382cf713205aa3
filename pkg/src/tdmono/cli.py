"""Command-line front door.

Exit codes: 0 success, 1 validation failure (or a failed verdict under
``--strict``), 2 unreadable or malformed input, 3 internal error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import jsonfmt
from .complex import chow_complex, homology_table
from .generators import GeneratorError, gen_abelian_surface, gen_mumford, gen_ngon, parse_graph
from .model import DegenerationModel, ModelError, StructureError, parse_model, serialize_model, validate_all
from .report import build_report
from .toric import ToricError, chow_from_fan, lefschetz_and_pairings, parse_fan, validate_fan

COMPLEX_SCHEMA = "tdmono/complex/v1"


class InputError(Exception):
    """Anything wrong with what the user handed us; maps to exit code 2."""


class InvalidModel(Exception):
    """Parsed, but the strata data break the structural rules; exit code 1."""


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise InputError(f"{path} is not UTF-8 text") from None


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot write {out}: {exc.strerror}") from None


def _load_model(path: str) -> DegenerationModel:
    try:
        return parse_model(_read(path))
    except StructureError as exc:
        raise InvalidModel(f"{path}: [structure] {exc}") from None
    except ModelError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_valid(path: str) -> DegenerationModel | None:
    m = _load_model(path)
    reports = validate_all(m)
    bad = [r for r in reports if not r.passed]
    if bad:
        print(f"{path}: model fails validation; refusing to compute", file=sys.stderr)
        for r in bad:
            print(r.summary(), file=sys.stderr)
        return None
    return m


def _cell(text: str) -> tuple[int, int]:
    try:
        i, j = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected i,j") from None
    return i, j


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers") from None


# -- subcommands -------------------------------------------------------------

def cmd_gen(args) -> int:
    try:
        if args.family == "ngon":
            if args.n is None:
                raise InputError("gen ngon needs --n")
            m = gen_ngon(args.n)
        elif args.family == "mumford":
            if args.graph is None:
                raise InputError("gen mumford needs --graph")
            m = gen_mumford(parse_graph(_read(args.graph)))
        else:
            m = gen_abelian_surface()
    except GeneratorError as exc:
        raise InputError(str(exc)) from None
    _emit(serialize_model(m), args.output)
    return 0


def cmd_validate(args) -> int:
    m = _load_model(args.model)
    reports = validate_all(m)
    if args.format == "json":
        _emit(jsonfmt.dumps({"model": m.name, "passed": all(r.passed for r in reports),
                             "checks": [r.to_json() for r in reports]}), args.output)
    else:
        _emit("".join(r.summary() + "\n" for r in reports), args.output)
    if not all(r.passed for r in reports):
        for r in reports:
            for f in r.failures:
                print(f"{r.name}: {f}", file=sys.stderr)
        return 1
    return 0


def _cell_json(cx, i: int, j: int) -> dict:
    lay = cx.layout(i, j)
    d = cx.dimension
    return {
        "cell": [i, j],
        "rank": lay.rank,
        "summands": [s.to_json() for s in lay.summands],
        "differential": {"target": [i + 1, j], "matrix": cx.differential(i, j).tolist()},
        "monodromy": {"target": [i + 2, j - 1], "matrix": cx.monodromy(i, j).tolist()},
        "pairing": {"partner": [-i, d - j], "matrix": cx.pairing(i, j).tolist()},
    }


def cmd_complex(args) -> int:
    m = _load_valid(args.model)
    if m is None:
        return 1
    cx = chow_complex(m)
    if args.cell is not None:
        if args.cell not in cx.cells:
            raise InputError(f"cell {args.cell[0]},{args.cell[1]} is outside the support")
        cells = [args.cell]
    else:
        cells = sorted(cx.cells)
    doc = {"schema": COMPLEX_SCHEMA, "model": m.name, "dimension": m.dimension,
           "cells": [_cell_json(cx, i, j) for (i, j) in cells]}
    _emit(jsonfmt.dumps(doc), args.output)
    return 0


def cmd_homology(args) -> int:
    m = _load_valid(args.model)
    if m is None:
        return 1
    ht = homology_table(chow_complex(m))
    if args.format == "json":
        doc = {"model": m.name, "dimension": m.dimension,
               "groups": [{"cell": [i, j], **ht.group(i, j).to_json()} for (i, j) in ht.cells]}
        _emit(jsonfmt.dumps(doc), args.output)
    else:
        lines = [f"homology of {m.name}"]
        lines += [f"T^{i}_{j} = {ht.group(i, j)}" for (i, j) in ht.cells]
        _emit("\n".join(lines) + "\n", args.output)
    return 0


def cmd_report(args) -> int:
    m = _load_valid(args.model)
    if m is None:
        return 1
    rep = build_report(m)
    _emit(rep.render(args.format), args.output)
    if args.strict and not rep.passed:
        print(f"{m.name}: one or more verdicts failed", file=sys.stderr)
        return 1
    return 0


def cmd_toric_chow(args) -> int:
    try:
        fan = parse_fan(_read(args.fan))
    except ToricError as exc:
        raise InputError(f"{args.fan}: {exc}") from None
    check = validate_fan(fan)
    if not check.passed:
        print(check.summary(), file=sys.stderr)
        return 1
    tc = chow_from_fan(fan)
    doc = {"fan": fan.to_json(), "ranks": list(tc.ranks),
           "basis": [[list(v) for v in b] for b in tc.basis],
           "generators": [[list(c) for c in g] for g in tc.generators]}
    if args.ample is not None:
        if len(args.ample) != len(fan.rays):
            raise InputError(f"--ample needs {len(fan.rays)} coefficients")
        try:
            s = lefschetz_and_pairings(fan, tc, args.ample)
        except ToricError as exc:
            print(str(exc), file=sys.stderr)
            return 1
        doc["stratum"] = s.to_json(())
        del doc["stratum"]["I"]
    _emit(jsonfmt.dumps(doc), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tdmono", description="Chow complexes and monodromy of totally degenerate models")
    sub = p.add_subparsers(dest="command", required=True)

    def out(sp):
        sp.add_argument("-o", "--output", help="write to this file instead of stdout")

    g = sub.add_parser("gen", help="emit a model file")
    g.add_argument("family", choices=["ngon", "mumford", "ab2"])
    g.add_argument("--n", type=int)
    g.add_argument("--graph", help="edge list, one 'u v' per line")
    out(g)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("validate", help="run every model validator")
    v.add_argument("model")
    v.add_argument("--format", choices=["text", "json"], default="text")
    out(v)
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("complex", help="dump the assembled complex")
    c.add_argument("model")
    c.add_argument("--cell", type=_cell, metavar="I,J", help="dump one cell; write negative i as --cell=-1,1")
    out(c)
    c.set_defaults(func=cmd_complex)

    h = sub.add_parser("homology", help="print the table of homology groups")
    h.add_argument("model")
    h.add_argument("--format", choices=["text", "json"], default="text")
    out(h)
    h.set_defaults(func=cmd_homology)

    r = sub.add_parser("report", help="full cohomology report")
    r.add_argument("model")
    r.add_argument("--format", choices=["text", "json"], default="text")
    r.add_argument("--strict", action="store_true", help="exit 1 if any verdict fails")
    out(r)
    r.set_defaults(func=cmd_report)

    t = sub.add_parser("toric", help="toric varieties")
    tsub = t.add_subparsers(dest="toric_command", required=True)
    tc = tsub.add_parser("chow", help="Chow groups of a smooth complete fan")
    tc.add_argument("fan")
    tc.add_argument("--ample", type=_ints, help="coefficients of an ample divisor on the rays")
    out(tc)
    tc.set_defaults(func=cmd_toric_chow)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvalidModel as exc:
        print(f"invalid model: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())
