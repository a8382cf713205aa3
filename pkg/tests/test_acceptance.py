"""Acceptance suite: ten criteria, zero tolerance, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline,
or ``python3 tests/test_acceptance.py`` for the bare summary.
"""

from __future__ import annotations

import subprocess
import sys
import time
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import random_multigraphs  # noqa: E402
from tdmono.complex import check_chain_identities, chow_complex, homology_table, verify_proposition1  # noqa: E402
from tdmono.generators import gen_abelian_surface, gen_mumford, gen_ngon, spanning_tree_count  # noqa: E402
from tdmono.lattice import IntMatrix  # noqa: E402
from tdmono.model import DegenerationModel, Flags, check_hard_lefschetz, check_hodge_index, validate_all  # noqa: E402
from tdmono.report import (  # noqa: E402
    betti_numbers,
    check_duality,
    check_hodge_inequalities,
    e1_page,
    e2_page,
    hodge_numbers,
    monodromy_graded,
)
from tdmono.toric import (  # noqa: E402
    chow_from_fan,
    class_of_cone,
    hirzebruch,
    intersect,
    lefschetz_and_pairings,
    p1_times_p1,
    projective_line,
    projective_plane,
)


@lru_cache(maxsize=None)
def graphs():
    return tuple(random_multigraphs(20))


@lru_cache(maxsize=None)
def models() -> tuple[DegenerationModel, ...]:
    out = [gen_ngon(n) for n in range(3, 9)]
    out += [gen_mumford(g, name=f"random-{k}") for k, g in enumerate(graphs())]
    out.append(gen_abelian_surface())
    return tuple(out)


@lru_cache(maxsize=None)
def tables():
    return tuple(homology_table(chow_complex(m)) for m in models())


def announce(k: int, ok: bool, title: str, detail: str, seconds: float) -> None:
    print(f"{'PASS' if ok else 'FAIL'} criterion {k:2d}: {title} ({detail}; {seconds:.2f}s)")


# -- criteria ---------------------------------------------------------------

def criterion_1():
    bad, counts = [], 0
    for m in models():
        rep = check_chain_identities(chow_complex(m))
        counts += sum(rep.details["identities_checked"].values())
        if not rep.passed:
            bad.append(f"{m.name}: {sorted(rep.codes())}")
    return not bad, f"{len(models())} models, {counts} identities" + (f"; {bad}" if bad else "")


def criterion_2():
    bad, n_iso, n_pair = [], 0, 0
    for m, ht in zip(models(), tables()):
        p = verify_proposition1(ht)
        n_iso += len(p.isogenies)
        n_pair += len(p.pairings)
        if not p.passed:
            bad.append(m.name)
    return not bad, f"{n_iso} isogeny and {n_pair} pairing verdicts" + (f"; failing {bad}" if bad else "")


def criterion_3():
    orders = {}
    for n in range(3, 9):
        ht = homology_table(chow_complex(gen_ngon(n)))
        orders[n] = verify_proposition1(ht).isogeny(1, 0).verdict.cokernel_order
    return all(orders[n] == n for n in orders), f"cokernel orders {orders}"


def criterion_4():
    mism = []
    for k, g in enumerate(graphs()):
        ht = homology_table(chow_complex(gen_mumford(g)))
        got = verify_proposition1(ht).isogeny(1, 0).verdict.cokernel_order
        want = spanning_tree_count(g)
        if got != want:
            mism.append((k, got, want))
    return not mism, f"{len(graphs())} graphs" + (f"; mismatches {mism}" if mism else "")


def criterion_5():
    errs = []
    for n in range(3, 9):
        ht = homology_table(chow_complex(gen_ngon(n)))
        if betti_numbers(ht) != [1, 2, 1] or hodge_numbers(ht) != [[1, 1], [1, 1]]:
            errs.append(f"ngon-{n}")
    for k, g in enumerate(graphs()):
        ht = homology_table(chow_complex(gen_mumford(g)))
        genus = g.betti1
        if betti_numbers(ht)[1] != 2 * genus or hodge_numbers(ht)[1][0] != genus:
            errs.append(f"random-{k}")
    ht = tables()[-1]
    h = hodge_numbers(ht)
    if betti_numbers(ht) != [1, 4, 6, 4, 1] or h[2][0] != 1 or h[1][1] != 4:
        errs.append("abelian-surface")
    return not errs, "n-gons, random Mumford curves, abelian surface" + (f"; wrong {errs}" if errs else "")


def criterion_6():
    bad, entries, pieces = [], 0, 0
    for m, ht in zip(models(), tables()):
        for e in e1_page(ht) + e2_page(ht):
            entries += 1
            if e.row % 2:
                bad.append(f"{m.name} row {e.row}")
        for n in range(2 * m.dimension + 1):
            for p in monodromy_graded(ht, n):
                pieces += 1
                if (n - p.level) % 2:
                    bad.append(f"{m.name} H^{n} level {p.level}")
    return not bad, f"{entries} page entries, {pieces} graded pieces" + (f"; odd {bad}" if bad else "")


def criterion_7():
    bad = []
    for m, ht in zip(models(), tables()):
        if not all(r.passed for r in validate_all(m)):
            continue
        rep = check_duality(ht)
        if not rep.passed:
            bad.append(f"{m.name}: {sorted(rep.codes())}")
    return not bad, f"{len(models())} models" + (f"; {bad}" if bad else "")


def criterion_8():
    rigid_cy = [[1, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 1]]
    rejected = not check_hodge_inequalities(rigid_cy).passed
    rejected_models = [m.name for m, ht in zip(models(), tables())
                       if not check_hodge_inequalities(hodge_numbers(ht)).passed]
    ok = rejected and not rejected_models
    return ok, f"rigid CY table rejected={rejected}; shipped models rejected: {rejected_models or 'none'}"


def _as_model(s):
    return DegenerationModel("toric", s.dim, 1, {(1,): s}, {}, {}, Flags())


def criterion_9():
    errs = []
    cases = [
        ("P1", projective_line(), (1, 1), [1, 1]),
        ("P2", projective_plane(), (1, 1, 1), [1, 0, 0]),
        ("P1xP1", p1_times_p1(), (1, 2, 1), [1, 0, 1, 0]),
        ("F1", hirzebruch(1), (1, 2, 1), [1, 1, 1, 1]),
    ]
    # classical self-intersections of the boundary divisors, in ray order
    selfs = {"P2": [1, 1, 1], "P1xP1": [0, 0, 0, 0], "F1": [0, -1, 0, 1]}
    for name, fan, ranks, ample in cases:
        tc = chow_from_fan(fan)
        if tc.ranks != ranks:
            errs.append(f"{name} ranks {tc.ranks}")
        if name in selfs:
            got = [intersect(fan, tc, class_of_cone(fan, tc, (r,)), 1, class_of_cone(fan, tc, (r,)), 1)[0]
                   for r in range(len(fan.rays))]
            if got != selfs[name]:
                errs.append(f"{name} self-intersections {got}")
        s = lefschetz_and_pairings(fan, tc, ample)
        m = _as_model(s)
        if not (check_hard_lefschetz(m).passed and check_hodge_index(m).passed):
            errs.append(f"{name} Lefschetz/Hodge index")
    fan = p1_times_p1()
    tc = chow_from_fan(fan)
    h, v = class_of_cone(fan, tc, (0,)), class_of_cone(fan, tc, (2,))
    if (intersect(fan, tc, h, 1, v, 1), intersect(fan, tc, h, 1, h, 1)) != ((1,), (0,)):
        errs.append("P1xP1 form")
    if lefschetz_and_pairings(hirzebruch(1), chow_from_fan(hirzebruch(1)), [1] * 4).xi_power(0, 2) != IntMatrix([[8]]):
        errs.append("F1 anticanonical degree")
    return not errs, "P1, P2, P1xP1, F1" + (f"; {errs}" if errs else "")


def criterion_10(tmp: Path):
    outputs = {}
    for fam, extra in (("ngon", ["--n", "5"]), ("ab2", [])):
        model = tmp / f"{fam}.json"
        subprocess.run([sys.executable, "-m", "tdmono", "gen", fam, *extra, "-o", str(model)], check=True)
        for fmt in ("text", "json"):
            runs = [
                subprocess.run([sys.executable, "-m", "tdmono", "report", str(model), "--format", fmt],
                               check=True, capture_output=True).stdout
                for _ in range(2)
            ]
            outputs[f"{fam}/{fmt}"] = runs[0] == runs[1] and len(runs[0]) > 0
    return all(outputs.values()), ", ".join(f"{k} identical={v}" for k, v in outputs.items())


CRITERIA = {
    1: ("chain identities", criterion_1),
    2: ("isogenies and nondegenerate pairings", criterion_2),
    3: ("Tate-curve monodromy discriminant", criterion_3),
    4: ("Mumford-curve critical group", criterion_4),
    5: ("Betti/Hodge oracles", criterion_5),
    6: ("parity vanishing", criterion_6),
    7: ("duality and symmetry", criterion_7),
    8: ("Hodge-inequality exclusion", criterion_8),
    9: ("toric engine", criterion_9),
}


def run_criterion(k: int, tmp: Path | None = None) -> bool:
    t = time.perf_counter()
    if k == 10:
        title = "report determinism"
        ok, detail = criterion_10(tmp)
    else:
        title, fn = CRITERIA[k]
        ok, detail = fn()
    announce(k, ok, title, detail, time.perf_counter() - t)
    return ok


@pytest.mark.parametrize("k", range(1, 11))
def test_criterion(k, tmp_path, capsys):
    with capsys.disabled():
        print()
        ok = run_criterion(k, tmp_path)
    assert ok


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as d:
        results = [run_criterion(k, Path(d)) for k in range(1, 11)]
    sys.exit(0 if all(results) else 1)
