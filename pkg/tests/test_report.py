from __future__ import annotations

import pytest

from conftest import single_line
from tdmono.complex import chow_complex, homology_table
from tdmono.generators import DualGraph, gen_abelian_surface, gen_mumford, gen_ngon
from tdmono.report import (
    DegreeOutOfRange,
    betti_numbers,
    build_report,
    check_hodge_inequalities,
    check_weight_monodromy,
    e1_page,
    e2_page,
    hodge_numbers,
    monodromy_graded,
)

THETA = DualGraph.from_edges([(1, 2)] * 3)


def table(m):
    return homology_table(chow_complex(m))


@pytest.fixture(scope="module")
def tri():
    return table(gen_ngon(3))


def entry(page, i, row):
    return next(e for e in page if (e.i, e.row) == (i, row))


def test_e1_page_ngon(tri):
    page = e1_page(tri.complex)
    assert (entry(page, -1, 2).rank, entry(page, -1, 2).twist) == (3, -1)
    assert (entry(page, 0, 0).rank, entry(page, 0, 0).twist) == (3, 0)
    assert entry(page, 1, 0).rank == 3
    assert (entry(page, 0, 2).rank, entry(page, 0, 2).twist) == (3, -1)
    assert all(e.row % 2 == 0 for e in page)
    assert not any(e.i == 2 for e in page)


def test_e2_page_ngon(tri):
    page = e2_page(tri)
    assert entry(page, 0, 0).rank == 1 and entry(page, 1, 0).rank == 1
    assert (entry(page, -1, 2).rank, entry(page, -1, 2).twist) == (1, -1)
    assert (entry(page, 0, 2).rank, entry(page, 0, 2).twist) == (1, -1)


def test_e2_theta_and_single_component():
    page = e2_page(table(gen_mumford(THETA)))
    assert entry(page, 1, 0).rank == 2 and entry(page, -1, 2).rank == 2
    ht = table(single_line())
    assert [e.rank for e in e2_page(ht)] == [e.rank for e in e1_page(ht)]


def test_graded_pieces_ngon(tri):
    h1 = monodromy_graded(tri, 1)
    assert [(p.level, p.rank, p.tate_twist) for p in h1] == [(1, 1, -1), (-1, 1, 0)]
    assert [(p.rank, p.tate_twist) for p in monodromy_graded(tri, 0)] == [(1, 0)]
    assert [(p.rank, p.tate_twist) for p in monodromy_graded(tri, 2)] == [(1, -1)]
    for p in h1:
        assert p.n == p.i + 2 * p.j and p.slope == -p.tate_twist and p.weight == 2 * p.j
    with pytest.raises(DegreeOutOfRange):
        monodromy_graded(tri, 3)


def test_graded_levels_have_correct_parity():
    ht = table(gen_abelian_surface())
    for n in range(5):
        assert all((n - p.level) % 2 == 0 for p in monodromy_graded(ht, n))


def test_betti_and_hodge():
    assert betti_numbers(table(gen_ngon(4))) == [1, 2, 1]
    assert hodge_numbers(table(gen_ngon(4))) == [[1, 1], [1, 1]]
    theta = table(gen_mumford(THETA))
    assert betti_numbers(theta) == [1, 4, 1]
    assert hodge_numbers(theta)[1][0] == 2 and hodge_numbers(theta)[0][1] == 2
    ab = table(gen_abelian_surface())
    assert betti_numbers(ab) == [1, 4, 6, 4, 1]
    h = hodge_numbers(ab)
    assert h[2][0] == 1 and h[1][1] == 4 and h[1][0] == 2


def test_hodge_inequalities():
    assert check_hodge_inequalities(hodge_numbers(table(gen_abelian_surface()))).passed
    rigid_cy = [[1, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 1]]
    rep = check_hodge_inequalities(rigid_cy)
    assert not rep.passed and "hodge-chain" in rep.codes()
    assert any(f.location == "n=3" for f in rep.failures)
    asym = [[1, 2], [1, 1]]
    assert "hodge-symmetry" in check_hodge_inequalities(asym).codes()


def test_weight_monodromy_discriminants():
    rep = check_weight_monodromy(table(gen_ngon(5)))
    assert rep.passed
    h1 = [d for d in rep.details["discriminants"] if d["n"] == 1 and d["level"] == 1]
    assert h1[0]["exponent"] == 5
    rep = check_weight_monodromy(table(gen_mumford(THETA)))
    assert [d["order"] for d in rep.details["discriminants"] if d["n"] == 1] == [3]
    h0 = [d for d in rep.details["discriminants"] if d["n"] == 0]
    assert h0 == [{"n": 0, "level": 0, "exponent": 1, "order": 1, "invariants": []}]


@pytest.mark.parametrize("m", [gen_ngon(3), gen_mumford(THETA), gen_abelian_surface()], ids=["ngon", "theta", "ab2"])
def test_report_passes_and_is_consistent(m):
    r = build_report(m)
    assert r.passed
    for n, ps in r.pieces.items():
        assert sum(p.rank for p in ps) == r.betti[n]
    euler = next(v for v in r.verdicts if v.name == "euler")
    assert euler.details["e1"] == euler.details["e2"] == euler.details["betti"]


def test_report_rendering_is_deterministic():
    a = build_report(gen_abelian_surface())
    b = build_report(gen_abelian_surface())
    assert a.render("json") == b.render("json")
    assert a.render("text") == b.render("text")
    assert '"schema": "tdmono/report/v1"' in a.render("json")
    assert "K^{ij}" in a.render("text")
