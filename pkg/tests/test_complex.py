from __future__ import annotations

import json

import pytest

from conftest import single_line
from tdmono.complex import (
    build_cells,
    check_chain_identities,
    chow_complex,
    homology_table,
    in_support,
    support,
    verify_proposition1,
)
from tdmono.generators import DualGraph, gen_abelian_surface, gen_mumford, gen_ngon
from tdmono.lattice import FgAbGroup, IntMatrix, elementary_divisors
from tdmono.model import parse_model, serialize_model

THETA = DualGraph.from_edges([(1, 2), (1, 2), (1, 2)])


def cycle_coboundary(n: int) -> IntMatrix:
    """Signed vertex-to-edge incidence of C_n: an edge {u<v} gets +1 at v, -1 at u."""
    edges = sorted((min(k, k % n + 1), max(k, k % n + 1)) for k in range(1, n + 1))
    rows = []
    for u, v in edges:
        row = [0] * n
        row[u - 1], row[v - 1] = -1, 1
        rows.append(row)
    return IntMatrix(rows, n)


def test_support():
    assert in_support(1, -1, 1) and in_support(1, -1, 2) and not in_support(1, 2, 0)
    assert len(support(1)) == 6


def test_ngon3_cells():
    cx = build_cells(gen_ngon(3))
    ranks = {(i, j): cx.rank(i, j) for (i, j) in support(1)}
    assert ranks == {(-1, 1): 3, (-1, 2): 0, (0, 0): 3, (0, 1): 3, (1, -1): 0, (1, 0): 3}
    assert cx.rank(2, 0) == 0


def test_bottom_diagonal_cell_is_top_points():
    cx = build_cells(gen_abelian_surface())
    assert cx.rank(-2, 2) == 14  # CH^0 of the triple points


@pytest.mark.parametrize("n", [3, 4, 5])
def test_ngon_differentials_are_graph_maps(n):
    cx = chow_complex(gen_ngon(n))
    assert cx.differential(0, 0) == cycle_coboundary(n)
    assert cx.differential(-1, 1) == -cycle_coboundary(n).T
    assert elementary_divisors(cx.differential(0, 0)) == (1,) * (n - 1)


def test_ngon_monodromy_and_pairing():
    cx = chow_complex(gen_ngon(3))
    assert cx.monodromy(-1, 1) == IntMatrix.identity(3)
    assert cx.monodromy(1, 0).shape == (0, 3)
    assert cx.monodromy_power(1, 0) == IntMatrix.identity(3)
    assert cx.pairing(1, 0) == -IntMatrix.identity(3)
    assert cx.pairing(0, 0) == IntMatrix.identity(3)


def test_single_component_has_zero_differentials():
    cx = chow_complex(single_line())
    assert all(M.is_zero() for M in cx.D.values())
    ht = homology_table(cx)
    assert ht.group(0, 0) == FgAbGroup(1) and ht.group(0, 1) == FgAbGroup(1)
    assert all(ht.group(i, j).is_zero for (i, j) in ht.cells if i != 0)


@pytest.mark.parametrize("m", [gen_ngon(5), gen_mumford(THETA), gen_abelian_surface()], ids=["ngon5", "theta", "ab2"])
def test_chain_identities_hold(m):
    rep = check_chain_identities(chow_complex(m))
    assert rep.passed, rep.summary()


def test_flipped_gysin_sign_breaks_anticommutator():
    doc = json.loads(serialize_model(gen_abelian_surface()))
    g = next(g for g in doc["gysin"] if g["from"] == [1, 2] and g["to"] == [1] and g["deg"] == 0)
    g["matrix"] = [[-x for x in r] for r in g["matrix"]]
    rep = check_chain_identities(chow_complex(parse_model(json.dumps(doc))))
    assert "anticommutator" in rep.codes()


def test_ngon3_homology():
    ht = homology_table(chow_complex(gen_ngon(3)))
    nonzero = {c: str(ht.group(*c)) for c in ht.cells if not ht.group(*c).is_zero}
    assert nonzero == {(0, 0): "Z", (1, 0): "Z", (-1, 1): "Z", (0, 1): "Z"}


def test_theta_homology():
    ht = homology_table(chow_complex(gen_mumford(THETA)))
    assert ht.rank(-1, 1) == 2 and ht.rank(1, 0) == 2
    assert ht.rank(0, 0) == 1 and ht.rank(0, 1) == 1


@pytest.mark.parametrize("n", [3, 4, 6])
def test_ngon_isogeny_and_pairing(n):
    p = verify_proposition1(homology_table(chow_complex(gen_ngon(n))))
    assert p.passed
    assert p.isogeny(1, 0).verdict.cokernel_exponent == n
    assert next(c for c in p.pairings if (c.i, c.j) == (1, 0)).verdict.discriminant == 1


def test_zero_cells_give_vacuous_isogeny():
    p = verify_proposition1(homology_table(chow_complex(gen_mumford(DualGraph.from_edges([(1, 2), (2, 3)])))))
    c = p.isogeny(1, 0)
    assert c.matrix.shape == (0, 0) and c.verdict.is_isogeny


def test_abelian_surface_top_isogeny_golden():
    p = verify_proposition1(homology_table(chow_complex(gen_abelian_surface())))
    assert p.passed
    top = p.isogeny(2, 0)
    assert top.matrix == IntMatrix([[14]])
    assert top.verdict.cokernel_exponent == 14
    assert p.isogeny(1, 0).verdict.cokernel_invariants == (7,)
    assert p.isogeny(1, 1).verdict.cokernel_invariants == (7,)


def test_pairing_is_well_defined_on_classes():
    # shifting a cycle by a boundary does not change its pairings
    cx = chow_complex(gen_mumford(THETA))
    ht = homology_table(cx)
    A = ht.presentation(1, 0).free_basis
    B = ht.presentation(-1, 1).free_basis
    bd = cx.differential(0, 0).col(0)
    shifted = IntMatrix.from_columns([tuple(a + 3 * b for a, b in zip(A.col(0), bd))] + A.columns()[1:], A.nrows)
    Q = cx.pairing(1, 0)
    assert shifted.T @ Q @ B == A.T @ Q @ B
