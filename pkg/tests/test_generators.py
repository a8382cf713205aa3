from __future__ import annotations

import pytest

from conftest import random_multigraphs
from tdmono.complex import check_chain_identities, chow_complex
from tdmono.generators import (
    Disconnected,
    DualGraph,
    GeneratorError,
    LoopRejected,
    NTooSmall,
    build_abelian_surface,
    cycle_graph,
    gen_abelian_surface,
    gen_mumford,
    gen_ngon,
    parse_graph,
    spanning_tree_count,
    spanning_tree_count_brute,
    spanning_tree_count_matrix_tree,
)
from tdmono.model import serialize_model, validate_all


def test_ngon_rejects_small_n():
    with pytest.raises(NTooSmall):
        gen_ngon(2)


def test_mumford_rejects_loops_and_disconnected():
    with pytest.raises(LoopRejected):
        DualGraph.from_edges([(1, 1)])
    with pytest.raises(Disconnected):
        gen_mumford(DualGraph.from_edges([(1, 2), (3, 4)]))


def test_theta_graph_model():
    m = gen_mumford(DualGraph.from_edges([(1, 2)] * 3))
    assert m.num_components == 2
    assert m.strata[(1, 2)].ranks == (3,)


@pytest.mark.parametrize("n", range(3, 9))
def test_cycle_json_identical_to_ngon(n):
    assert serialize_model(gen_mumford(cycle_graph(n), name=f"ngon-{n}")) == serialize_model(gen_ngon(n))


def test_parse_graph():
    g = parse_graph("# theta\n1 2\n\n2 1\n1 2\n")
    assert g.edges == ((1, 2), (1, 2), (1, 2)) and g.betti1 == 2
    with pytest.raises(GeneratorError):
        parse_graph("1 x\n")
    with pytest.raises(GeneratorError):
        parse_graph("1 2 3\n")


def test_spanning_tree_examples():
    assert spanning_tree_count(cycle_graph(5)) == 5
    assert spanning_tree_count(DualGraph.from_edges([(1, 2)] * 3)) == 3
    assert spanning_tree_count(DualGraph.from_edges([(1, 2), (2, 3), (2, 4)])) == 1
    k4 = DualGraph.from_edges([(a, b) for a in range(1, 5) for b in range(a + 1, 5)])
    assert spanning_tree_count(k4) == 16  # Cayley: 4^2


def test_spanning_tree_methods_agree():
    for g in random_multigraphs(30, seed=7):
        assert spanning_tree_count_brute(g) == spanning_tree_count_matrix_tree(g)


def test_generated_models_validate():
    models = [gen_ngon(3), gen_mumford(DualGraph.from_edges([(1, 2)] * 3)), gen_abelian_surface()]
    models += [gen_mumford(g) for g in random_multigraphs(5)]
    for m in models:
        assert all(r.passed for r in validate_all(m)), m.name
        assert check_chain_identities(chow_complex(m)).passed, m.name


def test_shipped_abelian_surface_matches_builder():
    m = gen_abelian_surface()
    assert serialize_model(m) == serialize_model(build_abelian_surface())
    assert m.dimension == 2 and m.num_components == 7
    assert len(m.strata_of_size(2)) == 21 and len(m.strata_of_size(3)) == 14
    assert all(m.strata[I].ranks == (1, 4, 1) for I in m.strata_of_size(1))


def test_abelian_builder_rejects_bad_labels():
    with pytest.raises(GeneratorError):
        build_abelian_surface(modulus=5, weight=2)
