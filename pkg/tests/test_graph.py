import random

import pytest

from ssiarch.dsl import load_model
from ssiarch.graph import (
    DepGraph,
    EdgeKind,
    GraphScope,
    build_graph,
    graph_stats,
    to_dot,
    to_tsv,
)
from ssiarch.kb import ActorKind, DependencyRelation, NfrKey


def test_builtin_relations_graph(kb):
    g = build_graph(kb.dependencies)
    assert g.nodes == ("o", "i", "v", "w")
    assert len(g.edges) == 8
    assert all(kind is EdgeKind.DEPENDENCY for _, _, _, kind in g.edges)


def test_empty_graph():
    g = build_graph(set())
    assert g.nodes == ()
    assert g.edges == ()
    assert to_dot(g) == "digraph deps {\n}\n"
    assert to_tsv(g) == ""


def test_ownership_only_graph():
    ownership = {NfrKey.NFR8: frozenset({ActorKind.GLOBAL_SYSTEM})}
    g = build_graph(set(), ownership)
    assert g.nodes == ("s",)
    assert g.edges == (("s", "s", NfrKey.NFR8, EdgeKind.OWNERSHIP),)


def test_dot_single_edge(kb):
    rel = DependencyRelation(ActorKind.VERIFIER, ActorKind.ISSUER, NfrKey.NFR2)
    dot = to_dot(build_graph({rel}))
    assert '  v -> i [label="D:NFR2"];' in dot.splitlines()


def test_dot_matches_golden_file(kb, datadir):
    golden = (datadir.parent / "tests" / "golden" / "builtin_graph.dot").read_text()
    g = build_graph(kb.dependencies, kb.ownership)
    assert to_dot(g) == golden


def test_dot_deterministic_and_injective(kb):
    g1 = build_graph(kb.dependencies, kb.ownership)
    g2 = build_graph(set(kb.dependencies), kb.ownership)
    assert to_dot(g1) == to_dot(g2)
    smaller = build_graph(set(list(kb.dependencies)[:4]), kb.ownership)
    assert to_dot(smaller) != to_dot(g1)


def test_tsv_format(kb):
    rel = DependencyRelation(ActorKind.VERIFIER, ActorKind.ISSUER, NfrKey.NFR2)
    assert to_tsv(build_graph({rel})) == "v\ti\tD\tNFR2\n"


def test_no_self_loop_d_edges(kb):
    g = build_graph(kb.dependencies, kb.ownership)
    for src, dst, _, kind in g.edges:
        if kind is EdgeKind.DEPENDENCY:
            assert src != dst


def test_graph_stats_builtin(kb):
    g = build_graph(kb.dependencies)
    stats = graph_stats(g)
    assert stats.in_degree["i"] >= 4  # dependee of NFR2 x2 and NFR5 x2
    assert stats.d_edge_count == 8
    assert sum(stats.in_degree.values()) == sum(stats.out_degree.values()) == 8


def test_graph_stats_empty():
    stats = graph_stats(build_graph(set()))
    assert stats.node_count == 0
    assert stats.d_edge_count == 0
    assert stats.o_edge_count == 0


def test_graph_stats_single_edge():
    rel = DependencyRelation(ActorKind.DATA_OWNER, ActorKind.WALLET, NfrKey.NFR1)
    stats = graph_stats(build_graph({rel}))
    assert stats.out_degree["o"] == 1
    assert stats.in_degree["w"] == 1
    assert stats.in_degree["o"] == 0


@pytest.mark.parametrize("seed", range(20))
def test_degree_conservation_random(seed):
    rng = random.Random(seed)
    kinds = list(ActorKind)
    rels = set()
    for _ in range(rng.randint(0, 30)):
        a, b = rng.sample(kinds, 2)
        rels.add(DependencyRelation(a, b, NfrKey(rng.randint(1, 24))))
    stats = graph_stats(build_graph(rels))
    assert sum(stats.in_degree.values()) == stats.d_edge_count
    assert sum(stats.out_degree.values()) == stats.d_edge_count
    assert stats.d_edge_count == len(rels)


def test_model_scoped_graph(kb):
    text = """
    system "x" {
      actor owner "alice" {}
      actor owner "bob" {}
      actor issuer "uni" {}
      actor verifier "library" {}
      wallet "phone" { for: "alice"; }
    }
    """
    model = load_model(text, kb).model
    g = build_graph(kb.dependencies, scope=GraphScope.MODEL_SCOPED, model=model)
    # (v, o) relations fan out to each declared owner instance
    assert ("library", "alice", NfrKey.NFR1, EdgeKind.DEPENDENCY) in g.edges
    assert ("library", "bob", NfrKey.NFR1, EdgeKind.DEPENDENCY) in g.edges
    assert ("alice", "phone", NfrKey.NFR4, EdgeKind.DEPENDENCY) in g.edges


def test_model_scope_requires_model(kb):
    with pytest.raises(ValueError):
        build_graph(kb.dependencies, scope=GraphScope.MODEL_SCOPED)


def test_edges_must_reference_nodes():
    with pytest.raises(ValueError):
        DepGraph(nodes=("o",), edges=(("o", "i", NfrKey.NFR1, EdgeKind.DEPENDENCY),))
