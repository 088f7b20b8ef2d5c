import itertools
import random
from functools import lru_cache

import pytest

from oracles import regular_graphs, zero_weights
from xormagic.catalog import catalog_load
from xormagic.graph import Graph, is_connected, neighbors
from xormagic.labeling import Labeling, canonical_bijection, verify_xor_magic
from xormagic.search import (
    BUDGET_EXHAUSTED,
    FEASIBLE,
    INFEASIBLE,
    SearchError,
    SearchOutcome,
    SearchProblem,
    SearchState,
    SearchStats,
    certify,
    propagate,
    solve,
)


@lru_cache(maxsize=None)
def oracle(n, d, mode):
    """(exists a zero-weight d-regular graph, exists a connected one) for canonical labels."""
    order = 1 << n
    values = list(range(order))
    any_ok = conn_ok = False
    for edges in regular_graphs(order, d):
        if zero_weights(edges, order, values, mode == "closed"):
            any_ok = True
            if is_connected(Graph.from_edges(order, edges)):
                conn_ok = True
                break
    return any_ok, conn_ok


def verdict(outcome):
    assert outcome.status in (FEASIBLE, INFEASIBLE)
    return outcome.status == FEASIBLE


def test_regular_graph_counts():
    # known counts of labeled regular graphs on 8 vertices
    counts = {d: sum(1 for _ in regular_graphs(8, d)) for d in range(8)}
    assert counts == {0: 1, 1: 105, 2: 3507, 3: 19355, 4: 19355, 5: 3507, 6: 105, 7: 1}


def test_examples():
    out = solve(SearchProblem(4, 5, "open", require_connected=True))
    assert out.status == FEASIBLE and out.connected
    assert solve(SearchProblem(2, 1, "open")).status == INFEASIBLE
    out = solve(SearchProblem(2, 3, "closed"))
    assert out.status == FEASIBLE and out.graph == Graph.complete(4)
    assert solve(SearchProblem(3, 5, "open", require_connected=False)).status == INFEASIBLE
    out = solve(SearchProblem(4, 4, "closed", require_connected=True))
    assert out.status == FEASIBLE and out.connected


@pytest.mark.parametrize("mode", ["open", "closed"])
@pytest.mark.parametrize("connected", [False, True])
def test_complete_at_order_four(mode, connected):
    for d in range(4):
        expected = oracle(2, d, mode)[1 if connected else 0]
        for sym in (False, True):
            p = SearchProblem(2, d, mode, require_connected=connected, symmetry_breaking=sym)
            assert verdict(solve(p)) == expected, (d, sym)


def test_order_four_against_all_graphs():
    # independent of the regular-graph generator: all 2^6 edge sets
    pairs = list(itertools.combinations(range(4), 2))
    for mode in ("open", "closed"):
        for d in range(4):
            found = False
            for mask in range(64):
                edges = [e for i, e in enumerate(pairs) if mask >> i & 1]
                g = Graph.from_edges(4, edges)
                if set(g.degrees()) == {d} and zero_weights(edges, 4, range(4), mode == "closed"):
                    found = True
            p = SearchProblem(2, d, mode, require_connected=False, symmetry_breaking=False)
            assert verdict(solve(p)) == found


@pytest.mark.parametrize("mode", ["open", "closed"])
@pytest.mark.parametrize("d", range(8))
def test_complete_at_order_eight(mode, d):
    any_ok, conn_ok = oracle(3, d, mode)
    for connected, expected in ((False, any_ok), (True, conn_ok)):
        for sym in (False, True):
            p = SearchProblem(3, d, mode, require_connected=connected, symmetry_breaking=sym)
            assert verdict(solve(p)) == expected


@pytest.mark.parametrize("d", [1, 3, 5, 7])
def test_no_odd_open_at_order_eight(d):
    assert solve(SearchProblem(3, d, "open", require_connected=False)).status == INFEASIBLE
    assert not oracle(3, d, "open")[0]


def test_verdict_independent_of_bijection_order_four():
    for perm in itertools.permutations(range(4)):
        lab = Labeling(2, perm)
        for mode in ("open", "closed"):
            for d in range(4):
                p = SearchProblem(2, d, mode, require_connected=False, labeling=lab)
                assert verdict(solve(p)) == oracle(2, d, mode)[0]


def test_verdict_independent_of_bijection_order_eight():
    rng = random.Random(8)
    for _ in range(6):
        values = list(range(8))
        rng.shuffle(values)
        lab = Labeling(3, values)
        for mode in ("open", "closed"):
            for d in range(8):
                p = SearchProblem(3, d, mode, require_connected=True, labeling=lab)
                out = solve(p)
                assert verdict(out) == oracle(3, d, mode)[1]
                if out.feasible:
                    assert verify_xor_magic(out.graph, lab, mode).is_magic


def test_determinism():
    runs = [solve(SearchProblem(4, 7, "open", seed=3)) for _ in range(2)]
    assert runs[0].graph == runs[1].graph
    other = solve(SearchProblem(4, 7, "open", seed=3))
    assert other.graph == runs[0].graph


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_degree_one_open_fails_without_branching(n):
    out = solve(SearchProblem(n, 1, "open", require_connected=False))
    assert out.status == INFEASIBLE
    assert out.stats.nodes == 0


def _state(n, d, mode="open", labeling=None):
    p = SearchProblem(n, d, mode, require_connected=False, labeling=labeling, linear_propagation=False)
    return SearchState(p)


def test_propagate_saturated_vertex_closes_its_pairs():
    e = catalog_load("fig4-d5")
    s = _state(4, 5, labeling=e.labeling)
    nbrs = sorted(neighbors(e.graph, 0))
    for u in nbrs:
        s.assign(0, u, 1)
    assert propagate(s)
    assert all(s.value(0, u) == 0 for u in range(1, 16) if u not in nbrs)


def test_propagate_conflict_on_last_neighbour():
    s = _state(3, 3)
    s.assign(0, 1, 1)
    s.assign(0, 2, 1)  # partial weight 3
    for u in (3, 4, 6, 7):
        s.assign(0, u, 0)
    # only vertex 5 (label 5 != 3) can still join vertex 0
    assert not propagate(s)


def test_propagate_forces_the_matching_label():
    e = catalog_load("fig4-d5")
    s = _state(4, 5, labeling=e.labeling)
    nbrs = sorted(neighbors(e.graph, 0))
    for u in nbrs[:-1]:
        s.assign(0, u, 1)
    assert propagate(s)
    assert s.value(0, nbrs[-1]) == 1


def test_propagate_full_solution_is_fixpoint():
    e = catalog_load("fig4-d5")
    s = _state(4, 5, labeling=e.labeling)
    for u in range(16):
        for v in range(u + 1, 16):
            s.assign(u, v, int(e.graph.has_edge(u, v)))
    before = list(s.trail)
    assert propagate(s)
    assert s.trail == before


def test_propagate_rejects_wrong_full_assignment():
    e = catalog_load("fig4-d5")
    s = _state(4, 5)  # canonical labels do not fit this graph
    for u in range(16):
        for v in range(u + 1, 16):
            s.assign(u, v, int(e.graph.has_edge(u, v)))
    assert not propagate(s)


def test_propagation_never_cuts_known_solutions():
    # random partial assignments drawn from a true solution stay consistent
    rng = random.Random(5)
    for eid in ("fig4-d5", "fig4-d7", "fig4-d9", "fig4-d11", "fig5-d4"):
        e = catalog_load(eid)
        pairs = [(u, v) for u in range(16) for v in range(u + 1, 16)]
        for _ in range(20):
            for linear in (False, True):
                p = SearchProblem(4, e.degree, e.mode, require_connected=True,
                                  labeling=e.labeling, linear_propagation=linear)
                s = SearchState(p)
                for u, v in rng.sample(pairs, rng.randint(0, 60)):
                    s.assign(u, v, int(e.graph.has_edge(u, v)))
                assert propagate(s)
                for u, v in pairs:
                    val = s.value(u, v)
                    assert val is None or val == int(e.graph.has_edge(u, v))


def test_certify():
    out = solve(SearchProblem(4, 5, "open"))
    p = SearchProblem(4, 5, "open")
    assert certify(out, p)
    u, v = next(iter(out.graph.edges()))
    adj = list(out.graph.adj)
    adj[u] ^= 1 << v
    adj[v] ^= 1 << u
    broken = SearchOutcome(FEASIBLE, Graph(16, adj), True, out.stats)
    assert not certify(broken, p)


def test_certify_catalog_graph():
    e = catalog_load("fig4-d7")
    p = SearchProblem(4, 7, "open", labeling=e.labeling)
    assert certify(SearchOutcome(FEASIBLE, e.graph, True, SearchStats()), p)
    with pytest.raises(SearchError):
        certify(SearchOutcome(INFEASIBLE), p)


def test_budget_is_honest():
    out = solve(SearchProblem(5, 4, "closed", node_limit=5, restart_nodes=None))
    assert out.status == BUDGET_EXHAUSTED
    out = solve(SearchProblem(5, 4, "closed", budget_secs=1e-9, restart_nodes=None))
    assert out.status in (BUDGET_EXHAUSTED, FEASIBLE)


def test_dense_problem_via_complement():
    out = solve(SearchProblem(4, 11, "open"))
    assert out.status == FEASIBLE and verify_xor_magic(out.graph, canonical_bijection(4), "open").is_magic
    plain = solve(SearchProblem(3, 6, "closed", complement_dense=False, require_connected=False))
    viac = solve(SearchProblem(3, 6, "closed", require_connected=False))
    assert plain.status == viac.status


def test_parallel_matches_serial():
    for d, mode in ((5, "open"), (3, "open"), (4, "closed")):
        n = 4 if d != 3 else 3
        serial = solve(SearchProblem(n, d, mode))
        par = solve(SearchProblem(n, d, mode), workers=2)
        assert serial.status == par.status
        if par.feasible:
            assert certify(par, SearchProblem(n, d, mode))


def test_problem_validation():
    with pytest.raises(SearchError):
        SearchProblem(2, 4)
    with pytest.raises(SearchError):
        SearchProblem(2, 1, "half")
    with pytest.raises(SearchError):
        SearchProblem(2, 1, labeling=Labeling(2, [0, 0, 1, 2]))
