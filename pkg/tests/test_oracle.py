import itertools
from fractions import Fraction

import pytest

from builders import random_bipartite, seeded
from ufmatch.graph import BipartiteMultigraph
from ufmatch.oracle import (BudgetExceeded, OracleBudget, balanced_sets, brute_force_branching,
                            brute_force_matching, brute_force_max, brute_force_max_weight,
                            brute_force_min_max, brute_force_triangle_free, max_inside,
                            min_max_value, odd_twin_sets, verify_solution)


def square():
    g = BipartiteMultigraph.complete(2, 2)
    return g, [frozenset(g.vertices)]


def test_empty_set_is_feasible():
    g, sets = square()
    assert verify_solution(g, 2, sets, set()) is None


def test_full_square_is_a_violation():
    g, sets = square()
    v = verify_solution(g, 2, sets, set(g.edges))
    assert v.kind == "set" and v.witness == sets[0]


def test_three_square_edges_are_fine():
    g, sets = square()
    assert verify_solution(g, 2, sets, {0, 1, 2}) is None


def test_degree_violation_names_vertex():
    g = BipartiteMultigraph.complete(1, 2)
    v = verify_solution(g, 1, [], {0, 1})
    assert v.kind == "degree" and v.witness == g.plus[0]


def test_max_on_square():
    g, sets = square()
    value, witness = brute_force_max(g, 2, sets)
    assert value == 3 and verify_solution(g, 2, sets, witness) is None


def test_max_on_k33_all_squares():
    g = BipartiteMultigraph.complete(3, 3)
    sets = balanced_sets(g, 2)
    assert len(sets) == 9
    assert brute_force_max(g, 2, sets)[0] == 6


def test_symmetric_triangle_as_one_matching():
    # 3 vertices, 6 arcs; v+ v- twins, odd twin-closed sets forbidden
    arcs = [(u, v) for u in range(3) for v in range(3) if u != v]
    g = BipartiteMultigraph.from_pairs(3, 3, arcs)
    twins = list(zip(g.plus, g.minus))
    assert brute_force_max(g, 1, odd_twin_sets(twins))[0] == 2


def test_weighted_examples():
    gadget = BipartiteMultigraph.from_pairs(2, 1, [(0, 0, 5), (1, 0, 4)])
    assert brute_force_max_weight(gadget, 1, [])[0] == 5
    single = BipartiteMultigraph.from_pairs(1, 1, [(0, 0, 5)])
    assert brute_force_max_weight(single, 1, [])[0] == 5
    zero = BipartiteMultigraph.complete(3, 3)
    assert brute_force_max_weight(zero, 2, [])[0] == 0


def test_budget_is_enforced():
    g = BipartiteMultigraph.complete(5, 6)
    with pytest.raises(BudgetExceeded):
        brute_force_max(g, 2, [], OracleBudget(max_edges=20))
    with pytest.raises(BudgetExceeded):
        brute_force_max(BipartiteMultigraph.complete(4, 4), 2, [], OracleBudget(16, 10))


def test_budget_from_env(monkeypatch):
    monkeypatch.setenv("UFM_ORACLE_BUDGET", "7,99")
    assert OracleBudget.from_env() == OracleBudget(7, 99)


def test_max_inside_counts_only_inner_edges():
    g = BipartiteMultigraph.complete(3, 3)
    S = frozenset(g.plus[:2] + g.minus[:2])
    assert max_inside(g, 2, [], S) == 4
    assert max_inside(g, 2, [S], S) == 3


def test_min_max_on_square():
    g, sets = square()
    assert min_max_value(g, 2, [], lambda U: U in sets) == 3
    assert brute_force_min_max(g, 2, lambda U: U in sets) == 3


def test_source_problem_oracles():
    assert brute_force_matching(3, [(0, 1), (1, 2), (0, 2)]) == 1
    assert brute_force_matching(4, [(0, 1), (1, 2), (2, 3)], [1, 5, 1]) == 5
    assert brute_force_triangle_free(3, [(0, 1), (1, 2), (0, 2)]) == 2
    assert brute_force_triangle_free(4, [(0, 1), (1, 2), (2, 3), (0, 3)]) == 4
    assert brute_force_triangle_free(2, [(0, 1)]) == 2       # x = 2 on the single edge
    assert brute_force_branching(2, [(0, 1, 3), (1, 0, 4)]) == 4
    assert brute_force_branching(3, [(0, 2, 1), (1, 2, 1)]) == 1


def _plain_max(g, t, sets, weights):
    best = Fraction(-1)
    eids = sorted(g.edges)
    for k in range(len(eids) + 1):
        for F in itertools.combinations(eids, k):
            if verify_solution(g, t, sets, F) is None:
                best = max(best, sum((weights[e] for e in F), Fraction(0)))
    return best


def test_pruned_search_matches_plain_enumeration():
    rng = seeded(11)
    for _ in range(40):
        g = random_bipartite(rng, 3, 3, 0.6, weights=(0, 6))
        t = rng.randint(1, 2)
        sets = [frozenset(rng.sample(g.vertices, rng.randint(2, 6))) for _ in range(2)]
        w = {e: g.edges[e].weight for e in g.edges}
        assert brute_force_max_weight(g, t, sets)[0] == _plain_max(g, t, sets, w)
