from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import odd_symmetric_instance, random_bipartite, seeded, vertex_induced
from ufmatch.families import EmptyFamily, OddSymmetricFamily, SquareFreeFamily
from ufmatch.graph import BipartiteMultigraph
from ufmatch.oracle import brute_force_max_weight
from ufmatch.solver_unweighted import augment, find_augmenting_path
from ufmatch.solver_weighted import (DualSolution, WeightedSolver, init_duals, reduced_weight,
                                     solve_max_weight, verify_dual_certificate)


def gadget():
    # u1 - v (5), u2 - v (4), t = 1
    return BipartiteMultigraph.from_pairs(2, 1, [(0, 0, 5), (1, 0, 4)])


def test_init_single_edge():
    g = BipartiteMultigraph.from_pairs(1, 1, [(0, 0, 5)])
    d = init_duals(g)
    assert d.p[g.plus[0]] == 5 and d.p[g.minus[0]] == 0
    assert reduced_weight(g, d, 0) == 0


def test_init_star():
    g = BipartiteMultigraph.from_pairs(1, 2, [(0, 0, 5), (0, 1, 3)])
    d = init_duals(g)
    assert d.p[g.plus[0]] == 5
    assert [reduced_weight(g, d, e) for e in (0, 1)] == [0, 2]


def test_all_zero_weights():
    g = BipartiteMultigraph.complete(3, 3)
    d = init_duals(g)
    assert not any(d.p.values()) and not any(d.q.values())
    res = solve_max_weight(g, SquareFreeFamily(g))
    assert res.value == 0 and res.matching == frozenset()


def test_auxiliary_of_single_edge():
    g = BipartiteMultigraph.from_pairs(1, 1, [(0, 0, 5)])
    s = WeightedSolver(g, EmptyFamily(g, 1))
    D = s.auxiliary()
    assert D.sources == [g.plus[0]] and D.sinks == frozenset(g.minus)
    P = find_augmenting_path(D)
    assert P == [0]
    s.F = augment(s.F, P)
    assert s.auxiliary().sources == []


def test_gadget_dual_update():
    g = gadget()
    u1, u2 = g.plus
    (v,) = g.minus
    s = WeightedSolver(g, EmptyFamily(g, 1))
    s.F = augment(s.F, find_augmenting_path(s.auxiliary()))
    assert s.F == {0}
    D = s.auxiliary()
    assert D.sources == [u2]
    assert find_augmenting_path(D) is None
    assert s.update_duals(D) == 4
    assert (s.duals.p[u1], s.duals.p[u2], s.duals.p[v]) == (1, 0, 4)
    assert s.duals.objective(1) == 5


def test_boundary_edge_sets_the_step():
    # a - x (5), a - y (3), b - x (5): after a - x is taken, a - y is 2 short of tight
    g = BipartiteMultigraph.from_pairs(2, 2, [(0, 0, 5), (0, 1, 3), (1, 0, 5)])
    s = WeightedSolver(g, EmptyFamily(g, 1))
    s.F = augment(s.F, find_augmenting_path(s.auxiliary()))
    D = s.auxiliary()
    assert find_augmenting_path(D) is None
    assert s.update_duals(D) == 2
    assert s.is_tight(1)
    assert find_augmenting_path(s.auxiliary()) is not None


def test_gadget_value_and_dual():
    g = gadget()
    assert brute_force_max_weight(g, 1, [])[0] == 5
    res = solve_max_weight(g, EmptyFamily(g, 1))
    assert res.value == res.dual_value == 5
    assert verify_dual_certificate(g, EmptyFamily(g, 1), res.matching, res.duals).ok


def test_single_edge_value():
    g = BipartiteMultigraph.from_pairs(1, 1, [(0, 0, 5)])
    assert solve_max_weight(g, EmptyFamily(g, 1)).value == 5


def test_vertex_induced_square():
    g = BipartiteMultigraph.complete(2, 2)
    pi = dict(zip(g.vertices, (1, 2, 3, 4)))
    w = {eid: pi[e.plus] + pi[e.minus] for eid, e in g.edges.items()}
    fam = SquareFreeFamily(g)
    best = brute_force_max_weight(g, 2, fam.members(), w)[0]
    assert best == 16
    res = solve_max_weight(g, fam, w)
    assert res.value == res.dual_value == 16
    assert verify_dual_certificate(g, fam, res.matching, res.duals, w).ok


def test_negative_weights_are_refused():
    g = BipartiteMultigraph.from_pairs(1, 1, [(0, 0, -1)])
    with pytest.raises(ValueError):
        solve_max_weight(g, EmptyFamily(g, 1))


def solved_square_instance():
    rng = seeded(4)
    while True:
        g = random_bipartite(rng, 4, 4, 0.7)
        w = vertex_induced(g, rng)
        fam = SquareFreeFamily(g)
        res = solve_max_weight(g, fam, w)
        if res.duals.positive_sets() and res.matching:
            return g, fam, w, res


def test_certificate_detects_perturbed_p():
    g, fam, w, res = solved_square_instance()
    assert verify_dual_certificate(g, fam, res.matching, res.duals, w).ok
    for v in g.vertices:
        p = dict(res.duals.p)
        p[v] += 1
        bad = DualSolution(p, res.duals.q, res.duals.r, res.duals.bounds)
        rep = verify_dual_certificate(g, fam, res.matching, bad, w)
        assert not rep.ok
        assert any(check == "objective" for check, _, _ in rep.failures)


def test_certificate_detects_perturbed_r():
    g, fam, w, res = solved_square_instance()
    for S in res.duals.positive_sets():
        r = dict(res.duals.r)
        r[S] += 1
        bad = DualSolution(res.duals.p, res.duals.q, r, res.duals.bounds)
        assert not verify_dual_certificate(g, fam, res.matching, bad, w).ok


def test_certificate_names_overfull_set():
    g = BipartiteMultigraph.complete(2, 2)
    fam = SquareFreeFamily(g)
    d = init_duals(g)
    rep = verify_dual_certificate(g, fam, set(g.edges), d)
    assert ("primal set", "{+0 +1 -0 -1}", "too many edges inside") in rep.failures


def test_certificate_rejects_non_member_without_oracle():
    g = BipartiteMultigraph.complete(2, 2)
    d = init_duals(g)
    d.r[frozenset(g.plus[:1] + g.minus)] = Fraction(1)
    rep = verify_dual_certificate(g, SquareFreeFamily(g), set(), d)
    assert any("not a member" in detail for _, _, detail in rep.failures)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.booleans())
def test_weighted_optimum_is_certified(seed, square):
    rng = seeded(seed)
    if square:
        g = random_bipartite(rng, rng.randint(1, 5), rng.randint(1, 5), rng.uniform(0.3, 0.8))
        fam = SquareFreeFamily(g)
    else:
        g, fam = odd_symmetric_instance(rng, rng.randint(2, 5))
    w = vertex_induced(g, rng)
    res = solve_max_weight(g, fam, w)
    rep = verify_dual_certificate(g, fam, res.matching, res.duals, w)
    assert rep.ok, rep.lines()
    assert res.value == brute_force_max_weight(g, fam.t, fam.members(), w)[0]
    assert res.duals.is_integral()


def test_modify_on_square_with_zero_potential_corner():
    g = BipartiteMultigraph.from_pairs(4, 2, [(0, 0, 3), (1, 0, 3), (1, 1, 2), (2, 1, 1),
                                              (3, 0, 4), (3, 1, 3)])
    fam = SquareFreeFamily(g)
    res = solve_max_weight(g, fam)
    assert res.modifies == 1
    assert res.value == brute_force_max_weight(g, 2, fam.members())[0] == 12
    assert verify_dual_certificate(g, fam, res.matching, res.duals).ok


def test_modify_on_odd_twin_set():
    # symmetric digraph on 4 vertices encoded for even factors, t = 1
    arcs = [(0, 1, 18), (1, 0, 0), (0, 3, 15), (3, 0, 10), (1, 3, 6), (3, 1, 19)]
    g = BipartiteMultigraph.from_pairs(4, 4, arcs)
    fam = OddSymmetricFamily(g, list(zip(g.plus, g.minus)))
    res = solve_max_weight(g, fam)
    assert res.modifies == 1
    assert res.value == brute_force_max_weight(g, 1, fam.members())[0] == 34
    assert verify_dual_certificate(g, fam, res.matching, res.duals).ok
