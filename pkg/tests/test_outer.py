"""Outer-code constructors, schedule combinatorics, and pattern counting."""

from __future__ import annotations

import itertools

import pytest

from msdkit.outer import (
    EnumerationBudgetExceeded,
    OuterCode,
    c_out,
    count_cycles_of_length,
    first_check_not_lonely,
    four_cycle_free,
    graph_code,
    graph_girth,
    grid_code,
    grid_double_square_count,
    grid_kernel6_count,
    grid_rectangle_count,
    grid_six_point_count,
    hoffman_singleton_graph,
    iter_patterns,
    load_edge_list,
    lonely_and_once,
    once_checks,
    petersen_graph,
    tanner_girth,
    verify_distance_sensitivity,
    zero_violation_count,
)


def single_check_code(k: int) -> OuterCode:
    return OuterCode(k, (tuple(range(k)),), ((0,),))


def adjacency(edges, n):
    adj = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    return adj


def brute_c_out(code: OuterCode, u: int, v: int) -> int:
    count = 0
    for supp in itertools.combinations(range(code.n_out), u):
        par = {}
        for q in supp:
            for c in code.qubit_checks[q]:
                par[c] = par.get(c, 0) ^ 1
        if sum(par.values()) == v:
            count += 1
    return count


# ---------------------------------------------------------------------------
# constructors


def test_grid_11x11_shape():
    g = grid_code((11, 11), ["vertical", "horizontal"])
    assert g.n_out == 121
    assert g.n_check == 22
    assert lonely_and_once(g) == (11, 11)
    assert first_check_not_lonely(g)


def test_grid_rectangular():
    g = grid_code((21, 11), ["vertical", "horizontal"])
    assert g.n_out == 231
    # verticals are columns of height 21, horizontals rows of width 11
    assert len(g.schedule[0]) == 11 and len(g.checks[g.schedule[0][0]]) == 21
    assert len(g.schedule[1]) == 21 and len(g.checks[g.schedule[1][0]]) == 11
    assert lonely_and_once(g)[0] == 21


def test_grid_three_directions():
    g = grid_code((27, 27), ["vertical", "horizontal", "diag_down"])
    assert g.n_out == 729
    assert g.n_check == 81
    assert lonely_and_once(g) == (27, 27)


def test_grid_diagonal_requires_square():
    with pytest.raises(ValueError):
        grid_code((21, 11), ["vertical", "horizontal", "diag_down"])


def test_repeated_qubit_rejected():
    with pytest.raises(ValueError, match="repeated"):
        OuterCode(5, ((0, 0, 1),), ((0,),))


def test_graph_code_petersen():
    code = graph_code(petersen_graph(), girth_expected=5)
    assert code.n_out == 15
    assert code.n_check == 10
    assert all(len(c) == 3 for c in code.checks)


def test_graph_code_girth_mismatch():
    triangle = [(0, 1), (1, 2), (2, 0)]
    with pytest.raises(ValueError, match="girth"):
        graph_code(triangle, girth_expected=5)


def test_hoffman_singleton():
    edges = hoffman_singleton_graph()
    assert len(edges) == 175
    adj = adjacency(edges, 50)
    assert all(len(nbrs) == 7 for nbrs in adj)
    assert graph_girth(adj) == 5
    code = graph_code(edges, girth_expected=5)
    assert code.n_out == 175
    assert code.n_check == 50


def test_five_cycle_counts():
    pet = adjacency(petersen_graph(), 10)
    assert count_cycles_of_length(pet, 5) == 12
    hs = adjacency(hoffman_singleton_graph(), 50)
    assert count_cycles_of_length(hs, 5) == 1260


def test_edge_list_roundtrip():
    text = "# comment\n0 1\n1 2\n"
    assert load_edge_list(text) == [(0, 1), (1, 2)]


def test_serialize_roundtrip():
    g = grid_code((5, 5), ["vertical", "horizontal"])
    back = OuterCode.deserialize(g.serialize())
    assert back.n_out == g.n_out
    assert back.checks == g.checks
    assert back.schedule == g.schedule


# ---------------------------------------------------------------------------
# combinatorics


def test_c_out_acceptance_values():
    assert c_out(grid_code((11, 11), ["vertical", "horizontal"]), 4, 0) == 3025
    assert c_out(grid_code((21, 11), ["vertical", "horizontal"]), 4, 0) == 11550


def test_c_out_budget():
    g = grid_code((5, 5), ["vertical", "horizontal"])
    with pytest.raises(EnumerationBudgetExceeded):
        c_out(g, 7, 0)


def test_c_out_matches_brute_force():
    g = grid_code((4, 5), ["vertical", "horizontal"])
    for u in (1, 2, 3, 4):
        for v in range(0, 5):
            assert c_out(g, u, v) == brute_c_out(g, u, v)


def test_c_out_sensitivity_zero():
    # u + 2v < d forces zero
    g = grid_code((11, 11), ["vertical", "horizontal"])
    assert c_out(g, 1, 0) == 0
    assert c_out(g, 2, 0) == 0
    assert c_out(g, 1, 1) == 0
    assert c_out(g, 3, 0) == 0


def test_anchored_counting_matches_full():
    g = grid_code((5, 5), ["vertical", "horizontal", "diag_down"])
    full = sum(1 for _ in iter_patterns(g, 6, 0))
    assert full == c_out(g, 6, 0) == 50


def test_closed_forms_match_enumeration():
    assert grid_rectangle_count(11, 11) == 3025
    assert grid_rectangle_count(21, 11) == 11550
    g54 = grid_code((5, 4), ["vertical", "horizontal"])
    assert c_out(g54, 6, 0) == grid_six_point_count(5, 4)
    g13 = grid_code((13, 13), ["vertical", "horizontal", "diag_down"])
    assert c_out(g13, 6, 0) == grid_kernel6_count(13) == 3718
    # the corner-sharing square pairs are a strict subfamily for k > 5
    assert grid_double_square_count(13) == 1014 < grid_kernel6_count(13)
    assert grid_kernel6_count(5) == grid_double_square_count(5) == 50


def test_zero_violation_count_fast_paths():
    g11 = grid_code((11, 11), ["vertical", "horizontal"])
    assert zero_violation_count(g11, 4) == 3025
    assert zero_violation_count(g11, 5) == 0
    g13 = grid_code((13, 13), ["vertical", "horizontal", "diag_down"])
    assert zero_violation_count(g13, 6) == 3718
    assert zero_violation_count(g13, 7) == 0
    single = single_check_code(7)
    assert zero_violation_count(single, 2) == 21


# ---------------------------------------------------------------------------
# schedule combinatorics


def test_single_check_lonely():
    code = single_check_code(45)
    assert lonely_and_once(code) == (1, 0)
    assert not first_check_not_lonely(code)


def test_single_round_all_lonely():
    g = grid_code((4, 4), ["vertical"])
    assert lonely_and_once(g)[0] == 4


def test_once_checks_three_direction():
    g = grid_code((7, 7), ["vertical", "horizontal", "diag_down"])
    triples = once_checks(g)
    rounds = g.round_of_check
    # only horizontal checks (round 1) qualify: their qubits meet exactly the diagonal next
    assert {rounds[c] for c, _, _ in triples} == {1}
    assert all(rounds[cj] == 2 for _, _, cj in triples)


def test_first_check_not_lonely_orderings():
    hv = grid_code((6, 6), ["horizontal", "vertical"])
    assert first_check_not_lonely(hv)


# ---------------------------------------------------------------------------
# verification


def test_verify_11x11():
    g = grid_code((11, 11), ["vertical", "horizontal"])
    rep = verify_distance_sensitivity(g, 4)
    assert rep.distance_ok and rep.sensitivity_ok
    assert rep.four_cycle_free
    assert rep.girth >= 6
    assert rep.n_lonely == 11
    # distance is exactly 4: weight-4 unviolated patterns exist
    assert c_out(g, 4, 0) > 0


def test_verify_single_check():
    code = single_check_code(45)
    rep = verify_distance_sensitivity(code, 2)
    assert rep.distance_ok and rep.sensitivity_ok
    assert rep.n_lonely == 1
    assert c_out(code, 2, 0) > 0  # distance exactly 2


def test_verify_27x27():
    g = grid_code((27, 27), ["vertical", "horizontal", "diag_down"])
    rep = verify_distance_sensitivity(g, 6)
    assert rep.distance_ok and rep.sensitivity_ok
    assert rep.n_lonely == 27
    assert rep.four_cycle_free


def test_verify_failure_produces_witness():
    g = grid_code((5, 5), ["vertical", "horizontal"])
    rep = verify_distance_sensitivity(g, 6)  # true distance is 4
    assert not rep.distance_ok
    assert not rep.sensitivity_ok
    assert rep.witness is not None and rep.witness.weight < 6


def test_grid_girth_at_least_six():
    for dirs in (["vertical", "horizontal"],
                 ["vertical", "horizontal", "diag_down"],
                 ["vertical", "horizontal", "diag_down", "diag_up"]):
        g = grid_code((5, 5), dirs)
        assert tanner_girth(g) >= 6
        assert four_cycle_free(g)


def test_simple_grid_classical_distance():
    # D-dimensional simple grid has classical distance 2^D
    for dims, directions in [
        ((5,), ["axis0"]),
        ((3, 4), ["axis0", "axis1"]),
        ((3, 3, 3), ["axis0", "axis1", "axis2"]),
    ]:
        g = grid_code(dims, directions)
        d = 2 ** len(dims)
        for w in range(1, min(d, 7)):
            assert next(iter_patterns(g, w, 0), None) is None
        if d <= 7:
            assert next(iter_patterns(g, d, 0), None) is not None
        else:
            # corners of a box: even along every axis line
            corners = [0, 1, 3, 4, 9, 10, 12, 13]  # 2x2x2 corners in a 3x3x3 grid
            par = {}
            for q in corners:
                for c in g.qubit_checks[q]:
                    par[c] = par.get(c, 0) ^ 1
            assert not any(par.values())
