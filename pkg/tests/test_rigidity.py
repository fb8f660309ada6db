import dataclasses
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kbeta import catalog_build
from kbeta.catalog import CatalogKey
from kbeta.errors import CapTooSmall, SearchBudgetExceeded
from kbeta.gca import GradedQuotient
from kbeta.rigidity import (Endomorphism, H1Constraint, Solver, first_non_surjective_degree, forced_steps,
                            general_linear_group, identity, rigidity_theorem, solve, surjective_through,
                            weak_generation_check)


@pytest.fixture(scope="module")
def p33_solutions(p33):
    return solve(p33, H1Constraint.fix_identity(), 8)


@pytest.fixture(scope="module")
def ppn4_solver(ppn4):
    s = Solver(ppn4, H1Constraint.fix_identity(), 8)
    return s, s.solve()


def test_identity_is_a_solution(p33_solutions, p33):
    keys = {e.key() for e in p33_solutions}
    assert identity(p33).key() in keys


def test_p33_images_are_fixed(p33_solutions, p33):
    Q = GradedQuotient(p33, 8)
    for e in p33_solutions:
        for g in ("Y", "Y'", "X", "X'"):
            assert e.images[g] == p33.gen(g)
        alpha = e.images["z"] - p33.gen("z")
        assert Q.is_zero(alpha * p33.gen("y"))


def test_p33_degree_two_images_by_brute_force(p33):
    # every phi(Y), phi(Y') in H^2 with the rest fixed, checked against all constraints
    s = Solver(p33, H1Constraint.fix_identity(), 8)
    base = s.assignment(identity(p33))
    n = s.Q.dim(2)
    found = []
    for a, b in itertools.product(itertools.product(range(3), repeat=n), repeat=2):
        assign = dict(base)
        assign["Y"], assign["Y'"] = np.array(a), np.array(b)
        assign["X"] = s.ops.beta_vec(assign["Y"], 2)
        assign["X'"] = s.ops.beta_vec(assign["Y'"], 2)
        if all(not np.any(s.residual(c, assign)) for c in s.constraints):
            found.append((a, b))
    yv = tuple(s.Q.vector(p33.gen("Y"), 2))
    y1v = tuple(s.Q.vector(p33.gen("Y'"), 2))
    assert found == [(yv, y1v)]


@pytest.mark.parametrize("n", [4, 5])
def test_ppn_u_coefficient(n):
    from kbeta.catalog import load
    pres = load(CatalogKey("Ppn", 3, n))
    sols = solve(pres, H1Constraint.fix_identity(), 8)
    assert sols
    for e in sols:
        assert e.images["u"] == pres.gen("u")


def test_higher_bockstein_constraint_is_needed(ppn5):
    pres = dataclasses.replace(ppn5, higher_bocksteins=[])
    sols = solve(pres, H1Constraint.fix_identity(), 8)
    us = {str(e.images["u"]) for e in sols}
    assert us == {"0", "u", "2*u"}
    assert any(not surjective_through(pres, e, 8) for e in sols)


def test_surjectivity_negative_control(p33):
    zero = Endomorphism({g: p33.ring.zero() for g in p33.ring.names})
    assert first_non_surjective_degree(p33, zero, 8) == 1
    assert surjective_through(p33, identity(p33), 8)


def test_search_order_does_not_change_solutions(ppn4_solver, ppn4):
    _, sols = ppn4_solver
    rev = solve(ppn4, H1Constraint.fix_identity(), 8, reverse=True)
    assert {e.key() for e in sols} == {e.key() for e in rev}
    assert len(sols) == len(rev)


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_composition_closure(ppn4_solver, data):
    s, sols = ppn4_solver
    e1 = data.draw(st.sampled_from(sols))
    e2 = data.draw(st.sampled_from(sols))
    assert s.violations(s.compose(e1, e2)) == []


def test_violations_detects_broken_map(ppn4_solver, ppn4):
    s, _ = ppn4_solver
    e = identity(ppn4)
    e.images["x"] = 2 * ppn4.gen("x")
    assert "beta(y)" in s.violations(e)


def test_gl2_has_48_elements():
    assert len(list(general_linear_group(3))) == 48
    assert len(list(general_linear_group(5))) == 480


def test_identity_matrix_reduces_to_fix_identity(p33, p33_solutions):
    sols = solve(p33, H1Constraint.linear_iso(((1, 0), (0, 1))), 8)
    assert {e.key() for e in sols} == {e.key() for e in p33_solutions}


def test_swap_is_recorded(p33):
    sols = solve(p33, H1Constraint.linear_iso(((0, 1), (1, 0))), 8)
    for e in sols:
        assert e.images["y"] == p33.gen("y'")
        assert surjective_through(p33, e, 8)


def test_singular_matrix_rejected(p33):
    with pytest.raises(ValueError):
        Solver(p33, H1Constraint.linear_iso(((1, 1), (2, 2))), 8)


def test_cap_too_small(p33):
    with pytest.raises(CapTooSmall):
        Solver(p33, None, 5)


def test_budget(p33):
    with pytest.raises(SearchBudgetExceeded):
        Solver(p33, H1Constraint.linear_iso(((1, 0), (0, 1))), 8, budget=3).solve()


def test_verdict_serialises():
    v = rigidity_theorem(CatalogKey("P33", 3), 8)
    d = v.to_dict()
    assert d["passed"] and d["solution_count"] == len(d["solutions"]) >= 1
    assert d["solutions"][0]["z"] == "z"


def test_forced_steps_p5(pp3_5):
    f = forced_steps(pp3_5, 14)
    assert f.x_fixed and f.y_scalar and f.top_forced_to_one
    assert "Y" in f.y_images and "Y'" in f.y1_images


def test_forced_steps_do_not_depend_on_lambda():
    pres = catalog_build.pp3(p=5, lam=2)
    f = forced_steps(pres, 14)
    assert f.passed


def test_forced_steps_notice_a_broken_relation(pp3_5):
    # every relation tying c_4 or d_4 to a nonzero right side pins the coefficient on its own;
    # with all of them gone it is free
    pres = pp3_5
    for r in pp3_5.relations:
        if r.label[:3] in ("c_4", "d_4") and not r.label.endswith("=0"):
            pres = pres.without_relation(r.label)
    f = forced_steps(pres, 14)
    assert not f.top_forced_to_one


def test_weak_generation_p33(p33):
    rep = weak_generation_check(p33, 8)
    assert rep.scanned == 48
    assert rep.passed


def test_p5_full_scan_leaves_only_the_identity(pp3_5):
    # below degree 16 the map sending Y to 0 survives; P1 of c_4 removes it
    low = solve(pp3_5, H1Constraint.fix_identity(), 14)
    assert any(not surjective_through(pp3_5, e, 14) for e in low)
    sols = solve(pp3_5, H1Constraint.fix_identity(), 16)
    assert [e.key() for e in sols] == [identity(pp3_5).key()]
