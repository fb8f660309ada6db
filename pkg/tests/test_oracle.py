import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kbeta import oracle
from kbeta.catalog import CatalogKey
from kbeta.errors import GroupBoundExceeded

GROUPS = [(3, 3), (3, 4), (3, 5), (5, 3)]


@pytest.fixture(scope="module", params=GROUPS, ids=lambda g: f"P{g}")
def group(request):
    return oracle.PGroup(*request.param)


def test_defining_relations_hold(group):
    # [PAPER] A^p = B^p = C^(p^(n-2)) = [A,C] = [B,C] = 1, [A,B] = C^(p^(n-3))
    p, n = group.p, group.n
    A, B, C = (group.gens[k] for k in "ABC")
    e = group.identity
    assert group.power(A, p) == e and group.power(B, p) == e
    assert group.power(C, p ** (n - 2)) == e
    assert group.power(C, p ** (n - 3)) != e
    assert group.commutator(A, C) == e and group.commutator(B, C) == e
    assert group.commutator(A, B) == group.power(C, p ** (n - 3))


def test_table_is_a_group(group):
    t = group.table
    N = group.order
    for i in range(N):
        assert sorted(t[i]) == list(range(N))
    assert all(t[0, i] == i and t[i, 0] == i for i in range(N))


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_associativity(group, data):
    i, j, k = (data.draw(st.integers(0, group.order - 1)) for _ in range(3))
    assert group.mul(group.mul(i, j), k) == group.mul(i, group.mul(j, k))


def test_center_by_brute_force(group):
    N = group.order
    center = [g for g in range(N) if all(group.mul(g, h) == group.mul(h, g) for h in range(N))]
    assert center == group.center()
    assert len(center) == group.p ** (group.n - 2)


def test_first_betti_counts_homomorphisms(group):
    # homomorphisms to Z/p are determined by images of A, B, C; count the ones that respect the table
    p = group.p
    count = 0
    for al, be, ga in itertools.product(range(p), repeat=3):
        f = (al * group.a + be * group.b + ga * group.c) % p
        if np.array_equal(f[group.table], (f[:, None] + f[None, :]) % p):
            count += 1
    assert count == p ** oracle.betti(group.p, group.n, 1)[1]


def test_group_properties():
    gp = oracle.group_props(3, 3)
    assert (gp.order, gp.center_order, gp.abelianization, gp.exponent) == (27, 3, [3, 3], 3)
    assert oracle.group_props(3, 4).abelianization == [3, 3, 3]
    assert oracle.group_props(3, 5).abelianization == [3, 3, 9]
    assert oracle.group_props(5, 3).exponent == 5


def test_derived_subgroup_is_generated_by_the_commutator():
    G = oracle.PGroup(3, 4)
    D = G.derived_subgroup()
    assert D == {G.power(G.gens["C"], 3 * k) for k in range(3)}


def test_resolution_is_minimal_and_exact():
    res = oracle.resolve(3, 3, 4)
    assert oracle.check_resolution(res) == {"minimal": True, "d_squared_zero": True}
    assert res.betti == [1, 2, 4, 6, 7]


def test_bound_is_enforced():
    with pytest.raises(GroupBoundExceeded):
        oracle.PGroup(3, 7)
    with pytest.raises(ValueError):
        oracle.PGroup(4, 3, 10**4)


def test_compare_reports_first_mismatch():
    rep = oracle.compare_dims("x", [1, 2, 4], [1, 2, 5])
    assert not rep.passed and rep.first_mismatch == 2


def test_compare_hilbert_p33():
    rep = oracle.compare_hilbert(CatalogKey("P33", 3), 6)
    assert rep.passed, rep.to_dict()


@pytest.mark.slow
def test_compare_hilbert_p5_n3():
    # |P(5,3)| = 125; degrees through 8 take about twenty seconds
    rep = oracle.compare_hilbert(CatalogKey("Pp3", 5), 8)
    assert rep.passed, rep.to_dict()


@pytest.mark.slow
def test_compare_hilbert_p5_n3_high_degree():
    # [DERIVED] Betti numbers of P(5,3) in degrees 15-19, from oracle.resolve(5, 3, 19) run offline
    # (about eleven minutes, too slow to repeat here)
    from kbeta.catalog import load
    from kbeta.gca import GradedQuotient
    h = GradedQuotient(load(CatalogKey("Pp3", 5)), 19).hilbert(19)
    assert h[15:] == [20, 21, 22, 23, 24]
