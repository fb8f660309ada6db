import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kbeta.catalog import CatalogKey, load
from kbeta.gca import GradedQuotient, Presentation, Relation
from kbeta.ops import check_closure, operations


def word_beta(pres, word):
    """beta of a product of generators, expanded term by term as a signed derivation."""
    ring = pres.ring
    total = ring.zero()
    sign_deg = 0
    for j, g in enumerate(word):
        term = ring.one()
        for k, h in enumerate(word):
            term = term * (pres.beta[h] if k == j else ring.gen(h))
        total = total + (-1) ** sign_deg * term
        sign_deg += ring.degrees[ring.index[g]]
    return total


def word_p1(pres, word):
    ring = pres.ring
    full = pres.p1_full
    total = ring.zero()
    for j in range(len(word)):
        term = ring.one()
        for k, h in enumerate(word):
            term = term * (full[h] if k == j else ring.gen(h))
        total = total + term
    return total


def words(pres, gens=None):
    names = gens or list(pres.ring.names)
    return st.lists(st.sampled_from(names), min_size=1, max_size=4)


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_beta_is_a_signed_derivation(p33, data):
    word = data.draw(words(p33))
    ops = operations(GradedQuotient(p33, 12))
    mono = p33.ring.one()
    for g in word:
        mono = mono * p33.ring.gen(g)
    assert ops.beta_free(mono) == word_beta(p33, word)


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_p1_follows_cartan(p33, data):
    word = data.draw(words(p33))
    ops = operations(GradedQuotient(p33, 12))
    mono = p33.ring.one()
    for g in word:
        mono = mono * p33.ring.gen(g)
    assert ops.p1_free(mono) == word_p1(p33, word)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_beta_leibniz_on_classes(p33, data):
    Q = GradedQuotient(p33, 8)
    ops = operations(Q)
    a, b = data.draw(st.integers(1, 4)), data.draw(st.integers(1, 3))
    u = np.array(data.draw(st.lists(st.integers(0, 2), min_size=Q.dim(a), max_size=Q.dim(a))))
    v = np.array(data.draw(st.lists(st.integers(0, 2), min_size=Q.dim(b), max_size=Q.dim(b))))
    lhs = ops.beta_vec(Q.mul_vec(u, a, v, b), a + b)
    rhs = (Q.mul_vec(ops.beta_vec(u, a), a + 1, v, b) + (-1) ** a * Q.mul_vec(u, a, ops.beta_vec(v, b), b + 1)) % 3
    assert np.array_equal(lhs, rhs)


@pytest.mark.parametrize("key", [CatalogKey("P33", 3), CatalogKey("Ppn", 3, 4), CatalogKey("Ppn", 3, 5)])
def test_beta_squares_to_zero(key):
    pres = load(key)
    Q = GradedQuotient(pres, 8)
    ops = operations(Q)
    for d in range(7):
        assert not np.any((ops.beta_matrix(d) @ ops.beta_matrix(d + 1)) % 3)


def test_instability(p33):
    Q = GradedQuotient(p33, 8)
    ops = operations(Q)
    mat, undefined = ops.p1_matrix(1)
    assert not np.any(mat) and not np.any(undefined)
    mat2, _ = ops.p1_matrix(2)
    for i, m in enumerate(Q.degree_basis(2).quotient_basis):
        mono = p33.ring.one()
        for g, e in zip(p33.ring.names, m):
            mono = mono * p33.ring.gen(g) ** e
        assert np.array_equal(mat2[i], Q.vector(mono**3, 6))


def test_beta_of_p33_generators(p33):
    Q = GradedQuotient(p33, 8)
    ops = operations(Q)
    assert ops.beta(p33.gen("y")) == p33.gen("x")
    assert ops.beta(p33.gen("Y")) == p33.gen("X")
    assert ops.beta(p33.gen("z")).is_zero()


def test_closure_passes_on_p33(p33):
    rep = check_closure(GradedQuotient(p33, 8))
    assert rep.passed
    assert rep.count("pass") > 20


def test_closure_catches_a_wrong_relation(p33):
    ring = p33.ring
    bad = [r if r.label != "yY=xy'" else Relation("yY=-xy'", ring.parse("yY+xy'")) for r in p33.relations]
    pres = Presentation(ring, bad, p33.beta, p33.p1, p33.higher_bocksteins, p33.meta)
    rep = check_closure(GradedQuotient(pres, 8))
    assert not rep.passed
