"""The eight acceptance criteria, one test each.  A pass/fail line per
criterion is printed in the terminal summary."""

import numpy as np
import pytest

from kbeta.bss import check_axiom_b, page_one, run_pages, turn_page
from kbeta.catalog import CatalogKey, load, validate
from kbeta.gca import FreeAlgebra, GeneratorInfo, GradedQuotient, Presentation
from kbeta.oracle import betti, compare_dims
from kbeta.rigidity import H1Constraint, forced_steps, solve, surjective_through, weak_generation_check


@pytest.mark.acceptance(1, "catalog closure under beta and P1, beta o beta = 0")
def test_catalog_closure():
    cases = [(CatalogKey("P33", 3), 8)] + [(CatalogKey("Ppn", 3, n), 8) for n in (4, 5, 6)] + \
        [(CatalogKey("Pp3", 5), 14), (CatalogKey("Ppn", 5, 4), 14)]
    bad = {}
    for key, cap in cases:
        rep = validate(key, cap)
        if not rep.passed:
            bad[str(key)] = [e.to_dict() for e in rep.failures]
    assert not bad, bad


@pytest.mark.acceptance(2, "group resolution dimensions equal presentation dimensions through 6")
def test_oracle_equivalence():
    for key, (p, n), b1 in ((CatalogKey("P33", 3), (3, 3), 2), (CatalogKey("Ppn", 3, 4), (3, 4), 3)):
        b = betti(p, n, 6)
        h = GradedQuotient(load(key), 6).hilbert(6)
        assert b == h, (str(key), b, h)
        assert b[0] == 1 and b[1] == b1


@pytest.mark.acceptance(3, "P(3,3): endomorphisms fixing H^1 fix Y, Y', X, X', move z by alpha with alpha*y = 0")
def test_rigidity_p33(p33):
    Q = GradedQuotient(p33, 8)
    sols = solve(p33, H1Constraint.fix_identity(), 8)
    assert sols
    for e in sols:
        for g in ("Y", "Y'", "X", "X'"):
            assert e.images[g] == p33.gen(g)
        alpha = e.images["z"] - p33.gen("z")
        assert Q.is_zero(alpha * p33.gen("y"))
        assert surjective_through(p33, e, 8, Q)


@pytest.mark.acceptance(4, "P(3,n), n=4,5: u-coefficient a=1 (b=c=0 at n=4), all surjective")
def test_rigidity_ppn():
    for n in (4, 5):
        pres = load(CatalogKey("Ppn", 3, n))
        Q = GradedQuotient(pres, 8)
        basis = Q.degree_basis(1)
        idx = {g: basis.quotient_index[pres.ring.gen_monomial(g)] for g in ("u", "y", "y'")}
        sols = solve(pres, H1Constraint.fix_identity(), 8)
        assert sols
        for e in sols:
            v = Q.vector(e.images["u"], 1)
            assert v[idx["u"]] == 1
            if n == 4:
                assert v[idx["y"]] == 0 and v[idx["y'"]] == 0
            assert surjective_through(pres, e, 8, Q)


@pytest.mark.acceptance(5, "P(3,3) weak generation: all 48 maps on span{y,y'} scanned, extensions surjective")
def test_weak_generation(p33):
    rep = weak_generation_check(p33, 8)
    assert rep.scanned == 48
    assert rep.passed


@pytest.mark.acceptance(6, "Bockstein towers: B Z/3^i collapse at E_(i+1); [yy'] and beta_2(u) on P(3,5)")
def test_bss_tower(ppn5):
    for i in (1, 2, 3):
        pages = run_pages(load(CatalogKey("Cyclic", 3, None, i)), 8, i + 1)
        assert pages[-1].dims() == [1] + [0] * 8
    pages = run_pages(ppn5, 8, 2)
    e2 = pages[-1]
    yy = ppn5.parse("yy'")
    assert e2.is_nonzero_class(yy)
    assert np.array_equal(e2.apply(e2.class_of(ppn5.gen("u")), 1), e2.class_of(yy))
    assert not check_axiom_b(pages).mismatches


@pytest.mark.acceptance(7, "p=5 forced steps: phi(x)=x, phi(x')=x', phi(Y)=cY, phi(Y')=dY', a_(p-1)=1")
def test_forced_steps_p5(pp3_5):
    f = forced_steps(pp3_5, 14)
    assert f.x_fixed
    assert f.y_scalar
    assert f.top_forced_to_one


@pytest.mark.acceptance(8, "negative controls: missing yy'=0 fails at degree 2; wrong beta_2 table is flagged")
def test_negative_controls(p33):
    broken = p33.without_relation("yy'=0")
    rep = compare_dims("broken", betti(3, 3, 6), GradedQuotient(broken, 6).hilbert(6))
    assert not rep.passed and rep.first_mismatch == 2

    ring = FreeAlgebra(3, [GeneratorInfo("x", 2), GeneratorInfo("w", 3)])
    pres = Presentation(ring, [], {"x": ring.parse("w"), "w": ring.zero()}, {})
    e1 = page_one(pres, 8)
    good = check_axiom_b([e1, turn_page(e1, [(ring.parse("x^3"), ring.parse("x^2w"))])])
    wrong = check_axiom_b([e1, turn_page(e1, [(ring.parse("x^3"), ring.parse("2x^2w"))])])
    assert good.passed and not good.vacuous
    assert wrong.mismatches
