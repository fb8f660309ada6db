import numpy as np
import pytest

from kbeta.bss import check_axiom_b, page_one, run_pages, tower_report, turn_page
from kbeta.catalog import CatalogKey, load
from kbeta.errors import NotACycle, TableValueDead
from kbeta.gca import FreeAlgebra, GeneratorInfo, Presentation


def polynomial_fixture(p=3):
    """F_p[x] (x) Lambda(w), |x|=2, |w|=3, beta(x)=w: E_2 is spanned by x^(pk) and x^(pk+p-1)w."""
    ring = FreeAlgebra(p, [GeneratorInfo("x", 2), GeneratorInfo("w", 3)])
    return Presentation(ring, [], {"x": ring.parse("w"), "w": ring.zero()}, {})


def e2_dims_brute(p, D):
    # homology of d(x^k) = k x^(k-1) w, d(x^k w) = 0, counted degree by degree
    dims = []
    for d in range(D + 1):
        if d % 2 == 0:
            dims.append(1 if (d // 2) % p == 0 else 0)
        elif d >= 3:
            k = (d - 3) // 2
            dims.append(1 if (k + 1) % p == 0 else 0)
        else:
            dims.append(0)
    return dims


@pytest.mark.parametrize("p", [3, 5])
def test_second_page_matches_hand_count(p):
    pres = polynomial_fixture(p)
    D = 4 * p + 2
    e1 = page_one(pres, D)
    e2 = turn_page(e1, [(pres.parse(f"x^{p}"), pres.parse(f"x^{p - 1}w"))])
    assert e2.dims() == e2_dims_brute(p, D)


def test_axiom_b_accepts_correct_table():
    pres = polynomial_fixture()
    e1 = page_one(pres, 8)
    e2 = turn_page(e1, [(pres.parse("x^3"), pres.parse("x^2w"))])
    rep = check_axiom_b([e1, e2])
    assert rep.passed
    assert not rep.vacuous
    assert any(e.status == "pass" and e.generator == "x" for e in rep.entries)


@pytest.mark.parametrize("wrong", ["2x^2w", "0"])
def test_axiom_b_flags_wrong_table(wrong):
    pres = polynomial_fixture()
    e1 = page_one(pres, 8)
    e2 = turn_page(e1, [(pres.parse("x^3"), pres.parse(wrong))])
    rep = check_axiom_b([e1, e2])
    assert [e.generator for e in rep.mismatches] == ["x"]


@pytest.mark.parametrize("p", [3, 5])
@pytest.mark.parametrize("i", [1, 2, 3])
def test_cyclic_pages_collapse(p, i):
    pres = load(CatalogKey("Cyclic", p, None, i))
    pages = run_pages(pres, 8, i + 1)
    for pg in pages[:-1]:
        assert pg.dims() == [1] * 9
    assert pages[-1].dims() == [1] + [0] * 8


@pytest.mark.parametrize("i", [1, 2, 3])
def test_tower_levels_collapse(i):
    pres = load(CatalogKey("Tower", 3, None, i))
    pages = run_pages(pres, 8, i + 1)
    assert pages[-1].dims() == [1] + [0] * 8
    assert check_axiom_b(pages).passed


def test_ppn5_second_page(ppn5):
    pages = run_pages(ppn5, 8, 2)
    e2 = pages[-1]
    yy = ppn5.parse("yy'")
    assert e2.is_nonzero_class(yy)
    cu = e2.class_of(ppn5.gen("u"))
    assert np.array_equal(e2.apply(cu, 1), e2.class_of(yy))
    assert check_axiom_b(pages).passed


@pytest.mark.parametrize("n", [4, 5, 6])
def test_tower_report(n):
    rep = tower_report(3, n, 8)
    assert rep.passed, rep.checks


def test_table_source_must_be_a_cycle(p33):
    e1 = page_one(p33, 6)
    with pytest.raises(NotACycle):
        turn_page(e1, [("y", p33.parse("yy'"))])


def test_table_value_must_survive(ppn5):
    e1 = page_one(ppn5, 6)
    with pytest.raises(TableValueDead):
        turn_page(e1, [("u", ppn5.parse("uy"))])


def test_first_page_differential_squares_to_zero(p33):
    assert page_one(p33, 7).d_squared_failures == []
