"""Bockstein spectral sequence pages.

A page E_i is stored degreewise as a pair of subspaces B_i <= Z_i of the
cohomology H^d (boundaries and cycles of all earlier differentials), with
representatives spanning a complement of B_i in Z_i.  The first
differential is the primary Bockstein; later ones come from a table on a
few classes, extended to products of those classes by the Leibniz rule.

Pages carry one degree more than requested (``top = D + 1``) so that the
differential leaving degree D has a target.  In that top degree the cycle
space is an over-estimate (nothing leaving it is computed); dimensions are
only reported through D.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fplin
from .errors import CapExceeded, IllDefinedDifferential, NotACycle, TableValueDead
from .gca import GradedQuotient, Polynomial, Presentation
from .ops import operations


@dataclass
class PageGenerator:
    label: str
    degree: int
    vec: np.ndarray
    delta: np.ndarray
    origin: str  # beta | table | default | target


@dataclass
class Page:
    index: int
    D: int
    Q: GradedQuotient
    Z: dict
    B: dict
    reps: dict
    rep_pivots: dict
    diff: dict = field(default_factory=dict)
    lift: dict = field(default_factory=dict)
    generators: list = field(default_factory=list)
    undetermined: dict = field(default_factory=dict)
    d_squared_failures: list = field(default_factory=list)

    @property
    def p(self) -> int:
        return self.Q.p

    @property
    def top(self) -> int:
        return self.D + 1

    def dim(self, d: int) -> int:
        return self.reps[d].shape[0]

    def dims(self) -> list[int]:
        return [self.dim(d) for d in range(self.D + 1)]

    def classify(self, w, d: int):
        """Coordinates of the class of ``w`` (an H^d vector), or None when
        ``w`` is not a cycle on this page."""
        p = self.p
        Brows, Bpiv = self.B[d]
        v = fplin.reduce_rows(np.asarray(w, dtype=np.int64), Brows, Bpiv, p)
        coords = v[self.rep_pivots[d]] % p
        resid = (v - coords @ self.reps[d]) % p if self.reps[d].shape[0] else v
        if np.any(resid):
            return None
        return coords

    def class_of(self, q: Polynomial):
        d = q.degree
        if d is None:
            raise ValueError("zero polynomial has no degree")
        if d > self.top:
            raise CapExceeded(f"degree {d} beyond page range {self.top}")
        return self.classify(self.Q.vector(q, d), d)

    def rep_poly(self, d: int, k: int) -> Polynomial:
        return self.Q.to_poly(self.reps[d][k], d)

    def is_nonzero_class(self, q: Polynomial) -> bool:
        c = self.class_of(q)
        return c is not None and bool(np.any(c))

    def apply(self, coords, d: int) -> np.ndarray:
        """The page differential on a class given by coordinates."""
        return (np.asarray(coords, dtype=np.int64) @ self.diff[d]) % self.p

    def undetermined_total(self) -> int:
        return int(sum(int(np.sum(m)) for d, m in self.undetermined.items() if d <= self.D))

    def to_dict(self) -> dict:
        return {"page": self.index, "dims": self.dims(),
                "generators": [{"class": g.label, "degree": g.degree, "origin": g.origin}
                               for g in self.generators],
                "undetermined": {str(d): int(np.sum(m)) for d, m in sorted(self.undetermined.items())
                                 if d <= self.D and np.any(m)},
                "d_squared_failures": self.d_squared_failures}


def _subspace(rows, width: int, p: int):
    if width == 0:
        return np.zeros((0, 0), dtype=np.int64), []
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, width)
    if rows.shape[0] == 0:
        return np.zeros((0, width), dtype=np.int64), []
    return fplin.row_basis(rows, p)


def _complement(Z, B, p: int):
    """RREF representatives of Z modulo B."""
    Zrows, _ = Z
    Brows, Bpiv = B
    width = Zrows.shape[1]
    if Zrows.shape[0] == 0:
        return np.zeros((0, width), dtype=np.int64), []
    red = fplin.reduce_rows(Zrows, Brows, Bpiv, p)
    return _subspace(red, width, p)


def page_one(pres: Presentation, D: int, Q: GradedQuotient | None = None) -> Page:
    """E_1 = H with the primary Bockstein as differential."""
    if Q is None:
        Q = GradedQuotient(pres, D + 1)
    elif Q.cap < D + 1:
        raise CapExceeded(f"page range {D} needs quotient cap {D + 1}, have {Q.cap}")
    ops = operations(Q)
    p = Q.p
    Z, B, reps, rp = {}, {}, {}, {}
    for d in range(D + 2):
        n = Q.dim(d)
        eye = np.eye(n, dtype=np.int64)
        Z[d] = (eye, list(range(n)))
        B[d] = (np.zeros((0, n), dtype=np.int64), [])
        reps[d], rp[d] = eye, list(range(n))
    page = Page(1, D, Q, Z, B, reps, rp)
    for d in range(D + 1):
        page.diff[d] = ops.beta_matrix(d) % p
        page.lift[d] = page.diff[d]
        page.undetermined[d] = np.zeros(Q.dim(d), dtype=bool)
    for g in pres.generators:
        if g.degree > D:
            continue
        vec = Q.vector(pres.gen(g.name), g.degree)
        page.generators.append(PageGenerator(g.name, g.degree, vec, ops.beta_vec(vec, g.degree), "beta"))
    for d in range(D):
        if np.any((page.diff[d] @ page.diff[d + 1]) % p):
            page.d_squared_failures.append(d)
    return page


def _as_poly(pres_or_q, item) -> Polynomial:
    return item if isinstance(item, Polynomial) else pres_or_q.gen(item)


def turn_page(page: Page, next_diff_table) -> Page:
    """Pass to E_{i+1} = H(E_i, d_i) and equip it with d_{i+1}.

    ``next_diff_table`` lists ``(source, value)`` pairs; a source is a
    generator name or a polynomial.  Values are their targets under
    d_{i+1}.  Surviving presentation generators not in the table get
    d_{i+1} = 0; the differential is then extended over products of these
    classes by the Leibniz rule.  Classes not reached that way are recorded
    as undetermined and given differential 0.
    """
    Q, p, D, top = page.Q, page.p, page.D, page.top
    pres = Q.pres
    Z, B, reps, rp = {}, {}, {}, {}
    for d in range(top + 1):
        n = Q.dim(d)
        zparts = [page.B[d][0]]
        if d <= D and page.reps[d].shape[0]:
            K = fplin.kernel_array(page.diff[d].T, p)
            if K.shape[0]:
                zparts.append((K @ page.reps[d]) % p)
        elif d > D:
            zparts.append(page.reps[d])
        Z[d] = _subspace(np.vstack(zparts), n, p)
        bparts = [page.B[d][0]]
        if d >= 1 and d - 1 in page.lift and page.lift[d - 1].shape[0]:
            bparts.append(page.lift[d - 1])
        B[d] = _subspace(np.vstack(bparts), n, p)
        reps[d], rp[d] = _complement(Z[d], B[d], p)
    new = Page(page.index + 1, D, Q, Z, B, reps, rp)

    gens: list[PageGenerator] = []
    sources = set()
    for src, val in next_diff_table:
        sp = _as_poly(pres, src)
        label = src if isinstance(src, str) else str(src)
        k = sp.degree
        if k is None or k > D:
            continue
        svec = Q.vector(sp, k)
        if new.classify(svec, k) is None:
            raise NotACycle(f"{label} is not a cycle of d_{page.index}")
        vvec = Q.vector(val, k + 1) if not val.is_zero() else np.zeros(Q.dim(k + 1), dtype=np.int64)
        if new.classify(vvec, k + 1) is None:
            raise TableValueDead(f"value {val} of d_{new.index}({label}) does not survive to page {new.index}")
        gens.append(PageGenerator(label, k, svec, vvec, "table"))
        sources.add(label)
        if k + 1 <= D and np.any(new.classify(vvec, k + 1)):
            gens.append(PageGenerator(f"[{val}]", k + 1, vvec, np.zeros(Q.dim(k + 2), dtype=np.int64),
                                      "target"))
    for g in pres.generators:
        if g.name in sources or g.degree > D:
            continue
        vec = Q.vector(pres.gen(g.name), g.degree)
        c = new.classify(vec, g.degree)
        if c is None or not np.any(c):
            continue
        gens.append(PageGenerator(g.name, g.degree, vec, np.zeros(Q.dim(g.degree + 1), dtype=np.int64),
                                  "default"))
    new.generators = [g for g in gens if g.degree <= D]
    _extend_differential(new)
    return new


def _extend_differential(page: Page):
    Q, p, D = page.Q, page.p, page.D
    # products of page generators with their Leibniz differentials
    prods: dict[int, list] = {0: [(np.ones(1, dtype=np.int64), np.zeros(Q.dim(1), dtype=np.int64))]}
    for g in page.generators:
        k = g.degree
        odd = k % 2 == 1
        snapshot = {d: list(v) for d, v in prods.items()}
        for a in sorted(snapshot):
            for P, dP in snapshot[a]:
                deg, cur, dcur = a, P, dP
                while deg + k <= D:
                    nxt = Q.mul_vec(cur, deg, g.vec, k)
                    if not np.any(nxt):
                        break
                    sign = -1 if deg % 2 else 1
                    dn = (Q.mul_vec(dcur, deg + 1, g.vec, k) + sign * Q.mul_vec(cur, deg, g.delta, k + 1)) % p
                    deg, cur, dcur = deg + k, nxt, dn
                    prods.setdefault(deg, []).append((cur, dcur))
                    if odd:
                        break
    for d in range(D + 1):
        r, r1 = page.dim(d), page.dim(d + 1)
        delta = np.zeros((r, r1), dtype=np.int64)
        undetermined = np.ones(r, dtype=bool)
        items = prods.get(d, [])
        if r and items:
            C = np.zeros((len(items), r), dtype=np.int64)
            Dv = np.zeros((len(items), r1), dtype=np.int64)
            for j, (vec, dvec) in enumerate(items):
                c = page.classify(vec, d)
                if c is None:
                    raise IllDefinedDifferential(f"a product of page-{page.index} classes in degree {d} "
                                                 "is not a cycle")
                dc = page.classify(dvec, d + 1)
                if dc is None:
                    raise IllDefinedDifferential(f"Leibniz value in degree {d + 1} is not a cycle")
                C[j], Dv[j] = c, dc
            rank, red, piv = fplin.rref_array(np.hstack([C, Dv]), p)
            if piv and piv[-1] >= r:
                raise IllDefinedDifferential(
                    f"d_{page.index} is not well defined in degree {d}: a vanishing combination of "
                    "products has a nonzero Leibniz value")
            for j, c in enumerate(piv):
                delta[c] = red[j, r:]
                undetermined[c] = False
        elif r == 0:
            undetermined = np.zeros(0, dtype=bool)
        page.diff[d] = delta
        page.lift[d] = (delta @ page.reps[d + 1]) % p if r1 else np.zeros((r, Q.dim(d + 1)), dtype=np.int64)
        page.undetermined[d] = undetermined
    for d in range(D):
        if np.any((page.diff[d] @ page.diff[d + 1]) % p):
            page.d_squared_failures.append(d)


def run_pages(pres: Presentation, D: int, last: int, Q: GradedQuotient | None = None) -> list[Page]:
    """Pages 1..last, using the presentation's higher Bockstein entries."""
    pages = [page_one(pres, D, Q)]
    for k in range(2, last + 1):
        table = [(hb.gen, hb.value) for hb in pres.bocksteins_on_page(k)]
        pages.append(turn_page(pages[-1], table))
    return pages


@dataclass
class AxiomEntry:
    page: int
    generator: str
    degree: int
    status: str  # pass | mismatch | vacuous | skipped-cap | undetermined
    detail: str = ""

    def to_dict(self) -> dict:
        d = {"page": self.page, "class": self.generator, "degree": self.degree, "status": self.status}
        if self.detail:
            d["detail"] = self.detail
        return d


@dataclass
class AxiomReport:
    entries: list = field(default_factory=list)

    @property
    def mismatches(self) -> list:
        return [e for e in self.entries if e.status == "mismatch"]

    @property
    def passed(self) -> bool:
        return not self.mismatches

    @property
    def vacuous(self) -> bool:
        """No nonzero d_i(x) was actually tested."""
        return not any(e.status in ("pass", "mismatch") and "nonzero" in e.detail for e in self.entries)


def check_axiom_b(pages: list, p: int | None = None) -> AxiomReport:
    """For even x on page i with d_i(x) given and x^p nonzero on page i,
    compare d_{i+1}[x^p] with [x^(p-1) d_i(x)] on page i+1."""
    report = AxiomReport()
    for cur, nxt in zip(pages, pages[1:]):
        Q = cur.Q
        q = Q.p if p is None else p
        for g in cur.generators:
            if g.degree % 2:
                continue
            k, P = g.degree, g.degree * q
            if P + 1 > nxt.top or P > nxt.D:
                report.entries.append(AxiomEntry(cur.index, g.label, P, "skipped-cap"))
                continue
            powers = [g.vec]
            for e in range(2, q + 1):
                powers.append(Q.mul_vec(powers[-1], (e - 1) * k, g.vec, k))
            xp = powers[-1]
            c_cur = cur.classify(xp, P)
            if c_cur is None or not np.any(c_cur):
                report.entries.append(AxiomEntry(cur.index, g.label, P, "vacuous", "x^p vanishes on page"))
                continue
            dx = cur.classify(g.delta, k + 1)
            tag = "d_i(x)=0" if dx is not None and not np.any(dx) else "nonzero d_i(x)"
            c_next = nxt.classify(xp, P)
            rhs = nxt.classify(Q.mul_vec(powers[q - 2], (q - 1) * k, g.delta, k + 1), P + 1)
            if c_next is None or rhs is None:
                report.entries.append(AxiomEntry(cur.index, g.label, P, "undetermined",
                                                 "a side left the cycles of the next page"))
                continue
            if np.any(c_next[nxt.undetermined[P]]):
                report.entries.append(AxiomEntry(cur.index, g.label, P, "undetermined",
                                                 f"{tag}; d_{nxt.index} on [x^p] not determined"))
                continue
            lhs = nxt.apply(c_next, P)
            ok = np.array_equal(lhs % q, rhs % q)
            report.entries.append(AxiomEntry(cur.index, g.label, P, "pass" if ok else "mismatch",
                                             tag if ok else f"{tag}; d_{nxt.index}[x^p]={lhs.tolist()} "
                                             f"but [x^(p-1)d(x)]={rhs.tolist()}"))
    return report


@dataclass
class TowerReport:
    p: int
    n: int
    D: int
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["status"] == "pass" for c in self.checks)


def tower_report(p: int, n: int, D: int, directory=None) -> TowerReport:
    from .catalog import CatalogKey, load

    rep = TowerReport(p, n, D)
    for i in range(1, n - 3):
        pres = load(CatalogKey("Tower", p, None, i), directory)
        try:
            pages = run_pages(pres, D, i + 1)
        except (NotACycle, TableValueDead, IllDefinedDifferential) as exc:
            rep.checks.append({"check": f"tower level {i}", "status": "fail", "detail": str(exc)})
            continue
        final = pages[-1]
        # E_{i+1} of B(Z/p^i) x BZ/p x BZ/p is F_p in degree 0
        want = [1] + [0] * D
        status = "pass" if final.dims() == want else "fail"
        rep.checks.append({"check": f"tower level {i}", "status": status,
                           "detail": f"beta_{i}(u_{i})=v_{i}; E_{i + 1} dims {final.dims()}"})
    pres = load(CatalogKey("Ppn", p, n), directory)
    yy = pres.parse("yy'")
    if n == 4:
        Q = GradedQuotient(pres, max(D, 2))
        bu = operations(Q).beta(pres.gen("u"))
        ok = Q.is_zero(bu - pres.parse("y'y"))
        rep.checks.append({"check": "top extension", "status": "pass" if ok else "fail",
                           "detail": f"beta(u)={bu} (=-yy')"})
        return rep
    top = n - 3
    try:
        pages = run_pages(pres, D, top)
    except (NotACycle, TableValueDead, IllDefinedDifferential) as exc:
        rep.checks.append({"check": "top extension", "status": "fail", "detail": str(exc)})
        return rep
    page = pages[-1]
    cu = page.class_of(pres.gen("u"))
    cyy = page.class_of(yy)
    ok_nonzero = cyy is not None and bool(np.any(cyy))
    rep.checks.append({"check": f"[yy'] nonzero on page {top}", "status": "pass" if ok_nonzero else "fail"})
    if cu is None:
        rep.checks.append({"check": "top extension", "status": "fail", "detail": "u is not a cycle"})
        return rep
    du = page.apply(cu, 1)
    ok = cyy is not None and np.array_equal(du, cyy)
    rep.checks.append({"check": "top extension", "status": "pass" if ok else "fail",
                       "detail": f"beta_{top}(u) - [yy'] = 0 on page {top}" if ok else
                       f"beta_{top}(u)={du.tolist()} vs [yy']={None if cyy is None else cyy.tolist()}"})
    return rep
