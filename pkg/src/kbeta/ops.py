"""The primary Bockstein and the first reduced power on a presentation.

Both operations are read off the generator tables and extended to products:
the Bockstein as a degree-one graded derivation, P^1 by the Cartan formula
(which has no cross terms for P^1 alone).  Results are returned in normal
form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import CapExceeded, UndefinedAction
from .gca import GradedQuotient, Polynomial, Presentation
from . import presfile


class OpKind(str, Enum):
    BETA = "beta"
    P1 = "P1"


class Operations:
    """Per-quotient caches for the operation matrices."""

    def __init__(self, Q: GradedQuotient):
        self.Q = Q
        self.pres = Q.pres
        self.ring = Q.ring
        self._beta_mono: dict = {}
        self._p1_mono: dict = {}
        self._p1_table = self.pres.p1_full
        self._beta_mats: dict = {}
        self._p1_mats: dict = {}

    def _split(self, m, i):
        prefix = tuple(e if j < i else 0 for j, e in enumerate(m))
        suffix = tuple(e if j > i else 0 for j, e in enumerate(m))
        return prefix, suffix

    def _derive(self, m, table, opname, signed):
        ring = self.ring
        out = ring.zero()
        for i, e in enumerate(m):
            if not e:
                continue
            name = ring.names[i]
            if name not in table:
                raise UndefinedAction(opname, name)
            val = table[name]
            if val.is_zero():
                continue
            prefix, suffix = self._split(m, i)
            core = val * e
            if e > 1:
                core = Polynomial(ring, {tuple(e - 1 if j == i else 0 for j in range(len(m))): 1}) * core
            term = Polynomial(ring, {prefix: 1}) * core * Polynomial(ring, {suffix: 1})
            if signed and ring.mono_degree(prefix) % 2:
                term = -term
            out = out + term
        return out

    def beta_free(self, q: Polynomial) -> Polynomial:
        """Bockstein of ``q`` in the free algebra (not reduced)."""
        out = self.ring.zero()
        for m, c in q.terms.items():
            if m not in self._beta_mono:
                self._beta_mono[m] = self._derive(m, self.pres.beta, "beta", True)
            out = out + self._beta_mono[m] * c
        return out

    def p1_free(self, q: Polynomial) -> Polynomial:
        out = self.ring.zero()
        for m, c in q.terms.items():
            if m not in self._p1_mono:
                try:
                    self._p1_mono[m] = self._derive(m, self._p1_table, "P1", False)
                except UndefinedAction as exc:
                    self._p1_mono[m] = exc
            val = self._p1_mono[m]
            if isinstance(val, UndefinedAction):
                raise val
            out = out + val * c
        return out

    def beta(self, q: Polynomial) -> Polynomial:
        return self.Q.normal_form(self.beta_free(q))

    def p1(self, q: Polynomial) -> Polynomial:
        return self.Q.normal_form(self.p1_free(q))

    def beta_matrix(self, d: int) -> np.ndarray:
        """Rows: Bockstein of each quotient basis monomial of degree d."""
        if d not in self._beta_mats:
            Q = self.Q
            b = Q.degree_basis(d)
            n1 = Q.dim(d + 1)
            mat = np.zeros((b.dim, n1), dtype=np.int64)
            for i, m in enumerate(b.quotient_basis):
                v = self.beta_free(Polynomial(self.ring, {m: 1}))
                mat[i] = Q.vector(v, d + 1)
            self._beta_mats[d] = mat
        return self._beta_mats[d]

    def p1_matrix(self, d: int) -> tuple[np.ndarray, np.ndarray]:
        """P^1 on the degree-d quotient basis plus a mask of rows where it
        is undefined (those rows are zero)."""
        if d not in self._p1_mats:
            Q = self.Q
            b = Q.degree_basis(d)
            shift = 2 * (self.pres.p - 1)
            n1 = Q.dim(d + shift)
            mat = np.zeros((b.dim, n1), dtype=np.int64)
            undefined = np.zeros(b.dim, dtype=bool)
            for i, m in enumerate(b.quotient_basis):
                try:
                    v = self.p1_free(Polynomial(self.ring, {m: 1}))
                except UndefinedAction:
                    undefined[i] = True
                    continue
                mat[i] = Q.vector(v, d + shift)
            self._p1_mats[d] = (mat, undefined)
        return self._p1_mats[d]

    def beta_vec(self, v, d: int) -> np.ndarray:
        return (np.asarray(v, dtype=np.int64) @ self.beta_matrix(d)) % self.Q.p


def operations(Q: GradedQuotient) -> Operations:
    ops = getattr(Q, "_operations", None)
    if ops is None:
        ops = Operations(Q)
        Q._operations = ops
    return ops


def eval_beta(Q: GradedQuotient, q: Polynomial) -> Polynomial:
    return operations(Q).beta(q)


def eval_p1(Q: GradedQuotient, q: Polynomial) -> Polynomial:
    return operations(Q).p1(q)


@dataclass
class CheckEntry:
    check: str
    subject: str
    status: str  # pass | fail | skipped-undefined | skipped-cap
    degree: int | None = None
    detail: str = ""
    advisory: bool = False

    def to_dict(self) -> dict:
        d = {"check": self.check, "subject": self.subject, "status": self.status,
             "degree": self.degree}
        if self.detail:
            d["detail"] = self.detail
        if self.advisory:
            d["advisory"] = True
        return d


@dataclass
class ClosureReport:
    cap: int
    entries: list = field(default_factory=list)

    @property
    def failures(self) -> list:
        return [e for e in self.entries if e.status == "fail" and not e.advisory]

    @property
    def passed(self) -> bool:
        return not self.failures

    def count(self, status: str, advisory: bool = False) -> int:
        return sum(1 for e in self.entries if e.status == status and e.advisory == advisory)


def check_closure(Q: GradedQuotient, cap: int | None = None) -> ClosureReport:
    """Apply the Bockstein and P^1 to every relation and check that the
    images lie in the relation ideal; also check beta o beta = 0 on the
    quotient basis and evaluate advisory claims recorded in the file."""
    cap = Q.cap if cap is None else cap
    if cap > Q.cap:
        raise CapExceeded(f"closure cap {cap} exceeds quotient cap {Q.cap}")
    ops = operations(Q)
    pres = Q.pres
    shift = 2 * (pres.p - 1)
    report = ClosureReport(cap)
    for r in pres.relations:
        d = r.poly.degree
        for kind, target, fn in ((OpKind.BETA, d + 1, ops.beta_free), (OpKind.P1, d + shift, ops.p1_free)):
            if target > cap:
                report.entries.append(CheckEntry(f"closure:{kind.value}", r.label, "skipped-cap", target))
                continue
            try:
                img = fn(r.poly)
            except UndefinedAction as exc:
                report.entries.append(CheckEntry(f"closure:{kind.value}", r.label, "skipped-undefined",
                                                 target, str(exc)))
                continue
            nf = Q.normal_form(img) if not img.is_zero() else img
            ok = nf.is_zero()
            report.entries.append(CheckEntry(f"closure:{kind.value}", r.label, "pass" if ok else "fail",
                                             target, "" if ok else f"residue {nf}"))
    for d in range(0, cap - 1):
        b1 = ops.beta_matrix(d)
        b2 = ops.beta_matrix(d + 1)
        bad = np.flatnonzero(np.any((b1 @ b2) % Q.p, axis=1))
        basis = Q.degree_basis(d).quotient_basis
        detail = ", ".join(Q.ring.format_monomial(basis[i]) for i in bad[:5])
        report.entries.append(CheckEntry("beta_squared", f"degree {d}", "fail" if bad.size else "pass",
                                         d + 2, detail))
    for claim in pres.meta.get("claims", []):
        report.entries.append(_check_claim(Q, ops, claim, cap))
    return report


def _check_claim(Q, ops, claim, cap) -> CheckEntry:
    ring = Q.ring
    label = claim["label"]
    elem = presfile.parse_poly(ring, claim["element"], f"claim {label}")
    value = presfile.parse_poly(ring, claim["value"], f"claim {label}")
    op = claim["op"]
    shift = {"eq": 0, "beta": 1, "P1": 2 * (Q.p - 1)}[op]
    if elem.is_zero():
        ok = value.is_zero()
        return CheckEntry(f"claim:{op}", label, "pass" if ok else "fail", None,
                          "" if ok else "element vanishes in the free algebra", advisory=True)
    target = elem.degree + shift
    if target > cap:
        return CheckEntry(f"claim:{op}", label, "skipped-cap", target, advisory=True)
    try:
        if op == "eq":
            img = elem
        else:
            img = ops.beta_free(elem) if op == "beta" else ops.p1_free(elem)
    except UndefinedAction as exc:
        return CheckEntry(f"claim:{op}", label, "skipped-undefined", target, str(exc), advisory=True)
    diff = Q.normal_form(img - value)
    ok = diff.is_zero()
    return CheckEntry(f"claim:{op}", label, "pass" if ok else "fail", target,
                      "" if ok else f"difference {diff}", advisory=True)
