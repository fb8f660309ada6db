"""Finitely presented graded-commutative algebras over F_p.

Elements of the free graded-commutative algebra are sparse maps from
exponent vectors (one entry per declared generator) to residues mod p.
Odd generators carry exponent 0 or 1.  The quotient by the relation ideal is
computed one degree at a time by row reduction (``GradedQuotient``).
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import fplin
from .errors import CapExceeded, ParseError

Monomial = tuple  # exponent vector, one entry per generator


@dataclass(frozen=True)
class GeneratorInfo:
    name: str
    degree: int

    @property
    def parity(self) -> int:
        return self.degree % 2


class FreeAlgebra:
    """The free graded-commutative algebra on a list of generators."""

    def __init__(self, p: int, generators):
        if p < 3 or p % 2 == 0:
            raise ValueError(f"p must be an odd prime, got {p}")
        self.p = p
        self.generators = tuple(generators)
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate generator names in {names}")
        for g in self.generators:
            if g.degree < 1:
                raise ValueError(f"generator {g.name} has degree {g.degree} < 1")
        self.names = tuple(names)
        self.degrees = tuple(g.degree for g in self.generators)
        self.odd = tuple(bool(d % 2) for d in self.degrees)
        self.index = {n: i for i, n in enumerate(names)}
        self._token_re = re.compile(
            "|".join(re.escape(n) for n in sorted(names, key=len, reverse=True)))
        self.monomials = lru_cache(maxsize=None)(self._monomials)

    def __repr__(self):
        gens = ", ".join(f"{g.name}:{g.degree}" for g in self.generators)
        return f"FreeAlgebra(p={self.p}, [{gens}])"

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def mono_degree(self, m: Monomial) -> int:
        return sum(e * d for e, d in zip(m, self.degrees))

    def mono_mul(self, a: Monomial, b: Monomial) -> tuple[int, Monomial | None]:
        """Product of two monomials as (sign, monomial); sign 0 means zero.

        Moving an odd factor of ``b`` left past each odd factor of ``a`` with
        a larger index costs a sign.
        """
        odd = self.odd
        swaps = 0
        odd_a_above = 0
        # walk from the last generator down so odd_a_above counts a's odd
        # factors with index strictly greater than i
        for i in range(len(a) - 1, -1, -1):
            if odd[i]:
                if a[i] and b[i]:
                    return 0, None
                if b[i]:
                    swaps += odd_a_above
                if a[i]:
                    odd_a_above += 1
        m = tuple(x + y for x, y in zip(a, b))
        return (-1 if swaps % 2 else 1), m

    def _monomials(self, d: int) -> tuple:
        out = []

        def rec(i, remaining, acc):
            if i == self.ngens:
                if remaining == 0:
                    out.append(tuple(acc))
                return
            deg = self.degrees[i]
            top = 1 if self.odd[i] else remaining // deg
            for e in range(min(top, remaining // deg) + 1):
                acc.append(e)
                rec(i + 1, remaining - e * deg, acc)
                acc.pop()

        if d >= 0:
            rec(0, d, [])
        return tuple(out)

    def unit_monomial(self) -> Monomial:
        return (0,) * self.ngens

    def gen_monomial(self, name: str) -> Monomial:
        m = [0] * self.ngens
        m[self.index[name]] = 1
        return tuple(m)

    def one(self) -> "Polynomial":
        return Polynomial(self, {self.unit_monomial(): 1})

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def gen(self, name: str) -> "Polynomial":
        if name not in self.index:
            raise KeyError(name)
        return Polynomial(self, {self.gen_monomial(name): 1})

    def scalar(self, c: int) -> "Polynomial":
        return Polynomial(self, {self.unit_monomial(): c})

    def monomial(self, exps: dict) -> Monomial:
        m = [0] * self.ngens
        for name, e in exps.items():
            m[self.index[name]] = e
        return tuple(m)

    def format_monomial(self, m: Monomial) -> str:
        parts = []
        for name, e in zip(self.names, m):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"

    def parse(self, text: str) -> "Polynomial":
        return _ExprParser(self, text).parse()


class Polynomial:
    """An F_p-linear combination of monomials of a ``FreeAlgebra``."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: FreeAlgebra, terms=None):
        self.ring = ring
        p = ring.p
        clean = {}
        for m, c in (terms or {}).items():
            c %= p
            if c:
                clean[m] = c
        self.terms = clean

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.ring is not self.ring:
                raise ValueError("polynomials from different algebras")
            return other
        if isinstance(other, (int, np.integer)):
            return self.ring.scalar(int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return Polynomial(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return Polynomial(self.ring, {m: c * int(other) for m, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t: dict = {}
        mm = self.ring.mono_mul
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                s, m = mm(a, b)
                if s:
                    t[m] = t.get(m, 0) + s * ca * cb
        return Polynomial(self.ring, t)

    def __rmul__(self, other):
        if isinstance(other, (int, np.integer)):
            return self * other
        return NotImplemented

    def __pow__(self, e: int):
        out = self.ring.one()
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other) if not isinstance(other, Polynomial) else other
        if other is NotImplemented:
            return False
        return self.ring is other.ring and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degrees(self) -> set:
        return {self.ring.mono_degree(m) for m in self.terms}

    @property
    def degree(self) -> int | None:
        """Common degree of the terms; None for the zero polynomial."""
        ds = self.degrees
        if not ds:
            return None
        if len(ds) > 1:
            raise ValueError(f"polynomial {self} is not homogeneous")
        return ds.pop()

    def is_homogeneous(self) -> bool:
        return len(self.degrees) <= 1

    def generators_used(self) -> set:
        names = self.ring.names
        return {names[i] for m in self.terms for i, e in enumerate(m) if e}

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: t[0], reverse=True)

    def to_terms(self) -> list:
        """Canonical serializable form: ``[[coeff, {gen: exp}], ...]``."""
        names = self.ring.names
        return [[c, {names[i]: e for i, e in enumerate(m) if e}]
                for m, c in self.sorted_terms()]

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for m, c in self.sorted_terms():
            mono = self.ring.format_monomial(m)
            if mono == "1":
                body = str(c)
            elif c == 1:
                body = mono
            else:
                body = f"{c}*{mono}"
            out.append(body)
        return " + ".join(out)

    def __repr__(self):
        return f"Polynomial({self})"


class _ExprParser:
    """Recursive-descent parser for expressions like ``x^2*Y - 2x'(xY'+x'Y)``.

    Juxtaposition multiplies; ``^`` binds tighter than multiplication and
    accepts ``^n`` or ``^{n}``.
    """

    _num = re.compile(r"\d+")

    def __init__(self, ring: FreeAlgebra, text: str):
        self.ring = ring
        self.text = text
        self.tokens = self._tokenize(text)
        self.pos = 0

    def _tokenize(self, text):
        toks = []
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch in "+-*^(){}":
                toks.append(("op", ch, i))
                i += 1
                continue
            m = self._num.match(text, i)
            if m:
                toks.append(("num", int(m.group()), i))
                i = m.end()
                continue
            m = self.ring._token_re.match(text, i)
            if m:
                toks.append(("gen", m.group(), i))
                i = m.end()
                continue
            raise ParseError(f"unexpected character {ch!r} in {text!r}", f"col {i}")
        return toks

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None, len(self.text))

    def _take(self, kind=None, value=None):
        tok = self._peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            raise ParseError(f"expected {value or kind} in {self.text!r}", f"col {tok[2]}")
        self.pos += 1
        return tok

    def parse(self) -> Polynomial:
        if not self.tokens:
            raise ParseError("empty expression")
        out = self._expr()
        if self.pos != len(self.tokens):
            raise ParseError(f"trailing input in {self.text!r}", f"col {self._peek()[2]}")
        return out

    def _expr(self):
        sign = 1
        tok = self._peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.pos += 1
            sign = -1 if tok[1] == "-" else 1
        acc = self._term() * sign
        while True:
            tok = self._peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.pos += 1
                t = self._term()
                acc = acc + t if tok[1] == "+" else acc - t
            else:
                return acc

    def _term(self):
        acc = self._factor()
        while True:
            tok = self._peek()
            if tok[0] == "op" and tok[1] == "*":
                self.pos += 1
                acc = acc * self._factor()
            elif tok[0] in ("num", "gen") or (tok[0] == "op" and tok[1] == "("):
                acc = acc * self._factor()
            else:
                return acc

    def _factor(self):
        base = self._atom()
        tok = self._peek()
        if tok[0] == "op" and tok[1] == "^":
            self.pos += 1
            if self._peek()[1] == "{":
                self.pos += 1
                e = self._take("num")[1]
                self._take("op", "}")
            else:
                e = self._take("num")[1]
            return base ** e
        return base

    def _atom(self):
        tok = self._peek()
        if tok[0] == "num":
            self.pos += 1
            return self.ring.scalar(tok[1])
        if tok[0] == "gen":
            self.pos += 1
            return self.ring.gen(tok[1])
        if tok[0] == "op" and tok[1] == "(":
            self.pos += 1
            inner = self._expr()
            self._take("op", ")")
            return inner
        raise ParseError(f"unexpected token in {self.text!r}", f"col {tok[2]}")


@dataclass
class Relation:
    label: str
    poly: Polynomial


@dataclass
class HigherBockstein:
    page: int
    gen: str
    value: Polynomial


@dataclass
class Presentation:
    """Generators, relations and operation tables of a cohomology ring.

    ``p1`` holds the declared P^1 table; ``p1_full`` adds the values forced
    by instability on generators of degree 1 (zero) and 2 (p-th power).
    """

    ring: FreeAlgebra
    relations: list
    beta: dict
    p1: dict
    higher_bocksteins: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def generators(self):
        return self.ring.generators

    def gen(self, name: str) -> Polynomial:
        return self.ring.gen(name)

    def parse(self, text: str) -> Polynomial:
        return self.ring.parse(text)

    @property
    def p1_full(self) -> dict:
        out = dict(self.p1)
        for g in self.ring.generators:
            if g.name in out:
                continue
            if g.degree == 1:
                out[g.name] = self.ring.zero()
            elif g.degree == 2:
                out[g.name] = self.ring.gen(g.name) ** self.p
        return out

    def p1_origin(self, name: str) -> str | None:
        if name in self.p1:
            return "table"
        deg = self.ring.degrees[self.ring.index[name]]
        return "instability" if deg <= 2 else None

    def bocksteins_on_page(self, page: int) -> list:
        return [hb for hb in self.higher_bocksteins if hb.page == page]

    def max_generator_degree(self) -> int:
        return max(self.ring.degrees)

    def without_relation(self, label: str) -> "Presentation":
        rels = [r for r in self.relations if r.label != label]
        if len(rels) == len(self.relations):
            raise KeyError(label)
        return Presentation(self.ring, rels, dict(self.beta), dict(self.p1),
                            list(self.higher_bocksteins), dict(self.meta))


def monomial_order_key(m: Monomial) -> tuple:
    """Pivot order: later generators dominate, so relations rewrite
    monomials in late/high-degree generators in terms of earlier ones."""
    return tuple(reversed(m))


@dataclass
class DegreeBasis:
    degree: int
    free_monomials: list
    index: dict
    ideal_rows: np.ndarray
    pivots: list
    quotient_basis: list
    quotient_index: dict
    nf: np.ndarray  # free coordinates -> quotient coordinates

    @property
    def dim(self) -> int:
        return len(self.quotient_basis)

    @property
    def rank(self) -> int:
        return len(self.pivots)


class GradedQuotient:
    """Degreewise model of ``free algebra / (relations)`` up to ``cap``."""

    def __init__(self, pres: Presentation, cap: int):
        self.pres = pres
        self.ring = pres.ring
        self.p = pres.p
        self.cap = cap
        self._lock = threading.RLock()
        self._bases: dict = {}
        self._tables: dict = {}
        self._rel_by_degree: dict = {}
        for r in pres.relations:
            d = r.poly.degree
            if d is None:
                continue
            self._rel_by_degree.setdefault(d, []).append(r.poly)

    def _check(self, d: int):
        if d > self.cap:
            raise CapExceeded(f"degree {d} exceeds cap {self.cap}")

    def degree_basis(self, d: int) -> DegreeBasis:
        self._check(d)
        with self._lock:
            if d not in self._bases:
                self._bases[d] = self._compute_basis(d)
            return self._bases[d]

    def _compute_basis(self, d: int) -> DegreeBasis:
        p = self.p
        free = sorted(self.ring.monomials(d), key=monomial_order_key, reverse=True)
        index = {m: i for i, m in enumerate(free)}
        n = len(free)
        blocks = []
        for r in self._rel_by_degree.get(d, []):
            v = np.zeros(n, dtype=np.int64)
            for m, c in r.terms.items():
                v[index[m]] = c
            blocks.append(v.reshape(1, -1))
        if d > 0:
            for gi, gd in enumerate(self.ring.degrees):
                e = d - gd
                if e < 1:
                    continue
                lower = self.degree_basis(e)
                if lower.rank == 0:
                    continue
                g = self.ring.gen_monomial(self.ring.names[gi])
                s_idx, t_idx, sgn = [], [], []
                for k, m in enumerate(lower.free_monomials):
                    s, prod = self.ring.mono_mul(g, m)
                    if s:
                        s_idx.append(k)
                        t_idx.append(index[prod])
                        sgn.append(s)
                if not s_idx:
                    continue
                out = np.zeros((lower.rank, n), dtype=np.int64)
                out[:, t_idx] = lower.ideal_rows[:, s_idx] * np.array(sgn, dtype=np.int64)
                blocks.append(out % p)
        if blocks:
            rows, pivots = fplin.row_basis(np.vstack(blocks), p)
        else:
            rows, pivots = np.zeros((0, n), dtype=np.int64), []
        pivset = set(pivots)
        qcols = [c for c in range(n) if c not in pivset]
        qbasis = [free[c] for c in qcols]
        nf = np.zeros((n, len(qcols)), dtype=np.int64)
        qpos = {c: j for j, c in enumerate(qcols)}
        for c in qcols:
            nf[c, qpos[c]] = 1
        for j, pc in enumerate(pivots):
            nf[pc, :] = (-rows[j, qcols]) % p
        return DegreeBasis(d, free, index, rows, pivots, qbasis,
                           {m: i for i, m in enumerate(qbasis)}, nf)

    def dim(self, d: int) -> int:
        return self.degree_basis(d).dim

    def hilbert(self, D: int) -> list:
        return [self.dim(d) for d in range(D + 1)]

    def free_vector(self, q: Polynomial, d: int | None = None) -> np.ndarray:
        if d is None:
            d = q.degree
        b = self.degree_basis(d)
        v = np.zeros(len(b.free_monomials), dtype=np.int64)
        for m, c in q.terms.items():
            v[b.index[m]] = c
        return v

    def vector(self, q: Polynomial, d: int | None = None) -> np.ndarray:
        """Coordinates of the class of ``q`` in the quotient basis."""
        if d is None:
            d = q.degree
            if d is None:
                raise ValueError("degree of the zero polynomial must be given")
        b = self.degree_basis(d)
        return (self.free_vector(q, d) @ b.nf) % self.p

    def to_poly(self, v, d: int) -> Polynomial:
        b = self.degree_basis(d)
        return Polynomial(self.ring, {b.quotient_basis[i]: int(c)
                                      for i, c in enumerate(v) if c % self.p})

    def normal_form(self, q: Polynomial) -> Polynomial:
        d = q.degree
        if d is None:
            return q
        return self.to_poly(self.vector(q, d), d)

    def is_zero(self, q: Polynomial) -> bool:
        d = q.degree
        return d is None or not np.any(self.vector(q, d))

    def monomial_vector(self, m: Monomial) -> np.ndarray:
        d = self.ring.mono_degree(m)
        b = self.degree_basis(d)
        return b.nf[b.index[m]].copy()

    def product_table(self, a: int, b: int) -> np.ndarray:
        """``T[i, j]`` = coordinates of (basis_a[i] * basis_b[j])."""
        key = (a, b)
        with self._lock:
            if key not in self._tables:
                ba, bb, bc = self.degree_basis(a), self.degree_basis(b), self.degree_basis(a + b)
                t = np.zeros((ba.dim, bb.dim, bc.dim), dtype=np.int64)
                for i, m1 in enumerate(ba.quotient_basis):
                    for j, m2 in enumerate(bb.quotient_basis):
                        s, m = self.ring.mono_mul(m1, m2)
                        if s:
                            t[i, j] = (s * bc.nf[bc.index[m]]) % self.p
                self._tables[key] = t
            return self._tables[key]

    def mul_vec(self, u, a: int, v, b: int) -> np.ndarray:
        t = self.product_table(a, b)
        na, nb, nc = t.shape
        if na == 0 or nb == 0 or nc == 0:
            return np.zeros(nc, dtype=np.int64)
        w = (np.asarray(u, dtype=np.int64) @ t.reshape(na, nb * nc)) % self.p
        return (np.asarray(v, dtype=np.int64) @ w.reshape(nb, nc)) % self.p

    def mul_rows(self, rows, a: int, v, b: int) -> np.ndarray:
        """Multiply each row of ``rows`` (degree a) by ``v`` (degree b)."""
        t = self.product_table(a, b)
        na, nb, nc = t.shape
        rows = np.asarray(rows, dtype=np.int64).reshape(-1, na)
        if rows.shape[0] == 0 or nc == 0:
            return np.zeros((rows.shape[0], nc), dtype=np.int64)
        w = np.tensordot(np.asarray(v, dtype=np.int64), t, axes=([0], [1])) % self.p  # (na, nc)
        return (rows @ w) % self.p

    def mul(self, a: Polynomial, b: Polynomial) -> Polynomial:
        return self.normal_form(a * b)
