"""Ground truth from the group itself.

P(p, n) = <A, B, C | A^p = B^p = C^(p^(n-2)) = [A,C] = [B,C] = 1,
[A,B] = C^(p^(n-3))> is realised on normal forms A^a B^b C^c.  Cohomology
dimensions come from a minimal free resolution of F_p over F_p[G],
computed with dense linear algebra on the underlying vector spaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from . import fplin
from .errors import GroupBoundExceeded

DEFAULT_BOUND = 3**6
DEFAULT_HOM_CAP = 6


@dataclass(frozen=True, order=True)
class GroupElement:
    a: int
    b: int
    c: int


def _check_params(p: int, n: int, bound: int):
    if p < 3 or p % 2 == 0 or any(p % q == 0 for q in range(3, int(p**0.5) + 1, 2)):
        raise ValueError(f"p must be an odd prime, got {p}")
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    if p**n > bound:
        raise GroupBoundExceeded(f"|P({p},{n})| = {p**n} exceeds bound {bound}")


def multiply(g: GroupElement, h: GroupElement, p: int, n: int) -> GroupElement:
    # B^b A^a' = A^a' B^b C^(-k a' b) with k = p^(n-3), C central
    k = p ** (n - 3)
    m = p ** (n - 2)
    return GroupElement((g.a + h.a) % p, (g.b + h.b) % p, (g.c + h.c - k * g.b * h.a) % m)


class PGroup:
    """Elements indexed by a + p*b + p^2*c, with a full multiplication table."""

    def __init__(self, p: int, n: int, bound: int = DEFAULT_BOUND):
        _check_params(p, n, bound)
        self.p, self.n = p, n
        self.m = p ** (n - 2)
        self.order = p**n
        idx = np.arange(self.order)
        self.a = idx % p
        self.b = (idx // p) % p
        self.c = idx // (p * p)
        k = p ** (n - 3)
        a2 = (self.a[:, None] + self.a[None, :]) % p
        b2 = (self.b[:, None] + self.b[None, :]) % p
        c2 = (self.c[:, None] + self.c[None, :] - k * self.b[:, None] * self.a[None, :]) % self.m
        self.table = a2 + p * b2 + p * p * c2
        self.identity = 0
        self.gens = {"A": self.index(GroupElement(1, 0, 0)), "B": self.index(GroupElement(0, 1, 0)),
                     "C": self.index(GroupElement(0, 0, 1))}

    def index(self, g: GroupElement) -> int:
        return g.a + self.p * g.b + self.p * self.p * g.c

    def element(self, i: int) -> GroupElement:
        return GroupElement(int(self.a[i]), int(self.b[i]), int(self.c[i]))

    def mul(self, i: int, j: int) -> int:
        return int(self.table[i, j])

    def inverse(self, i: int) -> int:
        return int(np.flatnonzero(self.table[i] == self.identity)[0])

    def power(self, i: int, e: int) -> int:
        out = self.identity
        for _ in range(e):
            out = self.mul(out, i)
        return out

    def commutator(self, i: int, j: int) -> int:
        ii, jj = self.inverse(i), self.inverse(j)
        return self.mul(self.mul(ii, jj), self.mul(i, j))

    def element_order(self, i: int) -> int:
        k, x = 1, i
        while x != self.identity:
            x = self.mul(x, i)
            k += 1
        return k

    def center(self) -> list[int]:
        t = self.table
        return [i for i in range(self.order) if np.array_equal(t[i], t[:, i])]

    def derived_subgroup(self) -> set[int]:
        comms = {self.commutator(i, j) for i in range(self.order) for j in range(self.order)}
        group = {self.identity}
        frontier = set(comms)
        while frontier:
            group |= frontier
            frontier = {self.mul(x, y) for x in group for y in comms} - group
        return group


@dataclass
class GroupProps:
    order: int
    center_order: int
    abelianization: list
    exponent: int


def abelianization_invariants(p: int, n: int) -> list[int]:
    """Smith form of the relation exponents in the abelianization."""
    k, m = p ** (n - 3), p ** (n - 2)
    rel = Matrix([[p, 0, 0], [0, p, 0], [0, 0, m], [0, 0, k]])
    snf = smith_normal_form(rel, domain=ZZ)
    diag = [abs(int(snf[i, i])) for i in range(min(snf.shape))]
    return sorted(d for d in diag if d != 1)


def group_props(p: int, n: int, bound: int = DEFAULT_BOUND) -> GroupProps:
    G = PGroup(p, n, bound)
    orders = [G.element_order(i) for i in range(G.order)]
    exponent = math.lcm(*orders)
    return GroupProps(G.order, len(G.center()), abelianization_invariants(p, n), exponent)


@dataclass
class ResolutionStep:
    index: int
    rank: int
    boundary: np.ndarray | None  # rows: g*e_j of this term; cols: previous term


@dataclass
class Resolution:
    p: int
    n: int
    steps: list = field(default_factory=list)

    @property
    def betti(self) -> list[int]:
        return [s.rank for s in self.steps]


def _left_action(G: PGroup, s: int, rank: int) -> np.ndarray:
    """Permutation of coordinates of F_p[G]^rank induced by left mult by s."""
    perm = G.table[s]  # g -> s*g
    N = G.order
    out = np.empty(rank * N, dtype=np.int64)
    for j in range(rank):
        out[j * N + np.arange(N)] = j * N + perm
    return out


def _act(vecs: np.ndarray, perm: np.ndarray) -> np.ndarray:
    out = np.zeros_like(vecs)
    out[:, perm] = vecs
    return out


def resolve(p: int, n: int, D: int, bound: int = DEFAULT_BOUND) -> Resolution:
    """Minimal free resolution of the trivial module through homological degree D."""
    G = PGroup(p, n, bound)
    N = G.order
    res = Resolution(p, n, [ResolutionStep(0, 1, None)])
    # the kernel of augmentation F_p[G] -> F_p: elements with coefficient sum 0
    prev = np.ones((N, 1), dtype=np.int64)
    rank = 1
    gens = list(G.gens.values())
    for i in range(1, D + 1):
        K = fplin.kernel_array(prev.T, p)
        if K.shape[0] == 0:
            res.steps.append(ResolutionStep(i, 0, np.zeros((0, prev.shape[0]), dtype=np.int64)))
            prev = np.zeros((0, prev.shape[0]), dtype=np.int64)
            rank = 0
            continue
        perms = [_left_action(G, s, rank) for s in gens]
        ik = np.vstack([(_act(K, perm) - K) % p for perm in perms])
        ik_rows, ik_piv = fplin.row_basis(ik, p)
        reduced = fplin.reduce_rows(K, ik_rows, ik_piv, p) if len(ik_piv) else K % p
        new_gens, _ = fplin.row_basis(reduced, p)
        b = new_gens.shape[0]
        boundary = np.zeros((b * N, rank * N), dtype=np.int64)
        for g in range(N):
            perm = _left_action(G, g, rank)
            boundary[np.arange(b) * N + g] = _act(new_gens, perm)
        res.steps.append(ResolutionStep(i, b, boundary))
        prev = boundary
        rank = b
    return res


def check_resolution(res: Resolution) -> dict:
    """Minimality (boundaries land in the augmentation ideal times the
    target) and d o d = 0."""
    p = res.p
    minimal = True
    dd = True
    for k, step in enumerate(res.steps[1:], start=1):
        B = step.boundary
        if B is None or B.size == 0:
            continue
        prev_rank = res.steps[k - 1].rank
        N = B.shape[1] // max(prev_rank, 1)
        sums = B.reshape(B.shape[0], prev_rank, N).sum(axis=2) % p
        minimal &= not np.any(sums) if k > 1 else True
        if k > 1:
            prevB = res.steps[k - 1].boundary
            dd &= not np.any((B @ prevB) % p)
    return {"minimal": bool(minimal), "d_squared_zero": bool(dd)}


@lru_cache(maxsize=None)
def _betti_cached(p: int, n: int, D: int, bound: int) -> tuple:
    return tuple(resolve(p, n, D, bound).betti)


def betti(p: int, n: int, D: int = DEFAULT_HOM_CAP, bound: int = DEFAULT_BOUND) -> list[int]:
    return list(_betti_cached(p, n, D, bound))


@dataclass
class CompareReport:
    key: str
    betti: list
    hilbert: list
    passed: bool
    first_mismatch: int | None

    def to_dict(self) -> dict:
        return {"key": self.key, "betti": self.betti, "hilbert": self.hilbert,
                "passed": self.passed, "first_mismatch": self.first_mismatch}


def compare_dims(label: str, b: list, h: list) -> CompareReport:
    bad = [d for d, (x, y) in enumerate(zip(b, h)) if x != y]
    return CompareReport(label, list(b), list(h), not bad, bad[0] if bad else None)


def group_parameters(key) -> tuple[int, int]:
    if key.family == "P33":
        return 3, 3
    if key.family == "Pp3":
        return key.p, 3
    if key.family == "Ppn":
        return key.p, key.n
    raise ValueError(f"no group attached to family {key.family}")


def compare_hilbert(key, D: int = DEFAULT_HOM_CAP, pres=None, bound: int = DEFAULT_BOUND) -> CompareReport:
    """Betti numbers of P(p,n) against the Hilbert function of the catalog
    presentation (or of ``pres``, which must present the same group)."""
    from .catalog import load
    from .gca import GradedQuotient

    p, n = group_parameters(key)
    pres = load(key) if pres is None else pres
    h = GradedQuotient(pres, D).hilbert(D)
    return compare_dims(str(key), betti(p, n, D, bound), h)
