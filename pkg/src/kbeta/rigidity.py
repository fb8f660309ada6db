"""Exhaustive search for structure-preserving endomorphisms.

An endomorphism is fixed by the images of the generators.  The search walks
the generators in increasing degree, grouping each one with the
generators its Bockstein determines (if beta(h) = c*g then phi(g) is
c^-1 beta(phi(h))).  For each group the constraints that become checkable
are split into those affine in the group's unknowns, solved exactly, and
the rest, which filter the points of the affine solution space.

Constraints, all within the degree cap:
  relations      phi(r) = 0
  beta           phi(beta g) = beta(phi g)
  P1             phi(P1 g) = P1(phi g), where P1 is defined on all of H^|g|
  higher beta    phi(g) survives to page k and d_k[phi g] = [phi(value)]
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import fplin
from .bss import run_pages
from .errors import CapTooSmall, SearchBudgetExceeded
from .gca import GradedQuotient, Polynomial, Presentation
from .ops import operations

DEFAULT_BUDGET = 200_000


class H1Mode(str, Enum):
    FIX_IDENTITY = "fix-identity"
    LINEAR_ISO = "linear-iso"


@dataclass(frozen=True)
class H1Constraint:
    """Prescribed images of the weak generators (y, y' by default).

    ``L`` is a 2x2 matrix of residues; row k gives phi of the k-th weak
    generator in terms of the weak generators.
    """
    mode: H1Mode = H1Mode.FIX_IDENTITY
    L: tuple | None = None
    generators: tuple = ("y", "y'")

    def __post_init__(self):
        if self.mode == H1Mode.LINEAR_ISO:
            if self.L is None:
                raise ValueError("LinearIso needs a matrix")
            object.__setattr__(self, "L", tuple(tuple(int(v) for v in row) for row in self.L))

    @classmethod
    def fix_identity(cls, generators=("y", "y'")) -> "H1Constraint":
        return cls(H1Mode.FIX_IDENTITY, None, tuple(generators))

    @classmethod
    def linear_iso(cls, L, generators=("y", "y'")) -> "H1Constraint":
        return cls(H1Mode.LINEAR_ISO, L, tuple(generators))

    def matrix(self, p: int) -> np.ndarray:
        k = len(self.generators)
        if self.mode == H1Mode.FIX_IDENTITY:
            return np.eye(k, dtype=np.int64)
        m = np.array(self.L, dtype=np.int64) % p
        if fplin.rank_array(m, p) != k:
            raise ValueError(f"matrix {self.L} is not invertible mod {p}")
        return m


def general_linear_group(p: int, k: int = 2):
    """All invertible k x k matrices over F_p, in lexicographic order."""
    for flat in itertools.product(range(p), repeat=k * k):
        m = np.array(flat, dtype=np.int64).reshape(k, k)
        if fplin.rank_array(m, p) == k:
            yield tuple(tuple(int(v) for v in row) for row in m)


@dataclass
class Endomorphism:
    images: dict  # generator -> Polynomial (normal form)

    def to_dict(self) -> dict:
        return {g: str(v) for g, v in self.images.items()}

    def key(self) -> tuple:
        return tuple(sorted((g, tuple(sorted(v.terms.items()))) for g, v in self.images.items()))


@dataclass
class Constraint:
    kind: str  # relation | beta | P1 | higher-beta
    label: str
    degree: int
    gens: frozenset
    poly: Polynomial | None = None  # the phi(...) side
    gen: str | None = None  # for beta / P1 / higher-beta
    page: int | None = None

    def multiplicity(self, unit_gens: set) -> int:
        m = 0
        if self.poly is not None and not self.poly.is_zero():
            idx = [k for k, n in enumerate(self.poly.ring.names) if n in unit_gens]
            m = max(sum(mono[k] for k in idx) for mono in self.poly.terms)
        if self.gen in unit_gens:
            m = max(m, 1)
        return m


@dataclass
class Unit:
    head: str
    members: list  # [(gen, coeff, source)]: phi(gen) = coeff * beta(phi(source)); head has source None
    fixed: np.ndarray | None = None  # prescribed image of the head


class Solver:
    def __init__(self, pres: Presentation, constraint: H1Constraint | None = None, cap: int | None = None,
                 budget: int = DEFAULT_BUDGET, reverse: bool = False, Q: GradedQuotient | None = None):
        self.pres = pres
        self.p = pres.p
        self.constraint = constraint or H1Constraint.fix_identity()
        self.cap = cap if cap is not None else pres.max_generator_degree()
        if self.cap < pres.max_generator_degree():
            raise CapTooSmall(f"cap {self.cap} is below the top generator degree "
                              f"{pres.max_generator_degree()}")
        self.budget = budget
        self.reverse = reverse
        self.Q = Q if Q is not None and Q.cap >= self.cap else GradedQuotient(pres, self.cap)
        self.ops = operations(self.Q)
        self.ring = pres.ring
        self.deg = dict(zip(self.ring.names, self.ring.degrees))
        self.nodes = 0
        self._pages = {}
        self.skipped: list[str] = []
        self.units = self._make_units()
        self.constraints = self._make_constraints()
        self._schedule()

    # setup ---------------------------------------------------------------

    def _make_units(self) -> list[Unit]:
        ring, p = self.ring, self.p
        weak = list(self.constraint.generators)
        for g in weak:
            if g not in ring.index:
                raise ValueError(f"weak generator {g!r} not in presentation")
        L = self.constraint.matrix(p)
        wvecs = [self.Q.vector(ring.gen(g), self.deg[g]) for g in weak]
        fixed = {}
        for k, g in enumerate(weak):
            fixed[g] = sum((int(L[k, j]) * wvecs[j] for j in range(len(weak))), np.zeros_like(wvecs[0])) % p
        order = sorted(ring.names, key=lambda n: (self.deg[n], ring.index[n]))
        taken: set = set()
        units = []
        for h in order:
            if h in taken:
                continue
            members = [(h, 1, None)]
            taken.add(h)
            cur = h
            while True:
                b = self.pres.beta.get(cur)
                if b is None or len(b.terms) != 1:
                    break
                (mono, c), = b.terms.items()
                if sum(mono) != 1:
                    break
                g = ring.names[mono.index(1)]
                if g in taken:
                    break
                members.append((g, fplin.inv(c, p), cur))
                taken.add(g)
                cur = g
            units.append(Unit(h, members, fixed.get(h)))
        return units

    def _make_constraints(self) -> list[Constraint]:
        pres, cap, ops = self.pres, self.cap, self.ops
        shift = 2 * (self.p - 1)
        out = []
        for r in pres.relations:
            d = r.poly.degree
            if d > cap:
                self.skipped.append(f"relation {r.label}: degree {d} above cap")
                continue
            out.append(Constraint("relation", r.label, d, frozenset(r.poly.generators_used()), r.poly))
        for g in self.ring.names:
            d = self.deg[g]
            b = pres.beta.get(g)
            if b is not None and d + 1 <= cap:
                out.append(Constraint("beta", f"beta({g})", d + 1, frozenset(b.generators_used()) | {g},
                                      b, gen=g))
        full = pres.p1_full
        for g in self.ring.names:
            d = self.deg[g]
            if g not in full:
                continue
            if d + shift > cap:
                continue
            _, undefined = ops.p1_matrix(d)
            if np.any(undefined):
                self.skipped.append(f"P1({g}): P1 undefined on part of H^{d}")
                continue
            v = full[g]
            out.append(Constraint("P1", f"P1({g})", d + shift, frozenset(v.generators_used()) | {g}, v, gen=g))
        for hb in pres.higher_bocksteins:
            d = self.deg[hb.gen]
            if d + 1 > cap:
                continue
            out.append(Constraint("higher-beta", f"beta_{hb.page}({hb.gen})", d + 1,
                                  frozenset(hb.value.generators_used()) | {hb.gen}, hb.value,
                                  gen=hb.gen, page=hb.page))
        return out

    def _schedule(self):
        pos = {}
        for k, u in enumerate(self.units):
            for g, _, _ in u.members:
                pos[g] = k
        self.unit_constraints = [[] for _ in self.units]
        for c in self.constraints:
            k = max((pos[g] for g in c.gens), default=0)
            self.unit_constraints[k].append(c)

    def page(self, k: int):
        if k not in self._pages:
            pages = run_pages(self.pres, self.cap - 1, k, self.Q)
            for pg in pages:
                self._pages.setdefault(pg.index, pg)
        return self._pages[k]

    # evaluation -----------------------------------------------------------

    def phi(self, assign: dict, poly: Polynomial, d: int) -> np.ndarray:
        """phi applied to a free-algebra polynomial, as an H^d vector."""
        Q, p = self.Q, self.p
        out = np.zeros(Q.dim(d), dtype=np.int64)
        names = self.ring.names
        for mono, c in poly.terms.items():
            acc, adeg = np.ones(1, dtype=np.int64), 0
            for k, e in enumerate(mono):
                for _ in range(e):
                    g = names[k]
                    acc = Q.mul_vec(acc, adeg, assign[g], self.deg[g])
                    adeg += self.deg[g]
                if e and not np.any(acc):
                    break
            else:
                out = (out + c * acc) % p
        return out

    def residual(self, c: Constraint, assign: dict):
        """Vector that must vanish (higher-beta: a boolean-like vector)."""
        p = self.p
        if c.kind == "relation":
            return self.phi(assign, c.poly, c.degree)
        if c.kind == "beta":
            return (self.phi(assign, c.poly, c.degree) - self.ops.beta_vec(assign[c.gen], self.deg[c.gen])) % p
        if c.kind == "P1":
            d = self.deg[c.gen]
            mat, _ = self.ops.p1_matrix(d)
            return (self.phi(assign, c.poly, c.degree) - assign[c.gen] @ mat) % p
        page = self.page(c.page)
        d = self.deg[c.gen]
        cg = page.classify(assign[c.gen], d)
        cv = page.classify(self.phi(assign, c.poly, d + 1), d + 1)
        if cg is None or cv is None:
            return np.ones(1, dtype=np.int64)
        return (page.apply(cg, d) - cv) % p

    def unit_images(self, unit: Unit, t: np.ndarray, assign: dict) -> dict:
        out = {}
        prev = None
        for g, coeff, src in unit.members:
            if src is None:
                v = np.asarray(t, dtype=np.int64) % self.p
            else:
                v = (coeff * self.ops.beta_vec(prev, self.deg[src])) % self.p
            out[g] = v
            prev = v
        return out

    def family(self, k: int, assign: dict):
        """Affine solution space of unit k's head coordinates under the
        constraints that are affine in them; None if inconsistent."""
        unit = self.units[k]
        p = self.p
        if unit.fixed is not None:
            base = np.asarray(unit.fixed, dtype=np.int64)
            return base, np.zeros((0, base.size), dtype=np.int64)
        n = self.Q.dim(self.deg[unit.head])
        ugens = {g for g, _, _ in unit.members}
        lin = [c for c in self.unit_constraints[k] if c.kind != "higher-beta" and c.multiplicity(ugens) <= 1]
        if not lin:
            return np.zeros(n, dtype=np.int64), np.eye(n, dtype=np.int64)

        def stacked(t):
            a = dict(assign)
            a.update(self.unit_images(unit, t, assign))
            return np.concatenate([self.residual(c, a) for c in lin])

        b0 = stacked(np.zeros(n, dtype=np.int64))
        cols = [(stacked(np.eye(n, dtype=np.int64)[j]) - b0) % p for j in range(n)]
        A = np.stack(cols, axis=1) if cols else np.zeros((b0.size, 0), dtype=np.int64)
        sol = fplin.solve_array(A, (-b0) % p, p)
        if not sol.consistent:
            return None
        return sol.particular, sol.kernel

    def points(self, k: int, assign: dict):
        fam = self.family(k, assign)
        if fam is None:
            return
        part, kern = fam
        unit = self.units[k]
        ugens = {g for g, _, _ in unit.members}
        # a fixed unit skipped the affine solve, so it checks everything here
        nonlin = [c for c in self.unit_constraints[k]
                  if unit.fixed is not None or c.kind == "higher-beta" or c.multiplicity(ugens) > 1]
        dim = kern.shape[0]
        if self.p ** dim > self.budget - self.nodes:
            raise SearchBudgetExceeded(
                f"unit {unit.head}: {self.p}^{dim} candidates exceed the remaining budget")
        coeffs = itertools.product(range(self.p), repeat=dim)
        if self.reverse:
            coeffs = reversed(list(coeffs))
        for s in coeffs:
            self.nodes += 1
            if self.nodes > self.budget:
                raise SearchBudgetExceeded(f"node budget {self.budget} exhausted")
            t = (part + (np.array(s, dtype=np.int64) @ kern if dim else 0)) % self.p
            a = dict(assign)
            a.update(self.unit_images(unit, t, assign))
            if all(not np.any(self.residual(c, a)) for c in nonlin):
                yield a

    # search ---------------------------------------------------------------

    def solve(self) -> list[Endomorphism]:
        out = []

        def rec(k, assign):
            if k == len(self.units):
                out.append(self.endomorphism(assign))
                return
            for a in self.points(k, assign):
                rec(k + 1, a)

        rec(0, {})
        return out

    def endomorphism(self, assign: dict) -> Endomorphism:
        return Endomorphism({g: self.Q.to_poly(assign[g], self.deg[g]) for g in self.ring.names})

    def assignment(self, e: Endomorphism) -> dict:
        return {g: self.Q.vector(e.images[g], self.deg[g]) if not e.images[g].is_zero()
                else np.zeros(self.Q.dim(self.deg[g]), dtype=np.int64) for g in self.ring.names}

    def violations(self, e: Endomorphism) -> list[str]:
        """Labels of constraints that ``e`` breaks (ignoring the H^1 prescription)."""
        a = self.assignment(e)
        return [c.label for c in self.constraints if np.any(self.residual(c, a))]

    def compose(self, e1: Endomorphism, e2: Endomorphism) -> Endomorphism:
        """e1 o e2."""
        a1 = self.assignment(e1)
        imgs = {}
        for g in self.ring.names:
            d = self.deg[g]
            imgs[g] = self.Q.to_poly(self.phi(a1, e2.images[g], d), d) if not e2.images[g].is_zero() \
                else self.ring.zero()
        return Endomorphism(imgs)


def solve(pres: Presentation, c: H1Constraint | None = None, cap: int | None = None,
          budget: int = DEFAULT_BUDGET, reverse: bool = False) -> list[Endomorphism]:
    return Solver(pres, c, cap, budget, reverse).solve()


def surjective_through(pres: Presentation, e: Endomorphism, D: int, Q: GradedQuotient | None = None) -> bool:
    return first_non_surjective_degree(pres, e, D, Q) is None


def first_non_surjective_degree(pres: Presentation, e: Endomorphism, D: int,
                                Q: GradedQuotient | None = None) -> int | None:
    """Smallest d <= D where the image of e misses part of H^d."""
    Q = Q if Q is not None and Q.cap >= D else GradedQuotient(pres, D)
    p = Q.p
    ring = pres.ring
    deg = dict(zip(ring.names, ring.degrees))
    img = {g: (Q.vector(v, deg[g]) if not v.is_zero() else np.zeros(Q.dim(deg[g]), dtype=np.int64))
           for g, v in e.images.items()}
    spans = {0: np.ones((1, 1), dtype=np.int64)}
    for d in range(1, D + 1):
        n = Q.dim(d)
        parts = [img[g].reshape(1, -1) for g in ring.names if deg[g] == d]
        for g in ring.names:
            k = deg[g]
            if k < d and spans[d - k].shape[0]:
                parts.append(Q.mul_rows(spans[d - k], d - k, img[g], k))
        rows = np.vstack(parts) if parts else np.zeros((0, n), dtype=np.int64)
        spans[d], _ = fplin.row_basis(rows % p, p) if rows.shape[0] else (rows, [])
        if spans[d].shape[0] != n:
            return d
    return None


def identity(pres: Presentation) -> Endomorphism:
    return Endomorphism({g: pres.gen(g) for g in pres.ring.names})


@dataclass
class Verdict:
    key: str
    cap: int
    passed: bool
    solutions: list
    surjective: list
    nodes: int
    skipped: list = field(default_factory=list)

    def image_sets(self) -> dict:
        out: dict = {}
        for e in self.solutions:
            for g, v in e.images.items():
                out.setdefault(g, [])
                s = str(v)
                if s not in out[g]:
                    out[g].append(s)
        return out

    def to_dict(self) -> dict:
        return {"key": self.key, "cap": self.cap, "passed": self.passed,
                "solution_count": len(self.solutions),
                "all_surjective": all(self.surjective) if self.surjective else False,
                "solutions": [e.to_dict() for e in self.solutions],
                "nodes": self.nodes, "skipped_constraints": self.skipped}


def scan_cap(p: int) -> int:
    """Default cap for a full scan: high enough to see P1 of the degree
    2(p-1) class, which is what rules out the degenerate maps at p >= 5."""
    return max(8 if p == 3 else 2 * p + 4, 4 * (p - 1))


def rigidity_theorem(key, D: int | None = None, budget: int = DEFAULT_BUDGET, pres: Presentation | None = None,
                     directory=None) -> Verdict:
    from .catalog import load

    pres = load(key, directory) if pres is None else pres
    D = scan_cap(pres.p) if D is None else D
    solver = Solver(pres, H1Constraint.fix_identity(), D, budget)
    sols = solver.solve()
    surj = [surjective_through(pres, e, D, solver.Q) for e in sols]
    return Verdict(str(key), D, bool(sols) and all(surj), sols, surj, solver.nodes, solver.skipped)


@dataclass
class WeakGenReport:
    key: str
    cap: int
    rows: list = field(default_factory=list)  # per L: matrix, solutions, all surjective

    @property
    def scanned(self) -> int:
        return len(self.rows)

    @property
    def passed(self) -> bool:
        return all(r["all_surjective"] for r in self.rows)

    def to_dict(self) -> dict:
        return {"key": self.key, "cap": self.cap, "scanned": self.scanned, "passed": self.passed,
                "extending": sum(1 for r in self.rows if r["solutions"]),
                "total_solutions": sum(r["solutions"] for r in self.rows), "rows": self.rows}


def weak_generation_check(pres: Presentation, D: int, budget: int = DEFAULT_BUDGET, key: str = "") -> WeakGenReport:
    rep = WeakGenReport(key or str(pres.meta.get("name")), D)
    weak = tuple(pres.meta.get("weak_generators", ("y", "y'")))
    Q = GradedQuotient(pres, D)
    for L in general_linear_group(pres.p, len(weak)):
        solver = Solver(pres, H1Constraint.linear_iso(L, weak), D, budget, Q=Q)
        sols = solver.solve()
        surj = [surjective_through(pres, e, D, Q) for e in sols]
        rep.rows.append({"L": [list(r) for r in L], "solutions": len(sols), "all_surjective": all(surj),
                         "nodes": solver.nodes})
    return rep


@dataclass
class ForcedSteps:
    """Outcome of propagating constraints on the p >= 5 presentation
    without a full scan."""
    beta_forced: dict = field(default_factory=dict)  # x, x' -> images seen
    y_images: list = field(default_factory=list)
    y1_images: list = field(default_factory=list)
    y_scalar: bool = True  # every phi(Y) lies in span(Y), every phi(Y') in span(Y')
    top_coefficient: list = field(default_factory=list)  # per branch: (particular, kernel coefficients)
    branches: int = 0
    nodes: int = 0

    @property
    def x_fixed(self) -> bool:
        return self.beta_forced.get("x") == ["x"] and self.beta_forced.get("x'") == ["x'"]

    @property
    def top_forced_to_one(self) -> bool:
        return bool(self.top_coefficient) and all(
            part == 1 and not any(kern) for part, kern in self.top_coefficient)

    @property
    def passed(self) -> bool:
        return self.x_fixed and self.y_scalar and self.top_forced_to_one

    def to_dict(self) -> dict:
        return {"x_images": self.beta_forced.get("x", []), "x1_images": self.beta_forced.get("x'", []),
                "Y_images": self.y_images, "Y1_images": self.y1_images, "Y_scalar": self.y_scalar,
                "top_coefficient": [{"particular": a, "kernel": k} for a, k in self.top_coefficient],
                "branches": self.branches, "nodes": self.nodes, "passed": self.passed}


def forced_steps(pres: Presentation, cap: int | None = None, budget: int = DEFAULT_BUDGET,
                 top: str | None = None) -> ForcedSteps:
    """Run the search through the units below d_{p-1} and report the affine
    family of phi(d_{p-1}) on every surviving branch."""
    p = pres.p
    cap = cap if cap is not None else 2 * p + 4
    top = top or f"d_{p - 1}"
    solver = Solver(pres, H1Constraint.fix_identity(), cap, budget)
    out = ForcedSteps()
    heads = [u.head for u in solver.units]
    k_top = heads.index(top)
    Q, ring = solver.Q, pres.ring
    col = Q.degree_basis(solver.deg[top]).quotient_index[ring.gen_monomial(top)]
    span = {g: Q.vector(ring.gen(g), 2) for g in ("Y", "Y'")}

    def record(assign):
        for g in ("x", "x'"):
            s = str(Q.to_poly(assign[g], 2))
            seen = out.beta_forced.setdefault(g, [])
            if s not in seen:
                seen.append(s)
        for g, store in (("Y", out.y_images), ("Y'", out.y1_images)):
            v = assign[g]
            s = str(Q.to_poly(v, 2))
            if s not in store:
                store.append(s)
            if fplin.rank_array(np.vstack([span[g], v]), p) > 1:
                out.y_scalar = False

    def rec(k, assign):
        if k == k_top:
            out.branches += 1
            record(assign)
            fam = solver.family(k, assign)
            if fam is None:
                return
            part, kern = fam
            out.top_coefficient.append((int(part[col]), [int(v) for v in kern[:, col]]))
            return
        for a in solver.points(k, assign):
            rec(k + 1, a)

    rec(0, {})
    out.nodes = solver.nodes
    return out
