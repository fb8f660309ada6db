"""Dense exact linear algebra over the prime field F_p.

Matrices are numpy int64 arrays with entries reduced to [0, p).  Vectors are
treated as rows; ``kernel`` therefore returns the right null space of ``m``
(vectors ``v`` with ``m @ v == 0``) as the rows of a 2-d array.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def inverses(p: int) -> np.ndarray:
    """Table of multiplicative inverses mod p (index 0 maps to 0)."""
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    return inv


def inv(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return pow(a, p - 2, p)


@dataclass(frozen=True)
class FpMatrix:
    p: int
    entries: np.ndarray

    def __post_init__(self):
        if self.p < 3 or self.p % 2 == 0 or any(self.p % q == 0 for q in range(3, int(self.p**0.5) + 1, 2)):
            raise ValueError(f"modulus must be an odd prime, got {self.p}")
        a = np.asarray(self.entries, dtype=np.int64)
        if a.ndim != 2:
            a = a.reshape(0 if a.size == 0 else 1, -1)
        object.__setattr__(self, "entries", a % self.p)

    @classmethod
    def from_rows(cls, p: int, rows, cols: int | None = None) -> "FpMatrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls(p, np.zeros((0, cols or 0), dtype=np.int64))
        return cls(p, np.array(rows, dtype=np.int64))

    @classmethod
    def zeros(cls, p: int, rows: int, cols: int) -> "FpMatrix":
        return cls(p, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, p: int, n: int) -> "FpMatrix":
        return cls(p, np.eye(n, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def __matmul__(self, other):
        if isinstance(other, FpMatrix):
            return FpMatrix(self.p, self.entries @ other.entries)
        return (self.entries @ np.asarray(other, dtype=np.int64)) % self.p

    def __eq__(self, other):
        return (isinstance(other, FpMatrix) and self.p == other.p
                and self.entries.shape == other.entries.shape
                and bool(np.array_equal(self.entries, other.entries)))

    def __hash__(self):
        return hash((self.p, self.entries.shape, self.entries.tobytes()))

    def tolist(self):
        return self.entries.tolist()


def _rref_scalar(a: np.ndarray, p: int, order: np.ndarray | None = None) -> list[int]:
    """Column-by-column RREF in place; ``order`` (if given) follows the row swaps."""
    rows, cols = a.shape
    invt = inverses(p)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
            if order is not None:
                order[[r, k]] = order[[k, r]]
        lead = int(a[r, c])
        if lead != 1:
            a[r, c:] = (a[r, c:] * invt[lead]) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[np.ix_(hit, np.arange(c, cols))] = (
                a[hit, c:] - np.outer(col[hit], a[r, c:])) % p
        pivots.append(c)
        r += 1
    return pivots


_PANEL = 96


def _rref_blocked(a: np.ndarray, p: int) -> list[int]:
    """RREF in place by column panels.

    Pivots of each panel are found with the scalar routine on a copy; the
    remaining columns are then updated with one Schur-complement step done
    as float64 matrix products, which are exact because every intermediate
    sum stays far below 2**53.
    """
    rows, cols = a.shape
    f = a.astype(np.float64)
    pivots: list[int] = []
    r = 0
    for c0 in range(0, cols, _PANEL):
        if r == rows:
            break
        c1 = min(c0 + _PANEL, cols)
        panel = f[r:, c0:c1].astype(np.int64)
        order = np.arange(r, rows)
        piv = _rref_scalar(panel, p, order)
        k = len(piv)
        if k == 0:
            continue
        pcols = [c0 + c for c in piv]
        prow = order[:k]
        M = f[np.ix_(prow, pcols)].astype(np.int64)
        aug = np.hstack([M, np.eye(k, dtype=np.int64)])
        _rref_scalar(aug, p)
        Minv = aug[:, k:].astype(np.float64)
        top = np.mod(Minv @ f[prow, c0:], p)
        others = np.setdiff1d(np.arange(rows), prow, assume_unique=True)
        if others.size:
            coef = f[np.ix_(others, pcols)]
            f[others, c0:] = np.mod(f[others, c0:] - np.mod(coef @ top, p), p)
        # new order: old pivot rows, this panel's pivot rows, then the rest
        rest = others[others >= r]
        head = others[others < r]
        f_new = np.empty_like(f)
        f_new[:r] = f[head]
        f_new[r:r + k] = f[prow]
        f_new[r:r + k, c0:] = top
        f_new[r + k:] = f[rest]
        f = f_new
        pivots.extend(pcols)
        r += k
    a[:] = f.astype(np.int64)
    return pivots


def _rref_inplace(a: np.ndarray, p: int) -> list[int]:
    if a.shape[1] > _PANEL and a.shape[0] > _PANEL:
        return _rref_blocked(a, p)
    return _rref_scalar(a, p)


def rref_array(a, p: int) -> tuple[int, np.ndarray, list[int]]:
    """Row-reduce ``a`` over F_p.

    Returns ``(rank, reduced, pivots)``; ``reduced`` keeps the input shape
    with zero rows at the bottom.  Tall inputs are reduced in chunks so the
    working matrix never exceeds about twice the column count.
    """
    a = np.array(a, dtype=np.int64) % p
    if a.ndim != 2:
        raise ValueError("expected a 2-d array")
    rows, cols = a.shape
    if rows == 0 or cols == 0:
        return 0, a, []
    chunk = max(2 * cols, 64)
    if rows <= chunk + cols:
        pivots = _rref_inplace(a, p)
        return len(pivots), a, pivots
    basis = np.zeros((0, cols), dtype=np.int64)
    for start in range(0, rows, chunk):
        work = np.vstack([basis, a[start:start + chunk]])
        pivots = _rref_inplace(work, p)
        basis = work[:len(pivots)]
    out = np.zeros_like(a)
    out[:len(pivots)] = basis
    return len(pivots), out, pivots


def row_basis(a, p: int) -> tuple[np.ndarray, list[int]]:
    """RREF basis of the row space (only the nonzero rows)."""
    a = np.asarray(a, dtype=np.int64)
    if a.ndim == 2 and a.shape[0] == 0:
        return a.reshape(0, a.shape[1]), []
    rank, red, piv = rref_array(a, p)
    return red[:rank], piv


def rank_array(a, p: int) -> int:
    return rref_array(a, p)[0]


def kernel_array(a, p: int) -> np.ndarray:
    """Basis (as rows) of ``{v : a @ v == 0}``."""
    a = np.asarray(a, dtype=np.int64)
    cols = a.shape[1]
    rank, red, pivots = rref_array(a, p)
    pivset = set(pivots)
    free = [c for c in range(cols) if c not in pivset]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    basis[np.arange(len(free)), free] = 1
    if pivots and free:
        basis[:, pivots] = (-red[:rank][:, free].T) % p
    return basis


def reduce_rows(v, basis: np.ndarray, pivots: list[int], p: int) -> np.ndarray:
    """Reduce row vector(s) ``v`` modulo an RREF ``basis`` with ``pivots``."""
    v = np.array(v, dtype=np.int64) % p
    if not pivots:
        return v
    coeff = v[..., pivots]
    # float64 products are exact here and use BLAS
    prod = np.mod(coeff.astype(np.float64) @ basis.astype(np.float64), p).astype(np.int64)
    return (v - prod) % p


@dataclass(frozen=True)
class SolutionSet:
    """Affine solution set ``particular + span(kernel)``; ``particular`` is
    None when the system is inconsistent."""
    particular: np.ndarray | None
    kernel: np.ndarray

    @property
    def consistent(self) -> bool:
        return self.particular is not None

    @property
    def dimension(self) -> int:
        return -1 if self.particular is None else self.kernel.shape[0]


def solve_array(a, b, p: int) -> SolutionSet:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1)
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape[0]} rows vs rhs of length {b.shape[0]}")
    cols = a.shape[1]
    aug = np.hstack([a % p, (b % p).reshape(-1, 1)])
    rank, red, pivots = rref_array(aug, p)
    kern = kernel_array(a, p)
    if pivots and pivots[-1] == cols:
        return SolutionSet(None, kern)
    x = np.zeros(cols, dtype=np.int64)
    for j, pc in enumerate(pivots):
        x[pc] = red[j, cols]
    return SolutionSet(x, kern)


def rref(m: FpMatrix) -> tuple[int, FpMatrix, list[int]]:
    rank, red, piv = rref_array(m.entries, m.p)
    return rank, FpMatrix(m.p, red), piv


def kernel(m: FpMatrix) -> list[np.ndarray]:
    return list(kernel_array(m.entries, m.p))


def solve(m: FpMatrix, b) -> SolutionSet:
    return solve_array(m.entries, b, m.p)
