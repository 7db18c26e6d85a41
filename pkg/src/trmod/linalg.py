"""Dense exact linear algebra over prime fields F_p.

Gaussian elimination on int64 numpy arrays with reduction mod p after
every pivot.  p is tiny (2..7), so machine integers never come close to
overflow.  The elimination kernel is numba-jitted when numba imports
cleanly; the pure-Python fallback has identical semantics and is only
used as a safety net.

All subspaces are represented by their reduced row-echelon form (RREF),
which is canonical: two generating sets span the same subspace iff their
RREFs are byte-identical.
"""

from __future__ import annotations

import numpy as np


def _rref_kernel(A, p, inv_table):
    """In-place RREF of A mod p.  Returns rank; pivot columns are written
    into the first `rank` slots of the last row of `piv_out` trick — see
    wrapper.  (Kept loop-only so numba can compile it.)"""
    m, n = A.shape
    r = 0
    for c in range(n):
        pr = -1
        for i in range(r, m):
            if A[i, c] != 0:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            for j in range(n):
                t = A[r, j]
                A[r, j] = A[pr, j]
                A[pr, j] = t
        iv = inv_table[A[r, c]]
        if iv != 1:
            for j in range(n):
                A[r, j] = A[r, j] * iv % p
        for i in range(m):
            if i != r and A[i, c] != 0:
                f = p - A[i, c]
                for j in range(n):
                    A[i, j] = (A[i, j] + f * A[r, j]) % p
        r += 1
        if r == m:
            break
    return r


try:  # pragma: no cover - exercised implicitly everywhere
    from numba import njit

    _rref_kernel = njit(cache=True)(_rref_kernel)
except ImportError:  # pragma: no cover
    pass

_INV_TABLES: dict[int, np.ndarray] = {}


def inverse_table(p: int) -> np.ndarray:
    """Table of multiplicative inverses mod p (index 0 unused, holds 0)."""
    tab = _INV_TABLES.get(p)
    if tab is None:
        tab = np.zeros(p, dtype=np.int64)
        for a in range(1, p):
            tab[a] = pow(a, p - 2, p)
        _INV_TABLES[p] = tab
    return tab


def _as_matrix(A) -> np.ndarray:
    A = np.ascontiguousarray(np.asarray(A, dtype=np.int64))
    if A.ndim == 1:
        A = A.reshape(1, -1)
    return A


def rref(A, p: int):
    """Reduced row-echelon form mod p.

    Returns:
        (R, pivots): R the RREF (new array, same shape), pivots the list
        of pivot column indices (length = rank).
    """
    R = _as_matrix(A) % p
    R = R.copy()
    rank_ = _rref_kernel(R, p, inverse_table(p))
    # Pivot columns = first nonzero column of each of the first rank_ rows.
    pivots = [int(np.argmax(R[i] != 0)) for i in range(rank_)]
    return R, pivots


def rank(A, p: int) -> int:
    R = _as_matrix(A) % p
    R = R.copy()
    return int(_rref_kernel(R, p, inverse_table(p)))


def nullspace(A, p: int) -> np.ndarray:
    """Basis of {x : A x = 0 mod p}, as columns of an (n, k) array.

    The basis is the canonical one read off the RREF (one vector per
    free column, unit coordinate at the free column).
    """
    A = _as_matrix(A)
    m, n = A.shape
    R, pivots = rref(A, p)
    piv_set = set(pivots)
    free = [c for c in range(n) if c not in piv_set]
    N = np.zeros((n, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        N[f, k] = 1
        for i, c in enumerate(pivots):
            N[c, k] = (-R[i, f]) % p
    return N


def solve(A, b, p: int):
    """One solution x of A x = b mod p, or None if inconsistent."""
    A = _as_matrix(A)
    b = np.asarray(b, dtype=np.int64).reshape(-1) % p
    m, n = A.shape
    aug = np.concatenate([A % p, b.reshape(-1, 1)], axis=1)
    R, pivots = rref(aug, p)
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = R[i, n]
    return x


def inv(A, p: int):
    """Inverse of a square matrix mod p, or None if singular."""
    A = _as_matrix(A)
    n = A.shape[0]
    aug = np.concatenate([A % p, np.eye(n, dtype=np.int64)], axis=1)
    R, pivots = rref(aug, p)
    if pivots[:n] != list(range(n)):
        return None
    return R[:, n:].copy()


def det_nonzero(A, p: int) -> bool:
    A = _as_matrix(A)
    return rank(A, p) == A.shape[0]


def row_space(A, p: int) -> np.ndarray:
    """Canonical basis (RREF rows, zero rows dropped) of the row space."""
    R, pivots = rref(A, p)
    return R[: len(pivots)].copy()


def span_key(A, p: int) -> bytes:
    """Hashable canonical key of the row space of A."""
    S = row_space(A, p)
    return S.shape[0].to_bytes(4, "little") + S.tobytes()


def in_row_space(basis_rref: np.ndarray, pivots: list[int], v, p: int) -> bool:
    """Membership of v in a row space given in RREF with known pivots."""
    v = np.asarray(v, dtype=np.int64).reshape(-1) % p
    v = v.copy()
    for i, c in enumerate(pivots):
        if v[c]:
            v = (v - v[c] * basis_rref[i]) % p
    return not v.any()


class Subspace:
    """A subspace of F_p^n maintained in canonical RREF row form."""

    def __init__(self, n: int, p: int, vectors=None):
        self.n = n
        self.p = p
        if vectors is None or len(vectors) == 0:
            self.basis = np.zeros((0, n), dtype=np.int64)
            self.pivots: list[int] = []
        else:
            V = np.asarray(vectors, dtype=np.int64).reshape(-1, n)
            self.basis, self.pivots = rref(V, p)
            self.basis = self.basis[: len(self.pivots)]

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def contains(self, v) -> bool:
        return in_row_space(self.basis, self.pivots, v, self.p)

    def reduce(self, v) -> np.ndarray:
        """Residual of v after reduction against the basis."""
        v = np.asarray(v, dtype=np.int64).reshape(-1) % self.p
        v = v.copy()
        for i, c in enumerate(self.pivots):
            if v[c]:
                v = (v - v[c] * self.basis[i]) % self.p
        return v

    def add(self, v) -> bool:
        """Grow the subspace by v.  Returns True if the dimension grew."""
        r = self.reduce(v)
        if not r.any():
            return False
        stacked = np.vstack([self.basis, r])
        self.basis, self.pivots = rref(stacked, self.p)
        self.basis = self.basis[: len(self.pivots)]
        return True

    def key(self) -> bytes:
        return self.dim.to_bytes(4, "little") + self.basis.tobytes()

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and self.n == other.n
            and self.p == other.p
            and self.key() == other.key()
        )

    def __hash__(self):
        return hash((self.n, self.p, self.key()))
