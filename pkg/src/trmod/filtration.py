"""Saturated filtrations with cyclic layers.

An upper triangular presentation matrix encodes a chain of submodules:
the leading i x i blocks present T_1 c T_2 c ... c T_n with cyclic
quotients R/(t_ii).  This module extracts that chain, performs the
inverse step (peeling the last cyclic quotient off via the syzygy), and
searches for upper triangular forms of arbitrary square matrices.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import linalg
from .algebra import (
    GradedLocalAlgebra,
    RingElement,
    annihilator,
    exact_zero_divisor_partner,
    ideal_span,
    is_exact_zero_divisor,
)
from .errors import BudgetExceededError, ValidationError
from .modmat import (
    EquivalenceWitness,
    PresentationMatrix,
    coker_length,
    correction_space,
    divide,
    general_linear_group,
    is_equivalent,
    syzygy,
)


@dataclass
class Filtration:
    """Chain T_1 c ... c T_n given by leading blocks of an UT matrix."""

    matrix: PresentationMatrix
    blocks: list = dc_field(default_factory=list)     # leading i x i blocks
    quotients: list = dc_field(default_factory=list)  # diagonal entries t_ii
    lengths: list = dc_field(default_factory=list)
    log: list = dc_field(default_factory=list)

    def __len__(self):
        return len(self.blocks)


def _leading_block(M: PresentationMatrix, i: int) -> PresentationMatrix:
    return PresentationMatrix(M.algebra, np.ascontiguousarray(M.entries[:i, :i]))


def filtrate_ut(M: PresentationMatrix) -> Filtration:
    """Chain of leading principal blocks of an upper triangular matrix.

    Each diagonal entry must be an exact zero divisor (the triangular
    criterion for total reflexivity); the short exact sequences
    0 -> T_{i-1} -> T_i -> R/(t_ii) -> 0 are validated by length
    additivity, with each layer of length e.
    """
    A = M.algebra
    if not M.is_square:
        raise ValidationError("matrix must be square")
    if not M.is_minimal:
        raise ValidationError("matrix must be minimal")
    if not M.is_upper_triangular:
        raise ValidationError("matrix is not upper triangular")
    e = A.e
    quotients = []
    for i in range(M.rows):
        t = M.entry(i, i)
        if not is_exact_zero_divisor(A, t):
            raise ValidationError(
                f"diagonal entry ({i},{i}) = {t!r} is not an exact zero divisor; "
                "an upper triangular cokernel is totally reflexive only when "
                "every diagonal entry is one"
            )
        quotients.append(t)
    blocks = []
    lengths = []
    log = []
    prev_len = 0
    for i in range(1, M.rows + 1):
        blk = _leading_block(M, i)
        ln = coker_length(blk)
        if ln != prev_len + e:
            raise AssertionError(
                f"layer {i} has length {ln - prev_len}, expected {e}"
            )
        blocks.append(blk)
        lengths.append(ln)
        log.append(
            f"T_{i} = leading {i}x{i} block, length {ln}, "
            f"quotient T_{i}/T_{i - 1} = R/({A.format_element(quotients[i - 1].coeffs)})"
        )
        prev_len = ln
    return Filtration(matrix=M, blocks=blocks, quotients=quotients,
                      lengths=lengths, log=log)


def submodule_step(T: PresentationMatrix):
    """Peel the last cyclic layer off a presentation with last row (0,..,0,t).

    The syzygy of T is column-reduced until its last row is (0,..,0,s)
    with s the partner of t; that reduction is the certificate that
    deleting row and column n of T presents a submodule U with
    T/U = R/(t) and length(U) = length(T) - e.  Returns (U matrix, t).
    """
    A = T.algebra
    n = T.rows
    if not T.is_square or n == 0:
        raise ValidationError("matrix must be square and nonempty")
    if not T.is_minimal:
        raise ValidationError("matrix must be minimal")
    if T.entries[n - 1, :n - 1].any():
        raise ValidationError("last row must be (0, ..., 0, t)")
    t = T.entry(n - 1, n - 1)
    s = exact_zero_divisor_partner(A, t)
    if s is None:
        raise ValidationError(
            f"last diagonal entry {t!r} is not an exact zero divisor"
        )
    if n > 1:
        _isolate_partner(T, s)
    U = PresentationMatrix(A, np.ascontiguousarray(T.entries[:n - 1, :n - 1]))
    lt, lu = coker_length(T), coker_length(U)
    if lu != lt - A.e:
        raise ValidationError(
            f"length only dropped from {lt} to {lu}; submodule step failed"
        )
    return U, t


def _isolate_partner(T: PresentationMatrix, s: RingElement):
    """Column-reduce syzygy(T) so its last row becomes (0, ..., 0, s)."""
    A = T.algebra
    W = syzygy(T)
    n = W.rows
    last = [W.entries[n - 1, j] for j in range(W.cols)]
    pivot = None
    for j, w in enumerate(last):
        if not w.any():
            continue
        r = divide(A, w, s.coeffs)
        if r is not None and r[0] % A.p:  # unit multiple of s
            pivot = j
            break
    if pivot is None:
        raise ValidationError(
            "cannot isolate the partner in the last syzygy row; "
            "input is not a totally reflexive presentation of the stated shape"
        )
    for j, w in enumerate(last):
        if j == pivot or not w.any():
            continue
        if divide(A, w, last[pivot]) is None:
            raise ValidationError(
                "cannot isolate the partner in the last syzygy row; "
                "input is not a totally reflexive presentation of the stated shape"
            )


# -- upper triangular form search ---------------------------------------------

_UT_SEARCH_MAX_N = 3
_UT_SEARCH_MAX_P = 3
_UT_SOLUTION_CAP = 6  # max nullity enumerated per scalar pair


def _matrix_order_key(M: PresentationMatrix):
    return tuple(M.entry(i, j).order_key()
                 for i in range(M.rows) for j in range(M.cols))


def find_ut_form(M: PresentationMatrix):
    """Upper triangular form of M under equivalence, if one exists.

    Exhausts scalar parts (P0, Q0) over GL_n x GL_n; for each pair with
    upper triangular transformed linear part, solvability of the
    below-diagonal quadratic system (over the correction space of M)
    decides whether a full UT form exists.  Returns (witness, UT form)
    with the lexicographically smallest UT form found, or None after the
    certified-exhaustive sweep.
    """
    A = M.algebra
    p = A.p
    if not M.is_square:
        raise ValidationError("matrix must be square")
    if not M.is_minimal:
        raise ValidationError("matrix must be minimal")
    n = M.rows
    if n == 0:
        return EquivalenceWitness(A, np.zeros((0, 0, A.dim), dtype=np.int64),
                                  np.zeros((0, 0, A.dim), dtype=np.int64)), M
    if n > _UT_SEARCH_MAX_N or p > _UT_SEARCH_MAX_P:
        raise BudgetExceededError(
            f"UT-form search limited to n <= {_UT_SEARCH_MAX_N}, "
            f"p <= {_UT_SEARCH_MAX_P}",
            required=n, budget=_UT_SEARCH_MAX_N,
        )
    if M.is_upper_triangular:
        w = is_equivalent(M, M)
        return w, M
    e, s2 = A.e, A.s2
    A1 = M.linear_part()
    A2 = M.quadratic_part()
    corr, _gens = correction_space(M)
    GL = general_linear_group(n, p)
    below = [(i, j) for i in range(n) for j in range(n) if i > j]
    best = None
    for P0 in GL:
        LA1 = np.einsum("il,lje->ije", P0, A1) % p
        for Q0 in GL:
            N1 = np.einsum("ile,lj->ije", LA1, Q0) % p
            if any(N1[i, j].any() for i, j in below):
                continue
            N2_base = np.einsum("il,ljs,jm->ims", P0, A2, Q0) % p
            # conjugate each correction generator and keep below-diagonal rows
            conj = np.einsum("il,ljsg,jm->imsg",
                             P0, corr.reshape(n, n, s2, -1), Q0) % p
            rows = np.stack([conj[i, j].reshape(s2, -1) for i, j in below]) \
                if below else np.zeros((0, s2, corr.shape[1]), dtype=np.int64)
            sysA = rows.reshape(-1, corr.shape[1])
            rhs = np.concatenate([(-N2_base[i, j]) % p for i, j in below]) \
                if below else np.zeros(0, dtype=np.int64)
            part = linalg.solve(sysA, rhs, p)
            if part is None:
                continue
            null = linalg.nullspace(sysA, p)
            sols = [part]
            if 0 < null.shape[1] <= _UT_SOLUTION_CAP:
                for combo in itertools.product(range(p), repeat=null.shape[1]):
                    if not any(combo):
                        continue
                    sols.append((part + null @ np.array(combo, dtype=np.int64)) % p)
            for coeffs in sols:
                delta = (corr @ coeffs % p).reshape(n, n, s2)
                conj_delta = np.einsum("il,ljs,jm->ims", P0, delta, Q0) % p
                N2 = (N2_base + conj_delta) % p
                ent = np.zeros((n, n, A.dim), dtype=np.int64)
                ent[:, :, 1:1 + e] = N1
                ent[:, :, 1 + e:] = N2
                N = PresentationMatrix(A, ent)
                if not N.is_upper_triangular:
                    continue
                key = _matrix_order_key(N)
                if best is None or key < best[0]:
                    best = (key, N)
    if best is None:
        return None
    N = best[1]
    w = is_equivalent(M, N)
    assert w is not None
    return w, N


# -- the alternating two-parameter family --------------------------------------


def mb_preconditions(s: RingElement, t: RingElement,
                     u: RingElement, v: RingElement) -> dict:
    """Check the hypotheses under which the alternating family is known
    indecomposable, totally reflexive and non-free."""
    A = s.algebra
    exact_pair = (
        is_exact_zero_divisor(A, s)
        and annihilator(A, s)[0] == ideal_span(A, t)
        and annihilator(A, t)[0] == ideal_span(A, s)
    )
    in_m_not_m2 = all(x.in_m and not x.in_m2 for x in (u, v))
    uv_zero = not A.mult_vectors(u.coeffs, v.coeffs).any()
    # (a): s, t, u linearly independent modulo m^2
    deg1 = np.stack([s.degree_one_part(), t.degree_one_part(),
                     u.degree_one_part()])
    cond_a = linalg.rank(deg1, A.p) == 3
    # (b): s in (t) + m^2 while u, v stay outside
    t_m2 = linalg.Subspace(A.e, A.p, t.degree_one_part().reshape(1, -1))
    cond_b = (
        t_m2.contains(s.degree_one_part())
        and not t_m2.contains(u.degree_one_part())
        and not t_m2.contains(v.degree_one_part())
    )
    return {
        "exact_pair": exact_pair,
        "u_v_in_m_not_m2": in_m_not_m2,
        "uv_zero": uv_zero,
        "condition_a": cond_a,
        "condition_b": cond_b,
        "satisfied": exact_pair and in_m_not_m2 and uv_zero
        and (cond_a or cond_b),
    }


def mb_matrix(b: int, s: RingElement, t: RingElement,
              u: RingElement, v: RingElement) -> PresentationMatrix:
    """b x b bidiagonal matrix: diagonal s,t,s,t,..., superdiagonal u,v,u,v,...

    Preconditions are checked and reported as warnings, never as errors;
    the matrix is always constructed.
    """
    if b < 1:
        raise ValidationError("b must be >= 1")
    A = s.algebra
    pre = mb_preconditions(s, t, u, v)
    for name in ("exact_pair", "u_v_in_m_not_m2", "uv_zero"):
        if not pre[name]:
            warnings.warn(f"family precondition violated: {name}", stacklevel=2)
    if not (pre["condition_a"] or pre["condition_b"]):
        warnings.warn(
            "neither independence condition (a) nor containment condition "
            "(b) holds", stacklevel=2,
        )
    ent = np.zeros((b, b, A.dim), dtype=np.int64)
    diag = [s.coeffs, t.coeffs]
    sup = [u.coeffs, v.coeffs]
    for i in range(b):
        ent[i, i] = diag[i % 2] % A.p
        if i + 1 < b:
            ent[i, i + 1] = sup[i % 2] % A.p
    return PresentationMatrix(A, ent)
