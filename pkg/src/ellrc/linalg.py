"""Vectorized linear algebra over a FieldCtx.

Matrices are numpy int64 arrays of packed element values (see ffield).
Multiplication goes through discrete-log tables, addition through base-p
digit arithmetic, so Gaussian elimination stays fast even for the larger
reproduction runs.  Only fields small enough to carry tables are supported,
which covers everything at desk scale.
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np

from .errors import DivisionByZero
from .ffield import Felt, FieldCtx


def _np_tables(ctx: FieldCtx) -> dict:
    cache = ctx._np_cache
    if "exp" not in cache:
        if ctx._exp is None:
            raise ValueError("field too large for table-based linear algebra")
        q = ctx.q
        # log[0] sentinel points any product involving 0 into the zero tail
        log = np.empty(q, dtype=np.int64)
        log[0] = 2 * (q - 1)
        log[1:] = np.asarray(ctx._log[1:], dtype=np.int64)
        exp = np.zeros(4 * (q - 1) + 1, dtype=np.int64)
        base = np.asarray(ctx._exp, dtype=np.int64)
        exp[: q - 1] = base
        exp[q - 1 : 2 * (q - 1)] = base
        cache["exp"] = exp
        cache["log"] = log
        cache["pows"] = [ctx.p ** i for i in range(ctx.a)]
    return cache


def as_array(ctx: FieldCtx, rows: Sequence[Sequence[Felt]]) -> np.ndarray:
    return np.asarray([[x.v for x in row] for row in rows], dtype=np.int64)

def as_vector(ctx: FieldCtx, xs: Sequence[Felt]) -> np.ndarray:
    return np.asarray([x.v for x in xs], dtype=np.int64)


def to_felts(ctx: FieldCtx, vec: np.ndarray) -> List[Felt]:
    return [Felt(ctx, int(v)) for v in vec]


def arr_mul(ctx: FieldCtx, X, Y) -> np.ndarray:
    t = _np_tables(ctx)
    return t["exp"][t["log"][X] + t["log"][Y]]


def arr_add(ctx: FieldCtx, X, Y) -> np.ndarray:
    p = ctx.p
    if ctx.a == 1:
        return (X + Y) % p
    t = _np_tables(ctx)
    out = None
    for pk in t["pows"]:
        d = (X // pk + Y // pk) % p
        out = d * pk if out is None else out + d * pk
    return out


def arr_sub(ctx: FieldCtx, X, Y) -> np.ndarray:
    p = ctx.p
    if ctx.a == 1:
        return (X - Y) % p
    t = _np_tables(ctx)
    out = None
    for pk in t["pows"]:
        d = (X // pk - Y // pk) % p
        out = d * pk if out is None else out + d * pk
    return out


def arr_neg(ctx: FieldCtx, X) -> np.ndarray:
    return arr_sub(ctx, 0, X)


def arr_inv(ctx: FieldCtx, X) -> np.ndarray:
    if np.any(X == 0):
        raise DivisionByZero("inverse of zero in array")
    t = _np_tables(ctx)
    q = ctx.q
    return t["exp"][(q - 1 - t["log"][X]) % (q - 1)]


def poly_eval_many(ctx: FieldCtx, coeffs: Sequence[int], X: np.ndarray) -> np.ndarray:
    """Evaluate a polynomial (packed little-endian coefficients) at many points."""
    if not len(coeffs):
        return np.zeros_like(X)
    acc = np.full_like(X, coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = arr_add(ctx, arr_mul(ctx, acc, X), c)
    return acc


def rank(ctx: FieldCtx, M: np.ndarray) -> int:
    """Rank by forward elimination; M is consumed as a copy."""
    M = M.copy()
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            M[[r, i], c:] = M[[i, r], c:]
        inv = ctx.inv_raw(int(M[r, c]))
        M[r, c:] = arr_mul(ctx, M[r, c:], inv)
        fac = M[r + 1 :, c]
        nzr = np.nonzero(fac)[0] + r + 1
        if nzr.size:
            upd = arr_mul(ctx, M[nzr, c][:, None], M[r, c:][None, :])
            M[nzr, c:] = arr_sub(ctx, M[nzr, c:], upd)
        r += 1
    return r


def rref(ctx: FieldCtx, M: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon form (copy) and pivot column list."""
    M = M.copy()
    rows, cols = M.shape
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            M[[r, i], :] = M[[i, r], :]
        inv = ctx.inv_raw(int(M[r, c]))
        M[r, :] = arr_mul(ctx, M[r, :], inv)
        fac = M[:, c].copy()
        fac[r] = 0
        nzr = np.nonzero(fac)[0]
        if nzr.size:
            upd = arr_mul(ctx, fac[nzr][:, None], M[r, :][None, :])
            M[nzr, :] = arr_sub(ctx, M[nzr, :], upd)
        pivots.append(c)
        r += 1
    return M, pivots


def nullspace(ctx: FieldCtx, M: np.ndarray) -> np.ndarray:
    """Basis (rows of the result) of {v : M v = 0}, in reduced echelon form."""
    R, pivots = rref(ctx, M)
    cols = M.shape[1]
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for r, pc in enumerate(pivots):
            basis[k, pc] = ctx.neg_raw(int(R[r, fc]))
    return basis


def solve(ctx: FieldCtx, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve A X = B for X; A must have full column rank and the system must
    be consistent.  B may be a vector or a matrix of stacked right-hand sides."""
    vec = B.ndim == 1
    if vec:
        B = B[:, None]
    n = A.shape[1]
    aug = np.concatenate([A, B], axis=1)
    R, pivots = rref(ctx, aug)
    lead = [p for p in pivots if p < n]
    if len(lead) != n:
        raise ValueError("coefficient matrix is rank deficient")
    if any(p >= n for p in pivots):
        raise ValueError("inconsistent linear system")
    X = R[:n, n:]
    return X[:, 0] if vec else X
