"""Exact linear algebra over prime fields.

Everything here is plain Gauss-Jordan elimination on int64 arrays with
modular arithmetic, plus the two constructions the rest of the package
leans on: row-space intersection with explicit coefficient matrices, and
Cauchy matrices (every square submatrix invertible).
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .fields import FieldError, FieldMatrix, PrimeField


def _rref_inplace(a: np.ndarray, p: int, transform: np.ndarray | None = None) -> list[int]:
    """Reduce ``a`` to RREF mod p in place; mirror row ops onto ``transform``.

    Returns the pivot column list. ``a`` (and ``transform`` if given) must be
    int64 and already reduced mod p.
    """
    n_rows, n_cols = a.shape
    pivots: list[int] = []
    row = 0
    for col in range(n_cols):
        if row >= n_rows:
            break
        nz = np.nonzero(a[row:, col])[0]
        if nz.size == 0:
            continue
        piv = nz[0] + row
        if piv != row:
            a[[row, piv]] = a[[piv, row]]
            if transform is not None:
                transform[[row, piv]] = transform[[piv, row]]
        inv = pow(int(a[row, col]), -1, p)
        a[row] = (a[row] * inv) % p
        if transform is not None:
            transform[row] = (transform[row] * inv) % p
        factors = a[:, col].copy()
        factors[row] = 0
        mask = factors != 0
        if mask.any():
            a[mask] = (a[mask] - np.outer(factors[mask], a[row])) % p
            if transform is not None:
                transform[mask] = (transform[mask] - np.outer(factors[mask], transform[row])) % p
        pivots.append(col)
        row += 1
    return pivots


class RankRref(NamedTuple):
    rank: int
    rref: FieldMatrix
    pivot_cols: list[int]


def rank_rref(m: FieldMatrix) -> RankRref:
    """Rank, reduced row echelon form and pivot columns of ``m``."""
    a = m.array.copy()
    pivots = _rref_inplace(a, m.field.p)
    return RankRref(len(pivots), FieldMatrix(a, m.field), pivots)


def rref_with_transform(m: FieldMatrix) -> tuple[FieldMatrix, FieldMatrix, list[int]]:
    """RREF of ``m`` together with the transform T such that T @ m == rref."""
    a = m.array.copy()
    t = np.eye(m.rows, dtype=np.int64)
    pivots = _rref_inplace(a, m.field.p, transform=t)
    return FieldMatrix(a, m.field), FieldMatrix(t, m.field), pivots


def rank(m: FieldMatrix) -> int:
    return rank_rref(m).rank


def nullspace(m: FieldMatrix) -> FieldMatrix:
    """Basis (as rows) of the right null space {x : m @ x = 0}."""
    r, rref, pivots = rank_rref(m)
    free = [c for c in range(m.cols) if c not in pivots]
    basis = np.zeros((len(free), m.cols), dtype=np.int64)
    p = m.field.p
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for row_idx, pc in enumerate(pivots):
            basis[i, pc] = (-int(rref.array[row_idx, fc])) % p
    return FieldMatrix(basis, m.field)


def left_nullspace(m: FieldMatrix) -> FieldMatrix:
    """Basis (as rows) of {w : w @ m = 0}."""
    return nullspace(m.transpose())


class RowspaceIntersection(NamedTuple):
    basis: FieldMatrix
    p_a: FieldMatrix
    p_b: FieldMatrix


def rowspace_intersection(a: FieldMatrix, b: FieldMatrix) -> RowspaceIntersection:
    """Intersection of two row spaces with explicit coefficient matrices.

    Returns (basis, P_A, P_B) with rowspan(basis) = rowspan(a) n rowspan(b),
    P_A @ a == P_B @ b == basis, and rank(P_A) == rank(P_B) == rank(basis).

    Zassenhaus-style: a row (w_a | w_b) of the left null space of the stack
    [a; b] satisfies w_a a = -w_b b, i.e. w_a a lies in the intersection; the
    map (w_a | w_b) -> w_a a is onto the intersection. Reducing the candidate
    vectors to echelon form while tracking coefficients yields the basis and
    both coefficient matrices at once. The basis is in RREF, so equal
    subspaces produce equal matrices.
    """
    if a.field != b.field:
        raise FieldError("rowspace_intersection requires matrices over the same field")
    if a.cols != b.cols:
        raise FieldError(f"column count mismatch: {a.cols} vs {b.cols}")
    field = a.field
    stacked = a.vstack(b)
    w = left_nullspace(stacked)
    w_a = w.array[:, : a.rows]
    w_b = w.array[:, a.rows :]
    candidates = FieldMatrix(w_a, field) @ a
    red, t, pivots = rref_with_transform(candidates)
    d = len(pivots)
    basis = FieldMatrix(red.array[:d, :], field)
    p_a = FieldMatrix(np.mod(t.array[:d] @ w_a, field.p), field)
    p_b = FieldMatrix(np.mod(-(t.array[:d] @ w_b), field.p), field)
    return RowspaceIntersection(basis, p_a, p_b)


def cauchy_matrix(xs: Sequence[int], ys: Sequence[int], field: PrimeField) -> FieldMatrix:
    """Cauchy matrix with entries 1/(x_i - y_j); all parameters distinct."""
    xs = [field.reduce(x) for x in xs]
    ys = [field.reduce(y) for y in ys]
    combined = xs + ys
    if len(set(combined)) != len(combined):
        raise FieldError("Cauchy parameters must be distinct")
    if len(combined) > field.p:
        raise FieldError(f"need {len(combined)} distinct elements but field has only {field.p}")
    entries = [[field.inverse(x - y) for y in ys] for x in xs]
    return FieldMatrix.from_rows(entries, field, cols=len(ys))


def solve_right(a: FieldMatrix, b: FieldMatrix) -> FieldMatrix | None:
    """One solution X of a @ X = b, or None if the system is inconsistent."""
    if a.field != b.field or a.rows != b.rows:
        raise FieldError("incompatible shapes for solve_right")
    aug = FieldMatrix(np.hstack([a.array, b.array]), a.field)
    _, red, pivots = rank_rref(aug)
    n = a.cols
    for row_idx, pc in enumerate(pivots):
        if pc >= n:
            return None
    x = np.zeros((n, b.cols), dtype=np.int64)
    for row_idx, pc in enumerate(pivots):
        x[pc] = red.array[row_idx, n:]
    return FieldMatrix(x, a.field)


def invert(m: FieldMatrix) -> FieldMatrix:
    """Inverse of a square matrix; raises FieldError if singular."""
    if m.rows != m.cols:
        raise FieldError("only square matrices can be inverted")
    red, t, pivots = rref_with_transform(m)
    if len(pivots) != m.rows:
        raise FieldError("matrix is singular")
    return t
