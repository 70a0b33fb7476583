"""Exact linear algebra over the Scalar fraction field.

Matrices are immutable tuples of tuples of Scalar.  Elimination routines
return side conditions: the pivot numerators that were assumed nonzero.
Pivots that are nonzero rational constants never generate a condition, and
constant pivots are preferred during pivot selection so that conditions
appear only when genuinely forced by symbolic entries.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .scalar import ONE, ZERO, Scalar, ScalarLike, as_scalar

Matrix = tuple[tuple[Scalar, ...], ...]
Row = tuple[Scalar, ...]


def as_matrix(rows: Iterable[Iterable[ScalarLike]]) -> Matrix:
    return tuple(tuple(as_scalar(x) for x in row) for row in rows)


def as_row(entries: Iterable[ScalarLike]) -> Row:
    return tuple(as_scalar(x) for x in entries)


def zeros(nrows: int, ncols: int) -> Matrix:
    return tuple((ZERO,) * ncols for _ in range(nrows))


def identity(n: int) -> Matrix:
    return tuple(
        tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)
    )


def shape(m: Matrix) -> tuple[int, int]:
    return (len(m), len(m[0]) if m else 0)


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m)) if m else ()


def mat_add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(c: ScalarLike, m: Matrix) -> Matrix:
    c = as_scalar(c)
    return tuple(tuple(c * x for x in row) for row in m)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(
        tuple(_dot(row, col) for col in bt) for row in a
    )


def mat_vec(m: Matrix, v: Row) -> Row:
    return tuple(_dot(row, v) for row in m)


def _dot(u: Sequence[Scalar], v: Sequence[Scalar]) -> Scalar:
    total = ZERO
    for x, y in zip(u, v):
        if x.is_zero() or y.is_zero():
            continue
        total = total + x * y
    return total


def is_zero_matrix(m: Matrix) -> bool:
    return all(x.is_zero() for row in m for x in row)


class SideConditions:
    """Ordered, duplicate-free set of nonvanishing polynomial constraints."""

    def __init__(self) -> None:
        self._seen: set[Scalar] = set()
        self.items: list[Scalar] = []

    def require_nonzero(self, value: Scalar) -> None:
        if value.is_constant():
            return
        # a quotient is nonzero exactly when its numerator polynomial is
        poly = Scalar._make(value._num, value._num.ring.one)
        if poly._num.LC < 0:
            poly = -poly
        if poly not in self._seen:
            self._seen.add(poly)
            self.items.append(poly)

    def extend(self, other: "SideConditions") -> None:
        for item in other.items:
            if item not in self._seen:
                self._seen.add(item)
                self.items.append(item)

    def __iter__(self):
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __repr__(self) -> str:
        return f"SideConditions({[str(x) for x in self.items]})"


def _pick_pivot(rows: list[list[Scalar]], start: int, col: int) -> int | None:
    """Row index of a pivot in `col` at/below `start`; constants first."""
    fallback = None
    for i in range(start, len(rows)):
        entry = rows[i][col]
        if entry.is_zero():
            continue
        if entry.is_constant():
            return i
        if fallback is None:
            fallback = i
    return fallback


def rref(m: Matrix) -> tuple[Matrix, tuple[int, ...], SideConditions]:
    """Reduced row echelon form, pivot columns, accumulated conditions."""
    rows = [list(row) for row in m]
    nrows, ncols = len(rows), len(rows[0]) if rows else 0
    conditions = SideConditions()
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        if r >= nrows:
            break
        p = _pick_pivot(rows, r, col)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pivot = rows[r][col]
        conditions.require_nonzero(pivot)
        inv = ONE / pivot
        rows[r] = [x * inv for x in rows[r]]
        for i in range(nrows):
            if i != r and not rows[i][col].is_zero():
                f = rows[i][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
    return tuple(tuple(row) for row in rows), tuple(pivots), conditions


def rank(m: Matrix) -> tuple[int, SideConditions]:
    _, pivots, conditions = rref(m)
    return len(pivots), conditions


def nullspace(m: Matrix) -> tuple[list[Row], SideConditions]:
    """Basis of the right nullspace {v : m v = 0}."""
    reduced, pivots, conditions = rref(m)
    ncols = shape(m)[1]
    free = [c for c in range(ncols) if c not in pivots]
    basis: list[Row] = []
    for fc in free:
        v = [ZERO] * ncols
        v[fc] = ONE
        for r, pc in enumerate(pivots):
            v[pc] = -reduced[r][fc]
        basis.append(tuple(v))
    return basis, conditions


def invert(m: Matrix) -> tuple[Matrix, SideConditions]:
    """Exact inverse; raises ValueError when singular as a symbolic matrix."""
    n = len(m)
    augmented = tuple(row + identity(n)[i] for i, row in enumerate(m))
    reduced, pivots, conditions = rref(augmented)
    if tuple(pivots) != tuple(range(n)):
        raise ValueError("matrix is singular")
    inverse = tuple(row[n:] for row in reduced[:n])
    return inverse, conditions


def det(m: Matrix) -> Scalar:
    """Determinant via fraction-field elimination (exact, no conditions)."""
    rows = [list(row) for row in m]
    n = len(rows)
    result = ONE
    for col in range(n):
        p = _pick_pivot(rows, col, col)
        if p is None:
            return ZERO
        if p != col:
            rows[col], rows[p] = rows[p], rows[col]
            result = -result
        pivot = rows[col][col]
        result = result * pivot
        inv = ONE / pivot
        for i in range(col + 1, n):
            if rows[i][col].is_zero():
                continue
            f = rows[i][col] * inv
            rows[i] = [x - f * y for x, y in zip(rows[i], rows[col])]
    return result


def row_space_basis(rows: Iterable[Row]) -> tuple[list[Row], SideConditions]:
    """Row-reduced basis of the span of the given rows."""
    mat = tuple(tuple(row) for row in rows)
    if not mat:
        return [], SideConditions()
    reduced, pivots, conditions = rref(mat)
    return [reduced[i] for i in range(len(pivots))], conditions


def in_row_span(basis: Sequence[Row], v: Row) -> bool:
    """Membership of v in span(basis); basis need not be reduced."""
    if all(x.is_zero() for x in v):
        return True
    if not basis:
        return False
    stacked = tuple(tuple(row) for row in basis)
    r0, _ = rank(stacked)
    r1, _ = rank(stacked + (tuple(v),))
    return r0 == r1


def symmetric_signature(m: Sequence[Sequence[Fraction]]) -> tuple[int, int]:
    """Sylvester signature (positives, negatives) of an exact symmetric matrix.

    Symmetric Gaussian elimination: each step takes the Schur complement of
    the trailing block with respect to a nonzero diagonal pivot.  A zero
    diagonal with a nonzero entry in its row is repaired by a congruence
    transform (add or subtract the partner row and column; one of the two
    signs always produces a nonzero diagonal).
    """
    n = len(m)
    rows = [[Fraction(x) for x in row] for row in m]
    for i in range(n):
        for j in range(i):
            if rows[i][j] != rows[j][i]:
                raise ValueError("matrix is not symmetric")
    pos = neg = 0
    for k in range(n):
        if rows[k][k] == 0:
            j = next((c for c in range(k + 1, n) if rows[k][c] != 0), None)
            if j is None:
                raise ValueError("matrix is singular")
            for t in (1, -1):
                if t * 2 * rows[k][j] + rows[j][j] != 0:
                    for c in range(k, n):
                        rows[k][c] += t * rows[j][c]
                    for r in range(k, n):
                        rows[r][k] += t * rows[r][j]
                    break
        d = rows[k][k]
        if d > 0:
            pos += 1
        else:
            neg += 1
        for i in range(k + 1, n):
            f = rows[i][k] / d
            if f:
                for c in range(k + 1, n):
                    rows[i][c] -= f * rows[k][c]
    return pos, neg
