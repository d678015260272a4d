"""
Determinants, cofactor sums and inverses of small square matrices.

Entries may be Fractions or MultiPolys; both support +, -, * and comparison
with 0. Up to LAPLACE_MAX rows we expand along the first row and memoize
minors, so the cofactor sum reuses the minors of the determinant. Larger
matrices use fraction-free (Bareiss) elimination.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Sequence, Tuple, TypeVar

from .arith import MultiPoly
from .errors import SingularKernelError

LAPLACE_MAX = 4

E = TypeVar("E", Fraction, MultiPoly)
Matrix = Sequence[Sequence[E]]


def _one_like(sample: E) -> E:
    if isinstance(sample, MultiPoly):
        return MultiPoly.constant(sample.nvars, 1)
    return Fraction(1)


def _exact_div(a: E, b: E) -> E:
    if isinstance(a, MultiPoly):
        return a.divide_exact(b if isinstance(b, MultiPoly) else MultiPoly.constant(a.nvars, b))
    return a / b


def _check_square(M: Matrix) -> int:
    k = len(M)
    if k == 0 or any(len(row) != k for row in M):
        raise ValueError("expected a nonempty square matrix")
    return k


class _Minors:
    """Memoized minors of one matrix, keyed by (row indices, column indices)."""

    def __init__(self, M: Matrix):
        self.M = M
        self.one = _one_like(M[0][0])
        self.memo: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], E] = {}

    def det(self, rows: Tuple[int, ...], cols: Tuple[int, ...]) -> E:
        if not rows:
            return self.one
        if len(rows) == 1:
            return self.M[rows[0]][cols[0]]
        key = (rows, cols)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        r, below = rows[0], rows[1:]
        total = self.one * 0
        for idx, c in enumerate(cols):
            entry = self.M[r][c]
            if entry == 0:
                continue
            term = entry * self.det(below, cols[:idx] + cols[idx + 1:])
            total = total - term if idx % 2 else total + term
        self.memo[key] = total
        return total


def bareiss_determinant(M: Matrix) -> E:
    n = _check_square(M)
    A: List[List[E]] = [list(row) for row in M]
    one = _one_like(A[0][0])
    sign = 1
    prev = one
    for k in range(n - 1):
        if A[k][k] == 0:
            pivot = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if pivot is None:
                return one * 0
            A[k], A[pivot] = A[pivot], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = _exact_div(A[i][j] * A[k][k] - A[i][k] * A[k][j], prev)
        prev = A[k][k]
    return A[n - 1][n - 1] if sign > 0 else -A[n - 1][n - 1]


def det_and_cofactor_sum(M: Matrix) -> Tuple[E, E]:
    """det(M) and the sum of all cofactors of M."""
    k = _check_square(M)
    if k <= LAPLACE_MAX:
        minors = _Minors(M)
        full = tuple(range(k))
        det = minors.det(full, full)
        total = minors.one * 0
        for i in range(k):
            rows = full[:i] + full[i + 1:]
            for j in range(k):
                minor = minors.det(rows, full[:j] + full[j + 1:])
                total = total - minor if (i + j) % 2 else total + minor
        return det, total
    # det(M + J) = det(M) + sum of cofactors (rank-one update of the all-ones matrix)
    one = _one_like(M[0][0])
    det = bareiss_determinant(M)
    bumped = [[entry + one for entry in row] for row in M]
    return det, bareiss_determinant(bumped) - det


def determinant(M: Matrix) -> E:
    k = _check_square(M)
    if k <= LAPLACE_MAX:
        full = tuple(range(k))
        return _Minors(M).det(full, full)
    return bareiss_determinant(M)


def cofactor_sum(M: Matrix) -> E:
    return det_and_cofactor_sum(M)[1]


def inverse(M: Sequence[Sequence[Fraction]]) -> List[List[Fraction]]:
    """Gauss-Jordan inverse over Q."""
    n = _check_square(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if A[r][col] != 0), None)
        if pivot is None:
            raise SingularKernelError("singular kernel matrix")
        A[col], A[pivot] = A[pivot], A[col]
        p = A[col][col]
        A[col] = [x / p for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]
