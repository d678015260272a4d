"""
Exact matrix games: value and optimal strategies by rational simplex, plus
Shapley-Snow kernels.

A kernel of A is a square submatrix K with nonzero determinant and nonzero
cofactor sum such that

  val A = det K / sum of cofactors of K
  x0 = val * 1^T K^-1,  y0 = val * K^-1 1

extended by zeros are optimal in A. A kernel is completely mixed (cmv) when
x0 and y0 are strictly positive.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterator, List, Optional, Sequence, Tuple

from .errors import DegenerateKernelError, KernelSearchExhaustedError, ZeroValueError
from .game import MatrixGame, MixedStrategy
from .linalg import det_and_cofactor_sum, inverse

log = logging.getLogger("sgalg.matrix_game")

Support = Tuple[int, ...]


@dataclass(frozen=True)
class MatrixGameSolution:
    value: Fraction
    x: MixedStrategy
    y: MixedStrategy


def is_optimal(A: MatrixGame, value: Fraction, x: Sequence[Fraction], y: Sequence[Fraction]) -> bool:
    """min_j (x^T A)_j >= value >= max_i (A y)_i, exactly."""
    return min(A.column_payoffs(x)) >= value and max(A.row_payoffs(y)) <= value


# ───────────────────────────────────────────────────────────────────────────────
# Simplex
# ───────────────────────────────────────────────────────────────────────────────

def _pivot(tableau: List[List[Fraction]], objective: List[Fraction], r: int, c: int) -> None:
    row = tableau[r]
    p = row[c]
    tableau[r] = row = [x / p for x in row]
    for i, other in enumerate(tableau):
        if i != r and other[c] != 0:
            f = other[c]
            tableau[i] = [a - f * b for a, b in zip(other, row)]
    if objective[c] != 0:
        f = objective[c]
        objective[:] = [a - f * b for a, b in zip(objective, row)]


def solve_matrix_game(A: MatrixGame) -> MatrixGameSolution:
    """
    Value and one optimal pair of A.

    With B = A + k (all entries >= 1) solve  max sum(q)  s.t.  B q <= 1, q >= 0
    by Bland's rule. Then val B = 1 / sum(q), y = q * val B, and the duals of
    the slack rows give x.
    """
    m, n = A.m, A.n
    k = max(Fraction(0), 1 - A.min_entry())
    B = A.affine(shift=k).entries

    # columns 0..n-1 original, n..n+m-1 slacks, last entry is the right-hand side
    tableau = [
        list(B[i]) + [Fraction(int(i == j)) for j in range(m)] + [Fraction(1)] for i in range(m)
    ]
    objective = [Fraction(-1)] * n + [Fraction(0)] * m + [Fraction(0)]
    basis = [n + i for i in range(m)]

    pivots = 0
    while True:
        entering = next((j for j in range(n + m) if objective[j] < 0), None)
        if entering is None:
            break
        best = None
        for i in range(m):
            a = tableau[i][entering]
            if a > 0:
                ratio = tableau[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        # B > 0 keeps the LP bounded, so a leaving row always exists
        leave = best[1]
        _pivot(tableau, objective, leave, entering)
        basis[leave] = entering
        pivots += 1

    total = objective[-1]
    vB = 1 / total
    q = [Fraction(0)] * n
    for i, var in enumerate(basis):
        if var < n:
            q[var] = tableau[i][-1]
    y = tuple(qj * vB for qj in q)
    x = tuple(objective[n + i] * vB for i in range(m))
    value = vB - k
    log.debug("matrix game %dx%d solved in %d pivots, value %s", m, n, pivots, value)
    return MatrixGameSolution(value, x, y)


def matrix_value(A: MatrixGame) -> Fraction:
    return solve_matrix_game(A).value


# ───────────────────────────────────────────────────────────────────────────────
# Kernels
# ───────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Kernel:
    rows: Support
    cols: Support
    matrix: MatrixGame
    value: Fraction
    x: MixedStrategy
    y: MixedStrategy

    @property
    def size(self) -> int:
        return len(self.rows)

    def extended(self, m: int, n: int) -> Tuple[MixedStrategy, MixedStrategy]:
        x = [Fraction(0)] * m
        y = [Fraction(0)] * n
        for i, p in zip(self.rows, self.x):
            x[i] = p
        for j, q in zip(self.cols, self.y):
            y[j] = q
        return tuple(x), tuple(y)

    def is_completely_mixed(self) -> bool:
        return all(p > 0 for p in self.x) and all(q > 0 for q in self.y)


@dataclass(frozen=True)
class CmvKernel(Kernel):
    def __post_init__(self) -> None:
        if not self.is_completely_mixed():
            raise ValueError("kernel strategies are not strictly positive")


def kernel_value(K: MatrixGame) -> Fraction:
    det, cof = det_and_cofactor_sum(K.entries)
    if cof == 0:
        raise DegenerateKernelError("degenerate kernel: cofactor sum is zero")
    return det / cof


def kernel_strategies(K: MatrixGame) -> Tuple[MixedStrategy, MixedStrategy]:
    v = kernel_value(K)
    inv = inverse(K.entries)
    k = K.m
    x = tuple(v * sum(inv[i][j] for i in range(k)) for j in range(k))
    y = tuple(v * sum(inv[i]) for i in range(k))
    return x, y


def square_supports(m: int, n: int, sizes: Optional[Sequence[int]] = None) -> Iterator[Tuple[Support, Support]]:
    """All equal-size (rows, cols) pairs by increasing size, then lexicographically."""
    for k in sizes or range(1, min(m, n) + 1):
        for rows in combinations(range(m), k):
            for cols in combinations(range(n), k):
                yield rows, cols


def check_kernel(
    A: MatrixGame, rows: Support, cols: Support, strict: bool = True
) -> Optional[Kernel]:
    """The kernel on rows x cols if it is a (cmv, when strict) Shapley-Snow kernel of A."""
    K = A.submatrix(rows, cols)
    det, cof = det_and_cofactor_sum(K.entries)
    if det == 0 or cof == 0:
        return None
    v = det / cof
    x, y = kernel_strategies(K)
    if strict and (min(x) <= 0 or min(y) <= 0):
        return None
    if min(x) < 0 or min(y) < 0:
        return None
    kernel = Kernel(tuple(rows), tuple(cols), K, v, x, y)
    xf, yf = kernel.extended(A.m, A.n)
    if not is_optimal(A, v, xf, yf):
        return None
    if strict:
        return CmvKernel(kernel.rows, kernel.cols, K, v, x, y)
    return kernel


def enumerate_kernels(A: MatrixGame, strict: bool = True) -> Iterator[Kernel]:
    for rows, cols in square_supports(A.m, A.n):
        kernel = check_kernel(A, rows, cols, strict)
        if kernel is not None:
            yield kernel


def find_cmv_kernel(A: MatrixGame, solution: Optional[MatrixGameSolution] = None) -> Kernel:
    """
    A completely mixed Shapley-Snow kernel of A when one exists. Degenerate
    games may only have kernels whose basic strategies contain zeros; the
    first of those (by size, then lexicographically) is returned instead.
    """
    solution = solution or solve_matrix_game(A)
    if solution.value == 0:
        raise ZeroValueError("value is zero; shift the matrix first")
    rows = tuple(i for i, p in enumerate(solution.x) if p > 0)
    cols = tuple(j for j, q in enumerate(solution.y) if q > 0)
    if len(rows) == len(cols):
        kernel = check_kernel(A, rows, cols)
        if kernel is not None:
            return kernel
    for kernel in enumerate_kernels(A):
        log.debug("cmv kernel found by enumeration: rows %s cols %s", kernel.rows, kernel.cols)
        return kernel
    for kernel in enumerate_kernels(A, strict=False):
        log.debug("no cmv kernel; using basic kernel rows %s cols %s", kernel.rows, kernel.cols)
        return kernel
    raise KernelSearchExhaustedError(f"no Shapley-Snow kernel in a {A.m}x{A.n} game")
