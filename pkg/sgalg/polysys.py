"""
Kernel selections and the coupled polynomial system f_1..f_N.

Variables: z0 is the discount factor, z_s (index s, 1-based) the value of
state s. For a selection kappa = (K_1, L_1, ..., K_N, L_N):

  M_s = [(1 - z0) r(s,a,b) + z0 * sum_t p(t|s,a,b) z_t]   a in K_s, b in L_s
  f_s = z_s * (sum of cofactors of M_s) - det(M_s)

(unnormalized mode drops the (1 - z0) factor on the reward).
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import List, Optional, Tuple

from .arith import MultiPoly, TermOrder
from .config import load_settings
from .errors import KernelAmbiguityError, UsageError
from .game import Mode, StochasticGame, check_mode
from .linalg import det_and_cofactor_sum, inverse
from .matrix_game import Kernel, Support, find_cmv_kernel, solve_matrix_game, square_supports
from .shapley import ValueEstimate, aux_game
from .workers import ordered_map

log = logging.getLogger("sgalg.polysys")


@dataclass(frozen=True)
class KernelSelection:
    # supports[s] = (rows, cols), 0-based and sorted
    supports: Tuple[Tuple[Support, Support], ...]

    def __post_init__(self) -> None:
        for s, (rows, cols) in enumerate(self.supports):
            if not rows or len(rows) != len(cols):
                raise UsageError(f"state {s + 1}: kernel rows and columns must be nonempty and equal in number")

    @property
    def total_size(self) -> int:
        return sum(len(rows) for rows, _ in self.supports)

    def validate(self, g: StochasticGame) -> "KernelSelection":
        if len(self.supports) != g.N:
            raise UsageError(f"selection covers {len(self.supports)} states, game has {g.N}")
        for s, (rows, cols) in enumerate(self.supports):
            m, n = g.actions(s)
            if any(not 0 <= i < m for i in rows) or any(not 0 <= j < n for j in cols):
                raise UsageError(f"state {s + 1}: kernel index out of range")
        return self

    def describe(self) -> List[str]:
        def fmt(idx):
            return "{" + ",".join(str(i + 1) for i in idx) + "}"

        return [
            f"state {s + 1}: rows {fmt(rows)} cols {fmt(cols)}"
            for s, (rows, cols) in enumerate(self.supports)
        ]

    def as_json(self) -> List[dict]:
        return [
            {"rows": [i + 1 for i in rows], "cols": [j + 1 for j in cols]}
            for rows, cols in self.supports
        ]


@dataclass(frozen=True)
class CoupledSystem:
    polys: Tuple[MultiPoly, ...]
    selection: KernelSelection
    mode: str

    @property
    def nvars(self) -> int:
        return len(self.polys) + 1

    def to_text(self) -> str:
        order = TermOrder.lex(range(self.nvars))
        return "\n".join(f"f{s + 1} = {f.to_text(order)}" for s, f in enumerate(self.polys))


def symbolic_kernel_matrix(
    g: StochasticGame, s: int, selection: KernelSelection, mode: str = Mode.NORMALIZED
) -> List[List[MultiPoly]]:
    check_mode(mode)
    selection.validate(g)
    nv = g.N + 1
    z0 = MultiPoly.variable(nv, 0)
    weight = 1 - z0 if mode == Mode.NORMALIZED else MultiPoly.constant(nv, 1)
    rows, cols = selection.supports[s]
    data = g.states[s]
    M = []
    for a in rows:
        row = []
        for b in cols:
            future = MultiPoly.zero(nv)
            for t, p in enumerate(data.transitions[a][b]):
                if p:
                    future = future + MultiPoly.term(nv, _z0_zt(nv, t + 1), p)
            row.append(weight * data.rewards[a, b] + future)
        M.append(row)
    return M


def _z0_zt(nv: int, t: int) -> Tuple[int, ...]:
    return tuple(int(i == 0) + int(i == t) for i in range(nv))


def build_system(
    g: StochasticGame,
    selection: KernelSelection,
    mode: str = Mode.NORMALIZED,
    workers: Optional[int] = None,
) -> CoupledSystem:
    selection.validate(g)
    nv = g.N + 1

    def one(s: int) -> MultiPoly:
        det, cof = det_and_cofactor_sum(symbolic_kernel_matrix(g, s, selection, mode))
        return MultiPoly.variable(nv, s + 1) * cof - det

    polys = tuple(ordered_map(one, range(g.N), workers))
    log.debug("built %d polynomials, %d terms total", len(polys), sum(len(f) for f in polys))
    return CoupledSystem(polys, selection, mode)


# ───────────────────────────────────────────────────────────────────────────────
# Selecting kernels at a value estimate
# ───────────────────────────────────────────────────────────────────────────────

def _is_ambiguous(A, kernel: Kernel, margin: Fraction) -> bool:
    """Another support could be optimal once entries move by margin."""
    x, y = kernel.extended(A.m, A.n)
    v = kernel.value
    if any(i not in kernel.rows and p >= v - margin for i, p in enumerate(A.row_payoffs(y))):
        return True
    if any(j not in kernel.cols and q <= v + margin for j, q in enumerate(A.column_payoffs(x))):
        return True
    inv = inverse(kernel.matrix.entries)
    spread = max(abs(e) for row in inv for e in row) * kernel.size * (1 + abs(v))
    return min(kernel.x + kernel.y) <= margin * spread


def infer_kernel(
    g: StochasticGame,
    beta: Fraction,
    estimate: ValueEstimate,
    strict: bool = True,
    workers: Optional[int] = None,
) -> KernelSelection:
    """
    Per state, a completely mixed kernel of the auxiliary game at the estimate.
    g must have nonzero auxiliary values (shifted rewards). With strict=True a
    kernel that could change within the estimate's error bound raises
    KernelAmbiguityError.
    """
    beta = Fraction(beta)
    margin = 2 * beta * estimate.error_bound

    def one(s: int):
        A = aux_game(g, s, estimate.estimate, beta, estimate.mode)
        kernel = find_cmv_kernel(A)
        return kernel, _is_ambiguous(A, kernel, margin)

    results = ordered_map(one, range(g.N), workers)
    ambiguous = [s + 1 for s, (_, flag) in enumerate(results) if flag]
    if strict and ambiguous:
        raise KernelAmbiguityError(
            f"ambiguous kernel at this tolerance in state(s) {ambiguous}", states=ambiguous
        )
    selection = KernelSelection(tuple((k.rows, k.cols) for k, _ in results))
    log.info("kernel selection: %s", "; ".join(selection.describe()))
    return selection


def _plausible_supports(A, target: Fraction, screen: Fraction) -> List[Tuple[Support, Support]]:
    found = []
    for rows, cols in square_supports(A.m, A.n):
        K = A.submatrix(rows, cols)
        det, cof = det_and_cofactor_sum(K.entries)
        if det == 0 or cof == 0:
            continue
        if abs(det / cof - target) <= screen:
            found.append((rows, cols))
    return found


def candidate_selections(
    g: StochasticGame,
    beta: Fraction,
    estimate: ValueEstimate,
    limit: Optional[int] = None,
    workers: Optional[int] = None,
) -> List[KernelSelection]:
    """
    Fallback selections: per-state supports whose kernel value is close to
    the auxiliary value at the estimate, combined by increasing total size
    and then lexicographically, at most `limit` of them.
    """
    limit = limit or load_settings().kernel_candidates
    beta = Fraction(beta)

    def one(s: int):
        A = aux_game(g, s, estimate.estimate, beta, estimate.mode)
        target = solve_matrix_game(A).value
        screen = max(Fraction(1, 10**4), 1000 * estimate.error_bound) * (1 + abs(target))
        return _plausible_supports(A, target, screen)

    per_state = ordered_map(one, range(g.N), workers)
    if any(not options for options in per_state):
        return []
    best = heapq.nsmallest(
        limit,
        product(*per_state),
        key=lambda combo: (sum(len(rows) for rows, _ in combo), combo),
    )
    return [KernelSelection(tuple(combo)) for combo in best]
