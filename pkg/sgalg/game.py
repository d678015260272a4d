"""
Stochastic games and matrix games: data model, ingestion, validation.

Game file format (one document per game):

  states: N
  state 1:
  rewards:
  <m_1 rows of n_1 rationals>
  transitions:
  <m_1 * n_1 lines of N rationals, (a, b) in row-major order>
  state 2:
  ...

Rationals are "num/den" or integers; floating literals are rejected. Blank
lines and "#" comments are ignored on input. Actions and states are 1-based
in files and messages, 0-based in code.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from .arith import format_rational, parse_rational
from .errors import GameFormatError, GameValidationError, UsageError

log = logging.getLogger("sgalg.game")

Vector = Tuple[Fraction, ...]
MixedStrategy = Tuple[Fraction, ...]


class Mode:
    NORMALIZED = "normalized"
    UNNORMALIZED = "unnormalized"
    ALL = (NORMALIZED, UNNORMALIZED)


def check_mode(mode: str) -> str:
    if mode not in Mode.ALL:
        raise UsageError(f"unknown mode {mode!r}; expected one of {', '.join(Mode.ALL)}")
    return mode


# ───────────────────────────────────────────────────────────────────────────────
# Matrix games
# ───────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class MatrixGame:
    entries: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(Fraction(x) for x in row) for row in self.entries)
        if not rows or not rows[0]:
            raise GameValidationError("a matrix game needs at least one row and one column")
        if any(len(row) != len(rows[0]) for row in rows):
            raise GameValidationError("matrix rows have different lengths")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def of(cls, rows: Sequence[Sequence[Union[int, Fraction]]]) -> "MatrixGame":
        return cls(tuple(tuple(row) for row in rows))

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def n(self) -> int:
        return len(self.entries[0])

    def __getitem__(self, ij: Tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i][j]

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.entries)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "MatrixGame":
        return MatrixGame(tuple(tuple(self.entries[i][j] for j in cols) for i in rows))

    def affine(self, scale: Fraction = Fraction(1), shift: Fraction = Fraction(0)) -> "MatrixGame":
        return MatrixGame(tuple(tuple(scale * x + shift for x in row) for row in self.entries))

    def min_entry(self) -> Fraction:
        return min(min(row) for row in self.entries)

    def row_payoffs(self, y: Sequence[Fraction]) -> Vector:
        """(A y)_i for every row i."""
        return tuple(sum((a * q for a, q in zip(row, y)), Fraction(0)) for row in self.entries)

    def column_payoffs(self, x: Sequence[Fraction]) -> Vector:
        """(x^T A)_j for every column j."""
        return tuple(
            sum((x[i] * self.entries[i][j] for i in range(self.m)), Fraction(0))
            for j in range(self.n)
        )


def check_mixed_strategy(x: Sequence[Fraction], size: Optional[int] = None) -> MixedStrategy:
    x = tuple(Fraction(p) for p in x)
    if size is not None and len(x) != size:
        raise GameValidationError(f"strategy has {len(x)} entries, expected {size}")
    if any(p < 0 for p in x):
        raise GameValidationError("strategy has a negative entry")
    if sum(x) != 1:
        raise GameValidationError(f"strategy sums to {format_rational(sum(x))}, not 1")
    return x


# ───────────────────────────────────────────────────────────────────────────────
# Stochastic games
# ───────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class StateData:
    rewards: MatrixGame
    # transitions[a][b] is the distribution p(. | s, a, b) over all N states
    transitions: Tuple[Tuple[Vector, ...], ...]


@dataclass(frozen=True)
class StochasticGame:
    states: Tuple[StateData, ...]

    def __post_init__(self) -> None:
        if not self.states:
            raise GameValidationError("a stochastic game needs at least one state")
        N = len(self.states)
        for s, data in enumerate(self.states):
            m, n = data.rewards.m, data.rewards.n
            if len(data.transitions) != m or any(len(row) != n for row in data.transitions):
                raise GameValidationError(
                    f"state {s + 1}: transitions do not match the {m}x{n} reward matrix", (s + 1,)
                )
            for a, row in enumerate(data.transitions):
                for b, dist in enumerate(row):
                    where = (s + 1, a + 1, b + 1)
                    if len(dist) != N:
                        raise GameValidationError(
                            f"state {s + 1}, actions ({a + 1},{b + 1}): "
                            f"{len(dist)} transition entries, expected {N}",
                            where,
                        )
                    if any(p < 0 for p in dist):
                        raise GameValidationError(
                            f"state {s + 1}, actions ({a + 1},{b + 1}): negative probability", where
                        )
                    total = sum(dist, Fraction(0))
                    if total != 1:
                        raise GameValidationError(
                            f"state {s + 1}, actions ({a + 1},{b + 1}): "
                            f"transitions sum to {format_rational(total)} ≠ 1",
                            where,
                        )

    @classmethod
    def of(cls, rewards, transitions) -> "StochasticGame":
        """Build from nested lists: rewards[s][a][b], transitions[s][a][b][s']."""
        states = []
        for R, P in zip(rewards, transitions):
            states.append(
                StateData(
                    MatrixGame.of(R),
                    tuple(tuple(tuple(Fraction(p) for p in dist) for dist in row) for row in P),
                )
            )
        if len(states) != len(rewards) or len(rewards) != len(transitions):
            raise GameValidationError("rewards and transitions list different state counts")
        return cls(tuple(states))

    @property
    def N(self) -> int:
        return len(self.states)

    def actions(self, s: int) -> Tuple[int, int]:
        R = self.states[s].rewards
        return R.m, R.n

    def reward(self, s: int, a: int, b: int) -> Fraction:
        return self.states[s].rewards.entries[a][b]

    def transition(self, s: int, a: int, b: int) -> Vector:
        return self.states[s].transitions[a][b]

    def action_pairs(self, s: int) -> Iterator[Tuple[int, int]]:
        m, n = self.actions(s)
        for a in range(m):
            for b in range(n):
                yield a, b

    def min_reward(self) -> Fraction:
        return min(data.rewards.min_entry() for data in self.states)


@dataclass(frozen=True)
class StationaryStrategyPair:
    player1: Tuple[MixedStrategy, ...]
    player2: Tuple[MixedStrategy, ...]

    def __post_init__(self) -> None:
        if len(self.player1) != len(self.player2):
            raise GameValidationError("strategy pair covers different state counts")
        object.__setattr__(self, "player1", tuple(check_mixed_strategy(x) for x in self.player1))
        object.__setattr__(self, "player2", tuple(check_mixed_strategy(y) for y in self.player2))


@dataclass(frozen=True)
class ShiftRecord:
    c: Fraction


# ───────────────────────────────────────────────────────────────────────────────
# Parsing / serialization
# ───────────────────────────────────────────────────────────────────────────────

def _decode(text: Union[bytes, str]) -> str:
    if isinstance(text, bytes):
        try:
            return text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise GameFormatError(f"input is not UTF-8: {exc}") from None
    return text


def _content_lines(text: str) -> List[Tuple[int, str]]:
    lines = []
    for number, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((number, body))
    return lines


def _rational_row(number: int, raw: str) -> List[Fraction]:
    values = []
    column = 1
    for token in raw.split():
        try:
            values.append(parse_rational(token))
        except ValueError:
            raise GameFormatError(f"bad rational {token!r}", number, raw.index(token, column - 1) + 1)
        column = raw.index(token, column - 1) + len(token) + 1
    return values


class _Cursor:
    def __init__(self, lines: List[Tuple[int, str]]):
        self.lines = lines
        self.pos = 0

    def peek(self) -> Optional[Tuple[int, str]]:
        return self.lines[self.pos] if self.pos < len(self.lines) else None

    def take(self, what: str) -> Tuple[int, str]:
        item = self.peek()
        if item is None:
            last = self.lines[-1][0] if self.lines else 0
            raise GameFormatError(f"unexpected end of input, expected {what}", last + 1, 1)
        self.pos += 1
        return item

    def keyword(self, expected: str) -> int:
        number, body = self.take(f"'{expected}'")
        if body.lower() != expected:
            raise GameFormatError(f"expected '{expected}', found {body!r}", number, 1)
        return number


def parse_game(text: Union[bytes, str]) -> StochasticGame:
    cursor = _Cursor(_content_lines(_decode(text)))
    number, header = cursor.take("'states: N'")
    key, _, value = header.partition(":")
    if key.strip().lower() != "states" or not value.strip().isdigit():
        raise GameFormatError(f"expected 'states: N', found {header!r}", number, 1)
    N = int(value)
    if N < 1:
        raise GameFormatError("state count must be at least 1", number, len(key) + 2)

    rewards, transitions = [], []
    for s in range(1, N + 1):
        cursor.keyword(f"state {s}:")
        cursor.keyword("rewards:")
        rows: List[List[Fraction]] = []
        while cursor.peek() is not None and cursor.peek()[1].lower() != "transitions:":
            number, raw = cursor.take("reward row")
            row = _rational_row(number, raw)
            if rows and len(row) != len(rows[0]):
                raise GameFormatError(
                    f"reward row has {len(row)} entries, expected {len(rows[0])}", number, 1
                )
            rows.append(row)
        if not rows:
            number, _ = cursor.peek() or (0, "")
            raise GameFormatError(f"state {s} has no reward rows", number, 1)
        cursor.keyword("transitions:")
        m, n = len(rows), len(rows[0])
        P = [[None] * n for _ in range(m)]
        for a in range(m):
            for b in range(n):
                number, raw = cursor.take(f"transition line for actions ({a + 1},{b + 1})")
                dist = _rational_row(number, raw)
                if len(dist) != N:
                    raise GameFormatError(
                        f"state {s}, actions ({a + 1},{b + 1}): {len(dist)} probabilities, expected {N}",
                        number,
                        1,
                    )
                P[a][b] = dist
        rewards.append(rows)
        transitions.append(P)

    leftover = cursor.peek()
    if leftover is not None:
        raise GameFormatError(f"unexpected content {leftover[1]!r}", leftover[0], 1)
    game = StochasticGame.of(rewards, transitions)
    log.debug("parsed game with %d states", game.N)
    return game


def serialize_game(g: StochasticGame) -> str:
    out = [f"states: {g.N}"]
    for s, data in enumerate(g.states):
        out.append(f"state {s + 1}:")
        out.append("rewards:")
        out.extend(" ".join(format_rational(x) for x in row) for row in data.rewards.entries)
        out.append("transitions:")
        for row in data.transitions:
            out.extend(" ".join(format_rational(p) for p in dist) for dist in row)
    return "\n".join(out) + "\n"


def parse_matrix(text: Union[bytes, str]) -> MatrixGame:
    rows = [_rational_row(number, raw) for number, raw in _content_lines(_decode(text))]
    if not rows:
        raise GameFormatError("empty matrix", 1, 1)
    for row in rows:
        if len(row) != len(rows[0]):
            raise GameFormatError("matrix rows have different lengths")
    return MatrixGame.of(rows)


# ───────────────────────────────────────────────────────────────────────────────
# Reward shift, relabeling, structure
# ───────────────────────────────────────────────────────────────────────────────

def shift_rewards(g: StochasticGame) -> Tuple[StochasticGame, ShiftRecord]:
    """Shift all rewards by c = max(0, 1 - min reward) so every reward is >= 1."""
    c = max(Fraction(0), 1 - g.min_reward())
    if not c:
        return g, ShiftRecord(Fraction(0))
    shifted = tuple(
        StateData(data.rewards.affine(shift=c), data.transitions) for data in g.states
    )
    log.info("shifted rewards by %s", format_rational(c))
    return StochasticGame(shifted), ShiftRecord(c)


def shift_delta(c: Fraction, mode: str, beta: Fraction) -> Fraction:
    """How much a reward shift by c moves a value: c (normalized) or c/(1-beta)."""
    check_mode(mode)
    c = Fraction(c)
    if mode == Mode.NORMALIZED:
        return c
    if Fraction(beta) == 1:
        raise UsageError("unnormalized values are undefined at beta = 1")
    return c / (1 - Fraction(beta))


def unshift_value(v, c: Fraction, mode: str, beta: Fraction):
    delta = shift_delta(c, mode, beta)
    if isinstance(v, Decimal):
        return v - Decimal(delta.numerator) / Decimal(delta.denominator)
    return Fraction(v) - delta


def permute_states(g: StochasticGame, perm: Sequence[int]) -> StochasticGame:
    """Relabel states: old state s becomes new state perm[s]."""
    N = g.N
    if sorted(perm) != list(range(N)):
        raise UsageError(f"not a permutation of {N} states: {list(perm)}")
    new_states: List[Optional[StateData]] = [None] * N
    for s, data in enumerate(g.states):
        moved = []
        for row in data.transitions:
            new_row = []
            for dist in row:
                nd = [Fraction(0)] * N
                for t, p in enumerate(dist):
                    nd[perm[t]] = p
                new_row.append(tuple(nd))
            moved.append(tuple(new_row))
        new_states[perm[s]] = StateData(data.rewards, tuple(moved))
    return StochasticGame(tuple(new_states))


def _controlled_by_row(data: StateData) -> bool:
    return all(len(set(row)) == 1 for row in data.transitions)


def _controlled_by_column(data: StateData) -> bool:
    m = len(data.transitions)
    n = len(data.transitions[0])
    return all(len({data.transitions[a][b] for a in range(m)}) == 1 for b in range(n))


def _additive(entry, m: int, n: int) -> bool:
    return all(
        entry(a, b) - entry(a, 0) - entry(0, b) + entry(0, 0) == 0
        for a in range(m)
        for b in range(n)
    )


def classify(g: StochasticGame) -> Tuple[str, ...]:
    """Structured classes the game belongs to, decided exactly from the data."""
    found = []
    if all(min(g.actions(s)) == 1 for s in range(g.N)):
        found.append("perfect-information")
    rows = [_controlled_by_row(d) for d in g.states]
    cols = [_controlled_by_column(d) for d in g.states]
    if all(rows) or all(cols):
        found.append("single-controller")
    if all(r or c for r, c in zip(rows, cols)):
        found.append("switching-controller")
    if len({g.actions(s) for s in range(g.N)}) == 1:
        base = g.states[0]
        separable = all(
            len({d.rewards[a, b] - base.rewards[a, b] for a, b in g.action_pairs(0)}) == 1
            for d in g.states
        )
        state_free = all(d.transitions == base.transitions for d in g.states)
        if separable and state_free:
            found.append("ser-sit")
    arat = True
    for d in g.states:
        m, n = d.rewards.m, d.rewards.n
        if not _additive(lambda a, b: d.rewards[a, b], m, n):
            arat = False
            break
        for t in range(g.N):
            if not _additive(lambda a, b: d.transitions[a][b][t], m, n):
                arat = False
                break
    if arat:
        found.append("arat")
    return tuple(found)
