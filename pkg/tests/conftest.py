from fractions import Fraction as Q
from pathlib import Path

import pytest

from sgalg.config import Settings
from sgalg.game import parse_game

GAMES = Path(__file__).resolve().parent.parent / "games"


def load_game(name: str):
    return parse_game((GAMES / name).read_bytes())


@pytest.fixture
def example1():
    return load_game("example1.game")


@pytest.fixture
def example2():
    return load_game("example2.game")


@pytest.fixture
def settings():
    # sequential and a little looser than the defaults so the suite stays quick
    return Settings(threads=1, tol=Q(1, 10**10), precision=Q(1, 10**9))


@pytest.fixture
def example1_values():
    """Normalized values of games/example1.game; the full 3x3 kernels are optimal only at 1/10."""
    return {
        Q(1, 10): (Q(1512, 605), Q(72, 605)),
        Q(1, 2): (Q(145, 71), Q(45, 71)),
        Q(9, 10): (Q(505, 319), Q(405, 319)),
    }
