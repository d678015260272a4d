# Exact algebraic solver for zero-sum stochastic games
__version__ = "0.1.0"
