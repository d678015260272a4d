from fractions import Fraction as Q

import pytest

from sgalg.arith import MultiPoly
from sgalg.errors import KernelAmbiguityError, UsageError
from sgalg.game import Mode, StochasticGame, shift_rewards
from sgalg.polysys import (
    KernelSelection,
    build_system,
    candidate_selections,
    infer_kernel,
    symbolic_kernel_matrix,
)
from sgalg.shapley import ValueEstimate, value_iteration

FULL = ((0, 1, 2), (0, 1, 2))


def z(i, nv=3):
    return MultiPoly.variable(nv, i)


def full_selection():
    return KernelSelection((FULL, FULL))


def test_selection_validation(example1):
    with pytest.raises(UsageError):
        KernelSelection((((0, 1), (0,)),))
    with pytest.raises(UsageError):
        KernelSelection((FULL,)).validate(example1)
    with pytest.raises(UsageError):
        KernelSelection((FULL, ((3,), (0,)))).validate(example1)
    sel = KernelSelection((FULL, ((1,), (2,))))
    assert sel.total_size == 4
    assert sel.describe()[1] == "state 2: rows {2} cols {3}"
    assert sel.as_json()[1] == {"rows": [2], "cols": [3]}


def test_symbolic_entries(example1):
    M = symbolic_kernel_matrix(example1, 0, full_selection(), Mode.NORMALIZED)
    # (1 - z0) * -2 + z0 * (3/10 z1 + 7/10 z2)
    assert M[0][0] == -2 * (1 - z(0)) + Q(3, 10) * z(0) * z(1) + Q(7, 10) * z(0) * z(2)
    U = symbolic_kernel_matrix(example1, 1, full_selection(), Mode.UNNORMALIZED)
    assert U[2][1] == -1 + Q(1, 2) * z(0) * z(1) + Q(1, 2) * z(0) * z(2)


def test_example1_unnormalized_system(example1):
    system = build_system(example1, full_selection(), Mode.UNNORMALIZED, workers=1)
    f1 = 32 - 12 * z(1) + Q(22, 5) * z(0) * z(1) + Q(38, 5) * z(0) * z(2)
    f2 = 9 * z(2) - Q(81, 20) * z(0) * z(1) - Q(99, 20) * z(0) * z(2)
    assert system.polys[0].is_proportional(f1)
    assert system.polys[1].is_proportional(f2)
    assert system.nvars == 3
    assert system.to_text().startswith("f1 = ")


@pytest.mark.parametrize("beta", [Q(1, 10), Q(1, 2), Q(9, 10)])
def test_full_system_vanishes_at_full_kernel_values(example1, beta):
    # an identity in beta, whether or not the full kernels are optimal there
    v1 = (160 - 88 * beta) / (5 * (beta + 12))
    v2 = 72 * beta / (5 * (beta + 12))
    normalized = build_system(example1, full_selection(), Mode.NORMALIZED, workers=1)
    unnormalized = build_system(example1, full_selection(), Mode.UNNORMALIZED, workers=1)
    for f in normalized.polys:
        assert f.evaluate([beta, v1, v2]) == 0
    for f in unnormalized.polys:
        assert f.evaluate([beta, v1 / (1 - beta), v2 / (1 - beta)]) == 0


def test_single_state_system():
    g = StochasticGame.of([[[5]]], [[[[1]]]])
    system = build_system(g, KernelSelection((((0,), (0,)),)), Mode.UNNORMALIZED, workers=1)
    w0, w1 = MultiPoly.variable(2, 0), MultiPoly.variable(2, 1)
    assert system.polys[0] == (1 - w0) * w1 - 5


@pytest.mark.parametrize(
    "beta, state1",
    [(Q(1, 10), FULL), (Q(1, 2), ((0, 2), (0, 1)))],
)
def test_infer_kernel_on_example1(example1, beta, state1):
    shifted, _ = shift_rewards(example1)
    est = value_iteration(shifted, beta, tol=Q(1, 10**10), workers=1)
    selection = infer_kernel(shifted, beta, est, strict=False, workers=1)
    assert selection == KernelSelection((state1, FULL))
    candidates = candidate_selections(shifted, beta, est, limit=16, workers=1)
    assert selection in candidates
    sizes = [c.total_size for c in candidates]
    assert sizes == sorted(sizes)


def test_wide_bound_is_ambiguous(example1):
    shifted, _ = shift_rewards(example1)
    beta = Q(1, 2)
    est = value_iteration(shifted, beta, tol=Q(1, 10**6), workers=1)
    loose = ValueEstimate(est.estimate, est.residual, Q(100), est.mode, beta, est.iterations)
    with pytest.raises(KernelAmbiguityError) as err:
        infer_kernel(shifted, beta, loose, workers=1)
    assert err.value.states
    # non-strict inference still answers
    assert infer_kernel(shifted, beta, loose, strict=False, workers=1).total_size >= 2
