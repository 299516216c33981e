import random
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ftra.aga import _state, aga, calculate_gain, optimize_connections, scaled_152_pipeline
from ftra.lp import lp_optimum
from ftra.model import Instance, IntegralSolution, check_feasible, cost
from ftra.oracle import exact_ilp, optimal_connections
from ftra.primal_dual import apd_solve

from helpers import ftfl_greedy_augmentation, mixed_instance


def _switch():
    return Instance([0, 1], [[5], [1]], [1], [1, 1])


def test_reconnect_to_nearest():
    inst = _switch()
    sol = optimize_connections(inst, IntegralSolution([1, 1], [[1], [0]]))
    assert sol.x == ((0,), (1,))
    assert cost(inst, sol) == 2


def test_nearest_is_fixpoint():
    inst = _switch()
    sol = IntegralSolution([1, 1], [[0], [1]])
    assert optimize_connections(inst, sol) == sol


def test_optimize_rejects_short_capacity():
    with pytest.raises(ValueError):
        optimize_connections(Instance([0], [[1]], [2], [2]), IntegralSolution([1], [[1]]))


def test_gain_single_switch():
    inst = _switch()
    st_ = _state(inst, IntegralSolution([1, 0], [[1], [0]]))
    assert calculate_gain(inst, st_) == [0, 3]


def test_saturated_site_gain_zero():
    inst = Instance([0, 1], [[5], [1]], [1], [1, 0])
    st_ = _state(inst, IntegralSolution([1, 0], [[1], [0]]))
    assert calculate_gain(inst, st_)[1] == 0


def test_nothing_to_gain():
    inst = Instance([0, 4], [[1], [3]], [1], [1, 1])
    sol = IntegralSolution([1, 0], [[1], [0]])
    st_ = _state(inst, sol)
    assert calculate_gain(inst, st_) == [0, -4]
    stats = {}
    assert aga(inst, sol, stats) == sol
    assert stats["iterations"] == 0


def test_single_switch_iteration():
    inst = _switch()
    sol = IntegralSolution([1, 0], [[1], [0]])
    stats = {}
    out = aga(inst, sol, stats)
    assert stats["iterations"] == 1
    assert out == IntegralSolution([1, 1], [[0], [1]])
    assert cost(inst, out) == cost(inst, sol) - 3


def test_batch_opens_several():
    # three ports all move together, so one iteration opens three facilities
    inst = Instance([0, 1], [[9], [1]], [3], [3, 3])
    stats = {}
    out = aga(inst, IntegralSolution([3, 0], [[3], [0]]), stats)
    assert stats["iterations"] == 1
    assert out.y == (3, 3) and out.x == ((0,), (3,))


def test_free_site_beats_any_ratio():
    inst = Instance([0, 0, 1], [[9], [8], [1]], [1], [1, 1, 1])
    out = aga(inst, IntegralSolution([1, 0, 0], [[1], [0], [0]]))
    # site 1 is free (infinite ratio) so it goes first, then site 2 still saves 6
    assert out.y == (1, 1, 1)
    assert cost(inst, out) == 2


@pytest.mark.parametrize("seed", range(40))
def test_optimize_matches_oracle(seed):
    inst = mixed_instance(seed)
    rng = random.Random(seed)
    y = list(inst.R)
    for _ in range(inst.n_f):
        i = rng.randrange(inst.n_f)
        y[i] = rng.randint(0, inst.R[i])
    ref = optimal_connections(inst, y)
    if ref is None:
        return
    start = IntegralSolution(y, [[0] * inst.n_c for _ in y])
    assert optimize_connections(inst, start) == ref


@pytest.mark.parametrize("seed", range(60))
def test_matches_unit_greedy(seed):
    inst = mixed_instance(seed, nf_max=5, nc_max=5, R_max=3, r_cap=4)
    start, _ = apd_solve(inst)
    assert cost(inst, aga(inst, start)) == ftfl_greedy_augmentation(inst, start.y)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_never_worse_and_feasible(seed):
    inst = mixed_instance(seed)
    start, _ = apd_solve(inst)
    stats = {}
    out = aga(inst, start, stats)
    assert check_feasible(inst, out) == []
    assert cost(inst, out) <= cost(inst, start)
    assert all(a >= b for a, b in zip(out.y, start.y))
    assert stats["iterations"] <= inst.n_f + inst.n_c * inst.n_f


def test_pipeline_forced(forced):
    assert cost(forced, scaled_152_pipeline(forced)) == exact_ilp(forced).cost


def test_pipeline_warns_non_uniform():
    inst = Instance([1, 1], [[1, 1], [1, 1]], [1, 2], [1, 1])
    with pytest.warns(UserWarning):
        scaled_152_pipeline(inst)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**9))
def test_pipeline_bound_uniform(seed):
    inst = mixed_instance(seed, uniform=True)
    stats = {}
    out = scaled_152_pipeline(inst, stats=stats)
    c = cost(inst, out)
    assert check_feasible(inst, out) == []
    assert c <= Fraction(152, 100) * lp_optimum(inst)
    assert c <= stats["apd_cost"]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**9))
def test_unit_scale_not_worse_than_apd(seed):
    inst = mixed_instance(seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = scaled_152_pipeline(inst, delta=1)
    assert cost(inst, out) <= cost(inst, apd_solve(inst)[0])
