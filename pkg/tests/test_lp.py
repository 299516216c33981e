from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ftra.lp import (build_primal, lp_optimum, make_complete, relative_gap, solve, solve_instance,
                     verify_csc, verify_dual_feasible, write_lp)
from ftra.model import FractionalSolution, Instance, DualSolution, generate_euclidean
from ftra.oracle import exact_ilp
from ftra.simplex import INFEASIBLE, UNBOUNDED, bland_simplex, certify_basis, solve_exact

from helpers import cycle_gadget, mixed_instance


def test_model_sizes():
    m = build_primal(Instance([1], [[1]], [1], [1]))
    assert (m.n_vars, m.n_rows) == (2, 3)
    m = build_primal(generate_euclidean(2, 3, 2, 2, seed=0, k="random"), with_k=True)
    assert (m.n_vars, m.n_rows) == (8, 12)


def test_with_k_needs_k():
    with pytest.raises(ValueError):
        build_primal(Instance([1], [[1]], [1], [1]), with_k=True)


def test_forced_lp(forced):
    res = solve_instance(forced)
    assert res.status == "optimal"
    assert res.objective == 21
    assert res.primal.y == (3,) and res.primal.x == ((3,),)


def test_two_forced_lp(two_forced):
    assert lp_optimum(two_forced) == 11


def test_cycle_gadget_has_fractional_optimum():
    # half of every site open: facility 3*2*(1/2) + connections 3*1
    inst = cycle_gadget(3, 2)
    res = solve_instance(inst)
    assert res.objective == 6
    assert res.primal.y == (Fraction(1, 2),) * 3
    assert exact_ilp(inst).cost == 7


@pytest.mark.parametrize("seed", range(30))
def test_exact_matches_cold_rational_simplex(seed):
    inst = mixed_instance(seed, nf_max=4, nc_max=4)
    fast = solve_instance(inst)
    slow = solve_instance(inst, backend="bland")
    assert fast.objective == slow.objective
    assert slow.dual.objective(inst) == slow.objective


@pytest.mark.parametrize("seed", range(40))
def test_float_backend_agrees(seed):
    inst = mixed_instance(seed)
    ex = solve_instance(inst)
    fl = solve_instance(inst, backend="float")
    assert relative_gap(ex.objective, fl.objective) <= 1e-7
    assert relative_gap(fl.dual.objective(inst), fl.objective) <= 1e-7
    assert verify_csc(inst, fl.primal, fl.dual, tol=1e-6) == []


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_strong_duality_exact(seed):
    inst = mixed_instance(seed)
    res = solve_instance(inst)
    assert res.dual.objective(inst) == res.objective
    assert verify_dual_feasible(inst, res.dual) == []
    assert verify_csc(inst, res.primal, res.dual) == []


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_strong_duality_with_budget(seed):
    inst = mixed_instance(seed, k="random")
    res = solve_instance(inst, with_k=True)
    assert res.dual.theta is not None
    assert res.dual.objective(inst) == res.objective
    assert verify_dual_feasible(inst, res.dual) == []
    assert verify_csc(inst, res.primal, res.dual) == []
    assert res.objective >= lp_optimum(inst)


def test_csc_perturbation_detected():
    inst = generate_euclidean(3, 3, 2, 2, seed=4)
    res = solve_instance(inst)
    bumped = DualSolution(tuple(a + 1 for a in res.dual.alpha), res.dual.beta, res.dual.z)
    assert any(v.constraint.startswith("C1") for v in verify_csc(inst, res.primal, bumped))


def test_csc_all_zero_instance():
    inst = Instance([0, 0], [[0, 0], [0, 0]], [1, 2], [1, 1])
    res = solve_instance(inst)
    assert res.objective == 0
    assert verify_csc(inst, res.primal, res.dual) == []


@pytest.mark.parametrize("seed", range(40))
def test_lp_below_oracle(seed):
    inst = mixed_instance(seed, nf_max=5, nc_max=5)
    assert lp_optimum(inst) <= exact_ilp(inst).cost


def test_make_complete_example():
    inst = Instance([0, 0], [[1], [2]], [1], [1, 1])
    frac = FractionalSolution((Fraction(1), Fraction(1)), ((Fraction(1, 2),), (Fraction(1, 2),)))
    out = make_complete(inst, frac)
    assert out.x == ((1,), (0,))
    assert out.y == frac.y


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_make_complete_properties(seed):
    inst = mixed_instance(seed)
    res = solve_instance(inst)
    once = make_complete(inst, res.primal)
    assert once.objective == res.objective  # reassignment can't beat an optimum
    assert make_complete(inst, once) == once
    assert verify_csc(inst, once, res.dual) == []
    for j in range(inst.n_c):
        used = [i for i in range(inst.n_f) if once.x[i][j] > 0]
        partial = [i for i in used if once.x[i][j] < once.y[i]]
        assert len(partial) <= 1
        if partial:
            assert inst.c[partial[0]][j] == max(inst.c[i][j] for i in used)
        assert sum(once.x[i][j] for i in range(inst.n_f)) == inst.r[j]


def test_lp_export(tmp_path):
    path = tmp_path / "m.lp"
    write_lp(build_primal(Instance([5], [[2]], [3], [3])), path)
    text = path.read_text()
    assert "req_0" in text and "x_0_0" in text and "cap_0" in text


# -- rational simplex on its own ----------------------------------------

def test_simplex_infeasible():
    # x >= 2 and -x >= -1
    res = bland_simplex([{0: 1}, {0: -1}], [2, -1], [1], 1)
    assert res.status == INFEASIBLE


def test_simplex_unbounded():
    res = bland_simplex([{0: 1}], [1], [-1], 1)
    assert res.status == UNBOUNDED


def test_simplex_degenerate_and_redundant_rows():
    # duplicated row and a degenerate vertex: min x0 + x1, x0 + x1 >= 1 twice, x0 >= 0 row
    rows = [{0: 1, 1: 1}, {0: 1, 1: 1}, {0: 1}]
    res = bland_simplex(rows, [1, 1, 0], [1, 1], 2)
    assert res.objective == 1
    assert sum(b * u for b, u in zip([1, 1, 0], res.u)) == 1


def test_certificate_rejects_suboptimal_basis():
    # min x0 + 2 x1 s.t. x0 + x1 >= 1 ; basis {x1} is feasible but not optimal
    rows, b, c = [{0: 1, 1: 1}], [1], [1, 2]
    assert certify_basis(rows, b, c, 2, [1]) is None
    assert certify_basis(rows, b, c, 2, [0]).objective == 1
    res = solve_exact(rows, b, c, 2, hint=[1])
    assert res.objective == 1 and res.route == "bland-warm"


def test_singular_hint_falls_back():
    rows, b, c = [{0: 1, 1: 1}, {0: 2, 1: 2}], [1, 2], [1, 2]
    res = solve_exact(rows, b, c, 2, hint=[0, 1])
    assert res.objective == 1
