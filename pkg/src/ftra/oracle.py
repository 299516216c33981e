"""Exact optimum for tiny instances by depth-first enumeration of y.

Once y is fixed the best x is greedy: every client takes its r_j cheapest
open units.  (Exchange argument: if a client uses a unit costing more than
an unused open unit, swapping them lowers the cost without touching any
other client, because x_ij <= y_i constrains each client separately.)  So
only y needs to be searched.
"""
from __future__ import annotations

from dataclasses import dataclass

from .model import IntegralSolution, cost


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleResult:
    solution: IntegralSolution
    cost: int
    nodes: int


def _client_orders(inst):
    return [sorted(range(inst.n_f), key=lambda i: (inst.c[i][j], i)) for j in range(inst.n_c)]


def optimal_connections(inst, y, orders=None):
    """Cheapest x for fixed y, or None when some client cannot be served."""
    orders = orders or _client_orders(inst)
    x = [[0] * inst.n_c for _ in range(inst.n_f)]
    for j, order in enumerate(orders):
        need = inst.r[j]
        for i in order:
            if need == 0:
                break
            take = min(need, y[i])
            x[i][j] = take
            need -= take
        if need:
            return None
    return IntegralSolution(tuple(y), tuple(tuple(row) for row in x))


def _connection_cost(inst, y, orders):
    total = 0
    for j, order in enumerate(orders):
        need = inst.r[j]
        for i in order:
            if need == 0:
                break
            take = min(need, y[i])
            total += take * inst.c[i][j]
            need -= take
        if need:
            return None
    return total


def exact_ilp(inst, enforce_k=False, budget=10**7):
    k = inst.k if enforce_k else None
    n_f = inst.n_f
    orders = _client_orders(inst)
    rmax = max(inst.r, default=0)
    # capacity still available from sites i.. onward
    tail = [0] * (n_f + 1)
    for i in range(n_f - 1, -1, -1):
        tail[i] = tail[i + 1] + inst.R[i]
    best = [None, None]
    nodes = 0
    y = list(inst.R)  # undecided sites are treated as fully open for bounds

    def dfs(i, fac, opened):
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"oracle exceeded {budget} nodes")
        if best[0] is not None and fac >= best[0]:
            return
        # connection cost only falls as y grows, so this is a lower bound
        conn = _connection_cost(inst, y, orders)
        if conn is None or (best[0] is not None and fac + conn >= best[0]):
            return
        if i == n_f:
            best[0], best[1] = fac + conn, tuple(y)
            return
        hi = inst.R[i]
        if k is not None:
            hi = min(hi, k - opened)
        for v in range(hi, -1, -1):
            # no way to reach max r_j with what is left
            if opened + v + tail[i + 1] < rmax:
                break
            y[i] = v
            dfs(i + 1, fac + v * inst.f[i], opened + v)
        y[i] = inst.R[i]

    dfs(0, 0, 0)
    sol = optimal_connections(inst, best[1], orders)
    return OracleResult(sol, cost(inst, sol), nodes)

