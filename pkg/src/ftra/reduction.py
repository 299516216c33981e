"""Shrinking capacities to the LP solution and splitting off an integral part.

With (x*, y*) optimal, capping R_i at ceil(y*_i) keeps (x*, y*) optimal.
The shrunken instance then splits into
  * a large part, solved integrally by rounding down:
        y^l_i = max(0, floor(y*_i) - 1),  x^l_ij = min(floor(x*_ij), y^l_i);
  * a small part whose capacities R^s_i = ceil(y*_i) - y^l_i are in {0, 1, 2}
    and whose requirements are what the large part leaves over.
Any solver that is within rho of the LP optimum on the small part gives a
rho-approximation overall.  Small parts are cheap to expand into instances
with unit capacities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .lp import make_complete, snap, solve_instance
from .model import Instance, IntegralSolution, check_fractional, cost


@dataclass(frozen=True)
class SplitPair:
    base: Instance  # shrunken instance
    frac: object  # its optimal fractional solution (completed)
    y_large: tuple
    x_large: tuple
    r_large: tuple
    r_small: tuple
    R_small: tuple
    small: Instance | None  # None when nothing is left to serve
    site_map: tuple  # small-instance site -> base site
    client_map: tuple  # small-instance client -> base client


def shrink(inst, frac):
    """Cap every R_i at ceil(y*_i).  Any k bound is dropped."""
    return Instance(inst.f, inst.c, inst.r, [math.ceil(snap(v)) for v in frac.y])


def split(base, frac):
    n_f, n_c = base.n_f, base.n_c
    y = [snap(v) for v in frac.y]
    x = [[snap(v) for v in row] for row in frac.x]
    y_l = tuple(max(0, math.floor(v) - 1) for v in y)
    x_l = tuple(tuple(min(math.floor(x[i][j]), y_l[i]) for j in range(n_c)) for i in range(n_f))
    r_l = tuple(sum(x_l[i][j] for i in range(n_f)) for j in range(n_c))
    r_s = tuple(base.r[j] - r_l[j] for j in range(n_c))
    R_s = tuple(math.ceil(y[i]) - y_l[i] for i in range(n_f))

    for i in range(n_f):
        if R_s[i] not in (0, 1, 2):
            raise AssertionError(f"small capacity {R_s[i]} at site {i}")
        if y_l[i] + R_s[i] != base.R[i]:
            raise AssertionError(f"capacities of site {i} do not add up")
    if r_l and max(r_l) > sum(y_l):
        raise AssertionError("large part cannot serve its requirements")
    if r_s and max(r_s) > sum(R_s):
        raise AssertionError("small part cannot serve its requirements")
    y_res = [y[i] - y_l[i] for i in range(n_f)]
    x_res = [[x[i][j] - x_l[i][j] for j in range(n_c)] for i in range(n_f)]
    bad = check_fractional(base, y_res, x_res, r=r_s, R=R_s)
    if bad:
        raise AssertionError(f"residual not feasible for the small part: {bad[0]}")

    sites = tuple(i for i in range(n_f) if R_s[i] > 0)
    clients = tuple(j for j in range(n_c) if r_s[j] > 0)
    small = None
    if clients:
        small = Instance([base.f[i] for i in sites],
                         [[base.c[i][j] for j in clients] for i in sites],
                         [r_s[j] for j in clients], [R_s[i] for i in sites])
    return SplitPair(base, frac, y_l, x_l, r_l, r_s, R_s, small, sites, clients)


def combine(pair, small_sol):
    n_f, n_c = pair.base.n_f, pair.base.n_c
    y = list(pair.y_large)
    x = [list(row) for row in pair.x_large]
    if small_sol is not None:
        for a, i in enumerate(pair.site_map):
            y[i] += small_sol.y[a]
            for b, j in enumerate(pair.client_map):
                x[i][j] += small_sol.x[a][b]
    return IntegralSolution(tuple(y), tuple(tuple(row) for row in x))


def expand_to_ftfl(inst, cap=64):
    """Copy site i R_i times with unit capacity.  Returns (instance, site_map)."""
    if sum(inst.R) > cap:
        raise ValueError(f"expansion would create {sum(inst.R)} sites (cap {cap})")
    site_map = tuple(i for i in range(inst.n_f) for _ in range(inst.R[i]))
    out = Instance([inst.f[i] for i in site_map], [inst.c[i] for i in site_map],
                   inst.r, [1] * len(site_map))
    return out, site_map


def fold_ftfl(inst, site_map, sol):
    y = [0] * inst.n_f
    x = [[0] * inst.n_c for _ in range(inst.n_f)]
    for a, i in enumerate(site_map):
        y[i] += sol.y[a]
        for j in range(inst.n_c):
            x[i][j] += sol.x[a][j]
    return IntegralSolution(tuple(y), tuple(tuple(row) for row in x))


def reduce_solve(inst, subsolver, backend="exact", details=None):
    """Solve `inst` by LP, shrink, split, run `subsolver` on the small part."""
    lp = solve_instance(inst, backend=backend)
    frac = make_complete(inst, lp.primal)
    base = shrink(inst, frac)
    pair = split(base, frac)
    small_sol = subsolver(pair.small) if pair.small is not None else None
    out = combine(pair, small_sol)
    large_cost = cost(base, IntegralSolution(pair.y_large, pair.x_large))
    small_cost = cost(pair.small, small_sol) if small_sol is not None else 0
    if cost(inst, out) != large_cost + small_cost:
        raise AssertionError("combined cost is not the sum of its parts")
    if details is not None:
        details.update(lp=lp, pair=pair, small_solution=small_sol,
                       large_cost=large_cost, small_cost=small_cost)
    return out
