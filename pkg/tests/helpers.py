"""Corpus builders and slow reference implementations used only by tests."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from ftra.model import generate_euclidean, generate_graph_metric


def mixed_instance(seed, nf_max=8, nc_max=8, R_max=3, r_cap=6, uniform=False, k=None):
    """Even seeds: Euclidean points.  Odd seeds: sparse graph metric."""
    rng = random.Random(seed * 7919 + 17)
    n_f = rng.randint(1, nf_max)
    n_c = rng.randint(1, nc_max)
    Rm = rng.randint(1, R_max)
    r_max = rng.randint(1, min(n_f * Rm, r_cap))
    if seed % 2 == 0:
        return generate_euclidean(n_f, n_c, r_max, Rm, f_range=(0, rng.choice([100, 500, 2000])),
                                  seed=seed, uniform=uniform, k=k)
    return generate_graph_metric(n_f, n_c, r_max, Rm, f_range=(1, rng.choice([5, 10, 20])),
                                 w_max=rng.randint(1, 4), degree=rng.randint(1, 3), seed=seed,
                                 uniform=uniform, k=k)


def metric_slack(seed):
    return 2 if seed % 2 == 0 else 0


def cycle_gadget(n, f, w_near=1, r=1, R=1):
    """n sites and n clients on a cycle: client j is at distance w_near from
    sites j and j+1 and 3*w_near (two more hops) from all others.  Its LP
    optimum opens every site halfway when facilities are expensive enough."""
    c = [[w_near if i in (j, (j + 1) % n) else 3 * w_near for j in range(n)] for i in range(n)]
    from ftra.model import Instance
    return Instance([f] * n, c, [r] * n, [R] * n)


def brute_connection_cost(inst, y):
    total = 0
    for j in range(inst.n_c):
        units = sorted(c for i in range(inst.n_f) for c in [inst.c[i][j]] * y[i])
        if len(units) < inst.r[j]:
            return None
        total += sum(units[:inst.r[j]])
    return total


def brute_force_opt(inst, k=None):
    """Minimum over every y in prod [0..R_i] (no pruning at all)."""
    best = None
    for y in itertools.product(*(range(R + 1) for R in inst.R)):
        if k is not None and sum(y) > k:
            continue
        conn = brute_connection_cost(inst, y)
        if conn is None:
            continue
        val = conn + sum(f * v for f, v in zip(inst.f, y))
        if best is None or val < best:
            best = val
    return best


def ftfl_greedy_augmentation(inst, y_start):
    """Classical greedy augmentation on the unit-capacity copy of `inst`:
    open one copy at a time, the one with the best (saving - f) / f, until no
    copy saves more than it costs.  Connections are recomputed from scratch."""
    copies = [i for i in range(inst.n_f) for _ in range(inst.R[i])]
    is_open = []
    for i in range(inst.n_f):
        is_open += [q < y_start[i] for q in range(inst.R[i])]

    def conn(open_flags):
        total = 0
        for j in range(inst.n_c):
            costs = sorted(inst.c[copies[a]][j] for a in range(len(copies)) if open_flags[a])
            total += sum(costs[:inst.r[j]])
        return total

    while True:
        current = conn(is_open)
        best, key = None, None
        for a, i in enumerate(copies):
            if is_open[a]:
                continue
            trial = list(is_open)
            trial[a] = True
            gain = current - conn(trial) - inst.f[i]
            if gain <= 0:
                continue
            k = (1, 0) if inst.f[i] == 0 else (0, Fraction(gain, inst.f[i]))
            if key is None or k > key:
                best, key = a, k
        if best is None:
            return current + sum(inst.f[copies[a]] for a in range(len(copies)) if is_open[a])
        is_open[best] = True
