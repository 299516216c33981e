"""Greedy augmentation in batches, and the cost-scaling pipeline on top of it.

Starting from a feasible solution with nearest connections, repeatedly open
facilities at the site with the best gain per unit of facility cost, where
the gain of one more facility at i is the total saving from moving every
client's most expensive connection there, minus f_i.  As long as no
client's worst connection runs out, opening another facility at the same
site has the same gain, so AGA opens them all in one iteration.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction

from .model import IntegralSolution, cost
from .oracle import optimal_connections
from .primal_dual import PdConfig, apd_solve

DELTA = Fraction(1504, 1000)


def optimize_connections(inst, sol):
    out = optimal_connections(inst, sol.y)
    if out is None:
        raise ValueError("solution does not open enough facilities")
    return out


@dataclass
class GainState:
    y: list
    x: list
    ybar: list
    cc: int


def _state(inst, sol):
    return GainState(list(sol.y), [list(row) for row in sol.x],
                     [inst.R[i] - sol.y[i] for i in range(inst.n_f)],
                     sum(inst.c[i][j] * sol.x[i][j] for i in range(inst.n_f) for j in range(inst.n_c)))


def _maxconn(inst, st, j):
    return max((inst.c[i][j] for i in range(inst.n_f) if st.x[i][j] > 0), default=None)


def _worst_site(inst, st, j):
    best = None
    for i in range(inst.n_f):
        if st.x[i][j] > 0 and (best is None or inst.c[i][j] > inst.c[best][j]):
            best = i
    return best


def calculate_gain(inst, st):
    maxc = [_maxconn(inst, st, j) for j in range(inst.n_c)]
    gain = []
    for i in range(inst.n_f):
        if st.ybar[i] == 0:
            gain.append(0)
            continue
        g = -inst.f[i]
        for j in range(inst.n_c):
            if maxc[j] is not None and maxc[j] > inst.c[i][j]:
                g += maxc[j] - inst.c[i][j]
        gain.append(g)
    return gain


def _pick(inst, gain):
    best, key = None, None
    for i, g in enumerate(gain):
        if g <= 0:
            continue
        ratio = Fraction(g, inst.f[i]) if inst.f[i] else None  # None = infinite
        k = (1, 0) if ratio is None else (0, ratio)
        if key is None or k > key:
            best, key = i, k
    return best


def aga(inst, sol, stats=None):
    st = _state(inst, optimize_connections(inst, sol))
    limit = inst.n_f + inst.n_c * inst.n_f
    iters = 0
    gain = calculate_gain(inst, st)
    while max(gain, default=0) > 0:
        i = _pick(inst, gain)
        iters += 1
        if iters > limit:
            raise AssertionError(f"AGA exceeded {limit} iterations")
        movers = [j for j in range(inst.n_c)
                  if (m := _maxconn(inst, st, j)) is not None and m > inst.c[i][j]]
        src = {j: _worst_site(inst, st, j) for j in movers}
        ns = min((st.x[src[j]][j] for j in movers), default=st.ybar[i])
        toc = min(ns, st.ybar[i])
        before = st.cc + sum(inst.f[s] * st.y[s] for s in range(inst.n_f))
        st.y[i] += toc
        st.ybar[i] -= toc
        delta = 0
        for j in movers:
            st.x[src[j]][j] -= toc
            st.x[i][j] += toc
            delta += toc * (inst.c[src[j]][j] - inst.c[i][j])
        st.cc -= delta
        after = st.cc + sum(inst.f[s] * st.y[s] for s in range(inst.n_f))
        if after >= before:
            raise AssertionError("AGA iteration did not lower the cost")
        gain = calculate_gain(inst, st)
    if stats is not None:
        stats["iterations"] = iters
    return IntegralSolution(tuple(st.y), tuple(tuple(row) for row in st.x))


def scaled_152_pipeline(inst, delta=DELTA, stats=None):
    """APD with facility costs scaled by delta, then AGA at the true costs."""
    if not inst.uniform:
        warnings.warn("requirements are not uniform; the 1.52 bound does not apply", stacklevel=2)
    first, _ = apd_solve(inst, PdConfig(0, delta))
    out = aga(inst, first, stats)
    if stats is not None:
        stats["apd_cost"] = cost(inst, first)
    return out
