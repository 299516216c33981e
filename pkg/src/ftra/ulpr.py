"""LP rounding for FTRA with a factor-4 guarantee on metric instances.

Stage 1 opens every site the LP fills to capacity and rounds its
connections up.  Stage 2 serves what is left client by client: the
unserved client with the smallest LP dual picks a cheapest-first group of
its fractional sites carrying exactly its residual demand (splitting the
last one if needed), the group is rounded to exactly that many facilities,
and every client touching the group connects into it.  Split sites keep a
pointer to the site they came from so that openings can be summed back.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .lp import make_complete, snap, solve_instance
from .model import FractionalSolution, IntegralSolution, check_feasible


@dataclass
class WorkSite:
    id: int
    lineage: int
    y: Fraction
    x: list  # fractional connection per client


@dataclass
class RoundingState:
    inst: object
    P: set
    r_hat: list
    r_bar: list
    sites: list  # WorkSite by id
    F: list  # per client: set of live work-site ids
    cbar: set
    y_open: dict = field(default_factory=dict)  # work-site id -> integer openings
    x_conn: dict = field(default_factory=dict)  # (work-site id, client) -> integer
    y_pruned: dict = field(default_factory=dict)  # original site -> openings (stage 1)
    x_pruned: dict = field(default_factory=dict)
    used: set = field(default_factory=set)
    log: list = field(default_factory=list)

    def check_invariant(self):
        for j in self.cbar:
            have = sum((self.sites[w].y for w in self.F[j]), Fraction(0))
            if have < self.r_bar[j]:
                raise AssertionError(f"client {j}: live sites hold {have} < residual {self.r_bar[j]}")

    def lineage_openings(self):
        tot = dict(self.y_pruned)
        for w, v in self.y_open.items():
            i = self.sites[w].lineage
            tot[i] = tot.get(i, 0) + v
        return tot

    def check_lineage(self):
        for i, v in self.lineage_openings().items():
            if v > self.inst.R[i]:
                raise AssertionError(f"site {i} opened {v} > R_i = {self.inst.R[i]}")

    def solution(self):
        inst = self.inst
        y = [0] * inst.n_f
        x = [[0] * inst.n_c for _ in range(inst.n_f)]
        for i, v in self.lineage_openings().items():
            y[i] += v
        for (i, j), v in self.x_pruned.items():
            x[i][j] += v
        for (w, j), v in self.x_conn.items():
            x[self.sites[w].lineage][j] += v
        return IntegralSolution(tuple(y), tuple(tuple(row) for row in x))


def stage1_prune(inst, frac):
    y = [snap(v) for v in frac.y]
    x = [[snap(v) for v in row] for row in frac.x]
    P = {i for i in range(inst.n_f) if y[i] == inst.R[i]}
    st = RoundingState(inst, P, [0] * inst.n_c, list(inst.r), [], [set() for _ in range(inst.n_c)], set())
    for i in sorted(P):
        st.y_pruned[i] = inst.R[i]
        for j in range(inst.n_c):
            if x[i][j] > 0:
                v = math.ceil(x[i][j])
                st.x_pruned[(i, j)] = v
                st.r_hat[j] += v
    for j in range(inst.n_c):
        st.r_bar[j] = inst.r[j] - st.r_hat[j]
        if st.r_bar[j] < 0:
            raise AssertionError(f"client {j} over-served by pruned sites")
    for i in range(inst.n_f):
        if i not in P and y[i] > 0:
            w = WorkSite(len(st.sites), i, y[i], list(x[i]))
            st.sites.append(w)
            for j in range(inst.n_c):
                if w.x[j] > 0:
                    st.F[j].add(w.id)
    st.cbar = {j for j in range(inst.n_c) if st.r_bar[j] >= 1}
    return st


def _split(st, w, y1):
    a = WorkSite(len(st.sites), w.lineage, y1, [min(v, y1) for v in w.x])
    st.sites.append(a)
    b = WorkSite(len(st.sites), w.lineage, w.y - y1, [v - a.x[j] for j, v in enumerate(w.x)])
    st.sites.append(b)
    for j, live in enumerate(st.F):
        if w.id in live:
            live.discard(w.id)
            if a.x[j] > 0:
                live.add(a.id)
            if b.x[j] > 0:
                live.add(b.id)
    return a


def build_cluster(st, alpha):
    """Pick the client to serve next and a group of its sites holding exactly its residual."""
    inst = st.inst
    jo = min(st.cbar, key=lambda j: (alpha[j], j))
    need = st.r_bar[jo]
    order = sorted(st.F[jo], key=lambda w: (inst.f[st.sites[w].lineage], w))
    S, acc = [], Fraction(0)
    for w in order:
        S.append(w)
        acc += st.sites[w].y
        if acc >= need:
            break
    if acc < need:
        raise AssertionError(f"client {jo} cannot be covered")
    if acc > need:
        last = st.sites[S[-1]]
        S[-1] = _split(st, last, need - (acc - last.y)).id
    if sum(st.sites[w].y for w in S) != need:
        raise AssertionError("cluster does not match the residual demand")
    return jo, S


def round_cluster(st, jo, S):
    inst = st.inst
    need = st.r_bar[jo]
    if st.used.intersection(S):
        raise AssertionError("a site entered two clusters")
    st.used.update(S)
    opened, total = [], 0
    for w in S:
        v = math.ceil(st.sites[w].y)
        opened.append(w)
        if total + v >= need:
            st.y_open[w] = need - total
            total = need
            break
        st.y_open[w] = v
        total += v
    Sset = set(S)
    for j in sorted(st.cbar):
        if not st.F[j] & Sset:
            continue
        for w in sorted(opened, key=lambda w: (inst.c[st.sites[w].lineage][j], w)):
            if st.r_bar[j] == 0:
                break
            take = min(st.r_bar[j], st.y_open[w])
            st.x_conn[(w, j)] = st.x_conn.get((w, j), 0) + take
            st.r_bar[j] -= take
            st.r_hat[j] += take
    for live in st.F:
        live -= Sset
    st.cbar = {j for j in st.cbar if st.r_bar[j] >= 1}
    if jo in st.cbar:
        raise AssertionError(f"client {jo} still unserved after its own cluster")
    st.check_lineage()
    st.log.append((jo, need, sum(st.y_open[w] for w in opened)))
    return st


def ulpr_solve(inst, backend="exact", details=None):
    lp = solve_instance(inst, backend=backend)
    frac = make_complete(inst, FractionalSolution(tuple(snap(v) for v in lp.primal.y), lp.primal.x))
    st = stage1_prune(inst, frac)
    while st.cbar:
        st.check_invariant()
        jo, S = build_cluster(st, lp.dual.alpha)
        round_cluster(st, jo, S)
    st.check_lineage()
    sol = st.solution()
    bad = check_feasible(inst, sol)
    if bad:
        raise AssertionError(f"rounded solution infeasible: {bad[0]}")
    if details is not None:
        details.update(lp=lp, state=st)
    return sol
