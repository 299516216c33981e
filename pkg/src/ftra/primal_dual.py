"""Dual-ascent primal-dual algorithm with connection switching.

A global clock t rises from 0.  Every unsatisfied client offers t - c_ij
towards opening a facility at site i; satisfied clients offer the saving
maxconn_j - c_ij they would get by moving their most expensive connection
there.  Two kinds of events:

  event 1  t reaches c_ij for an unsatisfied j and site i has an open
           facility j is not yet using -> j connects one more port to i;
  event 2  the offers at a site with spare capacity reach the (scaled)
           facility cost -> open one facility there, move one most expensive
           connection of each saving client to it, and connect every
           unsatisfied client with t >= c_ij.

`pd_solve` performs those actions one connection at a time.  `apd_solve`
performs the same actions in batches (as many repetitions as can happen
before something changes) and must end in exactly the same (x, y).

Simultaneous events: event 2 first, then lower site index, then lower
client index.  Time is kept as an exact Fraction.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .model import DualSolution, IntegralSolution


@dataclass(frozen=True)
class PdConfig:
    theta: Fraction = Fraction(0)
    lam: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "theta", Fraction(self.theta))
        object.__setattr__(self, "lam", Fraction(self.lam))
        if self.lam <= 0 or self.theta < 0:
            raise ValueError("need lam > 0 and theta >= 0")

    def opening_cost(self, inst, i):
        return self.lam * (inst.f[i] + self.theta)


def scaled_cost(inst, sol, cfg):
    fac = sum(cfg.opening_cost(inst, i) * sol.y[i] for i in range(inst.n_f))
    return fac + sum(inst.c[i][j] * sol.x[i][j] for i in range(inst.n_f) for j in range(inst.n_c))


@dataclass(frozen=True)
class Event:
    t: Fraction
    kind: int
    site: int
    client: int | None
    toc: int
    switched: tuple = ()  # (client, from_site) pairs

    def to_json(self):
        return json.dumps({"t": f"{self.t.numerator}/{self.t.denominator}", "event": self.kind,
                           "site": self.site, "client": self.client, "toc": self.toc,
                           "switched": [list(s) for s in self.switched]})


@dataclass
class PdTrace:
    ports: list  # ports[j][q] = time port q of client j connected
    x_hat: list  # x_hat[i][j] at the moment j became satisfied
    last_port: list  # last_port[i][j] = 1-based index of j's last port connected to i, or 0
    events: list = field(default_factory=list)

    @property
    def n_event1(self):
        return sum(1 for e in self.events if e.kind == 1)

    @property
    def n_event2(self):
        return sum(1 for e in self.events if e.kind == 2)

    def dump(self, fh):
        for e in self.events:
            fh.write(e.to_json() + "\n")


class NoEvent(RuntimeError):
    pass


class PdState:
    def __init__(self, inst, cfg):
        self.inst = inst
        self.cfg = cfg
        self.t = Fraction(0)
        self.y = [0] * inst.n_f
        self.x = [[0] * inst.n_c for _ in range(inst.n_f)]
        self.fc = [0] * inst.n_c
        self.unsat = [True] * inst.n_c
        self.open_cost = [cfg.opening_cost(inst, i) for i in range(inst.n_f)]
        self.trace = PdTrace([[] for _ in range(inst.n_c)],
                             [[0] * inst.n_c for _ in range(inst.n_f)],
                             [[0] * inst.n_c for _ in range(inst.n_f)])

    @property
    def any_unsat(self):
        return any(self.unsat)

    def maxconn(self, j):
        c = self.inst.c
        return max((c[i][j] for i in range(self.inst.n_f) if self.x[i][j] > 0), default=None)

    def switch_source(self, j):
        """Site of j's most expensive connection, lowest index on ties."""
        c = self.inst.c
        best = None
        for i in range(self.inst.n_f):
            if self.x[i][j] > 0 and (best is None or c[i][j] > c[best][j]):
                best = i
        return best

    def savers(self, i):
        """Satisfied clients whose worst connection costs more than c_ij."""
        out = []
        for j in range(self.inst.n_c):
            if not self.unsat[j]:
                m = self.maxconn(j)
                if m is not None and m > self.inst.c[i][j]:
                    out.append(j)
        return out

    def payers(self, i):
        return [j for j in range(self.inst.n_c) if self.unsat[j] and self.t >= self.inst.c[i][j]]

    def connect(self, i, j, n):
        self.x[i][j] += n
        self.fc[j] += n
        ports = self.trace.ports[j]
        ports.extend([self.t] * n)
        self.trace.last_port[i][j] = len(ports)
        if self.fc[j] == self.inst.r[j]:
            self.unsat[j] = False
            for s in range(self.inst.n_f):
                self.trace.x_hat[s][j] = self.x[s][j]

    def switch(self, j, to, n):
        src = self.switch_source(j)
        self.x[src][j] -= n
        self.x[to][j] += n
        return src


def _event2_time(st, i):
    """Earliest time >= st.t at which the offers to site i reach its cost."""
    inst = st.inst
    target = st.open_cost[i]
    base = Fraction(0)
    costs = []
    for j in range(inst.n_c):
        cij = inst.c[i][j]
        if st.unsat[j]:
            costs.append(cij)
        else:
            m = st.maxconn(j)
            if m is not None and m > cij:
                base += m - cij
    t = st.t
    val = base + sum((t - cj for cj in costs if cj <= t), Fraction(0))
    if val >= target:
        return t
    slope = sum(1 for cj in costs if cj <= t)
    cur = t
    for cb in sorted(cj for cj in costs if cj > t):
        if slope:
            hit = cur + (target - val) / slope
            if hit <= cb:
                return hit
        val += slope * (cb - cur)
        cur = Fraction(cb)
        slope += 1
    if not slope:
        return None
    return cur + (target - val) / slope


def next_event(st):
    """(time, kind, site, client) of the next event; event 2 wins ties."""
    inst = st.inst
    best = None
    for i in range(inst.n_f):
        if st.y[i] < inst.R[i]:
            te = _event2_time(st, i)
            if te is not None:
                key = (te, 0, i, -1)
                if best is None or key < best:
                    best = key
    for j in range(inst.n_c):
        if not st.unsat[j]:
            continue
        for i in range(inst.n_f):
            if st.x[i][j] < st.y[i]:
                cij = inst.c[i][j]
                if cij < st.t:
                    raise AssertionError(f"client {j} skipped an open facility at site {i}")
                key = (Fraction(cij), 1, i, j)
                if best is None or key < best:
                    best = key
    if best is None:
        raise NoEvent("no event can fire although some client is unsatisfied")
    t, kind, i, j = best
    return t, (2 if kind == 0 else 1), i, (None if kind == 0 else j)


def _step_guard(inst):
    return sum(inst.r) * (inst.n_f + 2) + sum(inst.R) + 16


def _run(inst, cfg, batched):
    st = PdState(inst, cfg)
    guard = _step_guard(inst)
    steps = 0
    while st.any_unsat:
        steps += 1
        if steps > guard:
            raise AssertionError("primal-dual loop did not terminate")
        t, kind, i, j = next_event(st)
        if t < st.t:
            raise AssertionError("clock went backwards")
        st.t = t
        if kind == 1:
            toc = min(st.y[i] - st.x[i][j], inst.r[j] - st.fc[j]) if batched else 1
            st.connect(i, j, toc)
            st.trace.events.append(Event(t, 1, i, j, toc))
            continue
        payers = st.payers(i)
        savers = st.savers(i)
        if batched:
            nc = min((inst.r[j2] - st.fc[j2] for j2 in payers), default=None)
            ns = min((st.x[st.switch_source(j2)][j2] for j2 in savers), default=None)
            toc = min(v for v in (nc, ns, inst.R[i] - st.y[i]) if v is not None)
        else:
            toc = 1
        st.y[i] += toc
        moved = tuple((j2, st.switch(j2, i, toc)) for j2 in savers)
        for j2 in payers:
            st.connect(i, j2, toc)
        st.trace.events.append(Event(t, 2, i, None, toc, moved))
    sol = IntegralSolution(tuple(st.y), tuple(tuple(row) for row in st.x))
    return sol, st.trace


def pd_solve(inst, cfg=None):
    """Reference version: every action adds exactly one connection or facility."""
    return _run(inst, cfg or PdConfig(), batched=False)


def event_bounds(inst):
    return inst.n_f * inst.n_c, inst.n_c + inst.n_f + inst.n_c * inst.n_f


def apd_solve(inst, cfg=None):
    """Batched version; same result as pd_solve with far fewer events."""
    sol, trace = _run(inst, cfg or PdConfig(), batched=True)
    b1, b2 = event_bounds(inst)
    if trace.n_event1 > b1 or trace.n_event2 > b2:
        raise AssertionError(f"event counts {trace.n_event1}/{trace.n_event2} exceed {b1}/{b2}")
    return sol, trace


def build_dual_certificate(inst, trace, rho_c=1):
    """Dual values read off a finished run.

    alpha_j is the time of j's last port.  A site j filled completely
    (x_hat_ij = R_i) earns pi_ij = alpha_j minus the time of the last port j
    connected there, and z_i sums those.  beta_ij = max(0, alpha_j - rho_c c_ij).
    """
    rho_c = Fraction(rho_c)
    for j in range(inst.n_c):
        if len(trace.ports[j]) != inst.r[j]:
            raise ValueError(f"trace incomplete for client {j}")
    alpha = tuple(trace.ports[j][-1] for j in range(inst.n_c))
    z = []
    for i in range(inst.n_f):
        zi = Fraction(0)
        for j in range(inst.n_c):
            xh = trace.x_hat[i][j]
            if xh and xh == inst.R[i]:
                lp = trace.last_port[i][j]
                zi += xh * (alpha[j] - trace.ports[j][lp - 1]) / inst.R[i]
        z.append(zi)
    beta = tuple(tuple(max(Fraction(0), alpha[j] - rho_c * inst.c[i][j]) for j in range(inst.n_c))
                 for i in range(inst.n_f))
    return DualSolution(alpha, beta, tuple(z))


def port_sum(trace):
    return sum((a for ports in trace.ports for a in ports), Fraction(0))
