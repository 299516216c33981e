"""Instances, solutions, costs and feasibility checks for FTRA / k-FTRA.

An instance has n_f sites and n_c clients.  Site i can host up to R[i]
identical facilities, each costing f[i] to open.  Client j needs r[j]
connections to open facilities; several connections may go to the same
site as long as x[i][j] <= y[i].
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction


class InstanceError(ValueError):
    pass


def _int_tuple(vals, what):
    out = []
    for v in vals:
        if isinstance(v, bool) or not isinstance(v, int):
            if isinstance(v, float) and v.is_integer():
                v = int(v)
            else:
                raise InstanceError(f"{what} must be integers, got {v!r}")
        out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class Instance:
    f: tuple
    c: tuple  # c[i][j], one row per site
    r: tuple
    R: tuple
    k: int | None = None

    def __post_init__(self):
        f = _int_tuple(self.f, "facility costs")
        R = _int_tuple(self.R, "capacities")
        r = _int_tuple(self.r, "requirements")
        if len(R) != len(f):
            raise InstanceError("f and R differ in length")
        if len(self.c) != len(f):
            raise InstanceError(f"c has {len(self.c)} rows, expected {len(f)}")
        c = tuple(_int_tuple(row, "connection costs") for row in self.c)
        for row in c:
            if len(row) != len(r):
                raise InstanceError(f"c row has {len(row)} entries, expected {len(r)}")
        if any(v < 0 for v in f) or any(v < 0 for row in c for v in row):
            raise InstanceError("costs must be nonnegative")
        # capacity 0 is allowed so that shrunken instances stay representable
        if any(v < 0 for v in R):
            raise InstanceError("capacities must be nonnegative")
        if any(v < 1 for v in r):
            raise InstanceError("requirements must be positive")
        total = sum(R)
        if r and max(r) > total:
            raise InstanceError(f"max requirement {max(r)} exceeds total capacity {total}")
        k = self.k
        if k is not None:
            if isinstance(k, bool) or not isinstance(k, int) or k < 1:
                raise InstanceError("k must be a positive integer")
            if (r and k < max(r)) or k > total:
                raise InstanceError(f"k={k} outside [max r, sum R] = [{max(r, default=0)}, {total}]")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "R", R)

    @property
    def n_f(self):
        return len(self.f)

    @property
    def n_c(self):
        return len(self.r)

    @property
    def uniform(self):
        return len(set(self.r)) <= 1

    def with_k(self, k):
        return Instance(self.f, self.c, self.r, self.R, k)

    def with_capacities(self, R):
        return Instance(self.f, self.c, self.r, tuple(R), self.k)

    def to_dict(self):
        d = {"n_f": self.n_f, "n_c": self.n_c, "f": list(self.f), "R": list(self.R),
             "r": list(self.r), "c": [list(row) for row in self.c]}
        if self.k is not None:
            d["k"] = self.k
        return d

    @classmethod
    def from_dict(cls, d):
        try:
            inst = cls(d["f"], tuple(tuple(row) for row in d["c"]), d["r"], d["R"], d.get("k"))
        except KeyError as e:
            raise InstanceError(f"missing field {e}") from None
        if "n_f" in d and d["n_f"] != inst.n_f:
            raise InstanceError("n_f does not match f")
        if "n_c" in d and d["n_c"] != inst.n_c:
            raise InstanceError("n_c does not match r")
        return inst


@dataclass(frozen=True)
class IntegralSolution:
    y: tuple
    x: tuple  # x[i][j]

    def __post_init__(self):
        object.__setattr__(self, "y", tuple(self.y))
        object.__setattr__(self, "x", tuple(tuple(row) for row in self.x))

    @property
    def opened(self):
        return sum(self.y)

    def to_dict(self, inst=None):
        d = {"y": list(self.y), "x": [list(row) for row in self.x]}
        if inst is not None:
            d["cost"] = cost(inst, self)
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(int(v) for v in d["y"]), tuple(tuple(int(v) for v in row) for row in d["x"]))

    @classmethod
    def zero(cls, inst):
        return cls((0,) * inst.n_f, tuple((0,) * inst.n_c for _ in range(inst.n_f)))


@dataclass(frozen=True)
class FractionalSolution:
    y: tuple
    x: tuple
    objective: object = None

    def facility_cost(self, inst):
        return sum(fi * yi for fi, yi in zip(inst.f, self.y))

    def connection_cost(self, inst):
        return sum(inst.c[i][j] * self.x[i][j] for i in range(inst.n_f) for j in range(inst.n_c))


@dataclass(frozen=True)
class DualSolution:
    alpha: tuple
    beta: tuple  # beta[i][j]
    z: tuple
    theta: object = None

    def objective(self, inst, k=None):
        val = sum(rj * a for rj, a in zip(inst.r, self.alpha)) - sum(Ri * zi for Ri, zi in zip(inst.R, self.z))
        if self.theta is not None:
            val -= (inst.k if k is None else k) * self.theta
        return val


@dataclass(frozen=True)
class Violation:
    constraint: str
    index: tuple
    slack: object

    def __str__(self):
        return f"{self.constraint} at {self.index} (slack {self.slack})"


def _check_dims(inst, sol):
    if len(sol.y) != inst.n_f or len(sol.x) != inst.n_f:
        raise ValueError(f"solution has {len(sol.y)} sites, instance has {inst.n_f}")
    for row in sol.x:
        if len(row) != inst.n_c:
            raise ValueError(f"solution row has {len(row)} clients, instance has {inst.n_c}")


def facility_cost(inst, sol):
    if not sol.y:
        return 0
    _check_dims(inst, sol)
    return sum(fi * yi for fi, yi in zip(inst.f, sol.y))


def connection_cost(inst, sol):
    if not sol.x:
        return 0
    _check_dims(inst, sol)
    return sum(ci[j] * xi[j] for ci, xi in zip(inst.c, sol.x) for j in range(inst.n_c))


def cost(inst, sol):
    """Total facility plus connection cost.  Empty y and x mean the zero solution."""
    if not sol.y and not sol.x:
        return 0
    return facility_cost(inst, sol) + connection_cost(inst, sol)


def check_feasible(inst, sol, enforce_k=False):
    """List every violated constraint; an empty list means feasible."""
    _check_dims(inst, sol)
    out = []
    for i, yi in enumerate(sol.y):
        if yi < 0:
            out.append(Violation("y_i >= 0", (i,), yi))
        if yi > inst.R[i]:
            out.append(Violation("y_i <= R_i", (i,), inst.R[i] - yi))
    for i in range(inst.n_f):
        for j in range(inst.n_c):
            xij = sol.x[i][j]
            if xij < 0:
                out.append(Violation("x_ij >= 0", (i, j), xij))
            if xij > sol.y[i]:
                out.append(Violation("x_ij <= y_i", (i, j), sol.y[i] - xij))
    for j in range(inst.n_c):
        got = sum(sol.x[i][j] for i in range(inst.n_f))
        if got < inst.r[j]:
            out.append(Violation("sum_i x_ij >= r_j", (j,), got - inst.r[j]))
    if enforce_k and inst.k is not None and sum(sol.y) > inst.k:
        out.append(Violation("sum_i y_i <= k", (), inst.k - sum(sol.y)))
    return out


def check_fractional(inst, y, x, r=None, R=None, tol=0):
    """Feasibility of real-valued (x, y) against requirements r and capacities R."""
    r = inst.r if r is None else r
    R = inst.R if R is None else R
    out = []
    for i in range(inst.n_f):
        if y[i] < -tol or y[i] > R[i] + tol:
            out.append(Violation("0 <= y_i <= R_i", (i,), y[i]))
        for j in range(inst.n_c):
            if x[i][j] < -tol or x[i][j] > y[i] + tol:
                out.append(Violation("0 <= x_ij <= y_i", (i, j), x[i][j]))
    for j in range(inst.n_c):
        got = sum(x[i][j] for i in range(inst.n_f))
        if got < r[j] - tol:
            out.append(Violation("sum_i x_ij >= r_j", (j,), got - r[j]))
    return out


def check_metric(inst, slack=0):
    """Brute-force check of c[i][j] <= c[i2][j] + c[i2][j2] + c[i][j2]."""
    c = inst.c
    out = []
    for i in range(inst.n_f):
        for i2 in range(inst.n_f):
            if i2 == i:
                continue
            for j in range(inst.n_c):
                for j2 in range(inst.n_c):
                    if j2 == j:
                        continue
                    rhs = c[i2][j] + c[i2][j2] + c[i][j2]
                    if c[i][j] > rhs + slack:
                        out.append(Violation("metric c_ij <= c_i'j + c_i'j' + c_ij'",
                                             (i, i2, j, j2), rhs - c[i][j]))
    return out


def site_distance(inst, i, i2):
    """Shortest two-hop distance between sites through any client."""
    if inst.n_c == 0:
        return math.inf
    return min(a + b for a, b in zip(inst.c[i], inst.c[i2]))


def generate_euclidean(n_f, n_c, r_max, R_max, f_range=(0, 100), grid=100, seed=0,
                       scale=10, uniform=False, k=None):
    """Random instance with sites and clients on an integer grid.

    Connection costs are round(scale * euclidean distance), so the metric
    inequality may be off by up to 2 units.  With uniform=True every client
    gets the same requirement.
    """
    if min(n_f, r_max, R_max) < 1 or n_c < 0 or grid < 1 or scale < 1:
        raise InstanceError("generator parameters must be positive")
    if r_max > n_f * R_max:
        raise InstanceError(f"r_max={r_max} can never fit into {n_f} sites of capacity <= {R_max}")
    lo, hi = f_range
    if lo < 0 or hi < lo:
        raise InstanceError(f"bad f_range {f_range}")
    rng = random.Random(seed)
    sites = [(rng.randint(0, grid), rng.randint(0, grid)) for _ in range(n_f)]
    clients = [(rng.randint(0, grid), rng.randint(0, grid)) for _ in range(n_c)]
    f = [rng.randint(lo, hi) for _ in range(n_f)]
    c = [[round(scale * math.dist(s, p)) for p in clients] for s in sites]
    R = [rng.randint(1, R_max) for _ in range(n_f)]
    cap = min(r_max, sum(R))
    if uniform:
        r = [rng.randint(1, cap)] * n_c
    else:
        r = [rng.randint(1, cap) for _ in range(n_c)]
    return _finish(Instance(f, c, r, R), k, rng)


def _finish(inst, k, rng):
    if k == "random":
        k = rng.randint(max(inst.r, default=1), sum(inst.R))
    return inst.with_k(k) if k is not None else inst


def generate_graph_metric(n_f, n_c, r_max, R_max, f_range=(2, 10), w_max=3, degree=2, seed=0,
                          uniform=False, k=None):
    """Random instance whose costs are shortest paths in a sparse bipartite graph.

    Each client is wired to `degree` random sites.  Sparse cycles like these
    make fractional LP optima far more common than on Euclidean points.
    Pairs in different components get a cost larger than any finite one,
    which keeps the metric inequality exact.
    """
    import numpy as np
    from scipy.sparse.csgraph import shortest_path

    if min(n_f, r_max, R_max, w_max, degree) < 1 or n_c < 0:
        raise InstanceError("generator parameters must be positive")
    if r_max > n_f * R_max:
        raise InstanceError(f"r_max={r_max} can never fit into {n_f} sites of capacity <= {R_max}")
    rng = random.Random(seed)
    n = n_f + n_c
    W = [[0] * n for _ in range(n)]
    for j in range(n_c):
        for i in rng.sample(range(n_f), min(degree, n_f)):
            W[i][n_f + j] = W[n_f + j][i] = rng.randint(1, w_max)
    D = shortest_path(np.array(W, dtype=float), directed=False)
    finite = [int(D[i][n_f + j]) for i in range(n_f) for j in range(n_c) if math.isfinite(D[i][n_f + j])]
    far = 2 * max(finite, default=0) + 1
    c = [[int(D[i][n_f + j]) if math.isfinite(D[i][n_f + j]) else far for j in range(n_c)]
         for i in range(n_f)]
    R = [rng.randint(1, R_max) for _ in range(n_f)]
    cap = min(r_max, sum(R))
    r = [rng.randint(1, cap)] * n_c if uniform else [rng.randint(1, cap) for _ in range(n_c)]
    f = [rng.randint(*f_range) for _ in range(n_f)]
    return _finish(Instance(f, c, r, R), k, rng)


# -- JSON ---------------------------------------------------------------

def _jsonable(v):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps(obj):
    return json.dumps(obj, default=_jsonable, separators=(", ", ": ")) + "\n"


def instance_to_json(inst):
    return dumps(inst.to_dict())


def instance_from_json(text):
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError(f"bad JSON: {e}") from None
    if not isinstance(d, dict):
        raise InstanceError("instance JSON must be an object")
    return Instance.from_dict(d)


def load_instance(path):
    with open(path) as fh:
        return instance_from_json(fh.read())


def save_instance(inst, path):
    with open(path, "w") as fh:
        fh.write(instance_to_json(inst))


def load_solution(path):
    with open(path) as fh:
        return IntegralSolution.from_dict(json.load(fh))


def save_solution(inst, sol, path):
    with open(path, "w") as fh:
        fh.write(dumps(sol.to_dict(inst)))
