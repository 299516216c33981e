"""LP relaxation of FTRA (optionally with the sum(y) <= k row), its dual,
post-processing to greedy-complete form, and complementary slackness checks.

Every row is written as ">=":
    requirement   sum_i x_ij >= r_j          dual alpha_j
    linking       y_i - x_ij >= 0            dual beta_ij
    capacity      -y_i >= -R_i               dual z_i
    budget        -sum_i y_i >= -k           dual theta
Columns are y_0..y_{n_f-1} followed by x_ij in row-major (site, client) order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import highspy
import numpy as np

from .model import DualSolution, FractionalSolution, Violation
from .simplex import OPTIMAL, solve_exact, bland_simplex

BACKENDS = ("exact", "float", "bland")


class LpError(RuntimeError):
    pass


@dataclass(frozen=True)
class LpModel:
    n_f: int
    n_c: int
    k: int | None
    rows: tuple  # sparse rows: dict col -> coefficient
    b: tuple
    c: tuple
    row_names: tuple

    @property
    def n_vars(self):
        return len(self.c)

    @property
    def n_rows(self):
        return len(self.rows)

    def y_col(self, i):
        return i

    def x_col(self, i, j):
        return self.n_f + i * self.n_c + j

    def col_names(self):
        return [f"y_{i}" for i in range(self.n_f)] + [
            f"x_{i}_{j}" for i in range(self.n_f) for j in range(self.n_c)]


@dataclass(frozen=True)
class LpResult:
    status: str
    primal: FractionalSolution | None
    dual: DualSolution | None
    objective: object
    backend: str
    route: str = ""


def build_primal(inst, with_k=False):
    if with_k and inst.k is None:
        raise ValueError("with_k needs an instance with k")
    n_f, n_c = inst.n_f, inst.n_c
    xc = lambda i, j: n_f + i * n_c + j  # noqa: E731
    rows, b, names = [], [], []
    for j in range(n_c):
        rows.append({xc(i, j): 1 for i in range(n_f)})
        b.append(inst.r[j])
        names.append(f"req_{j}")
    for i in range(n_f):
        for j in range(n_c):
            rows.append({i: 1, xc(i, j): -1})
            b.append(0)
            names.append(f"link_{i}_{j}")
    for i in range(n_f):
        rows.append({i: -1})
        b.append(-inst.R[i])
        names.append(f"cap_{i}")
    if with_k:
        rows.append({i: -1 for i in range(n_f)})
        b.append(-inst.k)
        names.append("budget")
    c = list(inst.f) + [inst.c[i][j] for i in range(n_f) for j in range(n_c)]
    return LpModel(n_f, n_c, inst.k if with_k else None, tuple(rows), tuple(b), tuple(c), tuple(names))


def _highs(model):
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    lp = highspy.HighsLp()
    n, m = model.n_vars, model.n_rows
    lp.num_col_ = n
    lp.num_row_ = m
    lp.col_cost_ = np.array(model.c, dtype=float)
    lp.col_lower_ = np.zeros(n)
    lp.col_upper_ = np.full(n, highspy.kHighsInf)
    lp.row_lower_ = np.array(model.b, dtype=float)
    lp.row_upper_ = np.full(m, highspy.kHighsInf)
    cols = [[] for _ in range(n)]
    for r, row in enumerate(model.rows):
        for j, a in row.items():
            cols[j].append((r, a))
    start, index, value = [0], [], []
    for col in cols:
        for r, a in col:
            index.append(r)
            value.append(float(a))
        start.append(len(index))
    lp.a_matrix_.format_ = highspy.MatrixFormat.kColwise
    lp.a_matrix_.start_ = np.array(start, dtype=np.int32)
    lp.a_matrix_.index_ = np.array(index, dtype=np.int32)
    lp.a_matrix_.value_ = np.array(value, dtype=float)
    h.passModel(lp)
    return h


def write_lp(model, path):
    """Dump the model in CPLEX LP text format, for cross-checking elsewhere."""
    h = _highs(model)
    for j, name in enumerate(model.col_names()):
        h.passColName(j, name)
    for r, name in enumerate(model.row_names):
        h.passRowName(r, name)
    h.writeModel(str(path))


def _run_highs(model):
    h = _highs(model)
    h.run()
    status = h.getModelStatus()
    if status == highspy.HighsModelStatus.kInfeasible:
        return "infeasible", None
    if status == highspy.HighsModelStatus.kUnbounded:
        return "unbounded", None
    if status != highspy.HighsModelStatus.kOptimal:
        raise LpError(f"HiGHS stopped with {status}")
    return "optimal", h


def _package(model, v, u, objective, backend, route):
    n_f, n_c = model.n_f, model.n_c
    y = tuple(v[:n_f])
    x = tuple(tuple(v[model.x_col(i, j)] for j in range(n_c)) for i in range(n_f))
    alpha = tuple(u[:n_c])
    beta = tuple(tuple(u[n_c + i * n_c + j] for j in range(n_c)) for i in range(n_f))
    z = tuple(u[n_c + n_f * n_c + i] for i in range(n_f))
    theta = u[-1] if model.k is not None else None
    return LpResult(OPTIMAL, FractionalSolution(y, x, objective), DualSolution(alpha, beta, z, theta),
                    objective, backend, route)


def solve(model, backend="exact"):
    """Optimal primal and dual of `model`.

    exact: HiGHS finds a basis, which is then verified (or repaired by the
           rational simplex) so every returned number is a Fraction.
    bland: rational simplex from scratch; slow, used as a cross-check.
    float: HiGHS values as floats.
    """
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    n, m = model.n_vars, model.n_rows
    if m == 0:
        zero = Fraction(0) if backend != "float" else 0.0
        return _package(model, [zero] * n, [], zero, backend, "empty")
    if backend == "bland":
        res = bland_simplex(list(model.rows), list(model.b), list(model.c), n)
        if res.status != OPTIMAL:
            return LpResult(res.status, None, None, None, backend)
        return _package(model, res.v, res.u, res.objective, backend, res.route)

    status, h = _run_highs(model)
    if status != "optimal":
        return LpResult(status, None, None, None, backend)
    if backend == "float":
        sol = h.getSolution()
        v = list(sol.col_value)
        u = [max(0.0, d) for d in sol.row_dual]
        obj = h.getInfo().objective_function_value
        return _package(model, v, u, obj, backend, "highs")

    basis = h.getBasis()
    hint = None
    if basis.valid:
        kb = highspy.HighsBasisStatus.kBasic
        hint = [j for j, s in enumerate(basis.col_status) if s == kb]
        hint += [n + r for r, s in enumerate(basis.row_status) if s == kb]
        if len(hint) != m:
            hint = None
    res = solve_exact(list(model.rows), list(model.b), list(model.c), n, hint)
    if res.status != OPTIMAL:
        raise LpError(f"exact solve disagrees with HiGHS: {res.status}")
    return _package(model, res.v, res.u, res.objective, backend, res.route)


def solve_instance(inst, with_k=False, backend="exact"):
    res = solve(build_primal(inst, with_k), backend)
    if res.status != OPTIMAL:
        raise LpError(f"LP relaxation is {res.status}")
    return res


def lp_optimum(inst, with_k=False, backend="exact"):
    return solve_instance(inst, with_k, backend).objective


def make_complete(inst, frac):
    """Reassign x greedily to the nearest open capacity given y.

    Each client fills x_ij = y_i in ascending (c_ij, i) order until r_j is
    met, so at most its farthest used site is partially used.
    """
    y = frac.y
    zero = y[0] * 0 if y else 0
    x = [[zero] * inst.n_c for _ in range(inst.n_f)]
    for j in range(inst.n_c):
        need = inst.r[j]
        for i in sorted(range(inst.n_f), key=lambda i: (inst.c[i][j], i)):
            if need <= 0:
                break
            take = min(y[i], need)
            if take > 0:
                x[i][j] = take
                need -= take
        if need > 1e-9:
            raise ValueError(f"y cannot serve client {j}: short by {need}")
    x = tuple(tuple(row) for row in x)
    obj = sum(fi * yi for fi, yi in zip(inst.f, y)) + sum(
        inst.c[i][j] * x[i][j] for i in range(inst.n_f) for j in range(inst.n_c))
    return FractionalSolution(tuple(y), x, obj)


def _near(a, b, tol):
    return abs(a - b) <= tol


def verify_dual_feasible(inst, dual, tol=0):
    out = []
    th = dual.theta or 0
    for j, a in enumerate(dual.alpha):
        if a < -tol:
            out.append(Violation("alpha_j >= 0", (j,), a))
    for i in range(inst.n_f):
        if dual.z[i] < -tol:
            out.append(Violation("z_i >= 0", (i,), dual.z[i]))
        s = sum(dual.beta[i])
        if s > inst.f[i] + dual.z[i] + th + tol:
            out.append(Violation("sum_j beta_ij <= f_i + z_i (+ theta)", (i,), inst.f[i] + dual.z[i] + th - s))
        for j in range(inst.n_c):
            b = dual.beta[i][j]
            if b < -tol:
                out.append(Violation("beta_ij >= 0", (i, j), b))
            if dual.alpha[j] - b > inst.c[i][j] + tol:
                out.append(Violation("alpha_j - beta_ij <= c_ij", (i, j), inst.c[i][j] + b - dual.alpha[j]))
    if dual.theta is not None and dual.theta < -tol:
        out.append(Violation("theta >= 0", (), dual.theta))
    return out


def verify_csc(inst, frac, dual, tol=0, k=None):
    """Complementary slackness between `frac` and `dual` (empty list = all hold)."""
    out = []
    x, y = frac.x, frac.y
    th = dual.theta or 0
    for i in range(inst.n_f):
        for j in range(inst.n_c):
            if x[i][j] > tol and not _near(dual.alpha[j], dual.beta[i][j] + inst.c[i][j], tol):
                out.append(Violation("C1 x_ij > 0 => alpha_j = beta_ij + c_ij", (i, j),
                                     dual.alpha[j] - dual.beta[i][j] - inst.c[i][j]))
            if dual.beta[i][j] > tol and not _near(x[i][j], y[i], tol):
                out.append(Violation("C4 beta_ij > 0 => x_ij = y_i", (i, j), y[i] - x[i][j]))
        if y[i] > tol and not _near(sum(dual.beta[i]), inst.f[i] + dual.z[i] + th, tol):
            out.append(Violation("C2 y_i > 0 => sum_j beta_ij = f_i + z_i", (i,),
                                 inst.f[i] + dual.z[i] + th - sum(dual.beta[i])))
        if dual.z[i] > tol and not _near(y[i], inst.R[i], tol):
            out.append(Violation("C5 z_i > 0 => y_i = R_i", (i,), inst.R[i] - y[i]))
    for j in range(inst.n_c):
        got = sum(x[i][j] for i in range(inst.n_f))
        if dual.alpha[j] > tol and not _near(got, inst.r[j], tol):
            out.append(Violation("C3 alpha_j > 0 => sum_i x_ij = r_j", (j,), got - inst.r[j]))
    if dual.theta is not None and dual.theta > tol:
        kk = inst.k if k is None else k
        if not _near(sum(y), kk, tol):
            out.append(Violation("theta > 0 => sum_i y_i = k", (), kk - sum(y)))
    return out


def relative_gap(a, b):
    a, b = float(a), float(b)
    return abs(a - b) / max(1.0, abs(a), abs(b))


def split_costs(inst, frac):
    """(facility part, connection part) of a fractional solution."""
    return frac.facility_cost(inst), frac.connection_cost(inst)


def is_integral(vals):
    return all(float(v).is_integer() if isinstance(v, float) else Fraction(v).denominator == 1 for v in vals)


def snap(v, eps=1e-9):
    """Round floats lying within eps of an integer; pass Fractions through."""
    if isinstance(v, float):
        rv = round(v)
        if abs(v - rv) <= eps:
            return Fraction(rv)
        return Fraction(v)
    return Fraction(v)


def ceil_exact(v):
    return math.ceil(snap(v))


def floor_exact(v):
    return math.floor(snap(v))
