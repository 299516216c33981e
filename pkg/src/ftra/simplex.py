"""Exact rational LP solving for problems of the form

    minimize c.v   subject to   A v >= b,  v >= 0.

Row r gets a surplus column s_r with A_r v - s_r = b_r.  The dual of the
problem is  maximize b.u  s.t.  A^T u <= c, u >= 0, and at an optimal basis
u_r is the reduced cost of s_r.

Two routes share this interface:
  * `bland_simplex`: dense tableau simplex over Fractions with Bland's rule.
    Always terminates.  Slow (seconds for ~80 rows) but fully self-contained.
  * `certify_basis`: given a candidate basis (normally the one a floating
    point solver ended on) recompute primal and dual values exactly and check
    both feasibilities.  A passing basis is a proof of optimality.
`solve_exact` tries the certificate first and falls back to the tableau,
warm-started from the candidate basis when it is primal feasible.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import flint

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class ExactResult:
    status: str
    v: list | None = None
    u: list | None = None
    basis: list | None = None
    objective: Fraction | None = None
    route: str = ""
    pivots: int = 0


def _frac(q):
    return Fraction(int(q.p), int(q.q))


def _dense_row(row, n):
    out = [0] * n
    for j, a in row.items():
        out[j] = a
    return out


def _column(rows, n, col):
    """Column `col` of [A | -I] as a dense list."""
    if col >= n:
        return [-1 if r == col - n else 0 for r in range(len(rows))]
    return [row.get(col, 0) for row in rows]


class _Tableau:
    def __init__(self, T, basis):
        self.T = T  # each row: coefficients..., rhs
        self.basis = basis
        self.pivots = 0

    def pivot(self, r, e):
        T = self.T
        prow = T[r]
        p = prow[e]
        if p != 1:
            prow = [a / p for a in prow]
            T[r] = prow
        nz = [j for j, a in enumerate(prow) if a]
        for k, row in enumerate(T):
            if k != r:
                m = row[e]
                if m:
                    for j in nz:
                        row[j] -= m * prow[j]
        self.basis[r] = e
        self.pivots += 1

    def reduced_costs(self, cost):
        ncol = len(self.T[0]) - 1
        d = list(cost) + [0]
        for r, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.T[r]
                for j in range(ncol + 1):
                    if row[j]:
                        d[j] -= cb * row[j]
        return d  # d[-1] is minus the objective value

    def run(self, cost, allowed):
        """Bland's rule: lowest-index entering column, lowest basic index on ratio ties."""
        while True:
            d = self.reduced_costs(cost)
            e = next((j for j in allowed if d[j] < 0), None)
            if e is None:
                return OPTIMAL, d
            best = None
            for r, row in enumerate(self.T):
                a = row[e]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return UNBOUNDED, d
            self.pivot(best[1], e)


def _finish(tab, d, n, m, route):
    v = [Fraction(0)] * n
    for r, b in enumerate(tab.basis):
        if b < n:
            v[b] = tab.T[r][-1]
    u = [d[n + r] for r in range(m)]
    basis = list(tab.basis)
    return ExactResult(OPTIMAL, v, u, basis, -d[-1], route, tab.pivots)


def bland_simplex(rows, b, c, n, start_basis=None):
    """Two-phase tableau simplex.  With `start_basis` it skips phase 1 (the
    basis must be primal feasible, otherwise None is returned)."""
    m = len(rows)
    if m == 0:
        if any(cj < 0 for cj in c):
            return ExactResult(UNBOUNDED, route="bland")
        return ExactResult(OPTIMAL, [Fraction(0)] * n, [], [], Fraction(0), "bland")
    cost2 = [Fraction(cj) for cj in c] + [Fraction(0)] * m
    if start_basis is not None:
        tab = _tableau_from_basis(rows, b, n, start_basis)
        if tab is None:
            return None
        status, d = tab.run(cost2, range(n + m))
        if status != OPTIMAL:
            return ExactResult(status, route="bland-warm", pivots=tab.pivots)
        return _finish(tab, d, n, m, "bland-warm")

    T, basis, art = [], [], []
    n_art = sum(1 for bi in b if bi > 0)
    width = n + m + n_art
    for r, row in enumerate(rows):
        dense = [Fraction(a) for a in _dense_row(row, n)] + [Fraction(0)] * (m + n_art) + [Fraction(b[r])]
        dense[n + r] = Fraction(-1)
        if b[r] <= 0:
            dense = [-a for a in dense]
            basis.append(n + r)
        else:
            col = n + m + len(art)
            dense[col] = Fraction(1)
            art.append(col)
            basis.append(col)
        T.append(dense)
    tab = _Tableau(T, basis)
    if art:
        cost1 = [Fraction(0)] * (n + m) + [Fraction(1)] * n_art
        status, d = tab.run(cost1, range(width))
        if d[-1] != 0:
            return ExactResult(INFEASIBLE, route="bland", pivots=tab.pivots)
        for r in range(m):
            if tab.basis[r] >= n + m:
                j = next((j for j in range(n + m) if tab.T[r][j] != 0), None)
                if j is not None:
                    tab.pivot(r, j)
                # otherwise the row is redundant; the artificial stays basic at zero
    cost2 = cost2 + [Fraction(0)] * n_art
    status, d = tab.run(cost2, range(n + m))
    if status != OPTIMAL:
        return ExactResult(status, route="bland", pivots=tab.pivots)
    return _finish(tab, d, n, m, "bland")


def _basis_matrix(rows, n, basis):
    m = len(rows)
    cols = [_column(rows, n, col) for col in basis]
    return flint.fmpq_mat(m, m, [cols[k][r] for r in range(m) for k in range(m)])


def _tableau_from_basis(rows, b, n, basis):
    m = len(rows)
    try:
        Binv = _basis_matrix(rows, n, basis).inv()
    except ZeroDivisionError:
        return None
    full = flint.fmpq_mat(m, n + m + 1, [
        v for r, row in enumerate(rows)
        for v in _dense_row(row, n) + [-1 if k == r else 0 for k in range(m)] + [b[r]]
    ])
    P = Binv * full
    T = [[_frac(P[r, j]) for j in range(n + m + 1)] for r in range(m)]
    if any(row[-1] < 0 for row in T):
        return None
    return _Tableau(T, list(basis))


def certify_basis(rows, b, c, n, basis):
    """Exact primal/dual values for `basis` if it is optimal, else None."""
    m = len(rows)
    if len(basis) != m or len(set(basis)) != m:
        return None
    B = _basis_matrix(rows, n, basis)
    try:
        xB = B.solve(flint.fmpq_mat(m, 1, list(b)))
    except ZeroDivisionError:
        return None
    cB = [c[col] if col < n else 0 for col in basis]
    u = B.transpose().solve(flint.fmpq_mat(m, 1, cB))
    xs = [_frac(xB[r, 0]) for r in range(m)]
    us = [_frac(u[r, 0]) for r in range(m)]
    if any(v < 0 for v in xs) or any(v < 0 for v in us):
        return None
    # reduced costs of structural columns
    red = [Fraction(cj) for cj in c]
    for r, row in enumerate(rows):
        ur = us[r]
        if ur:
            for j, a in row.items():
                red[j] -= ur * a
    if any(v < 0 for v in red):
        return None
    v = [Fraction(0)] * n
    for r, col in enumerate(basis):
        if col < n:
            v[col] = xs[r]
    obj = sum((Fraction(cj) * vj for cj, vj in zip(c, v)), Fraction(0))
    return ExactResult(OPTIMAL, v, us, list(basis), obj, "certified")


def solve_exact(rows, b, c, n, hint=None):
    """Exact optimum; `hint` is an optional candidate basis to try first."""
    if hint is not None and len(rows):
        res = certify_basis(rows, b, c, n, hint)
        if res is not None:
            return res
        res = bland_simplex(rows, b, c, n, start_basis=hint)
        if res is not None:
            return res
    return bland_simplex(rows, b, c, n)
