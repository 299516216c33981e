"""k-FTRA with uniform requirements: at most k facilities in total.

Raising every facility cost by theta makes the primal-dual algorithm (run
with facility costs doubled) open fewer facilities.  Binary search on theta
either hits exactly k or ends with two nearby runs, one opening k_l > k and
one opening k_s < k.  The two are mixed: units of the small solution are
paired with units of the large one (same site first, then nearest sites),
then either the small solution or its paired image is kept and a random
set of the unpaired large units is added, giving exactly k facilities.
"""
from __future__ import annotations

import logging
import random
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from .model import site_distance
from .oracle import optimal_connections
from .primal_dual import PdConfig, apd_solve

log = logging.getLogger(__name__)

SCALE = 2


class BracketError(RuntimeError):
    pass


@dataclass
class BsOutcome:
    exact: object = None  # IntegralSolution when some probe opened <= k with no bracket needed
    theta: Fraction | None = None
    theta1: Fraction | None = None
    theta2: Fraction | None = None
    large: object = None  # opens k_l > k
    small: object = None  # opens k_s < k
    eps: Fraction | None = None
    probes: list = field(default_factory=list)  # (theta, opened) in probe order
    non_monotone: list = field(default_factory=list)

    @property
    def is_exact(self):
        return self.exact is not None

    @property
    def bisections(self):
        return max(0, len(self.probes) - 2)


@dataclass(frozen=True)
class Pairing:
    y_p: tuple
    y_p_bar: tuple


def search_params(inst):
    """(eps, theta2) for the binary search."""
    N = sum(inst.R)
    pos = [v for row in inst.c for v in row if v > 0]
    eps = Fraction(min(pos), 8 * N * N) if pos else Fraction(1)
    cmax = max((v for row in inst.c for v in row), default=0)
    theta2 = Fraction(inst.n_c * cmax, 2)
    if theta2 == 0:
        theta2 = Fraction(1)  # all connections free: any positive offset already opens max r
    return eps, theta2


def _apd(inst, theta):
    return apd_solve(inst, PdConfig(theta, SCALE))[0]


def binary_search(inst, k):
    eps, top = search_params(inst)
    out = BsOutcome(eps=eps)

    def probe(theta):
        sol = _apd(inst, theta)
        out.probes.append((theta, sol.opened))
        return sol

    low = probe(Fraction(0))
    if low.opened <= k:
        out.exact, out.theta = low, Fraction(0)
        return out
    high = probe(top)
    if high.opened == k:
        out.exact, out.theta = high, top
        return out
    if high.opened > k:
        raise BracketError(f"theta={top} still opens {high.opened} > k={k}")
    t1, t2 = Fraction(0), top
    while t2 - t1 > eps:
        mid = (t1 + t2) / 2
        sol = probe(mid)
        if sol.opened == k:
            out.exact, out.theta = sol, mid
            break
        if sol.opened > k:
            t1, low = mid, sol
        else:
            t2, high = mid, sol
    seq = sorted(out.probes)
    out.non_monotone = [(a, b) for a, b in zip(seq, seq[1:]) if b[1] > a[1]]
    if out.non_monotone:
        log.warning("opened count rose with theta: %s", out.non_monotone)
    if out.is_exact:
        return out
    # re-run both ends to confirm the bracket
    if not (_apd(inst, t1).opened > k > _apd(inst, t2).opened):
        raise BracketError(f"bracket [{t1}, {t2}] does not straddle k={k}")
    out.theta1, out.theta2, out.large, out.small = t1, t2, low, high
    return out


def greedy_pairing(inst, y_s, y_l, distance=None):
    if sum(y_s) >= sum(y_l):
        raise ValueError("pairing needs sum(y_s) < sum(y_l)")
    if distance is None:
        distance = lambda a, b: site_distance(inst, a, b)  # noqa: E731
    n = len(y_s)
    y_p = [min(a, b) for a, b in zip(y_s, y_l)]
    left_s = [a - p for a, p in zip(y_s, y_p)]
    left_l = [b - p for b, p in zip(y_l, y_p)]
    for i in range(n):
        if not left_s[i]:
            continue
        for i2 in sorted((i2 for i2 in range(n) if i2 != i), key=lambda i2: (distance(i, i2), i2)):
            if not left_s[i]:
                break
            m = min(left_s[i], left_l[i2])
            if m:
                y_p[i2] += m
                left_s[i] -= m
                left_l[i2] -= m
    if sum(y_p) != sum(y_s):
        raise AssertionError("pairing lost units")
    return Pairing(tuple(y_p), tuple(b - p for b, p in zip(y_l, y_p)))


def rr_draw(k, k_s, k_l, y_p_bar, seed):
    """(keep_small, chosen_units).  keep_small has probability (k_l-k)/(k_l-k_s);
    chosen_units is a uniform (k-k_s)-subset of the unpaired units (site, unit)."""
    if not k_s < k <= k_l:
        raise ValueError(f"need k_s < k <= k_l, got {k_s}, {k}, {k_l}")
    rng = random.Random(seed)
    keep_small = rng.randrange(k_l - k_s) < k_l - k
    units = [(i, q) for i, v in enumerate(y_p_bar) for q in range(v)]
    m = k - k_s
    for a in range(m):
        b = rng.randrange(a, len(units))
        units[a], units[b] = units[b], units[a]
    return keep_small, units[:m]


def randomized_round(inst, k, outcome, pairing, seed):
    y_s, y_l = outcome.small.y, outcome.large.y
    keep_small, chosen = rr_draw(k, sum(y_s), sum(y_l), pairing.y_p_bar, seed)
    y = list(y_s if keep_small else pairing.y_p)
    for i, _ in chosen:
        y[i] += 1
    sol = optimal_connections(inst, y)
    if sol is None or sum(y) != k:
        raise AssertionError("randomized rounding produced an infeasible opening")
    return sol


def pk_solve(inst, k=None, seed=0, details=None):
    k = inst.k if k is None else k
    if k is None:
        raise ValueError("k is required")
    if not inst.uniform:
        warnings.warn("requirements are not uniform; the factor-4 bound does not apply", stacklevel=2)
    bs = binary_search(inst, k)
    if details is not None:
        details["bs"] = bs
    if bs.is_exact:
        return bs.exact
    pairing = greedy_pairing(inst, bs.small.y, bs.large.y)
    if details is not None:
        details["pairing"] = pairing
    return randomized_round(inst, k, bs, pairing, seed)
