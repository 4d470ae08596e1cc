"""Upper Legendre transform ``Q(s) = sup_y [q(y) - sy]`` of a concave profile.

The supremum is attained at the unique ``y_s`` with ``q'(y_s) = s``; then
``Q'(s) = -y_s`` and ``Q''(s) = -1/q''(y_s)``.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ConsistencyError, ConvergenceError, DomainError, OutOfRangeError
from .weights import eval_weight

log = logging.getLogger(__name__)

Y_CAP = 1e12
Y_MIN = 1e-6


@dataclass(frozen=True)
class LegendrePoint:
    s: float
    y_s: float
    Q: float
    Q1: float
    Q2: float
    residual: float

    def row(self):
        return [self.s, self.y_s, self.Q, self.Q1, self.Q2, self.residual]


def _tol(prof, s, rel_tol):
    rt = rel_tol if rel_tol is not None else max(10 * prof.quad.rel_tol, 1e-13)
    return rt * s


def solve_ys(prof, s: float, *, y_init: Optional[float] = None,
             y_cap: float = Y_CAP, y_min: float = Y_MIN,
             rel_tol: Optional[float] = None, max_iter: int = 200) -> float:
    """Solve ``q'(y) = s`` for the strictly decreasing ``q'``.

    The root is bracketed geometrically from ``y_init`` (default 1) with a
    growing ratio, then refined by Newton in ``log y`` using ``q''``, falling
    back to bisection whenever a step leaves the bracket.
    """
    s = float(s)
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    tol = _tol(prof, s, rel_tol)
    q1 = lambda y: prof.derivative(y, 1)

    y = float(y_init) if y_init else 1.0
    y = min(max(y, y_min), y_cap)
    g = q1(y) - s
    if abs(g) <= tol:
        return y
    ratio = 2.0
    if g > 0:
        lo, glo = y, g
        while True:
            hi = min(lo * ratio, y_cap)
            ghi = q1(hi) - s
            if ghi <= 0:
                break
            if hi >= y_cap:
                raise OutOfRangeError(
                    f"no root of q'(y) = {s:g} below the y cap {y_cap:g}")
            lo, glo = hi, ghi
            ratio = min(ratio * ratio, 1e16)
    else:
        hi, ghi = y, g
        while True:
            lo = max(hi / ratio, y_min)
            glo = q1(lo) - s
            if glo >= 0:
                break
            if lo <= y_min:
                raise OutOfRangeError(
                    f"s = {s:g} exceeds q'(y_min) = {glo + s:g}; outside trusted range")
            hi, ghi = lo, glo
            ratio = min(ratio * ratio, 1e16)
    if abs(ghi) <= tol:
        return hi
    if abs(glo) <= tol:
        return lo

    a, b = math.log(lo), math.log(hi)
    # start from the secant point in log y
    v = a + (b - a) * glo / (glo - ghi)
    for _ in range(max_iter):
        y = math.exp(v)
        g = q1(y) - s
        if abs(g) <= tol:
            return y
        if g > 0:
            a = v
        else:
            b = v
        q2 = prof.derivative(y, 2, check=False)
        step = -g / (q2 * y) if q2 < 0 else np.inf
        vn = v + step
        if not (a < vn < b):
            vn = 0.5 * (a + b)
        if b - a <= 4e-16 * max(1.0, abs(v)):
            return y
        v = vn
    raise ConvergenceError(f"Newton for q'(y) = {s:g} did not converge")


def legendre_point(prof, s: float, *, y_init: Optional[float] = None,
                   y_cap: float = Y_CAP, rel_tol: Optional[float] = None) -> LegendrePoint:
    """``(s, y_s, Q, Q', Q'', residual)`` at one abscissa.

    For weight-backed profiles ``Q`` is taken from the cancellation-free
    integral for ``q(y) - y q'(y)`` (plus the first-order residual
    correction), which stays accurate when ``q`` and ``s y_s`` nearly cancel.
    """
    y = solve_ys(prof, s, y_init=y_init, y_cap=y_cap, rel_tol=rel_tol)
    q1 = prof.derivative(y, 1)
    q2 = prof.derivative(y, 2)
    if not q2 < 0:
        raise ConsistencyError(f"q''({y:g}) = {q2:g} is not negative")
    if hasattr(prof, "identity_rhs"):
        Q = prof.identity_rhs(y) + (q1 - s) * y
    else:
        Q = prof.q(y) - s * y
    pt = LegendrePoint(float(s), y, float(Q), -y, -1.0 / q2, abs(q1 - s))
    if not all(math.isfinite(v) for v in pt.row()):
        raise ConvergenceError(f"non-finite Legendre point at s={s:g}")
    return pt


@dataclass(frozen=True)
class StarPoint:
    Qstar: float
    y_star: float
    sandwich_lo: float
    Q: float

    @property
    def ordered(self) -> bool:
        return self.sandwich_lo <= self.Qstar <= self.Q


def legendre_point_star(prof, s: float, *, point: Optional[LegendrePoint] = None,
                        y_cap: float = Y_CAP, strict: bool = True) -> StarPoint:
    """``Q*(s) = sup_y [q(y) - 2 log(1+y) - sy]`` and its sandwich.

    The maximizer lies below ``y_s``; a coarse log-grid scan over
    ``[y_s·1e-6, y_s]`` picks the basin and a bounded Brent search refines it.
    """
    pt = point or legendre_point(prof, s, y_cap=y_cap)
    ys = pt.y_s

    def f(v):
        y = math.exp(v)
        return -(prof.q(y) - 2 * math.log1p(y) - s * y)

    grid = np.linspace(math.log(ys) - math.log(1e6), math.log(ys), 49)
    vals = np.array([f(v) for v in grid])
    j = int(np.argmin(vals))
    a, b = grid[max(j - 1, 0)], grid[min(j + 1, grid.size - 1)]
    res = minimize_scalar(f, bounds=(a, b), method="bounded",
                          options={"xatol": 1e-10})
    best_v, best = (res.x, res.fun) if res.fun < vals[j] else (grid[j], vals[j])
    qstar = -best
    lo = pt.Q - 2 * math.log1p(ys)
    out = StarPoint(float(qstar), math.exp(best_v), lo, pt.Q)
    slack = 1e-9 * max(1.0, abs(pt.Q))
    if strict and not (lo - slack <= qstar <= pt.Q + slack):
        raise ConsistencyError(
            f"Q* = {qstar:g} outside [{lo:g}, {pt.Q:g}] at s = {s:g}")
    return out


@dataclass(frozen=True)
class IdentityCheck:
    y: float
    lhs: float
    rhs: float
    lo: float
    hi: float

    @property
    def rel_gap(self) -> float:
        return abs(self.lhs - self.rhs) / abs(self.lhs)

    @property
    def agree(self) -> bool:
        return self.rel_gap <= 1e-6

    @property
    def lower_ok(self) -> bool:
        return self.lo <= self.lhs

    @property
    def upper_ok(self) -> bool:
        return self.lhs <= self.hi


def identity_check(prof, y: float) -> IdentityCheck:
    """``q - y q'`` against its integral form and the two-sided bound."""
    y = float(y)
    lhs = prof.q(y) - y * prof.derivative(y, 1)
    rhs = prof.identity_rhs(y)
    lo = 4 / (3 * math.pi) * eval_weight(prof.weight, y)
    hi = 16 / (3 * math.pi) * prof.upper_moment(y, 4)
    return IdentityCheck(y, lhs, rhs, lo, hi)


def sweep(prof, s_values: Iterable[float], *, y_cap: float = Y_CAP,
          skip_errors: bool = True):
    """Legendre points along a grid, warm-starting from the previous ``y_s``.

    Failed abscissae yield ``(s, exception)`` instead of a point when
    ``skip_errors`` is set.
    """
    out = []
    y_prev = None
    for s in s_values:
        try:
            pt = legendre_point(prof, s, y_init=y_prev, y_cap=y_cap)
            y_prev = pt.y_s
            out.append(pt)
        except (OutOfRangeError, ConvergenceError, ConsistencyError, ArithmeticError) as exc:
            if not skip_errors:
                raise
            log.warning("legendre point failed at s=%g: %s", s, exc)
            out.append((float(s), exc))
    return out


def write_sweep_csv(rows, fh) -> None:
    wr = csv.writer(fh, lineterminator="\n")
    wr.writerow(["s", "y_s", "Q", "Q1", "Q2", "residual"])
    for r in rows:
        if isinstance(r, LegendrePoint):
            wr.writerow([f"{v:.17g}" for v in r.row()])
        else:
            wr.writerow([f"{r[0]:.17g}"] + ["nan"] * 5)
