"""Laplace-method asymptotics for ``N(s) = ∫_1^∞ y^a e^{-sy+q(y)} dy``.

Magnitudes such as ``e^{Q(s)}`` overflow doubles long before the asymptotic
regime, so every result is carried as a :class:`LogMagnitude`.
"""
from __future__ import annotations

import cmath
import csv
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConditionError, ConvergenceError, DomainError
from .legendre import LegendrePoint, legendre_point
from .quadrature import gk15

log = logging.getLogger(__name__)


def _wrap(phase: float) -> float:
    p = math.remainder(phase, 2 * math.pi)
    return math.pi if p == -math.pi else p


@dataclass(frozen=True)
class LogMagnitude:
    """``exp(log_abs + i·phase)``, or exact zero when ``is_zero``."""

    log_abs: float = 0.0
    phase: float = 0.0
    is_zero: bool = False

    def __post_init__(self):
        if not self.is_zero:
            object.__setattr__(self, "phase", _wrap(float(self.phase)))
            object.__setattr__(self, "log_abs", float(self.log_abs))

    @classmethod
    def zero(cls):
        return cls(-math.inf, 0.0, True)

    @classmethod
    def from_value(cls, x):
        x = complex(x)
        if x == 0:
            return cls.zero()
        return cls(math.log(abs(x)), math.atan2(x.imag, x.real))

    @classmethod
    def from_log(cls, log_abs, phase=0.0):
        return cls(log_abs, phase)

    def __add__(self, other: "LogMagnitude") -> "LogMagnitude":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        big, small = (self, other) if self.log_abs >= other.log_abs else (other, self)
        delta = small.log_abs - big.log_abs
        turn = _wrap(small.phase - big.phase)
        # aligned and opposite phases are summed as reals, so x - x is exact
        if turn == 0:
            return LogMagnitude(big.log_abs + math.log1p(math.exp(delta)), big.phase)
        if turn == math.pi:
            if delta == 0:
                return LogMagnitude.zero()
            return LogMagnitude(big.log_abs + math.log(-math.expm1(delta)), big.phase)
        w = 1 + cmath.exp(complex(delta, turn))
        if w == 0:
            return LogMagnitude.zero()
        return LogMagnitude(big.log_abs + math.log(abs(w)),
                            big.phase + math.atan2(w.imag, w.real))

    def __neg__(self):
        if self.is_zero:
            return self
        return LogMagnitude(self.log_abs, self.phase + math.pi)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LogMagnitude):
            other = LogMagnitude.from_value(other)
        if self.is_zero or other.is_zero:
            return LogMagnitude.zero()
        return LogMagnitude(self.log_abs + other.log_abs, self.phase + other.phase)

    def __truediv__(self, other):
        if not isinstance(other, LogMagnitude):
            other = LogMagnitude.from_value(other)
        if other.is_zero:
            raise ZeroDivisionError("division by a zero LogMagnitude")
        if self.is_zero:
            return self
        return LogMagnitude(self.log_abs - other.log_abs, self.phase - other.phase)

    def to_complex(self) -> complex:
        if self.is_zero:
            return 0j
        return cmath.exp(complex(self.log_abs, self.phase))

    def __float__(self):
        return self.to_complex().real


@dataclass(frozen=True)
class LaplaceResult:
    log_value: LogMagnitude
    window: tuple
    tail_bound_log: float
    eta: float
    k_final: float
    log_integral: float = 0.0
    rel_error: float = 0.0
    angle: float = 0.0
    point: Optional[LegendrePoint] = None

    def ratio_minus_1(self) -> float:
        """``N_oracle/N_asym - 1`` without forming either magnitude.

        Both sides share the factor ``y_s^a e^{Q}``; only the normalized window
        integral and the Gaussian width remain.
        """
        return math.expm1(self.log_integral - 0.5 * math.log(2 * math.pi * self.point.Q2))


def window_eta(prof, t: float, *, n_grid: int = 32, span: float = 1e3) -> float:
    """Window half-width ``η(t) = min(√(γ̂/|q''(t)|), t/4)``.

    ``γ̂`` is the minimum of ``|q''|^{3/2}/q'''`` over a log grid on
    ``[t, span·t]``, clamped to ``t²|q''(t)|``.
    """
    t = float(t)
    if t < 1:
        raise DomainError("window_eta needs t >= 1")
    grid = np.geomspace(t, span * t, n_grid)
    ratios = []
    for xi in grid:
        q2 = abs(prof.derivative(xi, 2, check=False))
        q3 = prof.derivative(xi, 3)
        if not q3 > 0:
            raise ConditionError(f"q''' = {q3:g} is not positive at y = {xi:g}")
        ratios.append(q2 ** 1.5 / q3)
    q2t = abs(prof.derivative(t, 2, check=False))
    gamma = min(min(ratios), t * t * q2t)
    return min(math.sqrt(gamma / q2t), t / 4)


def tail_bound(psi_at_a: float, psi_prime_at_a: float) -> float:
    """Log of the convexity bound ``e^{-ψ(a)}/ψ'(a)`` on ``∫_a^∞ e^{-ψ}``."""
    if not psi_prime_at_a > 0:
        raise DomainError("tail bound needs ψ'(a) > 0")
    return -psi_at_a - math.log(psi_prime_at_a)


def laplace_asymptotic(prof, a: float, s: float, *,
                       point: Optional[LegendrePoint] = None, y_cap=1e12) -> LogMagnitude:
    """``log N(s) ≈ Q + a log|Q'| + ½ log(2π Q'')``."""
    pt = point or legendre_point(prof, s, y_cap=y_cap)
    return LogMagnitude(pt.Q + a * math.log(pt.y_s) + 0.5 * math.log(2 * math.pi * pt.Q2))


def laplace_oracle(prof, a: float, s: float, angle: float = 0.0, *,
                   k0: float = 6.0, max_doublings: int = 8, rel_tol: float = 1e-9,
                   point: Optional[LegendrePoint] = None, y_cap=1e12) -> LaplaceResult:
    """Direct quadrature of ``N(s)`` on an η-window with bounded tails.

    The integrand is normalized by ``y_s^a e^{Q(s)}`` and integrated on
    ``[max(1, y_s - kη), y_s + kη]``; both residual tails are bounded with
    the convexity bound of :func:`tail_bound`.  ``k`` doubles until both
    bounds fall below ``rel_tol`` times the window integral.  ``angle`` only
    records the ray; the radial integral dominates every ray.
    """
    if not -math.pi / 2 <= angle <= math.pi / 2:
        raise DomainError("angle must lie in [-π/2, π/2]")
    pt = point or legendre_point(prof, s, y_cap=y_cap)
    ys = pt.y_s
    if ys < 10:
        raise DomainError(f"y_s = {ys:g} < 10; s too large for the oracle")
    eta = window_eta(prof, ys)

    # exponent relative to the peak value y_s^a e^{q(y_s) - s y_s} = y_s^a e^{Q}
    def expo(y):
        return a * math.log(y / ys) + prof.q_difference(y, ys) - s * (y - ys)

    def f(yv):
        return np.exp([expo(y) for y in yv])

    def dpsi(y):
        # derivative of -(a log y + q(y) - s y)
        return s - prof.derivative(y, 1) - a / y

    # the exponent is a difference of terms of size Q + s·y_s, so e^expo
    # carries that much relative rounding noise; finer bisection is wasted
    noise = 8 * np.finfo(float).eps * (abs(pt.Q) + s * ys + abs(a) * math.log(ys))

    k = k0
    for _ in range(max_doublings + 1):
        lo, hi = max(1.0, ys - k * eta), ys + k * eta
        res = gk15(f, lo, hi, points=(ys,), rel_tol=rel_tol * 1e-2, noise_rel=noise)
        integral = res.value
        tails = 0.0
        ok = True
        d_hi = dpsi(hi)
        if d_hi <= 0:
            ok = False
        else:
            tails += math.exp(expo(hi)) / d_hi
        if lo > 1.0:
            d_lo = -dpsi(lo)
            if d_lo <= 0:
                ok = False
            else:
                tails += math.exp(expo(lo)) / d_lo
        if ok and tails <= rel_tol * integral:
            base = pt.Q + a * math.log(ys)
            tail_log = base + math.log(tails) if tails > 0 else -math.inf
            li = math.log(integral)
            return LaplaceResult(LogMagnitude(base + li), (lo, hi), tail_log, eta, k,
                                 li, (tails + res.error) / integral, angle, pt)
        k *= 2
    raise ConvergenceError(f"Laplace window did not converge at s = {s:g} (k = {k:g})")


def write_compare_csv(rows, fh) -> None:
    """``s, log_asym, log_oracle, ratio_minus_1, eta, k_final, tail_log``."""
    wr = csv.writer(fh, lineterminator="\n")
    wr.writerow(["s", "log_asym", "log_oracle", "ratio_minus_1", "eta", "k_final", "tail_log"])
    for r in rows:
        wr.writerow([f"{v:.17g}" for v in r])
