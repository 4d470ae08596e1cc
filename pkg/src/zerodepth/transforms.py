"""Complex outer function ``h = log W`` and the Fourier inverse of ``1/((1-iz)^{2/p} W)``.

The inverse transform is evaluated on the horizontal contour through the
saddle height ``y_s``, where it reduces to a Gaussian-like integral scaled by
``e^{-Q(s)}``.  By evenness of φ the integrand is conjugate-symmetric in
``x``, so only ``x >= 0`` is integrated.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConvergenceError, DomainError, PrecisionError
from .laplace import LogMagnitude
from .legendre import legendre_point
from .poisson import QProfile
from .quadrature import QuadratureConfig, gk15

log = logging.getLogger(__name__)

LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


@dataclass
class ComplexLogW:
    prof: QProfile
    quad: QuadratureConfig = field(default=None)

    def __post_init__(self):
        if self.quad is None:
            self.quad = self.prof.quad


def eval_h(clw: ComplexLogW, z: complex) -> complex:
    """``h(z) = log W(z)`` for ``Im z > 0``."""
    z = complex(z)
    if not z.imag > 0:
        raise DomainError(f"h needs Im z > 0, got {z}")
    return clw.prof.h(z)


@dataclass(frozen=True)
class FourierResult:
    value: LogMagnitude
    contour_height: float
    window: tuple
    series_remainder_bound: float
    omega: float = 0.0
    tail_bound: float = 0.0
    rel_error: float = 0.0


def _check_p(p):
    p = float(p)
    if not (p >= 1):
        raise DomainError(f"p must lie in [1, inf], got {p}")
    return p


def fourier_inverse_oracle(clw: ComplexLogW, p: float, s: float, *,
                           height: Optional[float] = None, rel_tol: float = 1e-8,
                           omega0: float = 8.0, cap_factor: float = 64.0,
                           remainder_omega: float = 4.0, y_cap: float = 1e12) -> FourierResult:
    """``(F^{-1} f)(s)`` for ``f(z) = 1/((1 - iz)^{2/p} W(z))``.

    Uses the convention ``(1/√2π) ∫ e^{-isz} f(z) dz`` along ``Im z = y``
    (default ``y = y_s``).  The window ``|x| <= ω |q''(y)|^{-1/2}`` doubles
    from ``ω = omega0`` until the decay bound
    ``|integrand| <= (8|q''|^{-1/2}/x)^{10}`` integrated over the tails is
    below ``rel_tol`` times the window integral.  The decay bound rests on
    ``u_x >= 10/x`` beyond ``8|q''|^{-1/2}``, which is verified at sample
    points past the final window.  The window may not exceed
    ``cap_factor·y``.

    ``series_remainder_bound`` is the largest modulus of the non-Gaussian
    remainder ``h(x+iy) - h(iy) + i q'(y) x - |q''(y)| x²/2`` on
    ``|x| <= remainder_omega·|q''|^{-1/2}``.
    """
    p = _check_p(p)
    s = float(s)
    if s <= 0:
        return FourierResult(LogMagnitude.zero(), math.inf, (0.0, 0.0), 0.0)
    prof = clw.prof
    pt = legendre_point(prof, s, y_cap=y_cap)
    y = float(height) if height is not None else pt.y_s
    if not y > 0:
        raise DomainError("contour height must be positive")
    if height is None:
        pref = -pt.Q
    else:
        pref = s * y - prof.q(y)
    q1 = prof.derivative(y, 1)
    q2 = abs(prof.derivative(y, 2, check=False))
    sigma = q2 ** -0.5
    expo = 2.0 / p if math.isfinite(p) else 0.0

    def F(xs):
        out = np.empty(len(xs), dtype=complex)
        for i, x in enumerate(xs):
            dh = prof.delta_h(x, y) if x != 0 else 0j
            out[i] = np.exp(-1j * s * x - dh) / (1 + y - 1j * x) ** expo
        return out

    omega = float(omega0)
    x_hi = omega * sigma
    total = gk15(F, 0.0, x_hi, points=(sigma, 4 * sigma), rel_tol=rel_tol * 1e-2)
    value, err = total.value, total.error
    while True:
        tail = 2 * x_hi * (8 * sigma / x_hi) ** 10 / 9 / (1 + y) ** expo
        integral = 2 * value.real
        if tail <= rel_tol * abs(integral):
            break
        if 2 * x_hi > cap_factor * y:
            raise ConvergenceError(
                f"Fourier window cap reached at s = {s:g} (omega = {omega:g})")
        more = gk15(F, x_hi, 2 * x_hi, rel_tol=rel_tol * 1e-2,
                    abs_tol=rel_tol * 1e-2 * abs(value))
        value += more.value
        err += more.error
        x_hi *= 2
        omega *= 2
    # hypothesis behind the decay bound, sampled beyond the window
    for f in (1.0, 2.0, 8.0):
        xx = f * x_hi
        if prof.u_x(xx, y) < 10 / xx:
            raise PrecisionError(
                f"decay bound hypothesis u_x >= 10/x fails at x = {xx:g}, y = {y:g}",
                bound=tail)

    xs = np.linspace(0, remainder_omega * sigma, 17)[1:]
    rem = max(abs(prof.delta_h(x, y) + 1j * q1 * x - q2 * x * x / 2) for x in xs)

    if integral == 0:
        lm = LogMagnitude.zero()
    else:
        lm = LogMagnitude(pref - LOG_SQRT_2PI + math.log(abs(integral)),
                          0.0 if integral > 0 else math.pi)
    return FourierResult(lm, y, (-x_hi, x_hi), float(rem), omega, tail,
                         (tail + 2 * err) / abs(integral) if integral else math.inf)


@dataclass(frozen=True)
class RhoBounds:
    upper_log: float
    asym_log: float
    coarse_log: float


def rho_bounds(prof, p: float, s: float, *, point=None, y_cap: float = 1e12) -> RhoBounds:
    """Log-level comparison values for ``ρ_{p,W}(s)``.

    ``upper_log`` omits the unknown constant of the upper bound, so it holds
    only up to an additive O(1).
    """
    p = _check_p(p)
    pt = point or legendre_point(prof, s, y_cap=y_cap)
    asym = -pt.Q + 0.5 * math.log(pt.Q2)
    inv_p = 1.0 / p if math.isfinite(p) else 0.0
    return RhoBounds(asym - inv_p * math.log(abs(pt.Q1)), asym, -pt.Q)


def lemma_ratio_minus_1(res: FourierResult, prof, p: float, s: float, *, point=None) -> float:
    """``oracle / (√Q'' e^{-Q} |Q'|^{-2/p}) - 1`` from a Fourier result."""
    p = _check_p(p)
    pt = point or legendre_point(prof, s)
    inv_p = 1.0 / p if math.isfinite(p) else 0.0
    ref = -pt.Q + 0.5 * math.log(pt.Q2) - 2 * inv_p * math.log(abs(pt.Q1))
    return math.expm1(res.value.log_abs - ref)


def write_fourier_csv(rows, fh) -> None:
    """``s, p, log_oracle_abs, phase, asym_log, upper_log, coarse_log, omega_final``."""
    wr = csv.writer(fh, lineterminator="\n")
    wr.writerow(["s", "p", "log_oracle_abs", "phase", "asym_log", "upper_log",
                 "coarse_log", "omega_final"])
    for r in rows:
        wr.writerow([f"{v:.17g}" for v in r])
