"""Harmonic extension of a logarithmic weight and its radial profile.

With ``u = log|W|`` the Poisson extension of ``φ`` to the upper half-plane,
``q(y) = u(iy)``.  After the substitution ``t = y·u`` all kernels depend on
``u`` only, and with ``u = e^τ`` each integral becomes a smooth integral in
``τ`` closed by the tail model of :mod:`zerodepth.quadrature`.  Writing
``A0 = φ``, ``A1 = tφ'``, ``A2 = t²φ''`` (all evaluated at ``t = yu``)::

    q    = (2/π)      ∫ A0 /(1+u²) du
    q'   = (2/(π y))  ∫ A1 /(1+u²) du
    q''  = -(4/(π y²)) ∫ A1 /(1+u²)² du  =  (2/(π y²)) ∫ A2 /(1+u²) du
    q''' = (2/(π y³)) ∫ (-A2) [1/(1+u²) + 2/(1+u²)²] du
"""
from __future__ import annotations

import csv
import logging
import math
import threading
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import ConsistencyError, DomainError
from .quadrature import LOG_T_MAX, LOG_T_MIN, QuadratureConfig, log_integral
from .weights import LogWeight, eval_weight

log = logging.getLogger(__name__)

_2PI = 2 / math.pi
_4PI = 4 / math.pi


def _split(tau, near, far):
    """Evaluate a kernel as ``near(u)`` for u <= 1 and ``far(1/u)`` above.

    Both branches only ever see arguments in (0, 1], so nothing overflows
    however wide the τ-window is.
    """
    tau = np.asarray(tau, dtype=float)
    with np.errstate(under="ignore"):
        u = np.exp(np.minimum(tau, 0.0))
        w = np.exp(-np.maximum(tau, 0.0))
    return np.where(tau <= 0, near(u), far(w))


# kernels below include the Jacobian u of du = u dτ
def _k_lorentz(tau):
    # u/(1+u²)
    return _split(tau, lambda u: u / (1 + u * u), lambda w: w / (1 + w * w))


def _k_lorentz2(tau):
    # u/(1+u²)²
    return _split(tau, lambda u: u / (1 + u * u) ** 2,
                  lambda w: w ** 3 / (1 + w * w) ** 2)


def _k_third(tau):
    # u[1/(1+u²) + 2/(1+u²)²]
    return _k_lorentz(tau) + 2 * _k_lorentz2(tau)


class QProfile:
    """Radial profile ``q(y) = log|W(iy)|`` of a weight.

    Parameters
    ----------
    weight : LogWeight
    quad : QuadratureConfig, optional
    memo : bool
        Cache scalar results keyed by ``(kind, y)``.  The cache is guarded by
        a lock, so a profile may be shared between threads.
    """

    def __init__(self, weight: LogWeight, quad: Optional[QuadratureConfig] = None,
                 memo: bool = True):
        if not isinstance(weight, LogWeight):
            raise TypeError("QProfile needs a LogWeight")
        self.weight = weight
        self.quad = quad or QuadratureConfig()
        self._memo = {} if memo else None
        self._lock = threading.Lock()

    # ------------------------------------------------------------------
    def _window(self, y, wide=False):
        span = np.inf if wide else self.quad.span
        ly = math.log(y)
        return max(-span, LOG_T_MIN - ly), min(span, LOG_T_MAX - ly)

    def _points(self, y, extra=()):
        pts = [0.0, *extra]
        pts += [math.log(b / y) for b in self.weight.breakpoints if b > 0]
        return pts

    def radial(self, A: Callable, K: Callable, y: float, *, lo_tau=None,
               extra=(), tail_lo=True) -> float:
        """``∫ A(y e^τ) K(τ) dτ`` over the profile window with tails.

        ``K`` includes the Jacobian and must not overflow for large ``|τ|``.
        """
        lo, hi = self._window(y)
        if lo_tau is not None:
            lo, tail_lo = lo_tau, False

        def G(tau):
            with np.errstate(under="ignore"):
                return A(y * np.exp(tau)) * K(tau)

        pts = self._points(y, extra)
        res = log_integral(G, lo, hi, self.quad, points=pts, tail_lo=tail_lo)
        if abs(res.tail) > 1e-6 * abs(res.value):
            # slowly decaying tail: push the window to the representable range
            wlo, whi = self._window(y, wide=True)
            if lo_tau is None:
                lo = wlo
            res = log_integral(G, lo, whi, self.quad, points=pts, tail_lo=tail_lo)
        if not res.converged:
            log.warning("quadrature hit depth cap at y=%.6g", y)
        return res.value

    def _cached(self, key, fn):
        if self._memo is None:
            return fn()
        with self._lock:
            if key in self._memo:
                return self._memo[key]
        val = fn()
        with self._lock:
            self._memo[key] = val
        return val

    @staticmethod
    def _check_y(y):
        y = float(y)
        if not y > 0 or not math.isfinite(y):
            raise DomainError(f"y must be positive and finite, got {y}")
        return y

    # ------------------------------------------------------------------
    def q(self, y) -> float:
        y = self._check_y(y)
        w = self.weight
        return self._cached(("q", y), lambda: _2PI * self.radial(w.phi, _k_lorentz, y))

    def _q2_pair(self, y):
        w = self.weight
        a = -_4PI * (self.radial(w.t_dphi, _k_lorentz2, y) / y) / y
        b = _2PI * (self.radial(w.t2_d2phi, _k_lorentz, y) / y) / y
        return a, b

    def derivative(self, y, order: int, *, check: bool = True) -> float:
        """``q^{(order)}(y)`` for order 1, 2, 3.

        Order 2 is computed by both the ``tφ'`` and the ``t²φ''`` kernel; with
        ``check`` a disagreement beyond ``consistency_factor·rel_tol`` raises
        :class:`ConsistencyError`.  The ``tφ'`` value is returned.
        """
        y = self._check_y(y)
        w = self.weight
        if order == 1:
            return self._cached(("q1", y), lambda: _2PI / y * self.radial(w.t_dphi, _k_lorentz, y))
        if order == 2:
            a, b = self._cached(("q2", y), lambda: self._q2_pair(y))
            if check:
                tol = self.quad.consistency_factor * self.quad.rel_tol
                if abs(a - b) > tol * abs(a):
                    raise ConsistencyError(
                        f"q'' kernels disagree at y={y:.6g}: {a:.16g} vs {b:.16g}")
            return a
        if order == 3:
            neg_a2 = lambda t: -w.t2_d2phi(t)
            return self._cached(("q3", y), lambda: _2PI * (self.radial(neg_a2, _k_third, y) / y) / y / y)
        raise DomainError(f"derivative order must be 1, 2 or 3, got {order}")

    def q2_pair(self, y):
        """Both second-derivative kernels ``(tφ' form, t²φ'' form)``."""
        y = self._check_y(y)
        return self._cached(("q2", y), lambda: self._q2_pair(y))

    def q_difference(self, y1, y0) -> float:
        """``q(y1) - q(y0)`` from a single cancellation-free kernel."""
        y1, y0 = self._check_y(y1), self._check_y(y0)
        if y1 == y0:
            return 0.0
        r = y1 / y0
        w = self.weight

        def K(tau):
            # u(u²-r)/((u²+r²)(u²+1))
            return _split(tau, lambda u: u * (u * u - r) / ((u * u + r * r) * (u * u + 1)),
                          lambda w: w * (1 - r * w * w) / ((1 + r * r * w * w) * (1 + w * w)))

        return _2PI * (r - 1) * self.radial(w.phi, K, y0, extra=(0.5 * math.log(r), math.log(r)))

    def identity_rhs(self, y) -> float:
        """``(4y³/π)∫ φ(t)/(t²+y²)² dt``."""
        y = self._check_y(y)
        return self._cached(("id", y), lambda: _4PI * self.radial(
            self.weight.phi, _k_lorentz2, y))

    def upper_moment(self, y, power: int) -> float:
        """``∫_1^∞ φ(yu)/u^power du``."""
        y = self._check_y(y)
        return self.radial(self.weight.phi, lambda t: np.exp((1 - power) * t), y,
                           lo_tau=0.0)

    # ------------------------------------------------------------------
    def _poisson(self, A, x, y):
        xi = abs(x) / y

        def K(tau):
            return _split(
                tau,
                lambda u: u * (1 / ((u - xi) ** 2 + 1) + 1 / ((u + xi) ** 2 + 1)),
                lambda w: w * (1 / ((1 - xi * w) ** 2 + w * w)
                               + 1 / ((1 + xi * w) ** 2 + w * w))) / math.pi

        extra = ()
        if xi > 0:
            extra = tuple(math.log(v) for v in (xi, xi + 1) if v > 0)
            if xi > 1:
                extra += (math.log(xi - 1),)
        return self.radial(A, K, y, extra=extra)

    def u(self, x, y) -> float:
        y = self._check_y(y)
        return self._poisson(self.weight.phi, float(x), y)

    def u_x(self, x, y) -> float:
        y = self._check_y(y)
        x = float(x)
        if x < 0:
            raise DomainError("u_x_prime needs x >= 0")
        if x == 0:
            return 0.0
        xi = x / y

        def K(tau):
            return _split(
                tau,
                lambda u: u / (((u - xi) ** 2 + 1) * ((u + xi) ** 2 + 1)),
                lambda w: w ** 3 / (((1 - xi * w) ** 2 + w * w) * ((1 + xi * w) ** 2 + w * w)))

        extra = tuple(math.log(v) for v in (xi, xi + 1))
        if xi > 1:
            extra += (math.log(xi - 1),)
        return 4 * xi / (math.pi * y) * self.radial(self.weight.t_dphi, K, y, extra=extra)

    def angular(self, r, theta):
        """``(r u_r, u_θθ)`` at ``z = r e^{iθ}``."""
        r = float(r)
        theta = float(theta)
        if not r > 0 or not 0 < theta < math.pi:
            raise DomainError("angular derivatives need r > 0 and 0 < θ < π")
        x, y = r * math.cos(theta), r * math.sin(theta)
        w = self.weight
        ru_r = self._poisson(w.t_dphi, x, y)
        u_thth = -self._poisson(lambda t: w.t_dphi(t) + w.t2_d2phi(t), x, y)
        return ru_r, u_thth

    # complex logarithm of the outer function ------------------------------
    def h(self, z: complex) -> complex:
        """``log W(z)`` for ``Im z > 0``."""
        z = complex(z)
        if not z.imag > 0:
            raise DomainError("h(z) needs Im z > 0")
        y = z.imag
        zeta = z / y
        xi = abs(zeta.real)

        def K(tau):
            return _split(tau, lambda u: u / (u * u - zeta * zeta),
                          lambda w: w / (1 - zeta * zeta * w * w))

        extra = (math.log(xi),) if xi > 0 else ()
        return 2 * zeta / (math.pi * 1j) * self.radial(self.weight.phi, K, y, extra=extra)

    def delta_h(self, x, y) -> complex:
        """``h(x+iy) - h(iy)`` without cancellation."""
        y = self._check_y(y)
        x = float(x)
        if x == 0:
            return 0j
        xi = x / y
        zeta = complex(xi, 1.0)

        def K(tau):
            return _split(
                tau,
                lambda u: u * (u * u + 1j * zeta) / ((u * u - zeta * zeta) * (u * u + 1)),
                lambda w: w * (1 + 1j * zeta * w * w) / ((1 - zeta * zeta * w * w) * (1 + w * w)))

        extra = (math.log(abs(xi)),)
        return 2 * xi / (math.pi * 1j) * self.radial(self.weight.phi, K, y, extra=extra)


def profile_for(weight: LogWeight, quad: Optional[QuadratureConfig] = None) -> QProfile:
    """``QProfile`` with tolerances suited to the weight family.

    For the bang family the two second-derivative formulas separate slowly
    in the far range (about 4e-4 relative at y = 1e277, both integrals
    converged), so the agreement check is loosened there.  Tabulated
    sequences and spline-backed weights have a third derivative that jumps
    at every knot, which costs the second-derivative cross-check a few
    digits as well.
    """
    cfg = quad or QuadratureConfig()
    gen = weight.params.get("generator")
    if gen == "bang":
        cfg = replace(cfg, consistency_factor=max(cfg.consistency_factor, 1e7))
    elif gen == "table" or getattr(weight, "family", None) in ("table", "majorant"):
        cfg = replace(cfg, consistency_factor=max(cfg.consistency_factor, 1e3))
    return QProfile(weight, cfg)


class SyntheticProfile:
    """Profile given directly by ``q`` and its derivatives (no weight)."""

    def __init__(self, q: Callable, q1: Callable, q2: Callable,
                 q3: Optional[Callable] = None, name: str = "synthetic"):
        self._f = (q, q1, q2, q3)
        self.name = name
        self.weight = None
        # closed forms: root finding may go to near machine precision
        self.quad = QuadratureConfig(rel_tol=1e-14, abs_tol_log=1e-16)

    @classmethod
    def sqrt_profile(cls, c: float = 2.0):
        """``q(y) = c√y``."""
        return cls(lambda y: c * np.sqrt(y), lambda y: 0.5 * c / np.sqrt(y),
                   lambda y: -0.25 * c * y ** -1.5, lambda y: 0.375 * c * y ** -2.5,
                   name=f"{c:g}*sqrt(y)")

    def q(self, y):
        return float(self._f[0](y))

    def derivative(self, y, order, *, check=True):
        if order not in (1, 2, 3) or self._f[order] is None:
            raise DomainError(f"derivative order {order} unavailable")
        return float(self._f[order](y))

    def q_difference(self, y1, y0):
        return self.q(y1) - self.q(y0)


# module-level operations -------------------------------------------------

def q_eval(prof: QProfile, y) -> float:
    return prof.q(y)


def q_derivative(prof: QProfile, y, order: int) -> float:
    return prof.derivative(y, order)


def u_eval(prof: QProfile, x, y) -> float:
    return prof.u(x, y)


def u_x_prime(prof: QProfile, x, y) -> float:
    return prof.u_x(x, y)


def u_angular(prof: QProfile, r, theta):
    ru_r, u_thth = prof.angular(r, theta)
    return {"ru_r": ru_r, "u_thth": u_thth}


@dataclass(frozen=True)
class DerivativeBounds:
    y: float
    lower_58: float
    q2_abs: float
    upper_58: float
    y_sqrt_q2: float
    x_threshold_513: float

    @property
    def lower_ok(self) -> bool:
        return self.lower_58 <= self.q2_abs

    @property
    def upper_ok(self) -> bool:
        return self.q2_abs <= self.upper_58

    @property
    def ok(self) -> bool:
        return self.lower_ok and self.upper_ok


def derivative_bounds(prof: QProfile, y) -> DerivativeBounds:
    """Two-sided bound on ``|q''(y)|`` and the derived scales."""
    y = float(y)
    q2 = abs(prof.derivative(y, 2, check=False))
    lower = eval_weight(prof.weight, y, 1) / (3 * math.pi * y)
    upper = 24 / (math.pi * y) / y * prof.upper_moment(y, 2)
    return DerivativeBounds(y, lower, q2, upper, y * math.sqrt(q2), 8 / math.sqrt(q2))


def scan_y0(prof: QProfile, ys, *, x_factors=(1.0, 2.0, 4.0, 16.0)) -> Optional[float]:
    """Smallest sampled ``y`` from which ``u_x ≥ 10/x`` holds beyond the threshold.

    For each ``y`` the inequality is tested at ``x = f·8|q''(y)|^{-1/2}``;
    returns the first ``y`` after which every later sample passes, or None.
    """
    ok = []
    for y in ys:
        xt = 8 / math.sqrt(abs(prof.derivative(y, 2, check=False)))
        ok.append(all(prof.u_x(f * xt, y) >= 10 / (f * xt) for f in x_factors))
    for i in range(len(ok)):
        if all(ok[i:]):
            return float(ys[i])
    return None


def dump_profile_csv(prof: QProfile, ys, path_or_file) -> None:
    """Write ``y,q,q1,q2,q3,lower58,upper58`` rows (17 significant digits)."""
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="") if own else path_or_file
    try:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["y", "q", "q1", "q2", "q3", "lower58", "upper58"])
        for y in ys:
            row = [y]
            try:
                b = derivative_bounds(prof, y)
                row += [prof.q(y), prof.derivative(y, 1), prof.derivative(y, 2, check=False),
                        prof.derivative(y, 3), b.lower_58, b.upper_58]
            except ArithmeticError as exc:
                log.warning("profile row y=%g failed: %s", y, exc)
                row += [float("nan")] * 6
            wr.writerow([f"{v:.17g}" for v in row])
    finally:
        if own:
            fh.close()
