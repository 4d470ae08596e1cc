"""Logarithmic weights, Denjoy-Carleman sequences, majorants and diagnostics.

A logarithmic weight is an even, nonnegative, nondecreasing function ``φ`` on
the real line with ``∫ φ(t)/(1+t²) dt < ∞``.  Every weight exposes vectorized
evaluators for ``φ``, ``φ'``, ``φ''`` and, because all Poisson kernels are
scale free, for the log-derivatives ``tφ'(t)`` and ``t²φ''(t)``.

Families
--------
power       ``c·t^α``
sequence    Ostrowski function ``sup_n [n log t - log M_n]`` of a sequence,
            through a real-index generator ``L(n)`` and its continuous
            envelope; finite tables get a generator from their convex hull
majorant    lower Legendre transform of ``log M(ξ)`` sampled into a table
table       cubic spline of ``φ(e^τ)`` with power-law extension
synthetic   user-supplied evaluators
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, NamedTuple, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline, PchipInterpolator
from scipy.special import gammaln, polygamma, psi

from .errors import (CapabilityError, DataFormatError, DomainError,
                     EvaluationError, PrecisionError)
from .quadrature import QuadratureConfig, gk15, log_integral

log = logging.getLogger(__name__)

def _finite(values, what):
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise EvaluationError(f"{what} returned non-finite values")
    return values


class LogWeight:
    """Base class of all logarithmic weights.

    Subclasses implement ``_phi``, ``_a1`` (``tφ'``) and ``_a2`` (``t²φ''``)
    for ``t >= 0``; the public evaluators fold negative arguments.
    """

    family = "abstract"
    max_order = 2
    domain_floor = 0.0

    @property
    def params(self) -> dict:
        return {}

    @property
    def breakpoints(self) -> tuple:
        """Abscissae ``t > 0`` where ``φ''`` may jump."""
        return ()

    def describe(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.family}({inner})"

    # subclass hooks ---------------------------------------------------
    def _phi(self, t):
        raise NotImplementedError

    def _a1(self, t):
        raise CapabilityError(f"{self.family} weight has no first derivative")

    def _a2(self, t):
        raise CapabilityError(f"{self.family} weight has no second derivative")

    # public evaluators --------------------------------------------------
    def phi(self, t):
        t = np.abs(np.asarray(t, dtype=float))
        return self._phi(t)

    def t_dphi(self, t):
        """``tφ'(t)``, even in ``t``."""
        t = np.abs(np.asarray(t, dtype=float))
        return self._a1(t)

    def t2_d2phi(self, t):
        """``t²φ''(t)``, even in ``t``."""
        if self.max_order < 2:
            raise CapabilityError(f"{self.family} weight is not C²")
        t = np.abs(np.asarray(t, dtype=float))
        return self._a2(t)

    def dphi(self, t):
        t = np.asarray(t, dtype=float)
        at = np.abs(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self._a1(at) / at
        return np.sign(t) * out

    def d2phi(self, t):
        t = np.asarray(t, dtype=float)
        at = np.abs(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.t2_d2phi(at) / (at * at)

    def __call__(self, t, order: int = 0):
        return eval_weight(self, t, order, check=False)


class PowerWeight(LogWeight):
    """``φ(t) = scale·|t|^α``."""

    family = "power"

    def __init__(self, alpha: float, scale: float = 1.0):
        if not alpha > 0:
            raise DomainError(f"power exponent must be positive, got {alpha}")
        if not scale > 0:
            raise DomainError("scale must be positive")
        self.alpha = float(alpha)
        self.scale = float(scale)

    @property
    def params(self):
        return {"alpha": self.alpha, "scale": self.scale}

    def _phi(self, t):
        return self.scale * t ** self.alpha

    def _a1(self, t):
        return self.alpha * self._phi(t)

    def _a2(self, t):
        return self.alpha * (self.alpha - 1) * self._phi(t)

    # closed forms of the radial profile, used as oracles in tests
    def q_closed(self, y, order: int = 0):
        """``q(y) = sec(πα/2) y^α`` and its derivatives (requires α < 1)."""
        a = self.alpha
        c = self.scale / math.cos(math.pi * a / 2)
        coef = 1.0
        for k in range(order):
            coef *= a - k
        return c * coef * np.asarray(y, dtype=float) ** (a - order)


class SyntheticWeight(LogWeight):
    """Weight from user-supplied vectorized evaluators of ``φ, φ', φ''``."""

    family = "synthetic"

    def __init__(self, phi: Callable, dphi: Optional[Callable] = None,
                 d2phi: Optional[Callable] = None, *, name: str = "synthetic",
                 breakpoints: Iterable[float] = ()):
        self._f0, self._f1, self._f2 = phi, dphi, d2phi
        self.name = name
        self._breaks = tuple(float(b) for b in breakpoints)
        self.max_order = 2 if d2phi is not None else (1 if dphi else 0)

    @property
    def params(self):
        return {"name": self.name}

    @property
    def breakpoints(self):
        return self._breaks

    def _phi(self, t):
        return _finite(self._f0(t), "phi")

    def _a1(self, t):
        if self._f1 is None:
            raise CapabilityError("synthetic weight has no φ' evaluator")
        return t * _finite(self._f1(t), "dphi")

    def _a2(self, t):
        if self._f2 is None:
            raise CapabilityError("synthetic weight has no φ'' evaluator")
        return t * t * _finite(self._f2(t), "d2phi")


class TableWeight(LogWeight):
    """Cubic spline of ``φ(e^τ)`` through samples ``(t_i, φ_i)``.

    Beyond the last sample ``φ`` continues as a power law matching value and
    log-slope; below the first sample it continues linearly in ``t``.
    """

    family = "table"

    def __init__(self, t, phi, *, label: str = "table"):
        t = np.asarray(t, dtype=float)
        phi = np.asarray(phi, dtype=float)
        if t.ndim != 1 or t.size < 4 or t.shape != phi.shape:
            raise DataFormatError("table weight needs >= 4 matching samples")
        if np.any(t <= 0) or np.any(np.diff(t) <= 0):
            raise DataFormatError("table abscissae must be positive, increasing")
        _finite(phi, "table")
        self.label = label
        self._tau = np.log(t)
        self._spline = CubicSpline(self._tau, phi)
        self._d1 = self._spline.derivative(1)
        self._d2 = self._spline.derivative(2)
        self.t_lo, self.t_hi = float(t[0]), float(t[-1])
        self._phi_hi = float(phi[-1])
        self._p_hi = float(self._d1(self._tau[-1]) / phi[-1])
        self._phi_lo = float(phi[0])
        self._slope_lo = float(self._d1(self._tau[0]) / t[0])

    @property
    def params(self):
        return {"label": self.label, "t_range": (self.t_lo, self.t_hi)}

    @property
    def breakpoints(self):
        return (self.t_lo, self.t_hi)

    def _pieces(self, t, mid, high, low):
        out = np.empty_like(t)
        lo_m = t < self.t_lo
        hi_m = t > self.t_hi
        in_m = ~(lo_m | hi_m)
        with np.errstate(divide="ignore"):
            out[in_m] = mid(np.log(t[in_m]))
        out[hi_m] = high(t[hi_m])
        out[lo_m] = low(t[lo_m])
        return out

    def _power(self, t):
        return self._phi_hi * (t / self.t_hi) ** self._p_hi

    def _phi(self, t):
        t = np.atleast_1d(t)
        return self._pieces(t, self._spline, self._power,
                            lambda t: self._phi_lo + self._slope_lo * (t - self.t_lo))

    def _a1(self, t):
        t = np.atleast_1d(t)
        return self._pieces(t, self._d1, lambda t: self._p_hi * self._power(t),
                            lambda t: self._slope_lo * t)

    def _a2(self, t):
        t = np.atleast_1d(t)
        p = self._p_hi
        return self._pieces(t, lambda u: self._d2(u) - self._d1(u),
                            lambda t: p * (p - 1) * self._power(t),
                            np.zeros_like)


# ----------------------------------------------------------------------------
# Denjoy-Carleman sequences
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class SequenceGenerator:
    """Real-index extension ``L(n)`` of ``log M_n`` with two derivatives.

    ``L`` must be strictly convex on ``n >= 0`` with ``L(0) = 0``.
    """

    name: str
    L: Callable
    L1: Callable
    L2: Callable
    guess: Callable = field(default=lambda tau: tau)
    params: dict = field(default_factory=dict)


def factorial_power(k: float = 1.0) -> SequenceGenerator:
    """``M_n = (n!)^k``."""
    return SequenceGenerator(
        name="factorial_power",
        L=lambda n: k * gammaln(n + 1),
        L1=lambda n: k * psi(n + 1),
        L2=lambda n: k * polygamma(1, n + 1),
        guess=lambda tau: tau / k,
        params={"k": k})


def bang(beta: float = 1.0) -> SequenceGenerator:
    """``M_n = n! (log n)^{n(1+β)}`` smoothed as ``log n! + (1+β) n log log(n+e)``.

    The shift by ``e`` keeps the real-index extension convex and finite down
    to ``n = 0``; it changes ``log M_n`` only by lower-order terms.
    """
    b = 1.0 + beta

    def L(n):
        return gammaln(n + 1) + b * n * np.log(np.log(n + math.e))

    def L1(n):
        ln = np.log(n + math.e)
        return psi(n + 1) + b * (np.log(ln) + n / ((n + math.e) * ln))

    def L2(n):
        ln = np.log(n + math.e)
        ne = n + math.e
        nl = ne * ln
        return polygamma(1, n + 1) + b * (1 / nl + (math.e * ln - n) / nl / nl)

    def guess(tau):
        return tau - b * np.log(np.maximum(tau, 1.0))

    return SequenceGenerator(name="bang", L=L, L1=L1, L2=L2, guess=guess,
                             params={"beta": beta})


@dataclass(frozen=True)
class DCSequence:
    """Finite table ``log M_n`` (n = 0..n_max), optionally with a generator."""

    log_m: np.ndarray
    generator: Optional[SequenceGenerator] = None
    name: str = "table"

    def __post_init__(self):
        arr = np.array(self.log_m, dtype=float)
        if arr.ndim != 1:
            raise DataFormatError("log_m must be one-dimensional")
        if arr.size < 3:
            raise DataFormatError("a sequence needs n_max >= 2")
        if not np.all(np.isfinite(arr)):
            raise DataFormatError("log_m entries must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "log_m", arr)

    @property
    def n_max(self) -> int:
        return self.log_m.size - 1

    @classmethod
    def from_generator(cls, gen: SequenceGenerator, n_max: int = 1000):
        n = np.arange(n_max + 1, dtype=float)
        return cls(gen.L(n), generator=gen, name=gen.name)

    @classmethod
    def factorial_power(cls, k: float = 1.0, n_max: int = 1000):
        return cls.from_generator(factorial_power(k), n_max)

    @classmethod
    def bang(cls, beta: float = 1.0, n_max: int = 1000):
        """Table ``log n! + n(1+β) log log n`` for n >= 3, zero for n <= 2."""
        n = np.arange(n_max + 1, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            lm = gammaln(n + 1) + n * (1 + beta) * np.log(np.log(n))
        lm[:3] = 0.0
        return cls(lm, generator=bang(beta), name="bang")

    @classmethod
    def from_file(cls, path, name: Optional[str] = None):
        """One ``log M_n`` per line, ``#`` comment lines ignored."""
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise DataFormatError(f"cannot read sequence {path}: {exc}")
        values = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: not a number: {line!r}")
        return cls(np.array(values), name=name or Path(path).stem)

    def to_file(self, path):
        lines = [f"# log M_n for n = 0..{self.n_max} ({self.name})"]
        lines += [repr(float(v)) for v in self.log_m]
        Path(path).write_text("\n".join(lines) + "\n")


class OstrowskiValue(NamedTuple):
    value: np.ndarray
    n: np.ndarray
    truncated: np.ndarray


def ostrowski_phi(seq: DCSequence, t) -> OstrowskiValue:
    """Exact ``max_{0<=n<=n_max} [n log t - log M_n]`` with the attaining ``n``.

    Ties resolve to the smallest index.  ``truncated`` flags a maximum attained
    at ``n_max``, where the true supremum may be larger.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("ostrowski_phi needs t > 0")
    scalar = t.ndim == 0
    tau = np.log(np.atleast_1d(t))
    n = np.arange(seq.n_max + 1, dtype=float)
    vals = np.empty(tau.size)
    arg = np.empty(tau.size, dtype=int)
    for i in range(0, tau.size, 256):
        block = tau[i:i + 256, None] * n[None, :] - seq.log_m[None, :]
        best = block.max(axis=1)
        scale = np.maximum(1.0, np.abs(best))
        tie = block >= (best - 1e-12 * scale)[:, None]
        arg[i:i + 256] = np.argmax(tie, axis=1)
        vals[i:i + 256] = best
    trunc = arg == seq.n_max
    if scalar:
        return OstrowskiValue(float(vals[0]), int(arg[0]), bool(trunc[0]))
    return OstrowskiValue(vals, arg, trunc)


class EnvelopeWeight(LogWeight):
    """Continuous Ostrowski weight ``φ(e^τ) = sup_{n>=0} [nτ - L(n)]``.

    With ``L`` strictly convex the supremum is attained at the unique ``n*``
    solving ``L'(n*) = τ`` (or ``n* = 0`` below ``τ₀ = L'(0)``), and
    ``d/dτ φ = n*``, ``d²/dτ² φ = 1/L''(n*)``.  The weight is C² except at
    ``t₀ = e^{τ₀}``, where ``φ''`` jumps.
    """

    family = "sequence"

    def __init__(self, gen: SequenceGenerator, seq: Optional[DCSequence] = None):
        self.gen = gen
        self.seq = seq
        self.tau0 = float(gen.L1(0.0))
        self._v_lo, self._v_hi = -40.0, 700.0

    @property
    def params(self):
        return {"generator": self.gen.name, **self.gen.params}

    @property
    def breakpoints(self):
        extra = self.gen.params.get("t_table")
        return (math.exp(self.tau0),) + ((extra,) if extra else ())

    def argmax_n(self, tau):
        """Vectorized safeguarded Newton for ``L'(n) = τ`` in ``v = log n``."""
        tau = np.atleast_1d(np.asarray(tau, dtype=float))
        n = np.zeros_like(tau)
        act = tau > self.tau0
        if not act.any():
            return n
        ta = tau[act]
        lo = np.full(ta.shape, self._v_lo)
        hi = np.full(ta.shape, self._v_hi)
        v = np.clip(self.gen.guess(ta), lo + 1, hi - 1)
        for _ in range(200):
            e = np.exp(v)
            g = self.gen.L1(e) - ta
            hi = np.where(g > 0, v, hi)
            lo = np.where(g <= 0, v, lo)
            step = g / (self.gen.L2(e) * e)
            vn = v - step
            bad = ~((vn > lo) & (vn < hi)) | ~np.isfinite(vn)
            vn = np.where(bad, 0.5 * (lo + hi), vn)
            done = np.abs(vn - v) <= 4e-16 * np.maximum(1.0, np.abs(v))
            v = vn
            if done.all() or np.all(hi - lo <= 4e-16 * np.maximum(1.0, np.abs(v))):
                break
        n[act] = np.exp(v)
        return n

    def _eval(self, t):
        t = np.atleast_1d(t)
        with np.errstate(divide="ignore"):
            tau = np.log(t)
        n = self.argmax_n(tau)
        return tau, n

    def _phi(self, t):
        tau, n = self._eval(t)
        out = np.zeros_like(n)
        m = n > 0
        out[m] = n[m] * tau[m] - self.gen.L(n[m])
        return np.maximum(out, 0.0)

    def _a1(self, t):
        return self._eval(t)[1]

    def _a2(self, t):
        _, n = self._eval(t)
        out = np.zeros_like(n)
        m = n > 0
        out[m] = 1.0 / self.gen.L2(n[m]) - n[m]
        return out


def _lower_hull(n, y):
    """Indices of the lower convex hull of the points ``(n_i, y_i)``."""
    idx = []
    for i in range(n.size):
        while len(idx) >= 2:
            a, b = idx[-2], idx[-1]
            # drop b unless it lies strictly below the chord a-i
            if (y[b] - y[a]) * (n[i] - n[a]) >= (y[i] - y[a]) * (n[b] - n[a]):
                idx.pop()
            else:
                break
        idx.append(i)
    return np.array(idx)


def table_generator(seq: DCSequence) -> SequenceGenerator:
    """Convex C² real-index extension of a tabulated ``log M_n``.

    The Ostrowski function only sees the lower convex hull of
    ``(n, log M_n)``.  Hull chord slopes, placed at chord midpoints, are
    joined by a monotone cubic Hermite interpolant ``L'``; ``L`` is its
    antiderivative with ``L(0) = 0``.  Past ``n_max`` the slope continues as
    ``L'(n_max) + c log(n/n_max)``, the growth of factorial-type sequences,
    with ``c`` matching ``L''`` at ``n_max``.
    """
    lm = seq.log_m
    if lm[0] != 0:
        raise DataFormatError("sequence must start with log M_0 = 0")
    n = np.arange(lm.size, dtype=float)
    h = _lower_hull(n, lm)
    if h.size < 3:
        raise DataFormatError("sequence hull has fewer than three vertices")
    nh, yh = n[h], lm[h]
    sig = np.diff(yh) / np.diff(nh)
    mid = 0.5 * (nh[:-1] + nh[1:])
    x0 = sig[0] - (sig[1] - sig[0]) * mid[0] / (mid[1] - mid[0])
    x1 = sig[-1] + (sig[-1] - sig[-2]) * (nh[-1] - mid[-1]) / (mid[-1] - mid[-2])
    xs = np.concatenate([[0.0], mid, [nh[-1]]])
    ys = np.concatenate([[x0], sig, [x1]])
    d = PchipInterpolator(xs, ys).derivative()(xs)
    d[0] = (ys[1] - ys[0]) / (xs[1] - xs[0])
    d[-1] = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
    spl1 = CubicHermiteSpline(xs, ys, d)
    spl0 = spl1.antiderivative()
    spl2 = spl1.derivative()
    n_end = float(nh[-1])
    L_end, L1_end, c = float(spl0(n_end)), float(ys[-1]), float(d[-1]) * n_end

    def _parts(nv, inner, outer):
        nv = np.asarray(nv, dtype=float)
        out = np.empty_like(nv)
        m = nv <= n_end
        out[m] = inner(nv[m])
        out[~m] = outer(nv[~m])
        return out

    def L(nv):
        return _parts(nv, spl0, lambda v: L_end + L1_end * (v - n_end)
                      + c * (v * np.log(v / n_end) - (v - n_end)))

    def L1(nv):
        return _parts(nv, spl1, lambda v: L1_end + c * np.log(v / n_end))

    def L2(nv):
        return _parts(nv, spl2, lambda v: c / v)

    def guess(tau):
        inside = np.interp(tau, ys, xs)
        beyond = n_end * np.exp(np.minimum((tau - L1_end) / c, 600.0))
        return np.log(np.maximum(np.where(tau <= L1_end, inside, beyond), 1e-6))

    return SequenceGenerator(name="table", L=L, L1=L1, L2=L2, guess=guess,
                             params={"name": seq.name, "n_max": seq.n_max,
                                     "t_table": math.exp(L1_end)})


def sequence_weight(seq: DCSequence) -> LogWeight:
    """Smooth Ostrowski weight of a sequence: envelope if a generator exists."""
    gen = seq.generator if seq.generator is not None else table_generator(seq)
    return EnvelopeWeight(gen, seq)


# ----------------------------------------------------------------------------
# Majorants
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Majorant:
    """``m(ξ) = log M(ξ)`` on ``(0, 1)``; values at ``ξ >= 1`` use ``m(1-0)``."""

    log_m_eval: Callable
    log_m_prime: Optional[Callable] = None
    name: str = "custom"
    params: dict = field(default_factory=dict)

    @classmethod
    def inv_power(cls, beta: float = 1.0):
        """``M(ξ) = exp(ξ^{-β})``."""
        if not beta > 0:
            raise DomainError("inv-power exponent must be positive")
        return cls(lambda x: x ** -beta, lambda x: -beta * x ** (-beta - 1),
                   name="inv-power", params={"beta": beta})

    @classmethod
    def from_table(cls, xi, log_m, name: str = "table"):
        """Piecewise-linear ``m`` in ``log ξ``, log-log extension below the table."""
        xi = np.asarray(xi, dtype=float)
        lm = np.asarray(log_m, dtype=float)
        order = np.argsort(xi)
        xi, lm = xi[order], lm[order]
        if xi.size < 2 or np.any(xi <= 0) or not np.all(np.isfinite(lm)):
            raise DataFormatError("majorant table needs >= 2 finite rows, ξ > 0")
        lx = np.log(xi)
        if lm[0] > 0 and lm[1] > 0 and lm[0] != lm[1]:
            slope = (math.log(lm[1]) - math.log(lm[0])) / (lx[1] - lx[0])
        else:
            slope = 0.0

        def m(x):
            x = np.asarray(x, dtype=float)
            lxx = np.log(x)
            out = np.interp(lxx, lx, lm)
            below = lxx < lx[0]
            if slope:
                out = np.where(below, lm[0] * np.exp(slope * (lxx - lx[0])), out)
            return out

        return cls(m, None, name=name, params={"rows": int(xi.size)})

    @classmethod
    def from_csv(cls, path):
        try:
            data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
        except (OSError, ValueError) as exc:
            raise DataFormatError(f"{path}: {exc}")
        if data.shape[1] != 2:
            raise DataFormatError(f"{path}: expected two columns ξ, log M")
        return cls.from_table(data[:, 0], data[:, 1], name=Path(path).stem)

    @classmethod
    def parse(cls, spec: str):
        """``inv-power[:β]`` or the path of a CSV table."""
        head, _, arg = spec.partition(":")
        if head == "inv-power":
            return cls.inv_power(float(arg) if arg else 1.0)
        if Path(spec).exists():
            return cls.from_csv(spec)
        raise DataFormatError(f"unknown majorant spec {spec!r}")

    def m(self, xi):
        xi = np.minimum(np.asarray(xi, dtype=float), 1.0)
        return np.asarray(self.log_m_eval(xi), dtype=float)


class LegendreLower(NamedTuple):
    value: np.ndarray
    xi: np.ndarray


_GOLD = (math.sqrt(5) - 1) / 2


def lower_legendre_phi(maj: Majorant, r, *, decades: float = 300.0,
                       per_decade: int = 8) -> LegendreLower:
    """``inf_{0<ξ} [m(ξ) + rξ]`` with the cap ``m(ξ) = m(1-0)`` for ``ξ >= 1``.

    A dense log-ξ grid locates the global basin, golden-section search
    refines inside the neighbouring cells.  Grid points where ``m``
    overflows to ``+inf`` are skipped; NaN or ``-inf`` raise.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("lower_legendre_phi needs r > 0")
    scalar = r.ndim == 0
    r = np.atleast_1d(r)
    v = np.linspace(-decades * math.log(10), 0.0, int(decades * per_decade) + 1)
    with np.errstate(over="ignore"):
        mv = maj.m(np.exp(v))
    if np.any(np.isnan(mv)) or np.any(mv == -np.inf):
        raise EvaluationError(f"majorant {maj.name} not finite on the search grid")
    keep = np.isfinite(mv)
    v, mv = v[keep], mv[keep]
    if v.size < 3:
        raise EvaluationError("majorant finite at fewer than three grid points")
    xv = np.exp(v)
    vals = np.empty(r.size)
    xis = np.empty(r.size)
    for i in range(0, r.size, 512):
        rr = r[i:i + 512]
        tot = mv[None, :] + rr[:, None] * xv[None, :]
        j = np.argmin(tot, axis=1)
        a = v[np.maximum(j - 1, 0)]
        b = v[np.minimum(j + 1, v.size - 1)]

        def f(u):
            with np.errstate(over="ignore"):
                return maj.m(np.exp(u)) + rr * np.exp(u)

        c = b - _GOLD * (b - a)
        d = a + _GOLD * (b - a)
        fc, fd = f(c), f(d)
        for _ in range(100):
            left = fc < fd
            b = np.where(left, d, b)
            a = np.where(left, a, c)
            c_new = np.where(left, b - _GOLD * (b - a), d)
            d_new = np.where(left, c, a + _GOLD * (b - a))
            fx = f(np.where(left, c_new, d_new))
            fc, fd = np.where(left, fx, fd), np.where(left, fc, fx)
            c, d = c_new, d_new
            if np.all(b - a < 1e-12):
                break
        u = 0.5 * (a + b)
        fu = f(u)
        grid_best = tot[np.arange(rr.size), j]
        use_grid = grid_best < fu
        vals[i:i + 512] = np.where(use_grid, grid_best, fu)
        xis[i:i + 512] = np.where(use_grid, xv[j], np.exp(u))
    if scalar:
        return LegendreLower(float(vals[0]), float(xis[0]))
    return LegendreLower(vals, xis)


def majorant_weight(maj: Majorant, *, t_lo: float = 1e-3, t_hi: float = 1e12,
                    per_decade: int = 40) -> TableWeight:
    """Table-backed weight ``φ(r) = inf_ξ [m(ξ) + rξ]`` sampled on a log grid.

    ``φ(0) = m(1-0)`` is kept as is; it shifts ``q`` by a constant only.
    """
    ndec = math.log10(t_hi / t_lo)
    t = np.logspace(math.log10(t_lo), math.log10(t_hi), int(ndec * per_decade) + 1)
    phi = lower_legendre_phi(maj, t).value
    w = TableWeight(t, phi, label=maj.name)
    w.family = "majorant"
    return w


# ----------------------------------------------------------------------------
# evaluation front end
# ----------------------------------------------------------------------------

def eval_weight(w: LogWeight, t, order: int = 0, *, check: bool = True):
    """``φ(t)``, ``φ'(t)`` or ``φ''(t)`` for ``t > 0``."""
    if order not in (0, 1, 2):
        raise DomainError(f"order must be 0, 1 or 2, got {order}")
    arr = np.asarray(t, dtype=float)
    if check and np.any(arr <= 0):
        raise DomainError("weights are evaluated at t > 0")
    if order > w.max_order:
        raise CapabilityError(f"{w.describe()} supports order <= {w.max_order}")
    fn = (w.phi, w.dphi, w.d2phi)[order]
    out = fn(np.atleast_1d(arr))
    if arr.ndim == 0:
        return float(np.asarray(out).reshape(-1)[0])
    return np.asarray(out).reshape(arr.shape)


# ----------------------------------------------------------------------------
# condition diagnostics
# ----------------------------------------------------------------------------

WEIGHT_CONDITIONS = ("i", "ii", "iii", "iv-a", "iv-b", "v", "vi", "vii")
PROFILE_CONDITIONS = ("T51-a", "T51-b", "T51-c", "T51-d", "T51-e")
MAJORANT_CONDITIONS = ("2.7", "2.9", "N")
ALL_CONDITIONS = WEIGHT_CONDITIONS + PROFILE_CONDITIONS + MAJORANT_CONDITIONS


@dataclass(frozen=True)
class ConditionVerdict:
    verdict: str
    witness: tuple = ()
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in ("pass", "fail", "inconclusive"):
            raise ValueError(self.verdict)
        if self.verdict == "fail" and not self.witness:
            raise ValueError("a failed condition needs a witness")


@dataclass
class ConditionReport:
    verdicts: dict

    def __getitem__(self, cid) -> ConditionVerdict:
        return self.verdicts[cid]

    def __contains__(self, cid):
        return cid in self.verdicts

    def verdict(self, cid) -> str:
        return self.verdicts[cid].verdict

    def failed(self) -> list:
        return [c for c, v in self.verdicts.items() if v.verdict == "fail"]

    @property
    def any_fail(self) -> bool:
        return bool(self.failed())

    def weight_ok(self) -> bool:
        """(i)-(iii) not failed and at least one of (iv-a), (iv-b) not failed."""
        base = all(self.verdict(c) != "fail" for c in ("i", "ii", "iii") if c in self)
        iv = [self.verdict(c) != "fail" for c in ("iv-a", "iv-b") if c in self]
        return base and (any(iv) if iv else True)

    def lines(self):
        for cid, v in self.verdicts.items():
            extra = f" witness={v.witness}" if v.witness else ""
            yield f"{cid:7s} {v.verdict}{extra}"


def _top(grid, decades=2.0):
    return grid >= grid[-1] / 10 ** decades


def _increasing(vals, rel=1e-9):
    d = np.diff(vals)
    return bool(np.all(d > -rel * np.abs(vals[1:])))


def _trend(vals, grid, label):
    """pass if increasing over the top two decades, fail if decreasing there."""
    m = _top(grid)
    v, g = vals[m], grid[m]
    if np.all(np.diff(v) > 0):
        return ConditionVerdict("pass", (), {label: (float(v[0]), float(v[-1]))})
    if np.all(np.diff(v) < 0):
        return ConditionVerdict("fail", (float(g[-1]),), {label: (float(v[0]), float(v[-1]))})
    return ConditionVerdict("inconclusive", (), {label: (float(v[0]), float(v[-1]))})


def _check_i(w, grid):
    phi = w.phi(grid)
    neg = np.nonzero(phi < 0)[0]
    asym = np.nonzero(np.abs(w.phi(-grid) - phi) > 0)[0]
    if neg.size:
        return ConditionVerdict("fail", (float(grid[neg[0]]),), {"phi": float(phi[neg[0]])})
    if asym.size:
        return ConditionVerdict("fail", (float(grid[asym[0]]),), {"odd_part": True})
    return ConditionVerdict("pass", (), {"phi_min": float(phi.min())})


def _check_ii(w, grid):
    phi = w.phi(grid)
    d = np.diff(phi)
    bad = np.nonzero(d < -1e-12 * np.maximum(1.0, np.abs(phi[1:])))[0]
    if bad.size:
        return ConditionVerdict("fail", (float(grid[bad[0] + 1]),),
                                {"decrease": float(d[bad[0]])})
    ratio = phi / np.log(grid + 1.0)
    v = _trend(ratio, grid, "phi_over_log")
    if v.verdict == "fail":
        return ConditionVerdict("inconclusive", (), v.diagnostics)
    return v


def _decade_integrals(f, grid):
    """∫ f(e^τ) dτ over consecutive decades ending at the grid top."""
    top = math.log(grid[-1])
    edges = top - math.log(10) * np.arange(0, int(math.log10(grid[-1] / grid[0])) + 1)[::-1]
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        out.append(gk15(f, a, b, rel_tol=1e-8).value)
    return np.exp(edges), np.array(out)


def _check_iii(w, grid):
    ends, inc = _decade_integrals(lambda tau: w.phi(np.exp(tau)) * np.exp(-tau), grid)
    if inc.size < 2 or np.any(inc <= 0):
        return ConditionVerdict("inconclusive", (), {"increments": inc.tolist()})
    d1, d2 = inc[-2], inc[-1]
    l1, l2 = math.log(ends[-2]), math.log(ends[-1])
    gamma = math.log(d1 / d2) / math.log(l2 / l1)
    diag = {"last_decade": float(d2), "decay_exponent": gamma}
    if gamma > 1.1:
        return ConditionVerdict("pass", (), diag)
    if gamma < 0.9:
        return ConditionVerdict("fail", (float(grid[-1]),), diag)
    return ConditionVerdict("inconclusive", (), diag)


def _uniform_tau(grid, n=401):
    return np.exp(np.linspace(math.log(grid[0]), math.log(grid[-1]), n))


def _check_iva(w, grid):
    t = _uniform_tau(grid)
    phi = w.phi(t)
    d2 = phi[:-2] - 2 * phi[1:-1] + phi[2:]
    tol = 1e-10 * np.maximum(1.0, np.abs(phi[1:-1]))
    bad = np.nonzero(d2 < -tol)[0]
    if bad.size:
        return ConditionVerdict("fail", (float(t[bad[0] + 1]),), {"second_diff": float(d2[bad[0]])})
    return ConditionVerdict("pass", (), {"min_second_diff": float(d2.min())})


def _check_ivb(w, grid):
    t = _uniform_tau(grid)
    phi = w.phi(t)
    s = np.diff(phi) / np.diff(t)
    ds = np.diff(s)
    bad = np.nonzero(ds > 1e-10 * np.maximum(1.0, np.abs(s[1:])))[0]
    if bad.size:
        return ConditionVerdict("fail", (float(t[bad[0] + 1]),), {"slope_increase": float(ds[bad[0]])})
    a1 = w.t_dphi(grid)
    v = _trend(a1, grid, "t_dphi")
    if v.verdict == "fail":
        return ConditionVerdict("inconclusive", (), v.diagnostics)
    return v


def _four_moment(w, t, cfg):
    """``t³∫_t^∞ φ(ξ)/ξ⁴ dξ = ∫_1^∞ φ(tu)/u⁴ du``."""
    G = lambda tau: w.phi(t * np.exp(tau)) * np.exp(-3 * tau)
    return log_integral(G, 0.0, min(cfg.span, math.log(1e300 / t)), cfg,
                        tail_lo=False).value


def _check_v(w, grid, cfg):
    m = _top(grid)
    g = grid[m]
    den = np.array([_four_moment(w, t, cfg) for t in g])
    ratio = w.t_dphi(g) / den ** (2 / 3)
    full = np.full(grid.shape, np.nan)
    full[m] = ratio
    v = _trend(ratio, g, "ratio")
    return v


def _check_vi(w, grid):
    m = _top(grid)
    g = grid[m]
    phi = w.phi(g)
    if np.any(phi <= 0):
        return ConditionVerdict("fail", (float(g[np.argmin(phi)]),), {"phi": float(phi.min())})
    order = np.log(phi) / np.log(g)
    local = w.t_dphi(g) / phi
    diag = {"lower_order": float(order.min()), "local_order": float(local.min())}
    if order.min() > 0.05 and local.min() > 0.05:
        return ConditionVerdict("pass", (), diag)
    if local[-1] < 0.01:
        return ConditionVerdict("fail", (float(g[-1]),), diag)
    return ConditionVerdict("inconclusive", (), diag)


def _check_vii(w, grid):
    m = _top(grid)
    g = grid[m]
    c = w.t_dphi(g) + w.t2_d2phi(g)
    diag = {"min": float(c.min()), "last": float(c[-1])}
    bad = np.nonzero(c <= 0)[0]
    if bad.size:
        return ConditionVerdict("fail", (float(g[bad[0]]),), diag)
    if c[-1] < 0.1 * c[0]:
        return ConditionVerdict("inconclusive", (), diag)
    return ConditionVerdict("pass", (), diag)


def _check_profile(w, grid, which, cfg):
    from .poisson import QProfile
    prof = QProfile(w, cfg)
    y = grid
    q = np.array([prof.q(v) for v in y])
    q1 = np.array([prof.derivative(v, 1) for v in y])
    q2 = np.array([prof.derivative(v, 2, check=False) for v in y])
    q3 = np.array([prof.derivative(v, 3) for v in y])
    out = {}

    def mono(vals, sign, label, cid):
        d = sign * np.diff(vals)
        bad = np.nonzero(d <= 0)[0]
        if bad.size:
            return ConditionVerdict("fail", (float(y[bad[0] + 1]),), {label: float(vals[bad[0] + 1])})
        return None

    if "T51-a" in which:
        out["T51-a"] = mono(q, +1, "q", "a") or ConditionVerdict("pass", (), {"q_top": float(q[-1])})
    if "T51-b" in which:
        v = mono(q1, -1, "q1", "b")
        if v is None and np.any(q1 <= 0):
            v = ConditionVerdict("fail", (float(y[np.argmin(q1)]),), {"q1": float(q1.min())})
        out["T51-b"] = v or ConditionVerdict("pass", (), {"q1_top": float(q1[-1])})
    if "T51-c" in which:
        v = mono(q2, +1, "q2", "c")
        if v is None and np.any(q2 >= 0):
            v = ConditionVerdict("fail", (float(y[np.argmax(q2)]),), {"q2": float(q2.max())})
        out["T51-c"] = v or ConditionVerdict("pass", (), {"q2_top": float(q2[-1])})
    if "T51-d" in which:
        out["T51-d"] = _trend(y * y * np.abs(q2), y, "y2_q2")
    if "T51-e" in which:
        bad = np.nonzero(q3 <= 0)[0]
        if bad.size:
            out["T51-e"] = ConditionVerdict("fail", (float(y[bad[0]]),), {"q3": float(q3[bad[0]])})
        else:
            v = _trend(np.abs(q2) ** 1.5 / q3, y, "q2_32_over_q3")
            if w.family in ("table", "majorant") and v.verdict == "pass":
                v = ConditionVerdict("inconclusive", (), v.diagnostics)
            out["T51-e"] = v
    return out


def _check_majorant(maj, grid, which):
    xi = np.sort(1.0 / grid)
    out = {}
    m = maj.m(xi)
    if "2.7" in which:
        lm = lambda v: np.log(np.maximum(maj.m(np.exp(v)), 1e-300)) * np.exp(v)
        lo = math.log(xi[0])
        edges = np.arange(0.0, lo - 1e-9, -math.log(10))
        inc = np.array([abs(gk15(lm, b - math.log(10), b, rel_tol=1e-8).value) for b in edges])
        ratio = inc[-1] / inc[-2] if inc.size >= 2 and inc[-2] > 0 else np.nan
        diag = {"last_decade": float(inc[-1]), "ratio": float(ratio)}
        if np.any(m <= 0):
            out["2.7"] = ConditionVerdict("fail", (float(xi[np.argmin(m)]),), diag)
        elif ratio < 0.5:
            out["2.7"] = ConditionVerdict("pass", (), diag)
        elif ratio >= 1:
            out["2.7"] = ConditionVerdict("fail", (float(xi[0]),), diag)
        else:
            out["2.7"] = ConditionVerdict("inconclusive", (), diag)
    if "2.9" in which:
        with np.errstate(divide="ignore"):
            r = m / np.log(1.0 / xi)
        small = xi <= xi[0] * 100
        v = r[small][::-1]  # increasing ξ → decreasing order toward 0
        diag = {"m_over_log": (float(v[0]), float(v[-1]))}
        if np.all(np.diff(v) > 0):
            out["2.9"] = ConditionVerdict("pass", (), diag)
        elif np.all(np.diff(v) <= 0):
            out["2.9"] = ConditionVerdict("fail", (float(xi[0]),), diag)
        else:
            out["2.9"] = ConditionVerdict("inconclusive", (), diag)
    if "N" in which:
        s = np.linspace(0.0, -math.log(xi[0]), 401)
        ms = maj.m(np.exp(-s))
        d2s = ms[:-2] - 2 * ms[1:-1] + ms[2:]
        x = np.linspace(xi[0], 1.0 - 1e-9, 2001)
        mx = maj.m(x)
        sl = np.diff(mx) / np.diff(x)
        tol = 1e-9
        bad_s = np.nonzero(d2s < -tol * np.maximum(1.0, np.abs(ms[1:-1])))[0]
        bad_x = np.nonzero(np.diff(sl) < -tol * np.maximum(1.0, np.abs(sl[1:])))[0]
        if bad_s.size:
            out["N"] = ConditionVerdict("fail", (float(np.exp(-s[bad_s[0] + 1])),), {"curve": "log-ξ"})
        elif bad_x.size:
            out["N"] = ConditionVerdict("fail", (float(x[bad_x[0] + 1]),), {"curve": "ξ"})
        else:
            out["N"] = ConditionVerdict("pass", (), {})
    return out


def check_conditions(w, which: Optional[Iterable[str]] = None, grid=None, *,
                     cfg: Optional[QuadratureConfig] = None) -> ConditionReport:
    """Heuristic numerical audit of the standing hypotheses.

    ``w`` is a :class:`LogWeight` (ids ``i``..``vii`` and the profile trends
    ``T51-a``..``T51-e``) or a :class:`Majorant` (ids ``2.7`` integrability of
    ``log log m``, ``2.9`` unbounded ``ξ^N m``, ``N`` convexity).  ``grid`` is a log-spaced grid of
    ``t`` (for majorants ``ξ = 1/t``) spanning at least four decades.
    Verdicts: ``pass`` when the trend holds over the top two decades, ``fail``
    with a witness when violated, ``inconclusive`` otherwise.
    """
    cfg = cfg or QuadratureConfig(rel_tol=1e-9)
    grid = np.logspace(0, 8, 81) if grid is None else np.sort(np.asarray(grid, dtype=float))
    if grid[0] <= 0 or grid[-1] / grid[0] < 1e4 * (1 - 1e-12):
        raise DomainError("condition grid must be positive and span >= 4 decades")
    is_maj = isinstance(w, Majorant)
    default = MAJORANT_CONDITIONS if is_maj else WEIGHT_CONDITIONS + PROFILE_CONDITIONS
    which = tuple(default if which is None else which)
    unknown = set(which) - set(ALL_CONDITIONS)
    if unknown:
        raise DomainError(f"unknown condition ids {sorted(unknown)}")
    verdicts = {}
    if is_maj:
        verdicts.update(_check_majorant(w, grid, [c for c in which if c in MAJORANT_CONDITIONS]))
        for c in which:
            verdicts.setdefault(c, ConditionVerdict("inconclusive", (), {"reason": "not a weight condition"}))
        return ConditionReport({c: verdicts[c] for c in which})
    checks = {"i": _check_i, "ii": _check_ii, "iii": _check_iii, "iv-a": _check_iva,
              "iv-b": _check_ivb, "vi": _check_vi}
    for cid in which:
        try:
            if cid in checks:
                verdicts[cid] = checks[cid](w, grid)
            elif cid == "v":
                verdicts[cid] = _check_v(w, grid, cfg)
            elif cid == "vii":
                verdicts[cid] = _check_vii(w, grid)
        except (PrecisionError, CapabilityError, EvaluationError) as exc:
            verdicts[cid] = ConditionVerdict("inconclusive", (), {"error": str(exc)})
    prof_ids = [c for c in which if c in PROFILE_CONDITIONS]
    if prof_ids:
        if verdicts.get("iii", ConditionVerdict("pass")).verdict == "fail":
            for c in prof_ids:
                verdicts[c] = ConditionVerdict("inconclusive", (), {"reason": "(iii) failed"})
        else:
            try:
                verdicts.update(_check_profile(w, grid, prof_ids, cfg))
            except (PrecisionError, CapabilityError, EvaluationError) as exc:
                for c in prof_ids:
                    verdicts[c] = ConditionVerdict("inconclusive", (), {"error": str(exc)})
    for c in which:
        verdicts.setdefault(c, ConditionVerdict("inconclusive", (), {"reason": "not a weight condition"}))
    return ConditionReport({c: verdicts[c] for c in which})
