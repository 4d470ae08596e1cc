"""Application pipelines: depth of zero, polynomial distance, majorant bound.

Every asymptotic output is leading order only; unknown ``(1+o(1))`` factors
and additive ``O(log Q)`` corrections are never added.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, RefusalError
from .legendre import legendre_point, legendre_point_star
from .poisson import QProfile, profile_for
from .quadrature import QuadratureConfig
from .transforms import ComplexLogW, fourier_inverse_oracle
from .weights import (ConditionReport, DCSequence, LogWeight, Majorant, check_conditions,
                      majorant_weight, sequence_weight)

log = logging.getLogger(__name__)

LOG_SQRT_2PI = 0.5 * math.log(2 * math.pi)


@dataclass(frozen=True)
class TaylorBound:
    log_value: float
    n: int
    truncated: bool


def taylor_bound(seq: DCSequence, s: float) -> TaylorBound:
    """``log min_{0<=n<=n_max} M_n s^n / n!``; flags a minimum at ``n_max``."""
    if not s > 0:
        raise DomainError("s must be positive")
    n = np.arange(seq.n_max + 1)
    vals = seq.log_m + n * math.log(s) - gammaln(n + 1)
    j = int(np.argmin(vals))
    return TaylorBound(float(vals[j]), j, j == seq.n_max)


@dataclass(frozen=True)
class DepthReport:
    s: float
    logQ_asym: float
    taylor_log: float = math.nan
    sandwich_lo_log: float = math.nan
    sandwich_hi_log: float = math.nan
    bang_c: float = math.nan
    Q: float = math.nan
    y_s: float = math.nan
    taylor_truncated: bool = False

    def row(self):
        return [self.s, self.logQ_asym, self.taylor_log, self.sandwich_lo_log,
                self.sandwich_hi_log, self.bang_c]


def _sandwich(prof, s, y_cap):
    clw = ComplexLogW(prof)
    rho1 = fourier_inverse_oracle(clw, 1.0, s, y_cap=y_cap).value.log_abs
    rho_inf = fourier_inverse_oracle(clw, math.inf, s, y_cap=y_cap).value.log_abs
    lo = LOG_SQRT_2PI + rho1
    hi = 1.0 - LOG_SQRT_2PI + math.log(s) + rho_inf
    return lo, hi


def _report(prof, s, *, with_oracle, y_cap, taylor=None, beta=None):
    pt = legendre_point(prof, s, y_cap=y_cap)
    lo = hi = math.nan
    if with_oracle:
        lo, hi = _sandwich(prof, s, y_cap)
    c = s ** (1.0 / beta) * math.log(pt.Q) if beta is not None and pt.Q > 0 else math.nan
    return DepthReport(
        float(s), -pt.Q,
        taylor.log_value if taylor else math.nan, lo, hi, c, pt.Q, pt.y_s,
        taylor.truncated if taylor else False)


def depth_of_zero(seq: DCSequence, s: float, with_oracle: bool = False, *,
                  prof: Optional[QProfile] = None, y_cap: float = 1e12,
                  conditions: Optional[ConditionReport] = None) -> DepthReport:
    """Leading-order ``log δ(s) ≈ -Q(s)`` for a sequence ``M_n``.

    Refuses quasianalytic sequences, detected by condition (iii) failing on
    the Ostrowski weight.  ``prof`` may carry a pre-built profile (and its
    memo) across an ``s`` sweep.
    """
    if not s > 0:
        raise DomainError("s must be positive")
    if prof is None:
        prof = profile_for(sequence_weight(seq))
    report = conditions or check_conditions(prof.weight, which=("iii",))
    if report.verdict("iii") == "fail":
        raise RefusalError(f"sequence {seq.name} looks quasianalytic: condition (iii) fails",
                           report)
    beta = None
    if seq.generator is not None and seq.generator.name == "bang":
        beta = seq.generator.params["beta"]
    return _report(prof, s, with_oracle=with_oracle, y_cap=y_cap,
                   taylor=taylor_bound(seq, s), beta=beta)


def poly_distance(w: LogWeight, s: float, with_oracle: bool = False, *,
                  prof: Optional[QProfile] = None, y_cap: float = 1e12,
                  conditions: Optional[ConditionReport] = None) -> DepthReport:
    """Leading-order ``log d_T(s) ≈ -Q(s)`` for ``T = e^φ``.

    Requires (i)-(iii) and one of (iv-a), (iv-b) not to fail.
    """
    if not s > 0:
        raise DomainError("s must be positive")
    report = conditions or check_conditions(w, which=("i", "ii", "iii", "iv-a", "iv-b"))
    if not report.weight_ok():
        raise RefusalError(f"weight {w.describe()} fails {report.failed()}", report)
    prof = prof or profile_for(w)
    return _report(prof, s, with_oracle=with_oracle, y_cap=y_cap)


@dataclass(frozen=True)
class MajorantReport:
    s: float
    logMstar_asym: float
    Qstar_sandwich: tuple
    Qstar: float
    y_s: float
    conditions: ConditionReport

    @property
    def ordered(self) -> bool:
        lo, hi = self.Qstar_sandwich
        return lo <= self.Qstar <= hi

    def row(self):
        lo, hi = self.Qstar_sandwich
        return [self.s, self.logMstar_asym, math.nan, lo, hi, math.nan]


def majorant_profile(maj: Majorant, *, quad: Optional[QuadratureConfig] = None) -> QProfile:
    return profile_for(majorant_weight(maj), quad)


def ls_majorant(maj: Majorant, s: float, *, prof: Optional[QProfile] = None,
                conditions: Optional[ConditionReport] = None,
                y_cap: float = 1e12) -> MajorantReport:
    """Leading-order ``log M*(s) ≈ Q(s)`` with the ``Q*`` sandwich.

    Refuses majorants failing the convexity check ``N``.
    """
    if not s > 0:
        raise DomainError("s must be positive")
    report = conditions or check_conditions(maj)
    if "N" in report and report.verdict("N") == "fail":
        raise RefusalError(f"majorant {maj.name} fails the convexity check N", report)
    prof = prof or majorant_profile(maj)
    pt = legendre_point(prof, s, y_cap=y_cap)
    star = legendre_point_star(prof, s, point=pt, strict=False)
    return MajorantReport(float(s), pt.Q, (star.sandwich_lo, pt.Q), star.Qstar, pt.y_s, report)


def write_apps_csv(rows, fh) -> None:
    """``s, logQ_asym, taylor_log, lo_log, hi_log, bang_c``."""
    wr = csv.writer(fh, lineterminator="\n")
    wr.writerow(["s", "logQ_asym", "taylor_log", "lo_log", "hi_log", "bang_c"])
    for r in rows:
        wr.writerow([f"{v:.17g}" for v in r])
