import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gammaln

from zerodepth.applications import (depth_of_zero, ls_majorant, majorant_profile,
                                    poly_distance, taylor_bound, write_apps_csv)
from zerodepth.errors import DomainError, RefusalError
from zerodepth.weights import DCSequence, Majorant, PowerWeight, check_conditions


def brute_taylor(log_m, s):
    return min(lm + n * math.log(s) - math.lgamma(n + 1) for n, lm in enumerate(log_m))


def test_taylor_factorial_squared(fact2_seq):
    tb = taylor_bound(fact2_seq, 0.1)
    assert tb.log_value == pytest.approx(math.log(3.6288e-4), abs=1e-4)
    assert tb.log_value == pytest.approx(-7.921, abs=5e-4)
    assert tb.n in (9, 10)
    assert not tb.truncated
    # n = 9 and n = 10 tie exactly: 10!·0.1^10 = 9!·0.1^9
    assert gammaln(11) + 10 * math.log(0.1) == pytest.approx(gammaln(10) + 9 * math.log(0.1))


def test_taylor_truncation_flags():
    ones = DCSequence(np.zeros(201), name="ones")
    tb = taylor_bound(ones, 1.0)
    assert tb.truncated and tb.n == 200
    assert tb.log_value == pytest.approx(-math.lgamma(201))
    fact = DCSequence.factorial_power(1.0, n_max=300)
    tb = taylor_bound(fact, 0.5)
    assert tb.truncated and tb.log_value == pytest.approx(300 * math.log(0.5), rel=1e-9)
    with pytest.raises(DomainError):
        taylor_bound(fact, 0.0)


@settings(max_examples=40)
@given(log_m=st.lists(st.floats(-50, 50), min_size=3, max_size=40), ls=st.floats(-4, 1))
def test_taylor_matches_brute_force(log_m, ls):
    s = 10.0 ** ls
    seq = DCSequence(np.array(log_m))
    assert taylor_bound(seq, s).log_value == pytest.approx(brute_taylor(log_m, s), abs=1e-9)


def test_depth_refuses_quasianalytic():
    with pytest.raises(RefusalError) as exc:
        depth_of_zero(DCSequence.factorial_power(1.0, n_max=400), 0.1)
    assert exc.value.report.verdict("iii") == "fail"
    with pytest.raises(DomainError):
        depth_of_zero(DCSequence.factorial_power(2.0, n_max=50), -1.0)


@pytest.mark.parametrize("s", [0.1, 0.05, 0.02, 0.01])
def test_depth_sharper_than_taylor(fact2_seq, fact2_prof, s):
    r = depth_of_zero(fact2_seq, s, prof=fact2_prof)
    assert r.logQ_asym == -r.Q
    assert r.logQ_asym <= r.taylor_log
    assert math.isnan(r.bang_c) and math.isnan(r.sandwich_lo_log)


def test_depth_scaling_factorial_squared(fact2_seq, fact2_prof):
    # φ ≈ 2√t for (n!)², so Q(s)·s → 2
    prod = [depth_of_zero(fact2_seq, s, prof=fact2_prof).Q * s for s in (1e-1, 1e-2, 1e-3)]
    gaps = np.abs(np.array(prod) - 2)
    assert np.all(np.diff(gaps) < 0)
    assert gaps[-1] < 0.02 * 2


def test_depth_taylor_visibly_weaker(fact2_seq, fact2_prof):
    r = depth_of_zero(fact2_seq, 0.1, prof=fact2_prof)
    assert r.taylor_log == pytest.approx(-7.92, abs=5e-3)
    assert r.logQ_asym < 1.5 * r.taylor_log


def test_poly_distance_examples():
    w = PowerWeight(0.5)
    assert poly_distance(w, 0.01).logQ_asym == pytest.approx(-50.0, rel=1e-10)
    assert poly_distance(w, 0.001).logQ_asym == pytest.approx(-500.0, rel=1e-10)


@pytest.mark.parametrize("s", [0.1, 0.01])
def test_poly_distance_sandwich(s):
    r = poly_distance(PowerWeight(0.5), s, with_oracle=True)
    band = 2 * math.log(r.Q) + 10
    assert r.sandwich_lo_log <= r.sandwich_hi_log
    assert r.sandwich_lo_log - band <= r.logQ_asym <= r.sandwich_hi_log + band
    # the oracle endpoints themselves straddle -Q here
    assert r.sandwich_lo_log <= r.logQ_asym <= r.sandwich_hi_log
    assert r.sandwich_hi_log - r.sandwich_lo_log <= band


def test_poly_distance_refuses_bad_weight():
    class Linear(PowerWeight):
        def __init__(self):
            super().__init__(0.5)

        def phi(self, t):
            return np.abs(np.asarray(t, dtype=float))

        def dphi(self, t):
            return np.ones_like(np.asarray(t, dtype=float))

        def d2phi(self, t):
            return np.zeros_like(np.asarray(t, dtype=float))

    with pytest.raises(RefusalError):
        poly_distance(Linear(), 0.01)


@pytest.fixture(scope="module")
def inv1():
    maj = Majorant.inv_power(1.0)
    return maj, majorant_profile(maj), check_conditions(maj)


def test_ls_majorant_examples(inv1):
    maj, prof, cond = inv1
    r = ls_majorant(maj, 0.01, prof=prof, conditions=cond)
    assert r.logMstar_asym == pytest.approx(200.0, rel=1e-6)
    assert r.y_s == pytest.approx(2e4, rel=1e-6)
    lo, hi = r.Qstar_sandwich
    assert lo == pytest.approx(200 - 2 * math.log1p(2e4), rel=1e-6)
    assert hi == r.logMstar_asym
    assert r.ordered
    assert ls_majorant(maj, 0.1, prof=prof, conditions=cond).logMstar_asym == pytest.approx(20.0, rel=1e-4)


def test_ls_majorant_scaling(inv1):
    maj, prof, cond = inv1
    for s in np.logspace(-3, -1, 5):
        assert ls_majorant(maj, s, prof=prof, conditions=cond).logMstar_asym * s == pytest.approx(2.0, rel=0.02)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
def test_majorant_round_trip(beta):
    # inf_ξ [ξ^-β + rξ] = C r^a with a = β/(β+1), C = (β+1) β^-a; then the
    # power-weight closed forms give Q
    maj = Majorant.inv_power(beta)
    a = beta / (beta + 1)
    c = (beta + 1) * beta ** -a / math.cos(math.pi * a / 2)
    prof = majorant_profile(maj)
    cond = check_conditions(maj)
    for s in (1e-2, 1e-3):
        ys = (c * a / s) ** (1 / (1 - a))
        ref = c * ys ** a * (1 - a)
        assert ls_majorant(maj, s, prof=prof, conditions=cond).logMstar_asym == pytest.approx(ref, rel=0.01)


def test_ls_majorant_refuses_nonconvex():
    # m(e^-u) = e^u (1 + 0.9 sin 3u) is not convex in u
    wavy = Majorant(lambda x: (1 + 0.9 * np.sin(-3 * np.log(x))) / x, name="wavy")
    rep = check_conditions(wavy, which=("N",))
    assert rep.verdict("N") == "fail"
    with pytest.raises(RefusalError):
        ls_majorant(wavy, 0.01, conditions=rep)
    with pytest.raises(DomainError):
        ls_majorant(wavy, 0.0, conditions=rep)


def test_apps_csv(fact2_seq, fact2_prof):
    r = depth_of_zero(fact2_seq, 0.05, prof=fact2_prof)
    buf = io.StringIO()
    write_apps_csv([r.row()], buf)
    head, line = buf.getvalue().splitlines()
    assert head == "s,logQ_asym,taylor_log,lo_log,hi_log,bang_c"
    vals = [float(v) for v in line.split(",")]
    assert vals[:3] == pytest.approx([0.05, r.logQ_asym, r.taylor_log])
    assert all(math.isnan(v) for v in vals[3:])
