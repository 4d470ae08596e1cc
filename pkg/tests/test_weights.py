import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zerodepth.errors import CapabilityError, DataFormatError, DomainError, EvaluationError
from zerodepth.weights import (DCSequence, EnvelopeWeight, Majorant, PowerWeight,
                               SyntheticWeight, TableWeight, check_conditions, eval_weight,
                               lower_legendre_phi, majorant_weight, ostrowski_phi,
                               sequence_weight, table_generator)


def brute_ostrowski(log_m, t):
    vals = [n * math.log(t) - lm for n, lm in enumerate(log_m)]
    best = max(vals)
    return best, vals.index(best)


def factorial_logs(n_max, k=1):
    return [k * math.lgamma(n + 1) for n in range(n_max + 1)]


# -------------------------------------------------------------- eval_weight
def test_power_values():
    w = PowerWeight(0.5)
    assert eval_weight(w, 4.0) == pytest.approx(2.0, rel=1e-15)
    assert eval_weight(w, 100.0, 1) == pytest.approx(0.05, rel=1e-15)
    assert eval_weight(w, 100.0, 2) == pytest.approx(-0.25 * 100 ** -1.5, rel=1e-14)


def test_evenness_and_zero():
    w = PowerWeight(0.3)
    t = np.array([0.5, 2.0, 30.0])
    np.testing.assert_array_equal(w.phi(-t), w.phi(t))
    assert w.phi(0.0) == 0.0


def test_eval_weight_errors():
    w = PowerWeight(0.5)
    with pytest.raises(DomainError):
        eval_weight(w, 0.0)
    with pytest.raises(DomainError):
        eval_weight(w, -1.0)
    with pytest.raises(DomainError):
        eval_weight(w, 1.0, 3)
    lin = SyntheticWeight(lambda t: t, lambda t: np.ones_like(t))
    assert eval_weight(lin, 2.0, 1) == 1.0
    with pytest.raises(CapabilityError):
        eval_weight(lin, 2.0, 2)


def test_power_rejects_bad_parameters():
    with pytest.raises(DomainError):
        PowerWeight(0.0)
    with pytest.raises(DomainError):
        PowerWeight(0.5, scale=-1)


def test_sequence_weight_matches_brute_force():
    # (n!)^2 at t = 100, brute force over n <= 1000
    lm = factorial_logs(1000, 2)
    best, _ = brute_ostrowski(lm, 100.0)
    assert best == pytest.approx(15.8429, abs=5e-5)
    seq = DCSequence.factorial_power(2.0)
    # the continuous envelope dominates the integer supremum, by less than
    # one step of the max
    env = eval_weight(sequence_weight(seq), 100.0)
    assert best <= env <= best + 0.5


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(0.05, 0.95), t=st.floats(1.0, 1e4))
def test_power_derivatives_match_finite_differences(alpha, t):
    w = PowerWeight(alpha)
    h = t * 1e-4
    fd1 = (eval_weight(w, t + h) - eval_weight(w, t - h)) / (2 * h)
    fd2 = (eval_weight(w, t + h, 1) - eval_weight(w, t - h, 1)) / (2 * h)
    assert eval_weight(w, t, 1) == pytest.approx(fd1, rel=1e-6)
    assert eval_weight(w, t, 2) == pytest.approx(fd2, rel=1e-6)


@pytest.mark.parametrize("k", [1.0, 2.0])
def test_envelope_derivatives_consistent(k):
    w = sequence_weight(DCSequence.factorial_power(k))
    for t in np.logspace(0.5, 8, 9):
        h = t * 1e-5
        fd1 = (eval_weight(w, t + h) - eval_weight(w, t - h)) / (2 * h)
        fd2 = (eval_weight(w, t + h, 1) - eval_weight(w, t - h, 1)) / (2 * h)
        assert eval_weight(w, t, 1) == pytest.approx(fd1, rel=1e-4)
        assert eval_weight(w, t, 2) == pytest.approx(fd2, rel=1e-4)


# -------------------------------------------------------------- ostrowski
def test_ostrowski_examples():
    fact = DCSequence(np.array(factorial_logs(100)))
    v = ostrowski_phi(fact, 1.0)
    assert v.value == 0.0 and v.n == 0 and not v.truncated
    v = ostrowski_phi(fact, math.e)
    assert v.value == pytest.approx(1.3069, abs=5e-5)
    assert v.n == 2
    sq = DCSequence(np.array(factorial_logs(1000, 2)))
    v = ostrowski_phi(sq, 100.0)
    assert v.value == pytest.approx(15.8429, abs=5e-5)
    assert v.n in (9, 10)


def test_ostrowski_flags_truncation():
    seq = DCSequence(np.zeros(11))  # M_n = 1: supremum runs off to n_max
    v = ostrowski_phi(seq, 5.0)
    assert v.truncated and v.n == 10
    with pytest.raises(DomainError):
        ostrowski_phi(seq, 0.0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.01, 1e6), min_size=1, max_size=20))
def test_ostrowski_equals_brute_force(ts):
    lm = factorial_logs(60, 1.5)
    seq = DCSequence(np.array(lm))
    got = ostrowski_phi(seq, np.array(ts))
    for t, val in zip(ts, got.value):
        best, _ = brute_ostrowski(lm, t)
        assert val == pytest.approx(best, rel=1e-12, abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-300, 1200), min_size=3, max_size=30, unique=True))
def test_ostrowski_nondecreasing_and_convex_in_log_t(ks):
    # τ on a 0.01 lattice so chord slopes are not dominated by rounding
    seq = DCSequence.factorial_power(2.0, n_max=300)
    tau = np.sort(np.array(ks)) / 100.0
    phi = ostrowski_phi(seq, np.exp(tau)).value
    assert np.all(np.diff(phi) >= -1e-12)
    # convexity: slopes of consecutive chords do not decrease
    sl = np.diff(phi) / np.diff(tau)
    assert np.all(np.diff(sl) >= -1e-9 * (1 + np.abs(sl[1:])))


# -------------------------------------------------------------- sequences
def test_sequence_file_roundtrip(tmp_path):
    seq = DCSequence.factorial_power(2.0, n_max=50)
    path = tmp_path / "m.txt"
    seq.to_file(path)
    back = DCSequence.from_file(path)
    np.testing.assert_array_equal(back.log_m, seq.log_m)
    assert back.n_max == 50


def test_sequence_file_errors(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("# header\n0\n1.5\nabc\n")
    with pytest.raises(DataFormatError):
        DCSequence.from_file(bad)
    short = tmp_path / "short.txt"
    short.write_text("0\n1\n")
    with pytest.raises(DataFormatError):
        DCSequence.from_file(short)
    with pytest.raises(DataFormatError):
        DCSequence(np.array([0.0, 1.0, np.inf]))


def test_bang_table_small_indices_zero():
    seq = DCSequence.bang(1.0, n_max=20)
    assert np.all(seq.log_m[:3] == 0)
    n = 10
    assert seq.log_m[n] == pytest.approx(math.lgamma(n + 1) + 2 * n * math.log(math.log(n)))


def test_table_generator_tracks_exact_generator():
    # (n!)^2 from a bare table vs the analytic real-index generator
    lm = np.array(factorial_logs(200, 2))
    w_tab = sequence_weight(DCSequence(lm))
    w_gen = sequence_weight(DCSequence.factorial_power(2.0, n_max=200))
    t = np.logspace(1, 8, 15)
    ost = ostrowski_phi(DCSequence(lm), t)
    inside = ~ost.truncated
    assert inside.sum() >= 7
    # inside the table the envelope follows the discrete supremum closely
    assert np.all(np.abs(w_tab.phi(t) - ost.value)[inside] <= 0.1)
    # past n_max the table has no data; the extrapolated slope stays near
    # the analytic one
    np.testing.assert_allclose(w_tab.phi(t), w_gen.phi(t), rtol=0.02)


def test_table_generator_requires_unit_m0():
    with pytest.raises(DataFormatError):
        table_generator(DCSequence(np.array([1.0, 2.0, 4.0, 7.0])))


def test_table_generator_convex_slope():
    gen = table_generator(DCSequence(np.array(factorial_logs(100, 2))))
    n = np.linspace(0, 300, 601)
    assert np.all(np.diff(gen.L1(n)) > 0)
    assert gen.L(np.array([0.0]))[0] == pytest.approx(0.0, abs=1e-14)


def test_envelope_argmax_solves_slope_equation():
    gen_w = sequence_weight(DCSequence.factorial_power(1.0))
    assert isinstance(gen_w, EnvelopeWeight)
    tau = np.array([1.0, 3.0, 10.0])
    n = gen_w.argmax_n(tau)
    np.testing.assert_allclose(gen_w.gen.L1(n), tau, rtol=1e-13)


# -------------------------------------------------------------- table weight
def test_table_weight_reproduces_smooth_function():
    t = np.logspace(-2, 6, 200)
    w = TableWeight(t, np.sqrt(t))
    tt = np.logspace(-1, 5, 13)
    np.testing.assert_allclose(w.phi(tt), np.sqrt(tt), rtol=1e-6)
    np.testing.assert_allclose(w.dphi(tt), 0.5 / np.sqrt(tt), rtol=1e-4)
    # power-law continuation past the table
    assert eval_weight(w, 1e8) == pytest.approx(1e4, rel=1e-3)


def test_table_weight_validation():
    with pytest.raises(DataFormatError):
        TableWeight([1, 2, 3], [1, 2, 3])
    with pytest.raises(DataFormatError):
        TableWeight([1, 3, 2, 4], [1, 2, 3, 4])


# -------------------------------------------------------------- majorants
def test_lower_legendre_examples():
    maj = Majorant.inv_power(1.0)
    v = lower_legendre_phi(maj, 1.0)
    assert v.value == pytest.approx(2.0, rel=1e-10)
    assert v.xi == pytest.approx(1.0, rel=1e-5)
    v = lower_legendre_phi(maj, 100.0)
    assert v.value == pytest.approx(20.0, rel=1e-10)
    assert v.xi == pytest.approx(0.1, rel=1e-5)
    flat = Majorant(lambda x: np.full_like(x, 3.0), name="flat")
    v = lower_legendre_phi(flat, 1.0)
    assert v.value == pytest.approx(3.0, abs=1e-12)
    assert v.xi < 1e-100


def test_lower_legendre_cap_at_one():
    # for r < 1 the unconstrained minimizer 1/√r exceeds 1, so the infimum
    # sits on the boundary ξ = 1 where the cap m(1-0) takes over
    v = lower_legendre_phi(Majorant.inv_power(1.0), 0.25)
    assert v.value == pytest.approx(1.25, rel=1e-12)
    assert v.xi == pytest.approx(1.0)


def test_lower_legendre_errors():
    with pytest.raises(DomainError):
        lower_legendre_phi(Majorant.inv_power(1.0), 0.0)
    bad = Majorant(lambda x: np.full_like(x, np.nan))
    with pytest.raises(EvaluationError):
        lower_legendre_phi(bad, 1.0)


@settings(max_examples=30, deadline=None)
@given(beta=st.sampled_from([0.5, 1.0, 2.0]), r=st.floats(1.0, 1e8))
def test_lower_legendre_inv_power_closed_form(beta, r):
    # inf_ξ ξ^{-β} + rξ at ξ = (β/r)^{1/(β+1)} (interior when r >= β)
    v = lower_legendre_phi(Majorant.inv_power(beta), r).value
    xi = (beta / r) ** (1 / (beta + 1))
    exact = xi ** -beta + r * xi if xi < 1 else 1 + r
    assert v == pytest.approx(min(exact, 1 + r), rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(0.01, 1e6), min_size=3, max_size=15, unique=True))
def test_lower_legendre_concave_nondecreasing(rs):
    r = np.sort(np.array(rs))
    v = lower_legendre_phi(Majorant.inv_power(1.0), r).value
    assert np.all(np.diff(v) >= -1e-10 * v[1:])
    sl = np.diff(v) / np.diff(r)
    assert np.all(np.diff(sl) <= 1e-8 * (1 + np.abs(sl[1:])))


@settings(max_examples=20, deadline=None)
@given(r=st.floats(0.1, 1e6), xi=st.floats(1e-6, 0.999))
def test_lower_legendre_is_lower_bound(r, xi):
    maj = Majorant.inv_power(1.0)
    assert lower_legendre_phi(maj, r).value <= float(maj.m(xi)) + r * xi + 1e-9


def test_majorant_weight_sqrt():
    w = majorant_weight(Majorant.inv_power(1.0))
    t = np.logspace(0, 10, 11)
    np.testing.assert_allclose(w.phi(t), 2 * np.sqrt(t), rtol=1e-6)


def test_majorant_parse_and_csv(tmp_path):
    m = Majorant.parse("inv-power:2")
    assert float(m.m(0.5)) == pytest.approx(4.0)
    assert float(m.m(2.0)) == pytest.approx(1.0)  # capped at ξ = 1
    path = tmp_path / "maj.csv"
    xi = np.logspace(-6, 0, 50)
    np.savetxt(path, np.column_stack([xi, 1 / xi]), delimiter=",")
    tab = Majorant.parse(str(path))
    assert float(tab.m(xi[20])) == pytest.approx(1 / xi[20], rel=1e-12)
    # linear in log ξ between rows
    assert float(tab.m(1e-3)) == pytest.approx(1e3, rel=0.02)
    with pytest.raises(DataFormatError):
        Majorant.parse("no-such-family")


# -------------------------------------------------------------- conditions
@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.7])
def test_power_passes_all_conditions(alpha):
    rep = check_conditions(PowerWeight(alpha),
                           which=("i", "ii", "iii", "iv-a", "iv-b", "v", "vi"))
    assert not rep.failed()
    for cid in ("i", "ii", "iii", "iv-a", "iv-b", "v", "vi"):
        assert rep.verdict(cid) == "pass", cid


def test_power_condition_v_ratio_increases():
    rep = check_conditions(PowerWeight(0.5), which=("v",))
    lo, hi = rep["v"].diagnostics["ratio"]
    # ratio = 0.5·2.5^{2/3}·t^{1/6} over the top two decades
    assert hi / lo == pytest.approx(100 ** (1 / 6), rel=1e-6)


def test_linear_weight_fails_integrability():
    lin = SyntheticWeight(lambda t: t, lambda t: np.ones_like(t),
                          lambda t: np.zeros_like(t), name="linear")
    rep = check_conditions(lin, which=("iii",))
    assert rep.verdict("iii") == "fail"
    assert rep["iii"].witness


def test_factorial_sequence_is_quasianalytic():
    w = sequence_weight(DCSequence.factorial_power(1.0))
    rep = check_conditions(w, which=("iii",))
    assert rep.verdict("iii") == "fail"


def test_majorant_conditions():
    rep = check_conditions(Majorant.inv_power(1.0))
    for cid in ("2.7", "2.9", "N"):
        assert rep.verdict(cid) == "pass", cid


def test_condition_report_contract():
    rep = check_conditions(PowerWeight(0.5), which=("i", "iii"))
    assert list(rep.verdicts) == ["i", "iii"]
    with pytest.raises(DomainError):
        check_conditions(PowerWeight(0.5), which=("bogus",))
    with pytest.raises(DomainError):
        check_conditions(PowerWeight(0.5), grid=np.logspace(0, 2, 10))
    assert rep.weight_ok()
