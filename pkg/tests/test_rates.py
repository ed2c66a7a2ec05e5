import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpimac import (CognitionCase, RatePoint, Scheme, UpperBoundParams,
                    design_ian_precoders, effective_channels, rate_ian, rate_joint_decoding,
                    rate_tdm, sample_channel, shannon, upper_bound, zero_forcing_direction)
from cpimac.dof import precoder_seed
from cpimac.precoding import transmit_vectors
from cpimac.rates import ian_cognitive_tx, scheme_rate

GRID_DB = [-10, 0, 10, 20, 40, 60, 80, 100]
CASES = [CognitionCase.parse(c) for c in ("1", "2", "3a", "3b", "4")]


def db(p):
    return 10 ** (p / 10)


def _ian(ch, P, seed=5, alpha=0.5, cognitive=2):
    pre = design_ian_precoders(ch, seed, P, alpha, cognitive)
    eff = effective_channels(ch, pre)
    return pre, eff, rate_ian(ch, pre, eff, P)


@pytest.mark.parametrize("x,want", [(0, 0.0), (1, 1.0), (3, 2.0)])
def test_shannon(x, want):
    assert shannon(x) == want


def test_shannon_rejects_negative():
    with pytest.raises(ValueError):
        shannon(-0.1)


@given(st.floats(0, 1e12), st.floats(0, 1e12))
def test_shannon_concave_monotone(x, y):
    assert shannon((x + y) / 2) >= (shannon(x) + shannon(y)) / 2 - 1e-12
    lo, hi = sorted((x, y))
    assert shannon(lo) <= shannon(hi)


def test_ratepoint_validates():
    with pytest.raises(ValueError):
        RatePoint(-1.0, 0.0, 0.0, Scheme.TDM)
    with pytest.raises(ValueError):
        RatePoint(float("nan"), 0.0, 0.0, Scheme.TDM)


def test_tdm_zero_power(seeded_channel):
    r = rate_tdm(seeded_channel, 0.0)
    assert (r.R1, r.R2, r.R3) == (0.0, 0.0, 0.0)


def test_tdm_unit_example(unit_channel):
    r = rate_tdm(unit_channel, 1.0)
    assert r.total == pytest.approx(0.5 * math.log2(3) + 0.5 * math.log2(5), abs=1e-12)
    assert r.total == pytest.approx(1.9534, abs=5e-5)


def test_tdm_mac_corner(seeded_channel):
    ch, P = seeded_channel, 100.0
    r = rate_tdm(ch, P)
    g2, g3 = ch.mag(2, 2) ** 2, ch.mag(3, 2) ** 2
    # x3 first, then x2 alone in its half slot
    assert r.R2 == pytest.approx(0.5 * math.log2(1 + 2 * g2 * P), rel=1e-12)
    assert r.R2 + r.R3 == pytest.approx(0.5 * math.log2(1 + 2 * P * (g2 + g3)), rel=1e-12)


def test_joint_zero_power(seeded_channel):
    assert rate_joint_decoding(seeded_channel, 0.0).total == 0.0


def test_joint_unit_example(unit_channel):
    r = rate_joint_decoding(unit_channel, 1.0)
    assert r.total == pytest.approx(2.0, abs=1e-12)
    assert r.R1 == pytest.approx(2 / 3)


def test_joint_sum_formula(seeded_channel):
    ch, P = seeded_channel, 50.0
    s = [sum(abs(ch.h(k, j)) ** 2 for k in (1, 2, 3)) for j in (1, 2)]
    assert rate_joint_decoding(ch, P).total == pytest.approx(math.log2(1 + P * min(s)))


def test_ian_zero_power(seeded_channel):
    _, _, r = _ian(seeded_channel, 0.0)
    assert (r.R1, r.R2, r.R3) == (0.0, 0.0, 0.0)


def test_ian_high_snr_r1_asymptote():
    ch, P = sample_channel(3), db(60)
    pre, eff, r = _ian(ch, P)
    assert min(r.R1, r.R2, r.R3) > 0
    q = zero_forcing_direction(eff)
    asym = 0.5 * math.log2(P * (q @ eff.d1) ** 2 * 2 * pre.p1 / P)
    assert abs(r.R1 - asym) < 1.0


def _real_cov(ch, pre, j, streams):
    """2x2 covariance of [Re Y_j; Im Y_j] from the given real streams, built by
    propagating unit symbols through the complex channel."""
    powers = (pre.p1, pre.p2, pre.p3)
    C = 0.5 * np.eye(2)
    for s in streams:
        x = np.zeros(3)
        x[s - 1] = 1.0
        X = transmit_vectors(pre, x)
        y = np.sum(ch.coeffs[:, j - 1] * (X[:, 0] + 1j * X[:, 1]))
        v = np.array([y.real, y.imag])
        C += powers[s - 1] * np.outer(v, v)
    return C


@pytest.mark.parametrize("cognitive", [2, 3])
@pytest.mark.parametrize("p_db", [0, 30, 60])
def test_ian_rates_match_covariance_oracle(seeded_channel, cognitive, p_db):
    ch, P = seeded_channel, db(p_db)
    pre, eff, r = _ian(ch, P, cognitive=cognitive)
    q = zero_forcing_direction(eff)
    # Rx1: projected signal-plus-noise over projected noise
    C_all = _real_cov(ch, pre, 1, (1, 2, 3))
    assert r.R1 == pytest.approx(0.5 * math.log2((q @ C_all @ q) / 0.5), rel=1e-9, abs=1e-12)
    # Rx2: log-det with every stream (x1 must contribute nothing)
    C2 = _real_cov(ch, pre, 2, (1, 2, 3))
    total = 0.5 * math.log2(np.linalg.det(C2) / 0.25)
    assert r.R2 + r.R3 == pytest.approx(total, rel=1e-9, abs=1e-12)
    # x3-first corner: x3 rate treats x2 as noise
    C2_no3 = _real_cov(ch, pre, 2, (2,))
    r3 = 0.5 * math.log2(np.linalg.det(C2) / np.linalg.det(C2_no3))
    assert r.R3 == pytest.approx(r3, rel=1e-8, abs=1e-10)


def test_ian_rejects_mismatched_power(seeded_channel):
    pre, eff, _ = _ian(seeded_channel, 10.0)
    with pytest.raises(ValueError):
        rate_ian(seeded_channel, pre, eff, 20.0)


def test_ian_invariant_under_rx1_rotation(seeded_channel):
    ch, P = seeded_channel, db(40)
    _, _, r0 = _ian(ch, P)
    _, _, r1 = _ian(ch.rotated_receiver(1, np.exp(1.3j)), P)
    for a, b in zip((r0.R1, r0.R2, r0.R3), (r1.R1, r1.R2, r1.R3)):
        assert a == pytest.approx(b, abs=1e-9)


def test_ian_case_dispatch():
    assert ian_cognitive_tx(CognitionCase.case3(3)) == 3
    assert ian_cognitive_tx(CognitionCase.case4()) == 2
    with pytest.raises(ValueError):
        ian_cognitive_tx(CognitionCase.case1())
    ch = sample_channel(4)
    r3 = scheme_rate("ian", CognitionCase.case3(2), ch, 1e6, precoder_seed=9)
    r4 = scheme_rate("ian", CognitionCase.case4(), ch, 1e6, precoder_seed=9)
    assert r3 == r4


def test_upper_bound_case1_unit_example(unit_channel):
    ub = upper_bound(CognitionCase.case1(), unit_channel, 1.0)
    assert ub == pytest.approx(2 + math.log2(1.5), abs=1e-12)
    assert ub == pytest.approx(2.585, abs=5e-4)


@pytest.mark.parametrize("case", CASES, ids=str)
def test_upper_bound_zero_power(case, seeded_channel):
    assert upper_bound(case, seeded_channel, 0.0) == 0.0


def test_upper_bound_case1_gaussian_oracle(seeded_channel):
    # independent route: entropies of jointly Gaussian outputs via covariances
    ch, P = seeded_channel, 37.0
    h2 = ch.coeffs[:, 1]
    mac_term = math.log2((1 + P * np.sum(np.abs(h2) ** 2)).real)
    hv = np.array([ch.h(1, 1), ch.h(1, 2)])
    cov = np.eye(2) + P * np.outer(hv, hv.conj())
    cond = np.linalg.det(cov).real / cov[1, 1].real
    assert upper_bound(CognitionCase.case1(), ch, P) == pytest.approx(
        mac_term + math.log2(cond), rel=1e-12)


def test_upper_bound_case3_pair_term():
    ch, P = sample_channel(17), 1e3
    m = lambda k, j: ch.mag(k, j)  # noqa: E731
    b12 = (shannon(P * (m(1, 1) ** 2 + m(2, 1) ** 2 + 2 * m(1, 1) * m(2, 1)))
           + shannon(m(2, 2) ** 2 * P / (1 + m(2, 1) ** 2 * P)))
    b13 = (shannon(P * ((m(1, 1) + m(2, 1)) ** 2 + m(3, 1) ** 2))
           + shannon(m(3, 2) ** 2 * P / (1 + m(3, 1) ** 2 * P)))
    b23 = shannon(P * (m(2, 2) ** 2 + m(3, 2) ** 2))
    assert upper_bound(CognitionCase.case3(2), ch, P) == pytest.approx(
        0.5 * (b12 + b13 + b23), rel=1e-12)


def test_upper_bound_case3b_mirrors_case3a():
    ch = sample_channel(8)
    assert upper_bound(CognitionCase.case3(3), ch, 1e5) == pytest.approx(
        upper_bound(CognitionCase.case3(2), ch.swapped_mac(), 1e5), rel=1e-12)


def test_upper_bound_correlation_params():
    ch, P = sample_channel(2), 1e4
    c2 = CognitionCase.case2()
    assert upper_bound(c2, ch, P, UpperBoundParams(0, 0)) == pytest.approx(
        upper_bound(CognitionCase.case1(), ch, P))
    assert upper_bound(c2, ch, P) > upper_bound(CognitionCase.case1(), ch, P)
    c3 = CognitionCase.case3(2)
    assert upper_bound(c3, ch, P, UpperBoundParams(rho12=0.2)) < upper_bound(c3, ch, P)
    # rho13 is irrelevant when Tx3 does not know m1
    assert upper_bound(c3, ch, P, UpperBoundParams(rho13=0.0)) == upper_bound(c3, ch, P)
    with pytest.raises(ValueError):
        UpperBoundParams(rho12=1.5)


def test_case4_bound_dominates_case3():
    for s in range(20):
        ch = sample_channel(s)
        assert upper_bound(CognitionCase.case4(), ch, 1e6) >= upper_bound(
            CognitionCase.case3(2), ch, 1e6)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_dominance(seed):
    ch = sample_channel(seed)
    ps = precoder_seed(seed)
    for p_db in GRID_DB:
        P = db(p_db)
        for case, schemes in ((CognitionCase.case1(), ("tdm", "joint")),
                              (CognitionCase.case2(), ("tdm", "joint")),
                              (CognitionCase.case3(2), ("tdm", "ian")),
                              (CognitionCase.case3(3), ("tdm", "ian")),
                              (CognitionCase.case4(), ("tdm", "ian"))):
            ub = upper_bound(case, ch, P)
            for s in schemes:
                assert scheme_rate(s, case, ch, P, 0.5, ps).total <= ub + 1e-12


@pytest.mark.parametrize("scheme", list(Scheme))
def test_rates_nondecreasing_in_power(scheme):
    case = CognitionCase.case3(2)
    for seed in range(10):
        ch = sample_channel(seed)
        totals = [scheme_rate(scheme, case, ch, db(p), 0.5, precoder_seed(seed)).total
                  for p in range(-20, 101, 5)]
        assert all(b >= a - 1e-12 for a, b in zip(totals, totals[1:]))
        bounds = [upper_bound(case, ch, db(p)) for p in range(-20, 101, 5)]
        assert all(b >= a for a, b in zip(bounds, bounds[1:]))
