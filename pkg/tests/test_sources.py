import math

import pytest
from hypothesis import given, strategies as st

from qkdrates.sources import (PhotonStatistics, RepetitionLimits, cw_repetition_rate,
                              pulsed_repetition_rate)


def test_single_photon():
    ps = PhotonStatistics.single_photon()
    assert ps.p_single() == 1.0
    assert ps.p_multi() == 0.0
    assert ps.p_vac() == 0.0


def test_poissonian_multi_photon_tail():
    ps = PhotonStatistics.poissonian(0.1)
    assert ps.p_multi() == pytest.approx(1 - math.exp(-0.1) * 1.1, rel=1e-12)
    assert ps.p_multi() == pytest.approx(0.004679, abs=1e-6)


def test_poissonian_tail_accurate_at_tiny_mu():
    # mu^2/2 to leading order; naive 1 - e^-mu(1+mu) loses all digits here
    ps = PhotonStatistics.poissonian(1e-9)
    assert ps.p_multi() == pytest.approx(0.5e-18, rel=1e-6)


def test_heralded_pair_pulsed():
    ps = PhotonStatistics.heralded_pair_pulsed(0.05)
    assert ps.pmf(2) == pytest.approx(0.001875, rel=1e-14)
    assert ps.pmf(1) == 0.05
    with pytest.raises(ValueError):
        PhotonStatistics.heralded_pair_pulsed(0.5)


def test_heralded_pair_cw():
    ps = PhotonStatistics.heralded_pair_cw(1e6, 1e-9)
    assert ps.pairs_per_window == pytest.approx(1e-3)
    assert ps.pmf(2) == pytest.approx(1e-3)
    assert ps.p_multi() == pytest.approx(1e-3)
    with pytest.raises(ValueError):
        PhotonStatistics.heralded_pair_cw(1e9, 1e-9)
    with pytest.raises(ValueError):
        PhotonStatistics.heralded_pair_cw(1e6, 0.0)


def test_invalid_kind_and_mu():
    with pytest.raises(ValueError):
        PhotonStatistics("laser", 0.1)
    with pytest.raises(ValueError):
        PhotonStatistics.poissonian(-0.1)


@given(st.floats(0.0, 30.0))
def test_terms_sum_to_one(mu):
    ps = PhotonStatistics.poissonian(mu)
    assert sum(p for _, p in ps.terms()) == pytest.approx(1.0, abs=1e-12)
    assert ps.p_vac() + ps.p_single() + ps.p_multi() == pytest.approx(1.0, abs=1e-12)


def test_pulsed_repetition_rate():
    assert pulsed_repetition_rate(RepetitionLimits(nu_max=1e7), 0.5, 0.1, 1.0, 0.1) == 1e7
    # mu t t_B eta = 1e-2 with tau_d = 1 us -> 1e8 Hz
    lim = RepetitionLimits(nu_max=1e9, tau_d=1e-6)
    assert pulsed_repetition_rate(lim, 1.0, 0.1, 1.0, 0.1) == pytest.approx(1e8)
    lim = RepetitionLimits(nu_max=1e9, tau_d=1e-6, T_dc=1e-7)
    assert pulsed_repetition_rate(lim, 1.0, 0.1, 1.0, 0.1) == pytest.approx(1e7)


def test_cw_repetition_rate():
    # trigger-limited
    assert cw_repetition_rate(RepetitionLimits(), 1e6, 1.0, 1.0, 1.0, 1e-12) == pytest.approx(1e6)
    # 1/delta_t = 1e9 loses against the 1e6 trigger rate
    assert cw_repetition_rate(RepetitionLimits(), 1e6, 1.0, 1.0, 1.0, 1e-9) == pytest.approx(1e6)
    # Bob's dead time with t t_B eta = 0.5 -> 2e6 Hz, below a 1e7 Hz trigger
    lim = RepetitionLimits(tau_d=1e-6)
    assert cw_repetition_rate(lim, 1e7, 0.5, 1.0, 1.0, 1e-12) == pytest.approx(2e6)


def test_repetition_limits_validation():
    with pytest.raises(ValueError):
        RepetitionLimits(tau_d=-1.0)
