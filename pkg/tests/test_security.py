import math

import numpy as np
import pytest

from hybridqkd import (
    ChannelModel,
    DetectorModel,
    DomainError,
    PhotonNumberDistribution,
    QdSourceParams,
    binary_entropy,
    gllp_skr,
    hybrid_distribution,
    multiphoton_probability,
    poisson_distribution,
    qd_distribution,
    skr_from_observables,
)

TABLE1_DET = DetectorModel(e_d=0.008, y0=196 / 81.96e6)
TABLE1_QD = QdSourceParams(0.0409, 0.012)


class TestBinaryEntropy:
    def test_maximum(self):
        assert binary_entropy(0.5) == 1.0

    def test_limits(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

    def test_frozen_value_and_symmetry(self):
        assert binary_entropy(0.11) == pytest.approx(0.499915958164528, abs=1e-12)
        assert binary_entropy(0.11) == pytest.approx(binary_entropy(0.89), abs=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            binary_entropy(-0.1)
        with pytest.raises(DomainError):
            binary_entropy(1.1)


class TestMultiphoton:
    def test_single_photon_source(self):
        assert multiphoton_probability(PhotonNumberDistribution([0, 1, 0])) == 0.0

    @pytest.mark.parametrize("mu", [0.1, 0.5, 2.0])
    def test_poisson_tail(self, mu):
        expected = 1.0 - math.exp(-mu) * (1.0 + mu)
        assert multiphoton_probability(poisson_distribution(mu)) == pytest.approx(
            expected, abs=1e-9
        )

    def test_qd_respects_g2_bound(self):
        # p_m <= g2 mu^2 / 2; tight for the truncated two-photon model
        rng = np.random.default_rng(3)
        for _ in range(100):
            g2 = rng.uniform(1e-6, 0.45)
            b = rng.uniform(1e-6, min(1.0, 1.0 / (2 * g2)))
            dist = qd_distribution(QdSourceParams(b, g2))
            mu = dist.probs[1] + 2.0 * dist.probs[2]
            assert multiphoton_probability(dist) <= g2 * mu**2 / 2.0 + 1e-12


class TestGllpSkr:
    def test_perfect_source_perfect_channel(self):
        dist = PhotonNumberDistribution([0.0, 1.0, 0.0])
        det = DetectorModel(e_d=0.0, y0=0.0)
        report = gllp_skr(dist, ChannelModel(), det)
        assert report.skr_per_pulse == pytest.approx(0.5, abs=1e-12)
        assert not report.clamped
        assert report.skr_per_second == pytest.approx(0.5 * det.rep_rate_hz, rel=1e-12)

    def test_clamped_regime(self):
        dist = poisson_distribution(2.0)
        det = DetectorModel(e_d=0.45, y0=1e-3)
        report = gllp_skr(dist, ChannelModel(attenuation_db=40.0), det)
        assert report.clamped
        assert report.skr_per_second == 0.0

    def test_table1_long_distance_point(self):
        ch = ChannelModel(attenuation_db=30.0, eta0=0.9)
        report = gllp_skr(qd_distribution(TABLE1_QD), ch, TABLE1_DET)
        assert 2.5e-6 <= report.skr_per_pulse <= 1e-5

    def test_zero_gain_rejected(self):
        dist = PhotonNumberDistribution([1.0, 0.0, 0.0])
        with pytest.raises(DomainError):
            gllp_skr(dist, ChannelModel(), DetectorModel(e_d=0.0, y0=0.0))

    def test_a_fraction_matches_definition(self):
        dist = hybrid_distribution(qd_distribution(TABLE1_QD), 0.1)
        report = gllp_skr(dist, ChannelModel(attenuation_db=5.0, eta0=0.9), TABLE1_DET)
        expected = (report.q_tot - report.p_m) / report.q_tot
        assert report.a_fraction == pytest.approx(expected, abs=1e-12)


class TestFormEquivalence:
    def test_observable_form_matches_distribution_form(self):
        # Eq-style entry point (p_click, e, A) against the constructive
        # supplement pipeline, 1000 random draws
        rng = np.random.default_rng(29)
        checked = 0
        while checked < 1000:
            g2 = rng.uniform(1e-4, 0.45)
            b = rng.uniform(1e-3, min(1.0, 1.0 / (2 * g2)))
            mu = rng.uniform(0.0, 1.0)
            db = rng.uniform(0.0, 35.0)
            det = DetectorModel(
                e_d=rng.uniform(0.0, 0.1), y0=rng.uniform(0.0, 1e-4)
            )
            dist = hybrid_distribution(qd_distribution(QdSourceParams(b, g2)), mu)
            ch = ChannelModel(attenuation_db=db)
            try:
                full = gllp_skr(dist, ch, det)
            except DomainError:
                continue
            if full.q_tot - full.p_m <= 0.0:
                continue  # A is clipped at zero; forms only agree on raw A
            a_raw = (full.q_tot - full.p_m) / full.q_tot
            alt = skr_from_observables(full.q_tot, full.e_tot, a_raw, det.f_ec)
            assert alt.skr_per_pulse == pytest.approx(full.skr_per_pulse, abs=1e-12)
            assert alt.clamped == full.clamped
            checked += 1

    def test_observable_form_validation(self):
        with pytest.raises(DomainError):
            skr_from_observables(0.0, 0.1, 0.9)
        with pytest.raises(DomainError):
            skr_from_observables(0.5, 1.5, 0.9)
        with pytest.raises(DomainError):
            skr_from_observables(0.5, 0.1, 1.5)


class TestStructure:
    def test_skr_nonincreasing_in_g2(self):
        ch = ChannelModel(attenuation_db=10.0, eta0=0.9)
        rates = []
        for g2 in np.arange(0.0, 0.055, 0.005):
            dist = qd_distribution(QdSourceParams(0.0409, g2))
            rates.append(gllp_skr(dist, ch, TABLE1_DET).skr_per_pulse)
        assert all(a >= b - 1e-15 for a, b in zip(rates, rates[1:]))

    def test_exact_tail_beats_g2_bound(self):
        # substituting the looser p_m <= g2 mu^2 / 2 can only lower the bound
        from hybridqkd import totals
        from hybridqkd.security import _bound_terms

        rng = np.random.default_rng(37)
        det = TABLE1_DET
        for _ in range(100):
            g2 = rng.uniform(1e-4, 0.45)
            b = rng.uniform(1e-3, min(1.0, 1.0 / (2 * g2)))
            dist = qd_distribution(QdSourceParams(b, g2))
            eta = 0.9 * 10 ** (-rng.uniform(0.0, 2.0))
            q_tot, e_tot = totals(dist, eta, det)
            mu = dist.probs[1] + 2.0 * dist.probs[2]
            exact, _, _ = _bound_terms(
                q_tot, e_tot, multiphoton_probability(dist), det.f_ec
            )
            loose, _, _ = _bound_terms(q_tot, e_tot, g2 * mu**2 / 2.0, det.f_ec)
            assert exact >= loose - 1e-12

    @pytest.mark.parametrize("mu", [0.2, 0.5, 1.0, 1.5])
    def test_laser_only_closed_form(self, mu):
        # lossless error-free channel: SKR = mu e^-mu / 2
        det = DetectorModel(e_d=0.0, y0=0.0)
        report = gllp_skr(poisson_distribution(mu), ChannelModel(), det)
        assert report.skr_per_pulse == pytest.approx(0.5 * mu * math.exp(-mu), abs=1e-9)
