import math

import numpy as np
import pytest

from hybridqkd import (
    ClickObservables,
    DomainError,
    QdSourceParams,
    compose_click_probability,
    infer_mu_laser,
    infer_mu_mixed,
    qd_distribution,
)


def qd_click_probability(params: QdSourceParams, eta0: float) -> float:
    """Click probability from QD photons alone, dark counts excluded."""
    p0, p1, p2 = qd_distribution(params).probs
    return 1.0 - p0 - p1 * (1.0 - eta0) - p2 * (1.0 - eta0) ** 2


class TestCompose:
    def test_trivials(self):
        assert compose_click_probability(0.0, 0.0, 0.0) == 0.0
        assert compose_click_probability(0.0, 1.0, 0.0) == 1.0
        assert compose_click_probability(0.5, 0.5, 0.5) == pytest.approx(0.875, abs=1e-15)

    def test_symmetric(self):
        assert compose_click_probability(0.1, 0.2, 0.3) == pytest.approx(
            compose_click_probability(0.3, 0.1, 0.2), abs=1e-15
        )

    def test_monotone_in_each_argument(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            a, b, c = rng.uniform(0.0, 1.0, 3)
            base = compose_click_probability(a, b, c)
            eps = rng.uniform(0.0, 1.0 - a)
            assert compose_click_probability(a + eps, b, c) >= base

    def test_domain(self):
        with pytest.raises(DomainError):
            compose_click_probability(-0.1, 0.0, 0.0)


class TestInferMuLaser:
    def test_no_laser_contribution(self):
        p_dc, p_qd = 0.01, 0.03
        p_click = compose_click_probability(p_dc, p_qd, 0.0)
        obs = ClickObservables(p_click, p_dc, p_qd, eta0=0.8)
        assert infer_mu_laser(obs) == 0.0

    def test_pure_laser_inversion(self):
        eta0, mu = 0.8, 0.45
        p_click = 1.0 - math.exp(-eta0 * mu)
        obs = ClickObservables(p_click, 0.0, 0.0, eta0)
        assert infer_mu_laser(obs) == pytest.approx(mu, abs=1e-12)

    def test_forward_model_roundtrip(self):
        # compose clicks from a known source, then invert
        rng = np.random.default_rng(19)
        for _ in range(1000):
            g2 = rng.uniform(1e-6, 0.45)
            b = rng.uniform(0.0, min(1.0, 1.0 / (2 * g2)))
            params = QdSourceParams(b, g2)
            mu = rng.uniform(0.0, 2.0)
            eta0 = rng.uniform(0.05, 1.0)
            p_dc = rng.uniform(0.0, 0.01)
            p_qd = qd_click_probability(params, eta0)
            p_laser = 1.0 - math.exp(-eta0 * mu)
            p_click = compose_click_probability(p_dc, p_qd, p_laser)
            obs = ClickObservables(p_click, p_dc, p_qd, eta0)
            assert infer_mu_laser(obs) == pytest.approx(mu, abs=1e-9)

    def test_small_negative_clamps_with_warning(self):
        p_dc, p_qd, eta0 = 0.01, 0.03, 0.9
        exact = compose_click_probability(p_dc, p_qd, 0.0)
        obs = ClickObservables(exact - 1e-9, p_dc, p_qd, eta0)
        with pytest.warns(RuntimeWarning):
            assert infer_mu_laser(obs) == 0.0

    def test_large_negative_rejected(self):
        p_dc, p_qd, eta0 = 0.05, 0.10, 0.9
        exact = compose_click_probability(p_dc, p_qd, 0.0)
        obs = ClickObservables(exact - 0.01, p_dc, p_qd, eta0)
        with pytest.raises(DomainError):
            infer_mu_laser(obs)

    def test_degenerate_inputs_rejected(self):
        with pytest.raises(DomainError):
            infer_mu_laser(ClickObservables(0.5, 0.1, 0.2, eta0=0.0))
        with pytest.raises(DomainError):
            infer_mu_laser(ClickObservables(1.0, 0.1, 0.2, eta0=0.9))
        with pytest.raises(DomainError):
            ClickObservables(0.05, 0.1, 0.2, eta0=0.9)  # p_click below darks


class TestInferMuMixed:
    def test_no_laser_means_zero_ratio(self):
        mu_mixed, ratio = infer_mu_mixed(0.0409, 0.012, 0.0)
        assert ratio == 0.0
        assert mu_mixed == pytest.approx(0.04091, abs=1e-4)

    def test_dark_qd_means_unit_ratio(self):
        mu_mixed, ratio = infer_mu_mixed(0.0, 0.0, 0.3)
        assert ratio == 1.0
        assert mu_mixed == pytest.approx(0.3, abs=1e-15)

    def test_vacuum_everything(self):
        mu_mixed, ratio = infer_mu_mixed(0.0, 0.0, 0.0)
        assert mu_mixed == 0.0
        assert ratio == 0.0

    def test_heavy_mixing_configuration(self):
        # the 86.8 % labeling of the strongest mixed configuration
        mu_qd, _ = infer_mu_mixed(0.0409, 0.012, 0.0)
        mu_laser = 0.868 / (1.0 - 0.868) * mu_qd
        _, ratio = infer_mu_mixed(0.0409, 0.012, mu_laser)
        assert ratio == pytest.approx(0.868, abs=1e-9)

    def test_ratio_strictly_increasing_in_mu(self):
        ratios = [
            infer_mu_mixed(0.0409, 0.012, mu)[1] for mu in np.linspace(0.01, 2.0, 25)
        ]
        assert all(0.0 < r < 1.0 for r in ratios)
        assert all(b > a for a, b in zip(ratios, ratios[1:]))
