"""Source-parameter inference from measured click statistics.

Mirrors the transmitter calibration: dark counts, QD photons, and laser
photons trigger clicks independently, so the no-click probabilities
multiply and the laser mean photon number follows from the log of that
product. ``p_click_qd`` is the click probability caused by QD photons
alone (laser path blocked, dark counts excluded).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DomainError
from .photon_stats import QdSourceParams, mean_photon_number, qd_distribution

# Measurement noise may push the inferred mean slightly negative; anything
# below this is treated as a misconfiguration instead.
MU_CLAMP_TOL = 1e-6


@dataclass(frozen=True)
class ClickObservables:
    """Per-pulse click probabilities measured at the receiver."""

    p_click: float
    p_dc: float
    p_click_qd: float
    eta0: float

    def __post_init__(self):
        for name in ("p_click", "p_dc", "p_click_qd", "eta0"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise DomainError(f"{name} must be in [0, 1], got {value!r}")
        if self.p_click < self.p_dc:
            raise DomainError("p_click cannot be below the dark-count probability")


def compose_click_probability(p_dc: float, p_qd: float, p_laser: float) -> float:
    """Click probability of three independent trigger mechanisms."""
    for value in (p_dc, p_qd, p_laser):
        if not 0.0 <= value <= 1.0:
            raise DomainError(f"probabilities must be in [0, 1], got {value!r}")
    return 1.0 - (1.0 - p_dc) * (1.0 - p_qd) * (1.0 - p_laser)


def infer_mu_laser(obs: ClickObservables) -> float:
    """Laser mean photon number at Alice from the measured click rates:

        mu = -(1/eta0) ln( (1 - p_click) / ((1 - p_dc)(1 - p_click_qd)) )
    """
    if obs.eta0 <= 0.0:
        raise DomainError("eta0 must be positive to refer the mean back to Alice")
    denom = (1.0 - obs.p_dc) * (1.0 - obs.p_click_qd)
    if denom <= 0.0:
        raise DomainError("dark counts or QD clicks are certain; laser share is undefined")
    if obs.p_click >= 1.0:
        raise DomainError("p_click = 1 leaves the laser mean photon number unbounded")
    mu = -math.log((1.0 - obs.p_click) / denom) / obs.eta0
    if mu < -MU_CLAMP_TOL:
        raise DomainError(
            f"observables imply a laser mean of {mu:.3e}; "
            "p_click is inconsistent with the dark-count and QD rates"
        )
    if mu < 0.0:
        warnings.warn(
            f"inferred laser mean {mu:.3e} clamped to 0 (measurement noise)",
            RuntimeWarning,
            stacklevel=2,
        )
        return 0.0
    return mu


def infer_mu_mixed(
    qd_brightness_at_alice: float, qd_g2: float, mu_laser: float
) -> tuple[float, float]:
    """Total mean photon number of the mixture and the laser share of it.

    The incoherent mixture adds means: mu_mixed = mu_QD + mu_laser.
    """
    if mu_laser < 0.0:
        raise DomainError(f"mean photon number must be nonnegative, got {mu_laser!r}")
    qd = qd_distribution(QdSourceParams(qd_brightness_at_alice, qd_g2))
    mu_qd = mean_photon_number(qd)
    mu_mixed = mu_qd + mu_laser
    ratio = mu_laser / mu_mixed if mu_mixed > 0.0 else 0.0
    return mu_mixed, ratio
