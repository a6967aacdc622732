"""GLLP asymptotic secret-key-rate lower bound for BB84.

Worst case: every multiphoton emission is tagged and fully leaked, so the
single-photon estimate is Q_{k<2} = Q_tot - p_m with p_m the exact
multiphoton emission probability, and the conditional error rate is
e_{k<2} = E_tot Q_tot / Q_{k<2}. The bound is

    SKR >= 1/2 ( Q_{k<2} (1 - H2(e_{k<2})) - f_EC Q_tot H2(E_tot) )

with the 1/2 accounting for basis sifting.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import ChannelModel, DetectorModel, totals
from .errors import DomainError
from .photon_stats import PhotonNumberDistribution

# Explicit 0 log 0 branches; the upper cutoff keeps log2(1 - x) finite.
_H2_LO = 1e-300
_H2_HI = 1.0 - 1e-15


@dataclass(frozen=True)
class SkrReport:
    """Secret-key-rate bound together with the quantities entering it.

    ``skr_per_pulse`` keeps the raw (possibly negative) bound so optimizers
    see the objective's sign structure; ``clamped`` marks regimes where the
    bound is meaningless (no single-photon gain left, or conditional error
    at or above 1/2) and ``skr_per_second`` is zeroed accordingly.
    """

    q_tot: float
    e_tot: float
    p_m: float
    a_fraction: float
    skr_per_pulse: float
    skr_per_second: float
    clamped: bool


def binary_entropy(x: float) -> float:
    """Binary entropy H2(x) in bits, with H2(0) = H2(1) = 0."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"binary entropy needs x in [0, 1], got {x!r}")
    if x < _H2_LO or x > _H2_HI:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def multiphoton_probability(dist: PhotonNumberDistribution) -> float:
    """Probability p_m = sum_{k>=2} p_k of emitting more than one photon."""
    return float(dist.probs[2:].sum())


def _bound_terms(
    q_tot: float, e_tot: float, p_m: float, f_ec: float
) -> tuple[float, float, bool]:
    """Shared core of the bound: returns (skr_per_pulse, A, clamped)."""
    if q_tot <= 0.0:
        raise DomainError("total gain must be positive to bound a key rate")
    q_low = q_tot - p_m
    e_low = e_tot * q_tot / q_low if q_low > 0.0 else 1.0
    e_clip = min(max(e_low, 0.0), 1.0)
    clamped = q_low <= 0.0 or e_clip >= 0.5 or e_clip != e_low
    skr = 0.5 * (
        q_low * (1.0 - binary_entropy(e_clip)) - f_ec * q_tot * binary_entropy(e_tot)
    )
    a_fraction = min(max(q_low / q_tot, 0.0), 1.0)
    return skr, a_fraction, clamped


def gllp_skr(
    dist: PhotonNumberDistribution, channel: ChannelModel, det: DetectorModel
) -> SkrReport:
    """Bound the SKR of a source distribution over a channel and detector."""
    q_tot, e_tot = totals(dist, channel.transmissivity, det)
    p_m = multiphoton_probability(dist)
    skr, a_fraction, clamped = _bound_terms(q_tot, e_tot, p_m, det.f_ec)
    per_second = 0.0 if clamped else max(skr, 0.0) * det.rep_rate_hz
    return SkrReport(q_tot, e_tot, p_m, a_fraction, skr, per_second, clamped)


def skr_from_observables(
    p_click: float,
    error_rate: float,
    a_fraction: float,
    f_ec: float = 1.2,
    rep_rate_hz: float | None = None,
) -> SkrReport:
    """Bound the SKR from measured quantities, in the form

        SKR >= p_click/2 ( A (1 - H2(e/A)) - f_EC H2(e) )

    with A the single-photon component of the clicks. Entry point for
    users with experimental data instead of a source model.
    """
    if p_click <= 0.0 or p_click > 1.0:
        raise DomainError(f"p_click must be in (0, 1], got {p_click!r}")
    if not 0.0 <= error_rate <= 1.0:
        raise DomainError(f"error rate must be in [0, 1], got {error_rate!r}")
    if not 0.0 <= a_fraction <= 1.0:
        raise DomainError(f"single-photon component must be in [0, 1], got {a_fraction!r}")
    ratio = error_rate / a_fraction if a_fraction > 0.0 else 1.0
    ratio_clip = min(max(ratio, 0.0), 1.0)
    clamped = a_fraction <= 0.0 or ratio_clip >= 0.5 or ratio_clip != ratio
    skr = 0.5 * p_click * (
        a_fraction * (1.0 - binary_entropy(ratio_clip)) - f_ec * binary_entropy(error_rate)
    )
    per_second = 0.0
    if rep_rate_hz is not None and not clamped:
        per_second = max(skr, 0.0) * rep_rate_hz
    p_m = (1.0 - a_fraction) * p_click
    return SkrReport(p_click, error_rate, p_m, a_fraction, skr, per_second, clamped)
