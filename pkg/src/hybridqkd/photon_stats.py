"""Photon-number distributions for quantum-dot, laser, and hybrid sources.

Distributions are finite arrays of Fock-state probabilities p_k truncated at
a cutoff k_max. Every constructor renormalizes after truncation so that
downstream sums (gains, error rates, multiphoton mass) stay unbiased.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special, stats

from .errors import DomainError

# Mass a constructor may shed through truncation before renormalizing.
NORM_TOL = 1e-9
# Auto-cutoff tail target. Tighter than NORM_TOL so that truncation cannot
# move distribution means at the 1e-9 level even for mu up to 5.
POISSON_TAIL = 1e-13
MIN_KMAX = 20
# Below this g2 the two-photon quadratic is 0/0; limit branches apply.
G2_ZERO = 1e-12


@dataclass(frozen=True, eq=False)
class PhotonNumberDistribution:
    """Probabilities p_k for k = 0..k_max photons, normalized to 1."""

    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float).copy()
        if probs.ndim != 1 or probs.size < 3:
            raise DomainError("a photon-number distribution needs k_max >= 2")
        if not np.all(np.isfinite(probs)):
            raise DomainError("photon-number probabilities must be finite")
        if np.any(probs < -1e-12):
            raise DomainError("photon-number probabilities must be nonnegative")
        probs = np.clip(probs, 0.0, None)
        total = probs.sum()
        if not (1.0 - NORM_TOL <= total <= 1.0 + NORM_TOL):
            raise DomainError(
                f"photon-number probabilities sum to {total!r}, expected 1 "
                f"within {NORM_TOL:g}"
            )
        probs /= total
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    @property
    def k_max(self) -> int:
        return self.probs.size - 1


@dataclass(frozen=True)
class QdSourceParams:
    """Quantum-dot source: collected brightness and g2(0) at Alice's output."""

    brightness: float
    g2: float

    def __post_init__(self):
        if not 0.0 <= self.brightness <= 1.0:
            raise DomainError(f"brightness must be in [0, 1], got {self.brightness!r}")
        if not 0.0 <= self.g2 < 0.5:
            raise DomainError(
                f"g2 must be in [0, 0.5) for a single-photon source, got {self.g2!r}"
            )
        if 2.0 * self.g2 * self.brightness > 1.0:
            raise DomainError("2 * g2 * brightness > 1: two-photon root is complex")


def _poisson_pmf(mu: float, k_max: int) -> np.ndarray:
    if mu == 0.0:
        probs = np.zeros(k_max + 1)
        probs[0] = 1.0
        return probs
    ks = np.arange(k_max + 1)
    return np.exp(ks * math.log(mu) - mu - special.gammaln(ks + 1.0))


def _auto_poisson_cutoff(mu: float) -> int:
    """Smallest k_max >= MIN_KMAX whose truncated tail mass is <= POISSON_TAIL."""
    bound = max(MIN_KMAX, math.ceil(mu + 12.0 * math.sqrt(mu) + 30.0))
    while True:
        probs = _poisson_pmf(mu, bound)
        tail = np.maximum(1.0 - np.cumsum(probs), 0.0)
        ok = np.flatnonzero(tail[MIN_KMAX:] <= POISSON_TAIL)
        if ok.size:
            return MIN_KMAX + int(ok[0])
        bound = math.ceil(bound * 1.5)


def poisson_distribution(mu: float, k_max: int = 0) -> PhotonNumberDistribution:
    """Truncated Poisson statistics: p_k proportional to e^(-mu) mu^k / k!.

    ``k_max = 0`` selects the cutoff automatically (tail mass <= 1e-13,
    floor 20). An explicit cutoff must keep the shed tail below 1e-9.
    """
    if mu < 0.0:
        raise DomainError(f"mean photon number must be nonnegative, got {mu!r}")
    if k_max == 0:
        k_max = _auto_poisson_cutoff(mu)
    elif k_max < 2:
        raise DomainError(f"k_max must be at least 2, got {k_max!r}")
    probs = _poisson_pmf(mu, k_max)
    if 1.0 - probs.sum() > NORM_TOL:
        raise DomainError(
            f"k_max = {k_max} sheds {1.0 - probs.sum():.3e} of Poisson mass "
            f"at mu = {mu!r}; raise the cutoff"
        )
    return PhotonNumberDistribution(probs)


def qd_distribution(params: QdSourceParams) -> PhotonNumberDistribution:
    """Truncated quantum-dot statistics [p0, p1, p2] from brightness and g2.

    p2 solves (brightness + p2)^2 g2 = 2 p2, keeping the root compatible
    with a single-photon source; p1 + p2 equals the brightness exactly.
    """
    b, g2 = params.brightness, params.g2
    if g2 < G2_ZERO:
        p2 = 0.0
    else:
        disc = 1.0 - 2.0 * g2 * b
        if disc < 0.0:
            raise DomainError("2 * g2 * brightness > 1: two-photon root is complex")
        p2 = (1.0 - g2 * b - math.sqrt(disc)) / g2
    return PhotonNumberDistribution(np.array([1.0 - b, b - p2, p2]))


def hybrid_distribution(
    qd: PhotonNumberDistribution, mu_laser: float, k_max: int = 0
) -> PhotonNumberDistribution:
    """Incoherent mixture of QD and laser light: convolution of the two
    photon-number distributions. ``k_max = 0`` selects the cutoff
    automatically from the laser statistics.
    """
    if qd.probs.size != 3:
        raise DomainError("hybrid mixing expects QD statistics truncated at two photons")
    if mu_laser < 0.0:
        raise DomainError(f"mean photon number must be nonnegative, got {mu_laser!r}")
    laser = poisson_distribution(mu_laser)
    probs = np.convolve(qd.probs, laser.probs)
    if k_max:
        if k_max < 2:
            raise DomainError(f"k_max must be at least 2, got {k_max!r}")
        if k_max + 1 < probs.size:
            shed = probs[k_max + 1:].sum()
            if shed > NORM_TOL:
                raise DomainError(
                    f"k_max = {k_max} sheds {shed:.3e} of hybrid mass; raise the cutoff"
                )
            probs = probs[: k_max + 1]
        elif k_max + 1 > probs.size:
            probs = np.pad(probs, (0, k_max + 1 - probs.size))
    return PhotonNumberDistribution(probs)


def mean_photon_number(dist: PhotonNumberDistribution) -> float:
    """First moment sum_k k p_k."""
    return float(np.arange(dist.probs.size) @ dist.probs)


def g2_of(dist: PhotonNumberDistribution) -> float:
    """Second-order correlation g2(0) = sum_k k(k-1) p_k / mu^2."""
    mu = mean_photon_number(dist)
    if mu <= 0.0:
        raise DomainError("g2(0) is undefined for a zero-mean distribution")
    ks = np.arange(dist.probs.size)
    return float((ks * (ks - 1.0)) @ dist.probs) / (mu * mu)


def apply_loss(dist: PhotonNumberDistribution, eta: float) -> PhotonNumberDistribution:
    """Binomial thinning: each photon survives independently with probability eta."""
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"transmissivity must be in [0, 1], got {eta!r}")
    if eta == 1.0:
        return dist
    if eta == 0.0:
        probs = np.zeros(dist.probs.size)
        probs[0] = 1.0
        return PhotonNumberDistribution(probs)
    ks = np.arange(dist.probs.size)
    thin = stats.binom.pmf(ks[:, None], ks[None, :], eta)
    return PhotonNumberDistribution(thin @ dist.probs)


def brightness_after_loss(b0: float, g2: float, eta: float) -> float:
    """Click probability of a QD source after transmission eta.

    Losses do not simply scale the brightness: the two-photon component
    partially survives as a one-photon click, adding
    eta (1 - eta) p2 on top of eta * b0.
    """
    if not 0.0 <= b0 <= 1.0:
        raise DomainError(f"brightness must be in [0, 1], got {b0!r}")
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"transmissivity must be in [0, 1], got {eta!r}")
    if g2 < 0.0:
        raise DomainError(f"g2 must be nonnegative, got {g2!r}")
    if g2 < G2_ZERO:
        return eta * b0
    disc = 1.0 - 2.0 * g2 * b0
    if disc < 0.0:
        raise DomainError("2 * g2 * brightness > 1: two-photon root is complex")
    p2 = (1.0 - g2 * b0 - math.sqrt(disc)) / g2
    return eta * b0 + eta * (1.0 - eta) * p2
