"""Pulse-level stochastic BB84 simulation, the oracle for the analytic pipeline.

Event model per pulse: draw a photon number k from the source distribution,
thin each photon through the channel with survival probability eta, draw a
dark count with probability y0. A click is at least one surviving photon or
a dark count. Clicks are sifted with an unbiased coin; a sifted click errs
with probability e_d when a photon arrived (coincidences with dark counts
resolve in favor of the photon) and e0 for a dark-count-only click.

Pulses are processed in blocks of 2^20, each with its own counter-based
substream (Philox keyed through SeedSequence spawn keys), so tallies are
bit-identical for a fixed seed regardless of how blocks are executed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import DetectorModel
from .errors import DomainError
from .photon_stats import PhotonNumberDistribution
from .security import _bound_terms, multiphoton_probability

BLOCK_SIZE = 1 << 20


@dataclass(frozen=True)
class SimConfig:
    """One Monte Carlo run: source, channel transmissivity, detector, seed."""

    n_pulses: int
    seed: int
    dist: PhotonNumberDistribution
    eta: float
    det: DetectorModel

    def __post_init__(self):
        if self.n_pulses < 1:
            raise DomainError(f"n_pulses must be at least 1, got {self.n_pulses!r}")
        if self.seed < 0:
            raise DomainError(f"seed must be nonnegative, got {self.seed!r}")
        if not 0.0 <= self.eta <= 1.0:
            raise DomainError(f"transmissivity must be in [0, 1], got {self.eta!r}")


@dataclass(frozen=True)
class SimTally:
    """Counts and binomial estimators from one simulation."""

    n_pulses: int
    n_clicks: int
    n_sifted: int
    n_errors: int
    q_tot_hat: float
    e_tot_hat: float
    stderr_q: float
    stderr_e: float


def _block_rng(seed: int, block_index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(block_index,))
    return np.random.Generator(np.random.Philox(seq))


def simulate(config: SimConfig) -> SimTally:
    """Run the pulse-level simulation and tally clicks, sifted events, errors."""
    probs = config.dist.probs
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0  # guard float shortfall so sampling never overruns k_max
    det = config.det
    eta = config.eta
    n_clicks = n_sifted = n_errors = 0
    n_blocks = (config.n_pulses + BLOCK_SIZE - 1) // BLOCK_SIZE
    for block in range(n_blocks):
        size = min(BLOCK_SIZE, config.n_pulses - block * BLOCK_SIZE)
        rng = _block_rng(config.seed, block)
        k = np.searchsorted(cdf, rng.random(size), side="right")
        survivors = np.zeros(size, dtype=np.int64)
        emitting = k > 0
        if eta >= 1.0:
            survivors[emitting] = k[emitting]
        elif eta > 0.0:
            survivors[emitting] = rng.binomial(k[emitting], eta)
        dark = rng.random(size) < det.y0
        arrived = survivors > 0
        click = arrived | dark
        sifted = click & (rng.random(size) < 0.5)
        err_prob = np.where(arrived, det.e_d, det.e0)
        errors = sifted & (rng.random(size) < err_prob)
        n_clicks += int(click.sum())
        n_sifted += int(sifted.sum())
        n_errors += int(errors.sum())
    n = config.n_pulses
    q_hat = n_clicks / n
    stderr_q = math.sqrt(q_hat * (1.0 - q_hat) / n)
    if n_sifted > 0:
        e_hat = n_errors / n_sifted
        stderr_e = math.sqrt(e_hat * (1.0 - e_hat) / n_sifted)
    else:
        e_hat = 0.0
        stderr_e = 0.0
    return SimTally(n, n_clicks, n_sifted, n_errors, q_hat, e_hat, stderr_q, stderr_e)


def empirical_skr(
    tally: SimTally, det: DetectorModel, dist: PhotonNumberDistribution
) -> float:
    """SKR bound from simulated totals and the exact multiphoton probability.

    Matches the analytic bound within statistical error; regimes where the
    bound is meaningless (no single-photon gain, conditional error >= 1/2)
    are clamped to zero.
    """
    if tally.n_clicks == 0:
        raise DomainError("no clicks recorded: key rate is undefined")
    p_m = multiphoton_probability(dist)
    skr, _, clamped = _bound_terms(tally.q_tot_hat, tally.e_tot_hat, p_m, det.f_ec)
    if clamped:
        return 0.0
    return skr
