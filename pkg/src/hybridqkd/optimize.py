"""SKR maximization over the laser admixture and advantage-regime boundaries.

Grid evaluations are independent; they run serially in index order so that
every sweep and bisection is deterministic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelModel, DetectorModel
from .errors import DomainError
from .photon_stats import (
    QdSourceParams,
    g2_of,
    hybrid_distribution,
    mean_photon_number,
    qd_distribution,
)
from .security import SkrReport, gllp_skr

# Search domain and resolution of the laser mean photon number.
MU_MAX = 5.0
MU_TOL = 1e-4
# Relative SKR improvements below this count as ties, resolved toward purity.
SKR_REL_TOL = 1e-6

DB_MAX = 60.0
DB_RESOLUTION = 0.05
BRIGHTNESS_TOL = 1e-4

# Coarse grid, scanned before golden-section refinement: the objective is
# empirically unimodal but unproven, so the grid protects against local optima.
_MU_GRID = np.concatenate(([0.0], np.logspace(math.log10(MU_TOL), math.log10(MU_MAX), 64)))
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

# Attenuations probed when deciding whether mixing helps anywhere; the
# optimal admixture shrinks with attenuation, so low loss carries the signal.
_PROBE_DB = (0.0, 0.5, 1.0, 2.0)


@dataclass(frozen=True)
class OptimizationResult:
    """Best laser admixture at one attenuation."""

    attenuation_db: float
    mu_laser_opt: float
    skr_opt: float
    mix_ratio: float
    purity_at_opt: float


@dataclass(frozen=True)
class AdvantageReport:
    """Boundaries of the single-photon advantage regimes."""

    crossover_db: float | None
    unconditional_brightness: float
    laser_beat_brightness: float


@dataclass(frozen=True)
class ScanPoint:
    """One (attenuation, laser admixture) cell of a sweep."""

    attenuation_db: float
    km: float
    mu_laser: float
    mu_mixed: float
    mix_ratio: float
    g2_hybrid: float
    report: SkrReport


def _clamped_skr(report: SkrReport) -> float:
    if report.clamped:
        return 0.0
    return max(report.skr_per_pulse, 0.0)


def _golden_section_max(f, lo: float, hi: float, tol: float) -> float:
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc >= fd:  # ties move the bracket toward smaller mu
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def optimize_mu_laser(
    qd: QdSourceParams,
    attenuation_db: float,
    channel: ChannelModel,
    det: DetectorModel,
) -> OptimizationResult:
    """Maximize the SKR over the laser mean photon number in [0, 5].

    Ties (including the no-key regime where every admixture scores zero)
    resolve toward mu_laser = 0, preferring single-photon purity.
    """
    ch = channel.with_attenuation(attenuation_db)
    base = qd_distribution(qd)

    def objective(mu: float) -> float:
        try:
            return _clamped_skr(gllp_skr(hybrid_distribution(base, mu), ch, det))
        except DomainError:  # zero total gain: nothing to distill
            return 0.0

    values = np.array([objective(mu) for mu in _MU_GRID])
    best = int(np.argmax(values))  # first occurrence: smallest mu on ties
    mu_opt, skr_opt = float(_MU_GRID[best]), float(values[best])
    if skr_opt > 0.0 and best > 0:
        lo = float(_MU_GRID[best - 1])
        hi = float(_MU_GRID[best + 1]) if best + 1 < _MU_GRID.size else MU_MAX
        mu_ref = _golden_section_max(objective, lo, hi, 0.25 * MU_TOL)
        skr_ref = objective(mu_ref)
        if skr_ref > skr_opt:
            mu_opt, skr_opt = mu_ref, skr_ref
    if skr_opt - values[0] <= SKR_REL_TOL * max(skr_opt, float(values[0])):
        mu_opt, skr_opt = 0.0, float(values[0])

    mixed = hybrid_distribution(base, mu_opt)
    mu_qd = mean_photon_number(base)
    mu_mixed = mu_qd + mu_opt
    ratio = mu_opt / mu_mixed if mu_mixed > 0.0 else 0.0
    purity = 1.0 - g2_of(mixed) if mu_mixed > 0.0 else 1.0
    return OptimizationResult(attenuation_db, mu_opt, skr_opt, ratio, purity)


def _qd_only_positive(qd: QdSourceParams, db: float, channel: ChannelModel, det: DetectorModel) -> bool:
    try:
        report = gllp_skr(qd_distribution(qd), channel.with_attenuation(db), det)
    except DomainError:  # dark source with no dark counts: no clicks at all
        return False
    return not report.clamped and report.skr_per_pulse > 0.0


def crossover_attenuation(
    qd: QdSourceParams, channel: ChannelModel, det: DetectorModel
) -> float | None:
    """Smallest attenuation above which pure single-photon statistics are
    optimal, to 0.05 dB. None when mixing never helps (zero everywhere) or
    when laser light helps everywhere a key exists at all.
    """

    def improves(db: float) -> bool:
        return optimize_mu_laser(qd, db, channel, det).mu_laser_opt >= MU_TOL

    if not improves(0.0):
        return None
    if improves(DB_MAX):
        return None
    lo, hi = 0.0, DB_MAX
    while hi - lo > DB_RESOLUTION:
        mid = 0.5 * (lo + hi)
        if improves(mid):
            lo = mid
        else:
            hi = mid
    # A genuine crossover needs a single-photon key at the boundary;
    # otherwise the admixture just died together with the key itself.
    if not _qd_only_positive(qd, hi, channel, det):
        return None
    return hi


def _mixing_improves_somewhere(
    brightness: float, g2: float, channel: ChannelModel, det: DetectorModel
) -> bool:
    qd = QdSourceParams(brightness, g2)
    return any(
        optimize_mu_laser(qd, db, channel, det).mu_laser_opt >= MU_TOL
        for db in _PROBE_DB
    )


def unconditional_advantage_brightness(
    g2: float, det: DetectorModel, channel: ChannelModel
) -> float:
    """Smallest collected brightness at which mixing in laser light no longer
    improves the SKR at any attenuation."""
    if not _mixing_improves_somewhere(0.0, g2, channel, det):
        return 0.0
    if _mixing_improves_somewhere(1.0, g2, channel, det):
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > BRIGHTNESS_TOL:
        mid = 0.5 * (lo + hi)
        if _mixing_improves_somewhere(mid, g2, channel, det):
            lo = mid
        else:
            hi = mid
    return hi


def laser_beat_brightness(
    g2: float, det: DetectorModel, channel: ChannelModel
) -> float:
    """Collected brightness above which the bare quantum-dot SKR exceeds the
    best laser-only SKR at zero applied attenuation."""
    laser_best = optimize_mu_laser(QdSourceParams(0.0, 0.0), 0.0, channel, det).skr_opt

    def qd_wins(brightness: float) -> bool:
        try:
            report = gllp_skr(
                qd_distribution(QdSourceParams(brightness, g2)),
                channel.with_attenuation(0.0),
                det,
            )
        except DomainError:
            return False
        return _clamped_skr(report) > laser_best

    if qd_wins(0.0):
        return 0.0
    if not qd_wins(1.0):
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > BRIGHTNESS_TOL:
        mid = 0.5 * (lo + hi)
        if qd_wins(mid):
            hi = mid
        else:
            lo = mid
    return hi


def advantage_report(
    qd: QdSourceParams, channel: ChannelModel, det: DetectorModel
) -> AdvantageReport:
    return AdvantageReport(
        crossover_db=crossover_attenuation(qd, channel, det),
        unconditional_brightness=unconditional_advantage_brightness(qd.g2, det, channel),
        laser_beat_brightness=laser_beat_brightness(qd.g2, det, channel),
    )


def skr_scan(
    qd: QdSourceParams,
    mu_laser_list,
    db_grid,
    channel: ChannelModel,
    det: DetectorModel,
) -> list[ScanPoint]:
    """Evaluate the SKR bound on the Cartesian grid attenuation x admixture."""
    mu_laser_list = list(mu_laser_list)
    db_grid = list(db_grid)
    if not mu_laser_list or not db_grid:
        raise DomainError("scan grids must be nonempty")
    base = qd_distribution(qd)
    mu_qd = mean_photon_number(base)
    rows = []
    for db in db_grid:
        ch = channel.with_attenuation(db)
        for mu in mu_laser_list:
            mixed = hybrid_distribution(base, mu)
            report = gllp_skr(mixed, ch, det)
            mu_mixed = mu_qd + mu
            ratio = mu / mu_mixed if mu_mixed > 0.0 else 0.0
            g2_mixed = g2_of(mixed) if mu_mixed > 0.0 else 0.0
            rows.append(ScanPoint(db, ch.km, mu, mu_mixed, ratio, g2_mixed, report))
    return rows
