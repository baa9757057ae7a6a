"""Power measures, SNR geometry, spectral efficiency and gains versus OOK.

Three power measures matter on an intensity-modulated link: average
electrical power (mean squared symbol norm), average optical power (mean DC
coordinate) and peak optical power (largest instantaneous waveform value,
which for the subcarrier basis reduces to ``max_i w1 + sqrt(2) * rho``).
Each measure induces an SNR axis; the optical axes decompose into half the
electrical SNR plus a geometry-only offset.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .geometry import CONE_SLOPE, Constellation, min_distance


class PowerMeasure(enum.Enum):
    """Selects one of the three power/SNR measures (also used as an
    optimization objective selector)."""

    AVG_ELECTRICAL = "avg-electrical"
    AVG_OPTICAL = "avg-optical"
    PEAK_OPTICAL = "peak-optical"


# unit-dmin on-off keying reference: energy, DC mean, peak, rate
OOK_ES = 0.5
OOK_MEAN_DC = 0.5
OOK_PEAK = 1.0
OOK_RATE = 1.0


@dataclass(frozen=True)
class PowerSummary:
    es: float
    mean_dc: float
    peak_moment: float
    dmin: float
    m: int
    bandwidth_factor: int


def peak_moments(points) -> np.ndarray:
    """Per-point peak contribution ``w1 + sqrt(2 (w2^2 + w3^2))``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return pts[:, 0] + CONE_SLOPE * np.hypot(pts[:, 1], pts[:, 2])


def power_summary(c: Constellation) -> PowerSummary:
    pts = c.points
    return PowerSummary(
        es=float(np.mean(np.sum(pts * pts, axis=1))),
        mean_dc=float(np.mean(pts[:, 0])),
        peak_moment=float(np.max(peak_moments(pts))),
        dmin=min_distance(c),
        m=c.m,
        bandwidth_factor=c.bandwidth_factor,
    )


def objective_value(c: Constellation, objective: PowerMeasure) -> float:
    """Value of the selected power objective for a constellation."""
    pts = c.points
    if objective is PowerMeasure.AVG_ELECTRICAL:
        return float(np.mean(np.sum(pts * pts, axis=1)))
    if objective is PowerMeasure.AVG_OPTICAL:
        return float(np.mean(pts[:, 0]))
    return float(np.max(peak_moments(pts)))


def snr_geometry_offset(c: Constellation, measure: PowerMeasure) -> float:
    """Geometry-only dB offset of an optical SNR axis from the electrical one.

    The optical axes satisfy ``gamma_opt = gamma_eb / 2 + offset``; the
    electrical axis has offset zero by definition.
    """
    if measure is PowerMeasure.AVG_ELECTRICAL:
        return 0.0
    s = power_summary(c)
    if s.es <= 0.0:
        raise ValueError("snr_geometry_offset requires positive symbol energy")
    num = s.mean_dc if measure is PowerMeasure.AVG_OPTICAL else s.peak_moment
    return float(10.0 * np.log10(num / np.sqrt(s.es)))


def gamma_from_eb(gamma_eb_db: float, c: Constellation, measure: PowerMeasure) -> float:
    """Convert an electrical SNR value to the requested measure's axis."""
    if measure is PowerMeasure.AVG_ELECTRICAL:
        return float(gamma_eb_db)
    return 0.5 * float(gamma_eb_db) + snr_geometry_offset(c, measure)


def gamma_to_eb(gamma_db: float, c: Constellation, measure: PowerMeasure) -> float:
    """Convert an SNR value on the requested axis back to electrical SNR."""
    if measure is PowerMeasure.AVG_ELECTRICAL:
        return float(gamma_db)
    return 2.0 * (float(gamma_db) - snr_geometry_offset(c, measure))


def spectral_efficiency(rate_bits_per_symbol: float, bandwidth_factor: float) -> float:
    """Bits per second per Hz for a given per-symbol rate and bandwidth factor."""
    if rate_bits_per_symbol < 0:
        raise ValueError("rate must be nonnegative")
    if bandwidth_factor not in (1, 2):
        raise ValueError("bandwidth_factor must be 1 or 2")
    return float(rate_bits_per_symbol) / float(bandwidth_factor)


def asymptotic_gain_vs_ook(c: Constellation, measure: PowerMeasure) -> float:
    """High-SNR dB gain over on-off keying at equal bit rate and unit dmin.

    Positive values mean the constellation needs less power than OOK for the
    same asymptotic error rate.  The input must be normalized to unit
    minimum distance.
    """
    s = power_summary(c)
    if abs(s.dmin - 1.0) > 1e-6:
        raise ValueError("asymptotic gains require a unit-dmin constellation")
    rate = np.log2(s.m)
    if measure is PowerMeasure.AVG_ELECTRICAL:
        ratio = (OOK_ES / OOK_RATE) / (s.es / rate)
    elif measure is PowerMeasure.AVG_OPTICAL:
        ratio = (OOK_MEAN_DC / np.sqrt(OOK_RATE)) / (s.mean_dc / np.sqrt(rate))
    else:
        ratio = (OOK_PEAK / np.sqrt(OOK_RATE)) / (s.peak_moment / np.sqrt(rate))
    return float(10.0 * np.log10(ratio))


SUMMARY_COLUMNS = (
    "name",
    "M",
    "bandwidth_factor",
    "es",
    "mean_dc",
    "peak_moment",
    "gain_e_dB",
    "gain_o_dB",
    "gain_p_dB",
)


def summary_row(name: str, c: Constellation) -> tuple:
    """One row of the power/gain summary table."""
    s = power_summary(c)
    return (
        name,
        s.m,
        s.bandwidth_factor,
        s.es,
        s.mean_dc,
        s.peak_moment,
        asymptotic_gain_vs_ook(c, PowerMeasure.AVG_ELECTRICAL),
        asymptotic_gain_vs_ook(c, PowerMeasure.AVG_OPTICAL),
        asymptotic_gain_vs_ook(c, PowerMeasure.PEAK_OPTICAL),
    )
