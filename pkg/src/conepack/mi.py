"""Mutual information of uniform discrete inputs on the vector AWGN channel.

Provides Gauss-Hermite and Monte-Carlo estimators of I(x;y), spectral
efficiency curves under the three SNR measures (with the coded-rate
self-consistency Eb = Es/I), the closed-form low-SNR zero-crossings, the
corresponding lower bounds, and the single-nonzero-point constructions that
attain them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import logsumexp

from .geometry import CONE_SLOPE, Constellation
from .metrics import PowerMeasure, peak_moments, snr_geometry_offset

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class GaussHermite:
    """Tensor-product Gauss-Hermite quadrature of the given per-axis order."""

    order: int = 32


@dataclass(frozen=True)
class MonteCarlo:
    """Seeded Monte-Carlo noise averaging with the given sample count."""

    samples: int = 100_000
    seed: int = 0


@dataclass(frozen=True)
class MiEstimate:
    bits: float
    std_error: float


@dataclass(frozen=True)
class ZeroCrossing:
    measure: PowerMeasure
    value_db: float


@dataclass(frozen=True)
class PerformanceCurve:
    measure: PowerMeasure
    quantity: str
    points: tuple  # ((snr_db, value), ...)


def _difference_basis(points: np.ndarray) -> np.ndarray:
    """Orthonormal basis (3, k) of the span of all pairwise differences."""
    d = points - points[0]
    _, s, vt = np.linalg.svd(d, full_matrices=False)
    if s.size == 0 or s.max() == 0.0:
        return np.zeros((3, 0))
    k = int(np.sum(s > 1e-12 * s.max()))
    return vt[:k].T


def _gh_noise(order: int, k: int):
    x, w = np.polynomial.hermite.hermgauss(order)
    z1 = math.sqrt(2.0) * x
    w1 = w / math.sqrt(math.pi)
    grids = np.meshgrid(*([z1] * k), indexing="ij")
    z = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.ones(z.shape[0])
    for g in np.meshgrid(*([w1] * k), indexing="ij"):
        weights = weights * g.ravel()
    return z, weights


def _conditional_bits(points, n0, z, weights):
    """Weighted average of log2 sum_j exp((|n|^2 - |n + d_ij|^2)/N0) per input.

    ``z`` holds standardized noise coordinates in the difference span; the
    orthogonal complement cancels from the exponent.
    """
    basis = _difference_basis(points)
    if basis.shape[1] == 0:
        # all points coincide: output carries no information
        return np.full(len(points), math.log2(len(points))), None
    e = (points[:, None, :] - points[None, :, :]) @ basis
    sq = np.sum(e * e, axis=2)
    sigma = math.sqrt(n0 / 2.0)
    z = z[:, : basis.shape[1]]
    out = np.empty(len(points))
    samples = np.zeros(z.shape[0])
    for i in range(len(points)):
        a = (-2.0 * sigma * (z @ e[i].T) - sq[i]) / n0
        li = logsumexp(a, axis=1) / _LN2
        out[i] = weights @ li
        samples += li
    return out, samples / len(points)


def mutual_information(c: Constellation, n0: float,
                       method=GaussHermite()) -> MiEstimate:
    """I(x;y) in bits per symbol for uniform inputs at noise density ``n0``."""
    if n0 <= 0:
        raise ValueError("n0 must be positive")
    pts = np.asarray(c.points, dtype=float)
    k = _difference_basis(pts).shape[1]
    if isinstance(method, GaussHermite):
        order = method.order if k > 1 else max(method.order, 96)
        z, w = _gh_noise(order, max(k, 1))
        cond, _ = _conditional_bits(pts, n0, z, w)
        return MiEstimate(bits=float(np.log2(c.m) - np.mean(cond)), std_error=0.0)
    if isinstance(method, MonteCarlo):
        gen = np.random.Generator(np.random.Philox(key=method.seed))
        z = gen.standard_normal((method.samples, max(k, 1)))
        w = np.full(method.samples, 1.0 / method.samples)
        cond, per_sample = _conditional_bits(pts, n0, z, w)
        bits = float(np.log2(c.m) - np.mean(cond))
        se = 0.0
        if per_sample is not None:
            se = float(np.std(per_sample, ddof=1) / math.sqrt(method.samples))
        return MiEstimate(bits=bits, std_error=se)
    raise TypeError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# SNR curves and crossovers
# ---------------------------------------------------------------------------

class MiCurve:
    """Reusable I(N0) interpolant for one constellation.

    Evaluates the mutual information once on a dense logarithmic noise grid
    and answers rate/SNR queries by monotone interpolation, including the
    coded-rate mapping gamma_eb = 10 log10(Es / (I * N0)).
    """

    def __init__(self, c: Constellation, method=GaussHermite(),
                 decades=(-5.0, 4.0), points_per_decade: int = 14):
        self.constellation = c
        self.es = float(np.mean(np.sum(c.points ** 2, axis=1)))
        n = int(round((decades[1] - decades[0]) * points_per_decade)) + 1
        self.log_n0 = math.log10(self.es) + np.linspace(decades[0], decades[1], n)
        self.mi = np.array([
            mutual_information(c, 10.0 ** g, method).bits for g in self.log_n0
        ])
        mi_r, ln_r = self.mi[::-1], self.log_n0[::-1]
        keep = np.concatenate([[True], np.diff(mi_r) > 1e-13])
        self._n0_of_mi = PchipInterpolator(mi_r[keep], ln_r[keep])
        self._mi_lo = float(mi_r[keep].min())
        self._mi_hi = float(mi_r[keep].max())

    def bits_range(self):
        return self._mi_lo, self._mi_hi

    def n0_at_bits(self, bits: float) -> float:
        if not (self._mi_lo <= bits <= self._mi_hi):
            raise ValueError(f"rate {bits} outside tabulated range "
                             f"[{self._mi_lo:.3g}, {self._mi_hi:.3g}]")
        return 10.0 ** float(self._n0_of_mi(bits))

    def gamma_db(self, bits: float, measure: PowerMeasure) -> float:
        """SNR on the requested axis at which the coded rate equals ``bits``."""
        n0 = self.n0_at_bits(bits)
        gamma_eb = 10.0 * math.log10(self.es / (bits * n0))
        if measure is PowerMeasure.AVG_ELECTRICAL:
            return gamma_eb
        return 0.5 * gamma_eb + snr_geometry_offset(self.constellation, measure)

    def eta_at_gamma(self, gamma_db: float, measure: PowerMeasure) -> float:
        """Spectral efficiency at the given SNR (0 below the zero-crossing)."""
        lo, hi = self._mi_lo, self._mi_hi
        if self.gamma_db(lo, measure) >= gamma_db:
            return 0.0
        if self.gamma_db(hi, measure) <= gamma_db:
            lo = hi  # saturated: report the top of the tabulated range
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if self.gamma_db(mid, measure) > gamma_db:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi) / self.constellation.bandwidth_factor


def spectral_efficiency_curve(c: Constellation, measure: PowerMeasure,
                              snr_grid_db, method=GaussHermite()) -> PerformanceCurve:
    """Coded spectral efficiency versus SNR on the requested axis."""
    curve = MiCurve(c, method)
    pts = tuple((float(g), curve.eta_at_gamma(float(g), measure))
                for g in np.asarray(snr_grid_db, dtype=float))
    return PerformanceCurve(measure=measure, quantity="spectral_efficiency", points=pts)


def find_crossover(curve_a: MiCurve, curve_b: MiCurve, measure: PowerMeasure,
                   eta_lo: float, eta_hi: float):
    """Spectral efficiency at which two formats need the same SNR.

    Bisects the SNR gap between the formats' constant-rate curves over
    ``[eta_lo, eta_hi]``; returns ``(eta, gamma_db)`` at the crossing.
    """
    def gap(eta):
        ga = curve_a.gamma_db(eta * curve_a.constellation.bandwidth_factor, measure)
        gb = curve_b.gamma_db(eta * curve_b.constellation.bandwidth_factor, measure)
        return ga - gb

    lo, hi = float(eta_lo), float(eta_hi)
    flo, fhi = gap(lo), gap(hi)
    if flo == 0.0:
        return lo, curve_a.gamma_db(lo * curve_a.constellation.bandwidth_factor, measure)
    if flo * fhi > 0.0:
        raise ValueError("no crossover bracketed on the given efficiency window")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if gap(mid) * flo > 0.0:
            lo = mid
        else:
            hi = mid
    eta = 0.5 * (lo + hi)
    return eta, curve_a.gamma_db(eta * curve_a.constellation.bandwidth_factor, measure)


# ---------------------------------------------------------------------------
# Wideband (low-SNR) analysis
# ---------------------------------------------------------------------------

def zero_crossing(c: Constellation, measure: PowerMeasure) -> ZeroCrossing:
    """Minimum SNR at which the coded spectral efficiency becomes positive.

    Closed form; requires a non-collapsed constellation (not all points
    identical).
    """
    pts = np.asarray(c.points, dtype=float)
    m = len(pts)
    total = pts.sum(axis=0)
    energy = float(np.sum(pts * pts))
    denom = m * energy - float(np.dot(total, total))
    if denom <= 0.0:
        raise ValueError("zero-crossing undefined: all points identical")
    if measure is PowerMeasure.AVG_ELECTRICAL:
        value = 10.0 * math.log10(_LN2 / (1.0 - np.dot(total, total) / (m * energy)))
    elif measure is PowerMeasure.AVG_OPTICAL:
        value = 5.0 * math.log10(total[0] ** 2 / denom * _LN2)
    else:
        peak = float(np.max(peak_moments(pts)))
        value = 5.0 * math.log10((m * peak) ** 2 / denom * _LN2)
    return ZeroCrossing(measure=measure, value_db=float(value))


def wideband_bound(m: int, measure: PowerMeasure) -> float:
    """Lower bound on the zero-crossing over all M-point cone constellations.

    The peak-optical bound is conjectured (numerically supported, unproven);
    see :func:`is_conjectured_bound`.
    """
    if m < 2:
        raise ValueError("bound requires m >= 2")
    if measure is PowerMeasure.AVG_ELECTRICAL:
        return float(10.0 * math.log10(m * _LN2 / (m - 1.0)))
    if measure is PowerMeasure.AVG_OPTICAL:
        return float(5.0 * math.log10(2.0 / (3.0 * (m - 1.0)) * _LN2))
    return float(5.0 * math.log10(4.0 * _LN2))


def is_conjectured_bound(measure: PowerMeasure) -> bool:
    return measure is PowerMeasure.PEAK_OPTICAL


class WidebandVariant(enum.Enum):
    AXIS = "axis-e"         # nonzero point on the cone axis, bandwidth factor 1
    BOUNDARY = "boundary-o"  # nonzero point on the cone boundary, factor 2


def make_wideband_constellation(m: int, es: float,
                                variant: WidebandVariant) -> Constellation:
    """M-point format with m-1 points at the origin and one nonzero point.

    The axis variant attains the electrical zero-crossing bound; the boundary
    variant attains the average-optical one.  ``es`` sets the average energy.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    if es <= 0:
        raise ValueError("es must be positive")
    pts = np.zeros((m, 3))
    if variant is WidebandVariant.AXIS:
        pts[-1] = (math.sqrt(m * es), 0.0, 0.0)
        bwf = 1
    else:
        pts[-1] = (math.sqrt(2.0 * m * es / 3.0), 0.0, math.sqrt(m * es / 3.0))
        bwf = 2
    name = f"{'E' if variant is WidebandVariant.AXIS else 'O'}{m}"
    return Constellation(pts, bwf, name)
