"""Discrete vector AWGN channel: ML detection, Monte-Carlo and analytic SER.

The channel adds independent zero-mean Gaussian noise with variance N0/2 per
dimension to the transmitted signal vector.  Monte-Carlo runs are chunked,
and every chunk draws from its own counter-based stream keyed by
(seed, chunk index), so results are bit-identical for any worker schedule.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import erfc, log_ndtr
from scipy.spatial.distance import pdist

from ._kernels import count_detection_errors
from .geometry import Constellation
from .metrics import power_summary

_CHUNK = 1 << 16
_Z95 = 1.959963984540054


@dataclass(frozen=True)
class ChannelConfig:
    """Monte-Carlo channel settings.

    ``n0`` overrides the noise density derived from the SNR argument when
    set; ``symbols`` is the total trial count.
    """

    seed: int = 0
    symbols: int = 1_000_000
    n0: float | None = None

    def __post_init__(self):
        if self.symbols < 1:
            raise ValueError("symbols must be >= 1")
        if self.n0 is not None and self.n0 <= 0:
            raise ValueError("n0 must be positive")


@dataclass(frozen=True)
class SerEstimate:
    errors: int
    trials: int
    ser: float
    ci95_halfwidth: float


def qfunc(x):
    """Gaussian tail probability Q(x)."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def n0_from_gamma_eb(c: Constellation, gamma_eb_db: float) -> float:
    """Noise density for a given electrical SNR per bit (uncoded rate)."""
    es = float(np.mean(np.sum(c.points ** 2, axis=1)))
    eb = es / c.rate_bits
    return eb / 10.0 ** (gamma_eb_db / 10.0)


def detect_ml(y, c: Constellation) -> int:
    """Index of the nearest constellation point (ties to the lowest index)."""
    d2 = np.sum((c.points - np.asarray(y, dtype=float)) ** 2, axis=1)
    return int(np.argmin(d2))


def _wilson_halfwidth(errors: int, trials: int) -> float:
    p = errors / trials
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / trials
    return _Z95 * math.sqrt(p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)) / denom


def _chunk_errors(pts, sigma, seed, chunk_index, n):
    gen = np.random.Generator(np.random.Philox(key=seed).jumped(chunk_index))
    idx = gen.integers(0, pts.shape[0], size=n)
    y = pts[idx] + sigma * gen.standard_normal((n, 3))
    return count_detection_errors(np.ascontiguousarray(y), pts, idx)


def simulate_ser(c: Constellation, gamma_eb_db: float, cfg: ChannelConfig,
                 threads: int = 1) -> SerEstimate:
    """Monte-Carlo symbol error rate at the given electrical SNR per bit.

    Deterministic for a fixed config: the outcome does not depend on
    ``threads`` or on how chunks are scheduled.
    """
    n0 = cfg.n0 if cfg.n0 is not None else n0_from_gamma_eb(c, gamma_eb_db)
    sigma = math.sqrt(n0 / 2.0)
    pts = np.ascontiguousarray(c.points)
    total = cfg.symbols
    chunks = [(k, min(_CHUNK, total - k * _CHUNK))
              for k in range((total + _CHUNK - 1) // _CHUNK)]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            counts = list(pool.map(
                lambda kn: _chunk_errors(pts, sigma, cfg.seed, kn[0], kn[1]), chunks))
        errors = int(sum(counts))
    else:
        errors = sum(_chunk_errors(pts, sigma, cfg.seed, k, n) for k, n in chunks)

    return SerEstimate(
        errors=int(errors),
        trials=total,
        ser=errors / total,
        ci95_halfwidth=_wilson_halfwidth(int(errors), total),
    )


def min_distance_pair_count(c: Constellation, pair_tol: float = 1e-3):
    """Minimum distance and the number of point pairs at that distance.

    ``pair_tol`` is the relative width of the minimum-distance cluster; the
    default absorbs catalog entries whose coordinates are published with
    four decimals only.
    """
    d = pdist(c.points)
    dmin = float(d.min())
    if dmin == 0.0:
        raise ValueError("degenerate constellation: duplicate points")
    k = int(np.sum(d <= dmin * (1.0 + pair_tol)))
    return dmin, k


def union_bound_ser(c: Constellation, gamma_eb_db: float,
                    pair_tol: float = 1e-3) -> float:
    """Nearest-neighbor union bound ``(2K/M) Q(dmin / sqrt(2 N0))``."""
    dmin, k = min_distance_pair_count(c, pair_tol)
    n0 = n0_from_gamma_eb(c, gamma_eb_db)
    return float(2.0 * k / c.m * qfunc(dmin / math.sqrt(2.0 * n0)))


def exact_simplex_ser(m: int, es_simplex_over_n0: float) -> float:
    """Exact SER of an M-point equidistant (simplex) set.

    ``es_simplex_over_n0`` is the zero-mean average symbol energy of the
    simplex divided by the noise density.  Evaluated by adaptive quadrature
    to an absolute error below 1e-12.
    """
    if m < 2:
        raise ValueError("simplex size must be >= 2")
    if es_simplex_over_n0 <= 0:
        raise ValueError("energy ratio must be positive")
    a = math.sqrt(2.0 * es_simplex_over_n0 * m / (m - 1.0))

    def integrand(u):
        # 1 - (1 - Q(u + a))**(m-1), evaluated in log space for stability
        return -np.expm1((m - 1) * log_ndtr(u + a)) * np.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)

    val, _ = quad(integrand, -np.inf, np.inf, epsabs=1e-13, epsrel=1e-11, limit=200)
    return float(val)


def exact_c4_ser(eb_over_n0: float) -> float:
    """Exact SER of the 4-point tetrahedral format at a given Eb/N0.

    Its zero-mean energy equals its energy per bit, so the simplex formula
    applies with the ratio passed straight through.
    """
    return exact_simplex_ser(4, eb_over_n0)


def is_equidistant(c: Constellation, tol: float = 1e-9) -> bool:
    """Whether all pairwise distances agree within ``tol`` (simplex geometry)."""
    d = pdist(c.points)
    return bool(d.max() - d.min() <= tol * max(1.0, d.max()))


def exact_ser_equidistant(c: Constellation, gamma_eb_db: float) -> float:
    """Exact SER for an equidistant constellation at electrical SNR per bit.

    Works for any DC bias: detection depends only on the zero-mean geometry,
    whose average energy is ``es - ||mean||^2``.
    """
    if not is_equidistant(c):
        raise ValueError("exact SER formula requires an equidistant constellation")
    pts = c.points
    es = float(np.mean(np.sum(pts ** 2, axis=1)))
    es_zero_mean = es - float(np.sum(np.mean(pts, axis=0) ** 2))
    n0 = n0_from_gamma_eb(c, gamma_eb_db)
    return exact_simplex_ser(c.m, es_zero_mean / n0)


def gamma_eb_at_ser(ser_fn, target: float = 1e-6, lo: float = -10.0,
                    hi: float = 40.0, tol_db: float = 1e-4) -> float:
    """Electrical SNR at which a monotone SER curve crosses ``target``."""
    if not ser_fn(lo) >= target >= ser_fn(hi):
        raise ValueError("target SER not bracketed on the given interval")
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if ser_fn(mid) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
