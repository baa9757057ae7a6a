"""Signal-space primitives for cone-constrained constellations.

A constellation is an ordered set of points in the 3-d signal space spanned
by a DC basis function and an in-phase/quadrature subcarrier pair.  Every
transmittable point must lie in the admissible cone

    w1 >= sqrt(2 * (w2**2 + w3**2)),

a circular cone with apex at the origin, axis along the first coordinate and
half-apex angle ``acos(1/3) / 2``.  All operations here are pure functions on
immutable values and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import pdist

CONE_SLOPE = float(np.sqrt(2.0))
DEFAULT_TOL = 1e-9

# tolerance for grouping rotationally equivalent anchor points
_ANCHOR_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Constellation:
    """Ordered list of signal-space points plus bandwidth bookkeeping.

    Parameters
    ----------
    points : array_like, shape (M, 3)
        Coordinates of the M constellation points.
    bandwidth_factor : {1, 2}
        Occupied bandwidth in units of the symbol rate: 1 for formats that
        use only the DC dimension, 2 for subcarrier formats.
    name : str
        Optional label carried through serialization.
    """

    points: np.ndarray
    bandwidth_factor: int = 2
    name: str = ""

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"points must have shape (M, 3), got {pts.shape}")
        if pts.shape[0] < 1:
            raise ValueError("constellation needs at least one point")
        if not np.all(np.isfinite(pts)):
            raise ValueError("constellation coordinates must be finite")
        if self.bandwidth_factor not in (1, 2):
            raise ValueError("bandwidth_factor must be 1 or 2")
        if self.bandwidth_factor == 1 and np.any(pts[:, 1:] != 0.0):
            raise ValueError("bandwidth_factor 1 requires w2 = w3 = 0")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def rate_bits(self) -> float:
        """Uncoded rate log2(M) in bits per symbol."""
        return float(np.log2(self.m))

    def with_points(self, points) -> "Constellation":
        return replace(self, points=points)


def cone_residuals(points) -> np.ndarray:
    """Per-point cone violation ``sqrt(2 (w2^2 + w3^2)) - w1`` (<= 0 inside)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return CONE_SLOPE * np.hypot(pts[:, 1], pts[:, 2]) - pts[:, 0]


def cone_contains(point, tol: float = DEFAULT_TOL) -> bool:
    """Whether a point lies in the admissible cone within an absolute tolerance."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return bool(cone_residuals(point)[0] <= tol)


def project_to_cone(point) -> np.ndarray:
    """Euclidean projection of a single point onto the admissible cone."""
    return project_points_to_cone(np.asarray(point, dtype=float)[None, :])[0]


def project_points_to_cone(points) -> np.ndarray:
    """Row-wise Euclidean projection onto the cone.

    Interior points are returned unchanged, points in the polar cone
    (w1 <= -rho/sqrt(2)) map to the apex, and the rest land on the boundary
    with their radial direction preserved.
    """
    pts = np.array(points, dtype=float)
    w1 = pts[:, 0]
    rho = np.hypot(pts[:, 1], pts[:, 2])
    inside = w1 >= CONE_SLOPE * rho
    to_apex = w1 <= -rho / CONE_SLOPE
    boundary = ~inside & ~to_apex

    out = pts.copy()
    out[to_apex] = 0.0
    if np.any(boundary):
        r_new = (CONE_SLOPE * w1[boundary] + rho[boundary]) / 3.0
        # boundary region implies rho > 0, so the radial direction is defined
        scale = r_new / rho[boundary]
        out[boundary, 0] = CONE_SLOPE * r_new
        out[boundary, 1] = pts[boundary, 1] * scale
        out[boundary, 2] = pts[boundary, 2] * scale
    return out


def min_distance(c: Constellation) -> float:
    """Minimum pairwise Euclidean distance of the constellation."""
    if c.m < 2:
        raise ValueError("min_distance needs at least two points")
    d = float(pdist(c.points).min())
    if d == 0.0:
        raise ValueError("degenerate constellation: duplicate points")
    return d


def normalize_unit_dmin(c: Constellation) -> Constellation:
    """Scale the constellation so its minimum distance is exactly one."""
    return c.with_points(c.points / min_distance(c))


def rotate_about_axis(c: Constellation, angle: float) -> Constellation:
    """Rotate all points by ``angle`` radians about the w1 axis."""
    ca, sa = np.cos(angle), np.sin(angle)
    pts = c.points
    w2 = ca * pts[:, 1] - sa * pts[:, 2]
    w3 = sa * pts[:, 1] + ca * pts[:, 2]
    return c.with_points(np.column_stack([pts[:, 0], w2, w3]))


def _sorted_rows(pts: np.ndarray) -> np.ndarray:
    order = np.lexsort((pts[:, 2], pts[:, 1], pts[:, 0]))
    return pts[order]


def canonicalize(c: Constellation) -> Constellation:
    """Canonical orientation under rotation/reflection about the w1 axis.

    The point with the largest radial magnitude (smallest w1 among ties) is
    rotated onto the half-plane w3 = 0, w2 >= 0; the reflection w3 -> -w3 and
    the choice among tied anchors are resolved by picking the candidate whose
    sorted coordinate list is lexicographically smallest.  Point order in the
    result is sorted, so congruent constellations canonicalize identically
    regardless of input order or orientation.  Power metrics are unchanged.
    """
    pts = np.asarray(c.points, dtype=float)
    radial = np.hypot(pts[:, 1], pts[:, 2])
    rmax = float(radial.max())
    if rmax <= 1e-12:
        # purely axial constellation: rotations are the identity
        return c.with_points(_sorted_rows(pts))

    atol = _ANCHOR_TOL * max(1.0, rmax)
    anchors = np.flatnonzero(radial >= rmax - atol)
    w1_min = pts[anchors, 0].min()
    anchors = anchors[pts[anchors, 0] <= w1_min + atol]

    best = None
    best_key = None
    for i in anchors:
        ct = pts[i, 1] / radial[i]
        st = pts[i, 2] / radial[i]
        w2 = ct * pts[:, 1] + st * pts[:, 2]
        w3 = -st * pts[:, 1] + ct * pts[:, 2]
        for sign in (1.0, -1.0):
            cand = _sorted_rows(np.column_stack([pts[:, 0], w2, sign * w3]))
            key = tuple(np.round(cand, 9).ravel())
            if best_key is None or key < best_key:
                best, best_key = cand, key
    return c.with_points(best)
