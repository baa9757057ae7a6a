"""Face-centered-cubic lattice slices inside the cone and best-subset search.

The lattice is realized with unit nearest-neighbor distance, one point at
the cone apex, and two basis vectors in the w2-w3 plane:

    b1 = (0, 1, 0)
    b2 = (0, 1/2, sqrt(3)/2)
    b3 = (sqrt(2/3), 1/2, sqrt(3)/6)

so the cone axis pierces the stacked triangular layers at heights
k * sqrt(2/3).  Because lattice membership already guarantees the unit
minimum distance, each power objective reduces to a per-point cost and the
best M-subset is found by sorted selection; ties at the selection boundary
are broken by secondary objectives and finally by canonical lexicographic
order.  Any rotation of the realized lattice about the axis is equivalent
after canonicalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .geometry import Constellation, canonicalize
from .metrics import PowerMeasure, peak_moments

LAYER_HEIGHT = math.sqrt(2.0 / 3.0)
_S3 = math.sqrt(3.0)
_TOL = 1e-9
_MAX_TIE_COMBOS = 20_000


@dataclass(frozen=True)
class LatticeSlice:
    """Lattice points inside the cone up to a height cap, sorted by rows."""

    points: np.ndarray
    height_cap: float


def _layer_points(k: int) -> np.ndarray:
    """In-cone lattice points of layer ``k`` as (n, 3) rows."""
    w1 = k * LAYER_HEIGHT
    r = k / _S3  # cone radius at this height
    off2 = 0.5 * k
    off3 = (_S3 / 6.0) * k
    pts = []
    j_lo = int(math.floor((-r - off3) / (_S3 / 2.0))) - 1
    j_hi = int(math.ceil((r - off3) / (_S3 / 2.0))) + 1
    for j in range(j_lo, j_hi + 1):
        w3 = off3 + j * (_S3 / 2.0)
        if abs(w3) > r + _TOL:
            continue
        i_lo = int(math.floor(-r - off2 - 0.5 * j)) - 1
        i_hi = int(math.ceil(r - off2 - 0.5 * j)) + 1
        for i in range(i_lo, i_hi + 1):
            w2 = off2 + 0.5 * j + i
            if w2 * w2 + w3 * w3 <= r * r + _TOL:
                pts.append((w1, w2, w3))
    return np.array(pts, dtype=float).reshape(-1, 3)


def enumerate_lattice(height_cap: float) -> LatticeSlice:
    """All lattice points in the cone with first coordinate <= ``height_cap``."""
    if height_cap < 0:
        raise ValueError("height_cap must be nonnegative")
    k_max = int(math.floor(height_cap / LAYER_HEIGHT + _TOL))
    layers = [_layer_points(k) for k in range(k_max + 1)]
    pts = np.vstack([p for p in layers if p.size]) if layers else np.zeros((0, 3))
    order = np.lexsort((pts[:, 2], pts[:, 1], pts[:, 0]))
    return LatticeSlice(points=pts[order], height_cap=float(height_cap))


def _point_costs(pts: np.ndarray, objective: PowerMeasure) -> np.ndarray:
    if objective is PowerMeasure.AVG_ELECTRICAL:
        return np.sum(pts * pts, axis=1)
    if objective is PowerMeasure.AVG_OPTICAL:
        return pts[:, 0].copy()
    return peak_moments(pts)


def _min_layer_cost(k: int, objective: PowerMeasure) -> float:
    """Smallest possible per-point cost on layer ``k`` (for stop certification)."""
    w1 = k * LAYER_HEIGHT
    rho_min = 0.0 if k % 3 == 0 else 1.0 / _S3
    if objective is PowerMeasure.AVG_ELECTRICAL:
        return w1 * w1 + rho_min * rho_min
    if objective is PowerMeasure.AVG_OPTICAL:
        return w1
    return w1 + math.sqrt(2.0) * rho_min


_SECONDARY = {
    PowerMeasure.AVG_ELECTRICAL: (PowerMeasure.AVG_OPTICAL, PowerMeasure.PEAK_OPTICAL),
    PowerMeasure.AVG_OPTICAL: (PowerMeasure.AVG_ELECTRICAL, PowerMeasure.PEAK_OPTICAL),
    PowerMeasure.PEAK_OPTICAL: (PowerMeasure.AVG_ELECTRICAL, PowerMeasure.AVG_OPTICAL),
}


def _select_subset(pts: np.ndarray, m: int, objective: PowerMeasure) -> np.ndarray:
    """Best m-subset of the slice under the per-point cost ranking."""
    o2, o3 = _SECONDARY[objective]
    cost = np.round(
        np.column_stack([_point_costs(pts, o) for o in (objective, o2, o3)]), 12
    )
    order = np.lexsort((cost[:, 2], cost[:, 1], cost[:, 0]))
    boundary = cost[order[m - 1]]
    is_tied = np.all(cost == boundary, axis=1)
    forced = [i for i in order[:m] if not is_tied[i]]
    tie_pool = [int(i) for i in order if is_tied[i]]
    slots = m - len(forced)
    if slots == len(tie_pool):
        return pts[np.array(forced + tie_pool, dtype=int)]

    n_combos = math.comb(len(tie_pool), slots)
    if n_combos > _MAX_TIE_COMBOS:
        # objective-equivalent fill; keep the deterministic sorted prefix
        return pts[np.array(forced + tie_pool[:slots], dtype=int)]
    best = None
    best_key = None
    base = pts[np.array(forced, dtype=int)].reshape(-1, 3)
    for combo in combinations(tie_pool, slots):
        cand = np.vstack([base, pts[np.array(combo, dtype=int)]])
        canon = canonicalize(Constellation(cand)).points
        key = tuple(np.round(canon, 9).ravel())
        if best_key is None or key < best_key:
            best, best_key = cand, key
    return best


def lattice_search(m: int, objective: PowerMeasure,
                   height_cap: float | None = None) -> Constellation:
    """Power-optimal m-point subset of the in-cone lattice, canonicalized.

    With ``height_cap`` unset the slice grows until no taller layer could
    hold a cheaper point than the worst one selected; an explicit cap raises
    if the slice is too small or optimality cannot be certified within it.
    """
    if m < 2:
        raise ValueError("m must be >= 2")
    auto = height_cap is None
    k_cap = 1 if auto else int(math.floor(height_cap / LAYER_HEIGHT + _TOL))

    while True:
        sl = enumerate_lattice(k_cap * LAYER_HEIGHT + _TOL)
        if len(sl.points) < m:
            if auto:
                k_cap += 1
                continue
            raise ValueError(
                f"lattice slice up to height {height_cap} holds only "
                f"{len(sl.points)} points; increase the cap")
        subset = _select_subset(sl.points, m, objective)
        worst = float(np.max(np.round(_point_costs(subset, objective), 12)))
        # costs of whole layers are nondecreasing beyond three layers out
        next_min = min(_min_layer_cost(k, objective) for k in range(k_cap + 1, k_cap + 4))
        if next_min > worst + _TOL:
            return canonicalize(Constellation(subset, bandwidth_factor=2))
        if not auto:
            raise ValueError(
                f"height cap {height_cap} cannot certify optimality; "
                f"layer {k_cap + 1} may still improve the objective")
        k_cap += 1
