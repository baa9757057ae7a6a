"""Sphere packing in the cone: multistart constrained power minimization.

Places M points inside the admissible cone at pairwise distance >= 1 while
minimizing one of the three power objectives.  Each restart samples points
uniformly in a cone-truncated box, runs quadratic-penalty descent (L-BFGS-B
with analytic gradients, growing the penalty weight whenever constraints
remain violated), then switches to cylindrical coordinates -- where the cone
and peak constraints are linear -- for an SQP refinement, and finishes with
an exact cone projection and rescale to unit minimum distance.

Restart streams are keyed by (seed, restart index), so results are
reproducible and independent of how restarts are scheduled across workers.
The problem is nonconvex; the returned constellation is the best local
solution over the restarts, with exact ties resolved by the remaining power
measures and canonical order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from warnings import warn

import numpy as np
from scipy.optimize import minimize
from scipy.spatial.distance import pdist

from ._kernels import penalty_value_grad
from .geometry import (
    CONE_SLOPE,
    Constellation,
    canonicalize,
    cone_residuals,
    project_points_to_cone,
)
from .metrics import PowerMeasure, objective_value

_OBJ_CODE = {
    PowerMeasure.AVG_ELECTRICAL: 0,
    PowerMeasure.AVG_OPTICAL: 1,
    PowerMeasure.PEAK_OPTICAL: 2,
}

# restarts whose objective lies within this band of the best are re-ranked
# by the secondary measures (distinct global optima can tie exactly)
_TIE_BAND = 1e-7


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 200
    max_iters: int = 5000
    seed: int = 0
    penalty_growth: float = 10.0
    constraint_tol: float = 1e-9
    objective_tol: float = 1e-10
    init_box_height: float | None = None  # default 3 * m**(1/3)

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValueError("restarts and max_iters must be positive")
        if self.penalty_growth <= 1.0:
            raise ValueError("penalty_growth must exceed 1")
        if not 0.0 < self.constraint_tol < 1e-6:
            raise ValueError("constraint_tol must lie in (0, 1e-6)")
        if self.objective_tol <= 0.0:
            raise ValueError("objective_tol must be positive")


@dataclass(frozen=True)
class OptimizeResult:
    constellation: Constellation
    objective: float
    diagnostics: dict


def _sample_in_cone(m, rng, height):
    """Uniform points in the cone-truncated box [0, H] x [-H/sqrt2, H/sqrt2]^2."""
    out = []
    half = height / CONE_SLOPE
    while len(out) < m:
        cand = rng.uniform([0.0, -half, -half], [height, half, half], size=(m, 3))
        keep = cand[:, 0] >= CONE_SLOPE * np.hypot(cand[:, 1], cand[:, 2])
        out.extend(cand[keep])
    return np.array(out[:m])


def _penalty_descent(x0, m, obj_code, cfg: OptimizerConfig):
    """Penalty continuation; stops once residuals are small enough to hand
    the iterate to the exact-constraint refinement."""
    x = x0
    mu = 10.0
    per_stage = min(cfg.max_iters, 300)
    for _ in range(8):
        res = minimize(
            penalty_value_grad, x, args=(m, obj_code, mu), jac=True,
            method="L-BFGS-B", options={"maxiter": per_stage},
        )
        x = res.x
        pts = x[: 3 * m].reshape(m, 3)
        residual = _feasibility_residual(pts)
        if residual <= 1e-3:
            break
        mu *= cfg.penalty_growth
    return x


def _feasibility_residual(pts):
    cone = float(np.max(cone_residuals(pts), initial=0.0))
    d = pdist(pts)
    sep = float(np.max(1.0 - d, initial=0.0))
    return max(cone, sep, 0.0)


def _to_polar(pts, obj_code):
    rho = np.hypot(pts[:, 1], pts[:, 2])
    theta = np.arctan2(pts[:, 2], pts[:, 1])
    theta[rho < 1e-12] = 0.0
    v = np.concatenate([pts[:, 0], rho, theta])
    if obj_code == 2:
        peak = float(np.max(pts[:, 0] + CONE_SLOPE * rho))
        v = np.append(v, peak + 1e-3)
    return v


def _to_cartesian(v, m):
    s1, rho, theta = v[:m], v[m:2 * m], v[2 * m:3 * m]
    return np.column_stack([s1, rho * np.cos(theta), rho * np.sin(theta)])


def _refine_sqp(pts, objective: PowerMeasure, max_iters: int):
    """SQP polish in cylindrical coordinates with exact smooth constraints."""
    m = len(pts)
    obj_code = _OBJ_CODE[objective]
    n = 3 * m + (1 if obj_code == 2 else 0)
    iu, ju = np.triu_indices(m, 1)
    npairs = len(iu)
    rows = np.arange(npairs)

    def pair_fun(v):
        s1, rho, th = v[:m], v[m:2 * m], v[2 * m:3 * m]
        dth = th[iu] - th[ju]
        return ((s1[iu] - s1[ju]) ** 2 + rho[iu] ** 2 + rho[ju] ** 2
                - 2.0 * rho[iu] * rho[ju] * np.cos(dth) - 1.0)

    def pair_jac(v):
        s1, rho, th = v[:m], v[m:2 * m], v[2 * m:3 * m]
        dth = th[iu] - th[ju]
        c, s = np.cos(dth), np.sin(dth)
        jac = np.zeros((npairs, n))
        ds1 = 2.0 * (s1[iu] - s1[ju])
        jac[rows, iu] = ds1
        jac[rows, ju] = -ds1
        jac[rows, m + iu] = 2.0 * rho[iu] - 2.0 * rho[ju] * c
        jac[rows, m + ju] = 2.0 * rho[ju] - 2.0 * rho[iu] * c
        jac[rows, 2 * m + iu] = 2.0 * rho[iu] * rho[ju] * s
        jac[rows, 2 * m + ju] = -2.0 * rho[iu] * rho[ju] * s
        return jac

    cone_jac = np.zeros((m, n))
    cone_jac[np.arange(m), np.arange(m)] = 1.0
    cone_jac[np.arange(m), m + np.arange(m)] = -CONE_SLOPE
    constraints = [
        {"type": "ineq", "fun": pair_fun, "jac": pair_jac},
        {"type": "ineq", "fun": lambda v: v[:m] - CONE_SLOPE * v[m:2 * m],
         "jac": lambda v: cone_jac},
    ]

    if obj_code == 0:
        def fun(v):
            return (np.sum(v[:m] ** 2) + np.sum(v[m:2 * m] ** 2)) / m

        def jac(v):
            g = np.zeros(n)
            g[:m] = 2.0 * v[:m] / m
            g[m:2 * m] = 2.0 * v[m:2 * m] / m
            return g
    elif obj_code == 1:
        grad = np.zeros(n)
        grad[:m] = 1.0 / m
        fun = lambda v: float(np.sum(v[:m])) / m
        jac = lambda v: grad
    else:
        peak_jac = np.zeros((m, n))
        peak_jac[:, -1] = 1.0
        peak_jac[np.arange(m), np.arange(m)] = -1.0
        peak_jac[np.arange(m), m + np.arange(m)] = -CONE_SLOPE
        constraints.append(
            {"type": "ineq",
             "fun": lambda v: v[-1] - v[:m] - CONE_SLOPE * v[m:2 * m],
             "jac": lambda v: peak_jac})
        grad = np.zeros(n)
        grad[-1] = 1.0
        fun = lambda v: float(v[-1])
        jac = lambda v: grad

    bounds = [(0.0, None)] * (2 * m) + [(None, None)] * m
    if obj_code == 2:
        bounds.append((None, None))

    res = minimize(
        fun, _to_polar(pts, obj_code), jac=jac, method="SLSQP", bounds=bounds,
        constraints=constraints,
        options={"maxiter": min(max_iters, 300), "ftol": 1e-12},
    )
    return _to_cartesian(res.x, m), bool(res.success)


def _exact_fixup(pts):
    """Exact feasibility: cone projection, then rescale to unit dmin."""
    out = project_points_to_cone(pts)
    d = float(pdist(out).min())
    if d <= 1e-9:
        raise RuntimeError("restart collapsed to coincident points")
    return out / d


def _objectives_tuple(pts):
    es = float(np.mean(np.sum(pts * pts, axis=1)))
    mean_dc = float(np.mean(pts[:, 0]))
    peak = float(np.max(pts[:, 0] + CONE_SLOPE * np.hypot(pts[:, 1], pts[:, 2])))
    return es, mean_dc, peak


def _run_restart(args):
    m, objective, cfg, height, index = args
    obj_code = _OBJ_CODE[objective]
    rng = np.random.Generator(np.random.Philox(key=cfg.seed).jumped(index))
    pts0 = _sample_in_cone(m, rng, height)
    x0 = pts0.reshape(-1)
    if obj_code == 2:
        x0 = np.append(x0, _objectives_tuple(pts0)[2] + 0.5)
    x = _penalty_descent(x0, m, obj_code, cfg)
    pts = x[: 3 * m].reshape(m, 3)
    refined, _ = _refine_sqp(pts, objective, cfg.max_iters)
    for candidate in (refined, pts, pts0):
        try:
            final = _exact_fixup(candidate)
            break
        except RuntimeError:
            continue
    return _objectives_tuple(final), final


def _contains_c4_core(pts, tol=1e-3):
    """Report whether the canonical 4-point tetrahedral core is present."""
    h = math.sqrt(2.0 / 3.0)
    r = 1.0 / math.sqrt(3.0)
    apex = np.flatnonzero(np.linalg.norm(pts, axis=1) <= tol)
    if apex.size == 0:
        return False
    rho = np.hypot(pts[:, 1], pts[:, 2])
    ring = np.flatnonzero((np.abs(pts[:, 0] - h) <= tol) & (np.abs(rho - r) <= tol))
    if ring.size < 3:
        return False
    from itertools import combinations
    for tri in combinations(ring, 3):
        d = pdist(pts[list(tri)])
        if np.all(np.abs(d - 1.0) <= 2 * tol):
            return True
    return False


def optimize(m: int, objective: PowerMeasure, cfg: OptimizerConfig | None = None,
             threads: int = 1) -> OptimizeResult:
    """Best constellation over all restarts, canonicalized.

    Deterministic for fixed (m, objective, cfg): per-restart random streams
    are derived from (cfg.seed, restart index) and the reduction is ordered,
    so any ``threads`` value yields the identical result.
    """
    if not 2 <= m <= 64:
        raise ValueError("m must be between 2 and 64")
    cfg = cfg or OptimizerConfig()
    height = cfg.init_box_height or 3.0 * m ** (1.0 / 3.0)
    jobs = [(m, objective, cfg, height, r) for r in range(cfg.restarts)]

    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_restart, jobs, chunksize=max(1, cfg.restarts // (4 * threads))))
    else:
        results = [_run_restart(j) for j in jobs]

    primary_idx = _OBJ_CODE[objective]
    primaries = np.array([obj_tuple[primary_idx] for obj_tuple, _ in results])
    best_primary = float(primaries.min())

    best_key = None
    best_pts = None
    best_restart = -1
    for r, (obj_tuple, pts) in enumerate(results):
        if obj_tuple[primary_idx] > best_primary + _TIE_BAND:
            continue
        canon = canonicalize(Constellation(pts)).points
        key = (tuple(np.round(obj_tuple, 8)), tuple(np.round(canon, 6).ravel()), r)
        if best_key is None or key < best_key:
            best_key, best_pts, best_restart = key, canon, r

    constellation = Constellation(best_pts, bandwidth_factor=2)
    residual = _feasibility_residual(constellation.points)
    dmin_err = abs(float(pdist(constellation.points).min()) - 1.0)
    if residual > cfg.constraint_tol or dmin_err > cfg.constraint_tol:
        raise RuntimeError(
            f"optimize({m}, {objective.value}): no feasible solution within "
            f"tolerance (residual {residual:.2e}, dmin error {dmin_err:.2e})")

    diagnostics = {
        "restart_objectives": [float(t[primary_idx]) for t, _ in results],
        "best_restart": best_restart,
        "cone_residual_max": float(np.max(cone_residuals(constellation.points))),
        "dmin_error": dmin_err,
        "contains_tetrahedral_core": bool(
            m >= 4 and _contains_c4_core(constellation.points)),
    }
    return OptimizeResult(
        constellation=constellation,
        objective=float(objective_value(constellation, objective)),
        diagnostics=diagnostics,
    )


def polish(c: Constellation, objective: PowerMeasure,
           cfg: OptimizerConfig | None = None) -> Constellation:
    """Restore exact feasibility and local optimality of a near-feasible input.

    Falls back to penalty descent when points overlap; if the refinement
    cannot beat the plainly projected input, that input is returned with a
    warning.
    """
    cfg = cfg or OptimizerConfig()
    pts = np.array(c.points, dtype=float)
    m = len(pts)
    obj_code = _OBJ_CODE[objective]

    d = float(pdist(pts).min()) if m >= 2 else 1.0
    if d < 0.5:
        # overlapping points: separate with seeded jitter + penalty descent
        rng = np.random.Generator(np.random.Philox(key=cfg.seed))
        x0 = (pts + 0.05 * rng.standard_normal(pts.shape)).reshape(-1)
        if obj_code == 2:
            x0 = np.append(x0, _objectives_tuple(pts)[2] + 1.0)
        x0 = _penalty_descent(x0, m, obj_code, cfg)
        pts = x0[: 3 * m].reshape(m, 3)

    refined, ok = _refine_sqp(pts, objective, cfg.max_iters)
    try:
        refined = _exact_fixup(refined)
    except RuntimeError:
        ok = False
        refined = None

    baseline = _exact_fixup(np.array(c.points, dtype=float)) if d >= 0.5 else None
    candidates = [p for p in (refined, baseline) if p is not None]
    if not candidates:
        raise RuntimeError("polish failed: could not restore feasibility")
    values = [_objectives_tuple(p)[obj_code] for p in candidates]
    best = candidates[int(np.argmin(values))]
    if not ok:
        warn("polish refinement did not converge; returning best feasible iterate",
             RuntimeWarning, stacklevel=2)
    return canonicalize(Constellation(best, c.bandwidth_factor, c.name))
