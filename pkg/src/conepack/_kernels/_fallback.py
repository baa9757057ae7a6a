"""NumPy reference implementations of the hot-loop kernels.

Semantics match ``_core`` exactly; only throughput differs.  Objective codes:
0 mean squared norm, 1 mean first coordinate, 2 peak epigraph (the last
variable is the epigraph level t).
"""

import numpy as np

_SQ2 = np.sqrt(2.0)


def penalty_value_grad(x, m, obj_code, mu):
    """Quadratic-penalty merit value and gradient for the packing problem.

    ``x`` holds the m points row-major, plus a trailing epigraph variable
    when ``obj_code`` is 2.  Penalties: mu * sum max(0, 1 - d_ij)^2 over
    pairs and mu * sum max(0, sqrt(2)*rho_i - w1_i)^2 over points.
    """
    x = np.asarray(x, dtype=float)
    pts = x[: 3 * m].reshape(m, 3)
    grad = np.zeros_like(x)
    gp = grad[: 3 * m].reshape(m, 3)
    val = 0.0

    rho = np.hypot(pts[:, 1], pts[:, 2])
    safe = rho > 1e-12

    if obj_code == 0:
        val += float(np.sum(pts * pts)) / m
        gp += 2.0 * pts / m
    elif obj_code == 1:
        val += float(np.sum(pts[:, 0])) / m
        gp[:, 0] += 1.0 / m
    else:
        t = x[-1]
        g = pts[:, 0] + _SQ2 * rho - t
        act = g > 0.0
        val += t + mu * float(np.sum(g[act] ** 2))
        grad[-1] += 1.0 - 2.0 * mu * float(np.sum(g[act]))
        coef = np.where(act, 2.0 * mu * g, 0.0)
        gp[:, 0] += coef
        radial = np.where(safe, coef * _SQ2 / np.where(safe, rho, 1.0), 0.0)
        gp[:, 1] += radial * pts[:, 1]
        gp[:, 2] += radial * pts[:, 2]

    v = _SQ2 * rho - pts[:, 0]
    act = v > 0.0
    if np.any(act):
        val += mu * float(np.sum(v[act] ** 2))
        coef = np.where(act, 2.0 * mu * v, 0.0)
        gp[:, 0] -= coef
        radial = np.where(safe, coef * _SQ2 / np.where(safe, rho, 1.0), 0.0)
        gp[:, 1] += radial * pts[:, 1]
        gp[:, 2] += radial * pts[:, 2]

    iu, ju = np.triu_indices(m, 1)
    diff = pts[iu] - pts[ju]
    d = np.sqrt(np.maximum(np.sum(diff * diff, axis=1), 1e-24))
    pen = 1.0 - d
    act = pen > 0.0
    if np.any(act):
        val += mu * float(np.sum(pen[act] ** 2))
        coef = -2.0 * mu * pen[act] / d[act]
        contrib = coef[:, None] * diff[act]
        np.add.at(gp, iu[act], contrib)
        np.add.at(gp, ju[act], -contrib)

    return val, grad


def count_detection_errors(y, points, true_idx):
    """Number of minimum-distance decisions that differ from the sent index."""
    y = np.asarray(y, dtype=float)
    pts = np.asarray(points, dtype=float)
    # argmin over ||y - p||^2 with the ||y||^2 term dropped; first index wins ties
    scores = -2.0 * (y @ pts.T) + np.sum(pts * pts, axis=1)
    det = np.argmin(scores, axis=1)
    return int(np.sum(det != np.asarray(true_idx)))
