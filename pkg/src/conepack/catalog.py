"""Built-in constellation catalog plus JSON load/save.

The catalog holds the power-optimized 4/8/16-point formats (free and
lattice-constrained) together with the classical reference formats (OOK,
nonnegative 4-PAM, DC-biased star 8-QAM and 16-QAM variants), all normalized
to unit minimum distance.  Some optimized entries carry coordinates that are
only known to four decimal places; those points are tagged so validation can
apply looser tolerances than for closed-form entries.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .geometry import Constellation, cone_residuals, min_distance

_S23 = math.sqrt(2.0 / 3.0)  # nearest-neighbor layer height of the packing
_S3 = math.sqrt(3.0)
_S6 = math.sqrt(6.0)

# tolerances by coordinate precision class
RADICAL_TOL = 1e-9
DECIMAL_TOL = 1e-3


class Source(enum.Enum):
    OPTIMIZED = "optimized"       # output of the sphere-packing optimization
    REFERENCE = "reference"       # previously known format
    CONSTRUCTED = "constructed"   # closed-form construction


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    constellation: Constellation
    source: Source
    decimal_points: frozenset  # indices of 4-decimal-precision points

    @property
    def tol(self) -> float:
        return DECIMAL_TOL if self.decimal_points else RADICAL_TOL


def _c4_points():
    return [
        (0.0, 0.0, 0.0),
        (_S23, 0.0, 1.0 / _S3),
        (_S23, 0.5, -_S3 / 6.0),
        (_S23, -0.5, -_S3 / 6.0),
    ]


def _entries():
    c4 = _c4_points()
    five3 = (5.0 / 3.0) * _S23

    c_pe8 = c4 + [
        (five3, 0.0, -5.0 / (3.0 * _S3)),
        (five3, 5.0 / 6.0, 5.0 / (6.0 * _S3)),
        (five3, -5.0 / 6.0, 5.0 / (6.0 * _S3)),
        (2.0 * _S23, 0.0, 0.0),
    ]
    c_po8 = c4 + [
        (five3, 0.0, -5.0 / (3.0 * _S3)),
        (five3, 5.0 / 6.0, 5.0 / (6.0 * _S3)),
        (five3, -5.0 / 6.0, 5.0 / (6.0 * _S3)),
        (1.6293, -0.9236, -0.6886),
    ]
    c_phat8 = c4 + [
        (2.0 * _S23, 0.0, -1.0 / _S3),
        (2.0 * _S23, 0.5, _S3 / 6.0),
        (2.0 * _S23, -0.5, _S3 / 6.0),
        (_S6, 0.0, 0.0),
    ]
    l_pe8 = c4 + [
        (2.0 * _S23, 0.5, _S3 / 6.0),
        (2.0 * _S23, -0.5, _S3 / 6.0),
        (2.0 * _S23, 0.0, -1.0 / _S3),
        (2.0 * _S23, 1.0, -1.0 / _S3),
    ]
    c_pe16 = c4 + [
        (1.3608, 5.0 / 6.0, 5.0 / (6.0 * _S3)),
        (1.3608, 0.0, -0.9623),
        (1.4628, -0.7513, 0.7110),
        (1.6024, -1.1134, -0.2106),
        (1.6293, 0.1346, 1.1442),
        (1.6293, 0.9236, -0.6887),
        (2.0 * _S23, 0.0, 0.0),
        (1.9336, -0.8075, -1.1032),
        (2.0380, 1.4396, 0.0642),
        (2.3097, 0.5202, 0.5210),
        (2.3097, 0.1911, -0.7110),
        (2.3499, -0.6462, 0.2616),
    ]
    c_po16 = c_po8 + [
        (1.6293, -0.1345, 1.1442),
        (1.6293, 1.0582, -0.4556),
        (2.0 * _S23, 0.0, 0.0),
        (2.0380, 0.6643, -1.2789),
        (2.0380, -1.4396, 0.0642),
        (2.0380, 0.7754, 1.2147),
        (2.1187, 1.4645, 0.3160),
        (2.1187, -1.0059, 1.1103),
    ]
    c_phat16 = c4 + [
        (1.6279, 0.8995, -0.7184),
        (1.6279, -0.4977, 1.0379),
        (1.6270, -0.9003, -0.7162),
        (1.6300, 0.5022, 1.0374),
        (1.6310, -0.0010, -1.1533),
        (1.6313, -1.1242, 0.2584),
        (1.6328, 1.1259, 0.2557),
        (2.0 * _S23, 0.0, 0.0),
        (2.4495, 0.0, 1.0 / _S3),
        (2.4495, 0.5, -_S3 / 6.0),
        (2.4495, -0.5, -_S3 / 6.0),
        (3.2660, 0.0, 0.0),
    ]
    # (2*sqrt(2/3), 0, 2*sqrt(3)/3) sits exactly on the cone boundary and at
    # unit distance from its neighbors; validate_catalog checks both.
    l16 = l_pe8 + [
        (2.0 * _S23, 0.0, 2.0 * _S3 / 3.0),
        (2.0 * _S23, -1.0, -_S3 / 3.0),
        (_S6, 0.0, 0.0),
        (_S6, -0.5, _S3 / 2.0),
        (_S6, 0.5, -_S3 / 2.0),
        (_S6, -0.5, -_S3 / 2.0),
        (_S6, 1.0, 0.0),
        (_S6, -1.0, 0.0),
    ]

    ook = [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0)]
    pam4 = [(float(k), 0.0, 0.0) for k in range(4)]
    a = (1.0 + _S3) / math.sqrt(2.0)
    b = (1.0 + _S3) / 2.0
    qam8 = [
        (1.0, 0.5, 0.5), (1.0, 0.5, -0.5), (1.0, -0.5, 0.5), (1.0, -0.5, -0.5),
        (a, 0.0, b), (a, 0.0, -b), (a, b, 0.0), (a, -b, 0.0),
    ]
    s5 = math.sqrt(5.0)
    qam16 = [
        (1.0, 0.5, 0.5), (1.0, 0.5, -0.5), (1.0, -0.5, 0.5), (1.0, -0.5, -0.5),
        (s5, 0.5, 1.5), (s5, 0.5, -1.5), (s5, -0.5, 1.5), (s5, -0.5, -1.5),
        (s5, 1.5, 0.5), (s5, 1.5, -0.5), (s5, -1.5, 0.5), (s5, -1.5, -0.5),
        (3.0, 1.5, 1.5), (3.0, 1.5, -1.5), (3.0, -1.5, 1.5), (3.0, -1.5, -1.5),
    ]

    def entry(name, pts, source, bwf=2, decimals=()):
        return CatalogEntry(
            name=name,
            constellation=Constellation(np.array(pts, dtype=float), bwf, name),
            source=source,
            decimal_points=frozenset(decimals),
        )

    return {
        e.name: e
        for e in [
            entry("C4", c4, Source.OPTIMIZED),
            entry("C_Pe8", c_pe8, Source.OPTIMIZED),
            entry("C_Po8", c_po8, Source.OPTIMIZED, decimals=[7]),
            entry("C_Phat8", c_phat8, Source.OPTIMIZED),
            entry("L_Pe8", l_pe8, Source.OPTIMIZED),
            entry("C_Pe16", c_pe16, Source.OPTIMIZED,
                  decimals=[4, 5, 6, 7, 8, 9, 11, 12, 13, 14, 15]),
            entry("C_Po16", c_po16, Source.OPTIMIZED,
                  decimals=[7, 8, 9, 11, 12, 13, 14, 15]),
            entry("C_Phat16", c_phat16, Source.OPTIMIZED,
                  decimals=list(range(4, 11)) + [12, 13, 14, 15]),
            entry("L16", l16, Source.OPTIMIZED),
            entry("OOK", ook, Source.REFERENCE, bwf=1),
            entry("PAM4", pam4, Source.REFERENCE, bwf=1),
            entry("QAM8breve", qam8, Source.REFERENCE),
            entry("QAM16breve", qam16, Source.REFERENCE),
        ]
    }


_CATALOG = _entries()


def names() -> list:
    return list(_CATALOG)


def entry(name: str) -> CatalogEntry:
    try:
        return _CATALOG[name]
    except KeyError:
        raise KeyError(
            f"unknown constellation {name!r}; valid names: {', '.join(_CATALOG)}"
        ) from None


def get(name: str) -> Constellation:
    """Deep copy of a catalog constellation by name."""
    c = entry(name).constellation
    return Constellation(np.array(c.points), c.bandwidth_factor, c.name)


def contains_subset(big: Constellation, small: Constellation, tol: float = 1e-6) -> bool:
    """Whether every point of ``small`` appears in ``big`` within ``tol``."""
    bp = big.points
    return all(
        float(np.min(np.sum((bp - s) ** 2, axis=1))) <= tol * tol
        for s in small.points
    )


def validate_catalog() -> list:
    """Run all catalog consistency checks.

    Returns a list of ``(check_name, ok, detail)`` tuples covering unit
    minimum distance, cone membership (with precision-class tolerances),
    the 4-point-core inclusion in every optimized entry, and the nesting of
    the 8-point lattice formats inside the 16-point one.
    """
    report = []
    for name, e in _CATALOG.items():
        c = e.constellation
        tol = e.tol
        d = min_distance(c)
        report.append((f"{name}: unit dmin", abs(d - 1.0) <= tol, f"dmin={d!r}"))
        res = cone_residuals(c.points)
        per_point_tol = np.where(
            np.isin(np.arange(c.m), list(e.decimal_points)), DECIMAL_TOL, RADICAL_TOL
        )
        ok = bool(np.all(res <= per_point_tol))
        report.append((f"{name}: cone membership", ok, f"max residual={res.max():.3e}"))

    c4 = _CATALOG["C4"].constellation
    for name, e in _CATALOG.items():
        if e.source is Source.OPTIMIZED and name != "C4":
            ok = contains_subset(e.constellation, c4, tol=1e-6)
            report.append((f"{name}: contains the 4-point core", ok, ""))
    for name in ("C_Phat8", "L_Pe8"):
        ok = contains_subset(_CATALOG["L16"].constellation,
                             _CATALOG[name].constellation, tol=1e-9)
        report.append((f"L16: contains {name}", ok, ""))
    return report


def pair_distance_clusters(name: str) -> np.ndarray:
    """Sorted pairwise distances of a catalog entry (validation helper)."""
    return np.sort(pdist(_CATALOG[name].constellation.points))


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------

def save(c: Constellation, path) -> None:
    """Write a constellation as JSON with 17-significant-digit coordinates."""
    rows = ",\n".join(
        "    [{}, {}, {}]".format(*(f"{v:.17g}" for v in p)) for p in c.points
    )
    text = (
        "{\n"
        f'  "name": {json.dumps(c.name)},\n'
        f'  "bandwidth_factor": {c.bandwidth_factor},\n'
        '  "points": [\n' + rows + "\n  ]\n"
        "}\n"
    )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def load(path) -> Constellation:
    """Read a constellation JSON file, rejecting malformed content."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: top-level value must be an object")
    for field in ("name", "bandwidth_factor", "points"):
        if field not in doc:
            raise ValueError(f"{path}: missing field {field!r}")
    if not isinstance(doc["name"], str):
        raise ValueError(f"{path}: field 'name' must be a string")
    if doc["bandwidth_factor"] not in (1, 2):
        raise ValueError(f"{path}: field 'bandwidth_factor' must be 1 or 2")
    pts = doc["points"]
    if not isinstance(pts, list) or not pts:
        raise ValueError(f"{path}: field 'points' must be a non-empty list")
    for i, row in enumerate(pts):
        if (not isinstance(row, list) or len(row) != 3
                or not all(isinstance(v, (int, float)) for v in row)):
            raise ValueError(f"{path}: field 'points[{i}]' must be [w1, w2, w3]")
    return Constellation(np.array(pts, dtype=float), doc["bandwidth_factor"], doc["name"])
