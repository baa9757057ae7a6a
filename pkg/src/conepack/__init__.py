"""conepack: constellation design inside the nonnegativity cone of IM/DD links.

Modules
-------
geometry   constellation container, admissible cone, canonical orientation
metrics    power measures, SNR geometry, spectral efficiency, gains vs OOK
optimizer  multistart sphere packing under the three power objectives
lattice    in-cone FCC lattice slices and best-subset selection
channel    vector AWGN channel, Monte-Carlo and analytic symbol error rates
mi         mutual information, coded-rate curves, wideband analysis
catalog    built-in optimized and reference formats, JSON load/save
cli        batch command-line frontend
"""

from ._kernels import BACKEND as kernel_backend
from .geometry import Constellation, canonicalize, min_distance, normalize_unit_dmin
from .metrics import PowerMeasure, PowerSummary, power_summary
from .optimizer import OptimizerConfig, OptimizeResult, optimize, polish
from .lattice import LatticeSlice, enumerate_lattice, lattice_search
from .channel import ChannelConfig, SerEstimate, simulate_ser, union_bound_ser
from .mi import MiEstimate, mutual_information, zero_crossing, wideband_bound

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ChannelConfig",
    "Constellation",
    "LatticeSlice",
    "MiEstimate",
    "OptimizeResult",
    "OptimizerConfig",
    "PowerMeasure",
    "PowerSummary",
    "SerEstimate",
    "canonicalize",
    "enumerate_lattice",
    "kernel_backend",
    "lattice_search",
    "min_distance",
    "mutual_information",
    "normalize_unit_dmin",
    "optimize",
    "polish",
    "power_summary",
    "simulate_ser",
    "union_bound_ser",
    "wideband_bound",
    "zero_crossing",
]
