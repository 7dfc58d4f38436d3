"""Self-excited oscillations in discrete-time Lur'e systems with saturation."""

from .poly import Poly, reciprocal_bracket, roots, spectral_radius
from .realization import StateSpace, TransferFunction, closed_loop, realize, validate
from .stability import crossings, spr_sweep, stable_interval_check, unstable_root_census
from .spectral import SpectralSplit, complement_subspace, find_simple_unstable, projection_norm
from .lure import LureConfig, Tolerances, classify, simulate

__version__ = "0.1.0"
