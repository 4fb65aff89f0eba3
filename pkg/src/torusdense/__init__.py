"""Periodic orbits of hyperbolic toral automorphisms with certified Birkhoff sums."""

from .errors import *  # noqa: F401,F403
from .heteroclinic import HeteroclinicPair, hetero_pair, intersect_lines, invariant_line, decay_check
from .kernels import BACKEND
from .observable import TrigPolynomial, birkhoff_sum, holder_constant
from .qfield import IntMat2, QuadExt, eigen_data, enclose, mat_pow
from .scan import scan_density, scan_sums
from .shadowing import build_pseudo_orbit, mu_constant, shadow_periodic, verify_shadow
from .targeter import HitConfig, hit_target, k_constants, plan_lengths
from .torus import PeriodicPoint, TorusPoint, enumerate_periodic, minimal_period, periodic_point

__version__ = "0.1.0"
