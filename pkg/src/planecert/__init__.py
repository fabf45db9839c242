"""Exact certificates for squeezing and paradoxical actions of SL(2, R) subgroups.

Submodules: ``projective`` (matrices, fixed points), ``regions`` (planar
regions, crowns, cones), ``witness`` (squeezing certificates), ``paradox``
(contractive pairs, paradoxical families), ``crossed`` (formal crossed-product
elements) and ``oracle`` (sampling falsifiers and numeric realization).
"""

from .errors import *  # noqa: F401,F403
from .projective import IDENTITY, Mat2, MoebiusClass, ProjPoint, classify, fixed_points, same_axis
from .circle import Arc, CircleSet
from .regions import Cone, ConvexPolygon, Crown, RegionSet, crown_hull, enclosing_crown
from .witness import FiniteSubset, SqueezeCertificate, squeeze_witness, verify_squeeze
from .paradox import contractive_pair, paradoxical_family, verify_paradoxical_family
from .crossed import isometry_pair, nilpotent_factorization, scaling_check

__version__ = "0.1.0"
