"""Extremal quasiconformal maps on the Heisenberg group.

Moduli of curve families, extremal densities, explicit minimizing maps, and
the lift of half-plane minimizers to contact maps.
"""

import os as _os

# HEISQC_THREADS caps BLAS/OpenMP threads; it has to be set before numpy loads
_threads = _os.environ.get("HEISQC_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .errors import *  # noqa: E402,F401,F403
from .heis_core import (HPoint, HalfPlanePoint, Tangent, chart_from_heis, chart_to_heis,  # noqa: E402
                        contact_eval, group_inv, group_mul, heis_dist, heis_norm, project_pi)
from .domains import (ChartImage, Cylinder, CylinderShell, Density, PlaneImage,  # noqa: E402
                      PlaneRectangle, SphericalAnnulus)
from .holomorphic import Biholomorphism, builtin_biholomorphism  # noqa: E402
from .curves import (Foliation, HorizontalCurve, PlaneCurve, curve_density_integral,  # noqa: E402
                     foliation_from_biholomorphism, foliation_gamma0, foliation_plane_horizontal,
                     foliation_vertical, horizontality_residual, lift_halfplane_curve)
from .qcmaps import (PlaneMap, QCMap, beltrami, contact_residual, cylinder_extremal_map,  # noqa: E402
                     distortion_K, horizontal_derivatives, mean_distortion, plane_minimizer_gphi,
                     spherical_annuli_map)
from .modulus import (ModulusReport, admissibility_min, closed_form_modulus,  # noqa: E402
                      commutation_residual, density_energy_heis, density_energy_plane,
                      pull_back_density, push_forward_at_image)
from .lift_builder import (LiftProblem, Profile, ThetaPotential, assemble_lift,  # noqa: E402
                           compatibility_check, profile_ode_solve, solve_lift,
                           theta_potential_build, verify_commutation)

__version__ = "0.1.0"
