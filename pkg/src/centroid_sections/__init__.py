"""Numerical construction of a convex body in R^n (n >= 5) whose centroid
is the centroid of exactly one central hyperplane section, together with
the spectral toolkit (Gegenbauer expansions, homogeneous-extension
transforms, subsphere averages) used to certify it, and the planar
three-chords counterpart.
"""

from .config import RunConfig, default_tolerances
from .spherical_core import (GegenbauerSpectrum, HomogeneousFunction,
                             Quadrature, SphereProfile, SpectrumProfile,
                             bochner_multiplier, eval_spectrum,
                             eval_spectrum_deriv, expand, ft_homogeneous,
                             ft_via_radon, gauss_jacobi, parseval_residual,
                             radon_subsphere, sphere_area, sphere_integral,
                             spectrum_from_dict, spectrum_to_dict)
from .revolution_bodies import (ConvexityReport, RevolutionBody,
                                body_to_dict, centroid_axis, curvature,
                                intersection_body_test, make_base_body,
                                profile_csv_rows, reflect_body,
                                section_centroid_axis, section_volume,
                                volume)
from .counterexample import (CERTIFICATE_SCHEMA, ConstructionContext,
                             ConstructionError, ConstructionParams,
                             auto_select_a, centroid_functional, find_root,
                             get_context, make_blend, make_cap_bump,
                             make_oblate_gap_profile, make_odd_perturbation,
                             make_perturbed_body, negativity_threshold,
                             run_construction, section_identity_check,
                             verify_theorem)
from .planar import (PlanarBody, bisected_chords, chord_defect_orthogonality,
                     planar_centroid, polygon_body, radial_body, recenter)

__version__ = "1.0.0"
