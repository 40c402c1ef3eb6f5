"""Rotationally invariant minimal hypersurfaces of S^2n and their spectra.

Typical use::

    from csminimal import EmbeddingParams, build_curve, stability_index, yau_check
    curve = build_curve(EmbeddingParams(n=2))
    stability_index(curve).index_computed
"""

from .errors import (CSMinimalError, DomainError, FrontierError, InconsistentVerdictError,
                     IntegrationError, InvariantError, NumericError, ShootingError,
                     SymmetryError)
from .geometry import curvatures, frame, metric_coeffs
from .harmonics import SphereMode, sphere_spectrum
from .hill import (ConstantPotential, HillPotential, MonodromyData, discriminant,
                   discriminant_derivative, monodromy, nodal_count, periodic_eigenvalues)
from .kernels import BACKEND
from .profile import EmbeddingParams, ProfileCurve, build_curve, eval_profile, shoot
from .spectrum import (first_nonzero_eigenvalue, index_lower_bound, laplacian_spectrum,
                       stability_index)
from .yau import YauVerdict, solve_z1, yau_check

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CSMinimalError", "ConstantPotential", "DomainError", "EmbeddingParams",
    "FrontierError", "HillPotential", "InconsistentVerdictError", "IntegrationError",
    "InvariantError", "MonodromyData", "NumericError", "ProfileCurve", "ShootingError",
    "SphereMode", "SymmetryError", "YauVerdict", "build_curve", "curvatures",
    "discriminant", "discriminant_derivative", "eval_profile", "first_nonzero_eigenvalue",
    "frame", "index_lower_bound", "laplacian_spectrum", "metric_coeffs", "monodromy",
    "nodal_count", "periodic_eigenvalues", "shoot", "solve_z1", "sphere_spectrum",
    "stability_index", "yau_check",
]
