"""Surfaces in su(N) from projector solutions of Grassmannian sigma models.

The CP^1 case additionally yields sine-Gordon solutions.  Submodules:

- ``algebra``: su(N) inner product and the standard orthonormal basis
- ``projector``: projector fields and their derivative engines
- ``geometry``: metric, curvature, moving frame, Gauss-Weingarten tables
- ``immersion``: integration of the surface
- ``cp1``: w-chart, sine-Gordon phase, laboratory coordinates
- ``families``: closed-form solutions
- ``lax``: Lax pairs and zero-curvature residuals
- ``elliptic``: Jacobi elliptic functions
"""
from .algebra import coords, from_coords, inner, standard_basis
from .projector import DomainError, ProjectorField, SingularPointError, derivatives

__version__ = "0.1.0"

__all__ = [
    "DomainError", "ProjectorField", "SingularPointError", "coords", "derivatives", "from_coords",
    "inner", "standard_basis",
]
