"""Lie-algebra-valued form calculus on flat complex tori.

Modules
-------
liealg      matrix Lie algebras, trace form, exp and log
torus       tori, spectral fields, Dolbeault derivatives
forms       matrix-valued (p, q)-forms, wedge, d, curvatures
gauge       gauge maps, the two gauge actions, abelian classes
periods     periods of flat forms and primitive recovery
cplxstruct  the structure I_omega and its torsion
extension   central extension, coadjoint action, invariant pairing
moduli      commuting pairs in SU(n) and Weyl canonical forms
cli         the ``holobundle`` command
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AbelianOnlyError,
    AlgebraMismatchError,
    BidegreeError,
    ConfigError,
    CurvatureObstructionError,
    GeometryMismatchError,
    HolobundleError,
    IntegrationError,
    LogBranchError,
    NotCommutingError,
    SingularElementError,
)
from .forms import Form  # noqa: E402
from .gauge import GaugeMap  # noqa: E402
from .liealg import MatrixLieAlgebra, get_algebra  # noqa: E402
from .torus import Field, TorusGeometry  # noqa: E402

__all__ = [
    "__version__",
    "AbelianOnlyError",
    "AlgebraMismatchError",
    "BidegreeError",
    "ConfigError",
    "CurvatureObstructionError",
    "GeometryMismatchError",
    "HolobundleError",
    "IntegrationError",
    "LogBranchError",
    "NotCommutingError",
    "SingularElementError",
    "Field",
    "Form",
    "GaugeMap",
    "MatrixLieAlgebra",
    "TorusGeometry",
    "get_algebra",
]
