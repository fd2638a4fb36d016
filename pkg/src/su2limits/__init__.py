"""Second-order polarization statistics of pure two-mode N-photon states."""

__version__ = "0.1.0"

from .errors import (
    OutputError,
    ParseError,
    PhotonNumberMismatch,
    StateError,
    Su2LimitsError,
    UnnormalizableError,
)
from .fockstate import (
    TwoModeState,
    basis_state,
    eta_parameter,
    fidelity,
    format_state,
    make_eta,
    make_from_amplitudes,
    make_noon,
    make_su2_coherent,
    overlap,
    parse_state,
)
from .majorana import (
    MajoranaConstellation,
    OrbitRelation,
    canonicalize,
    from_constellation,
    orbit_relation,
    same_orbit,
    to_constellation,
)
from .orbits import (
    VariancePointCloud,
    VariancePolygon,
    is_uniform,
    orbit_state,
    orbit_state_n2,
    orbit_state_n3,
    sweep_n2,
    sweep_n3,
    variance_polygon,
)
from .stokes import (
    CovarianceMatrix,
    PrincipalVariances,
    UncertaintyBounds,
    build_stokes,
    check_bounds,
    covariance,
    directional_variance,
    principal_variances,
    stokes_vector,
)
from .su2rot import EulerAngles, apply_rotation, induced_so3, permute_variances, su2_matrix
