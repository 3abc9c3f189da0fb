"""Numerical studies of bipartite entanglement entropy for the 2D ideal
Fermi gas in a perturbed constant magnetic field.

Layers: special functions and Landau-level kernels; Coulomb-gauge vector
potentials for (gamma, eps)-tame perturbations; Galerkin assembly in the
angular-momentum frame; spectral projections and Schatten norms; restricted
Fermi projections, Rényi entropies, and area-law scaling scans; and a CLI
(`landau-ee`) that drives verification suites and studies.
"""

from .assembly import (
    HermitianMatrix,
    QuadratureGrid,
    RegionSpec,
    assemble_full_h,
    assemble_h0,
    assemble_heps,
    assemble_overlap,
    auto_m_max,
    default_grid,
    disk_region,
    gram_matrix,
    square_region,
)
from .config import StudyConfig, load_config
from .entanglement import (
    EntanglementSpectrum,
    EntropyResult,
    ScanTable,
    TruncationPolicy,
    area_law_scan,
    cross_schatten_from_spectrum,
    difference_cross_norm,
    entanglement_spectrum,
    fit_slope,
    local_entropy,
    pnorm_scaling_exponent,
    scan_row,
)
from .errors import (
    AccuracyError,
    ConfigError,
    ContourError,
    DomainError,
    EndpointError,
    LandauError,
    QuadratureInadequacyError,
    SingularityError,
    TruncationInadequacyError,
)
from .fields import (
    ConvolutionQuad,
    FieldFamily,
    PotentialFamily,
    TamenessParams,
    curl_div_check,
    decay_audit,
    field_eval,
    gauge_convolve,
    gauge_decay_constant,
    gauge_flux,
    gaussian_bump,
    gaussian_potential,
    power_law_field,
    power_law_potential,
    pseudo_potential,
    zero_field,
    zero_potential,
)
from .landau import (
    ALL_LEVELS,
    CofiniteLevelSet,
    LandauBasisSpec,
    QuadSpec1D,
    basis_eval,
    ladder_apply,
    m_kernel_via_integral,
    m_resolvent_diag,
    pl_kernel,
    qt_covariant_gradient,
    qt_kernel,
    radial_table,
)
from .special import g_of_t, laguerre_eval, laguerre_genfun, laguerre_sum, renyi_h
from .spectral import (
    ContourSpec,
    EigenDecomposition,
    SchattenReport,
    contour_term_identity,
    eigendecompose,
    fermi_projection,
    heps_resolvent_schatten,
    occupied_frame,
    resolvent_expansion_residual,
    riesz_projection,
    schatten_pnorm,
    schatten_property_suite,
)
from .study import cmd_scan, run_scan

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "1.0.0"
