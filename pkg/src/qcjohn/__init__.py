"""Numerical diagnostics for quasiconformal harmonic maps and John disks.

The package represents sense-preserving planar harmonic maps f = h + conj(g)
of the unit disk with exact third-order jets, and verifies the quantitative
boundary-geometry criteria connecting quasiconformal distortion to John-disk
image domains: radial John constants, derivative decay fits, boundary-box
and subarc criteria, hyperbolic-metric distortion envelopes, pre-Schwarzian
boundary tests, integral means, and coefficient-sum diagnostics.
"""

from .analytic import (
    Affine,
    AnalyticFunction,
    Compose,
    Constant,
    Exp,
    Identity,
    Jet3,
    Log,
    Mobius,
    OneMinusPower,
    Power,
    Product,
    Reciprocal,
    Scale,
    SeriesFunction,
    Sum,
    eval_jet,
    taylor_coefficients,
)
from .errors import (
    ConfigError,
    CriticalPoint,
    DegenerateDilatation,
    DivergentTail,
    DomainError,
    InvariantViolation,
    NotSelfMap,
    NotSensePreserving,
    OutsideDomain,
    ParamOutOfRange,
    ParseError,
    QCJohnError,
    QuadratureFailure,
    RefinementOverflow,
    SingularNode,
    TruncationTooCoarse,
    UnboundedImage,
    UnknownCatalogEntry,
)
from .frame import (
    DerivativeFrame,
    check_selfmap_distortion,
    frame_at,
    frame_fields,
    lower_growth_exponent_fit,
    polar_grid,
    qc_constant,
)
from .geometry import (
    BoundaryArc,
    BoxRegion,
    ImageGeometry,
    boundary_arc,
    boundary_mesh,
    box_region,
    corner_cells,
    diam_image_of_arc,
    diam_image_of_box,
    diameter_of_points,
    disk_cells,
    dist_to_boundary,
    polar_cells,
    radial_arclength,
    refined_boundary_distance,
    region_area,
)
from .hardy import (
    CoefficientTable,
    beta_critical,
    coefficient_sum,
    coefficient_table,
    derivative_energy_series,
    energy_field,
    hardy_norm,
    integral_mean,
    opnorm_field,
)
from .hyperbolic import (
    AlphaConfig,
    check_analytic_envelope,
    check_frame_comparability,
    hyperbolic_distance,
    neighborhood_comparability_constant,
    pseudo_hyperbolic,
)
from .john import (
    JohnConfig,
    JohnFit,
    JohnReport,
    JohnThresholds,
    arc_bound_constant,
    box_diameter_sup,
    check_arc_diameter_bound,
    check_frame_distance_bound,
    john_report,
    pommerenke_interior,
    radial_decay_fit,
    radial_john_constant,
    radius_ladder,
    tail_diagnostics,
    unit_rays,
)
from .maps import HarmonicMap, catalog_get, catalog_names, eval_map, load_map_spec
from .margins import MarginReport, MarginSample
from .report import RunConfig, emit_plot_data, run
from .schwarz import (
    SchwarzianData,
    preschwarzian_boundary_test,
    rectifiability_check,
    schwarz_pick_check,
    schwarzian_data,
)

__version__ = "0.1.0"
