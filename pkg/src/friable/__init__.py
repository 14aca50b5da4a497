"""Friable (smooth) numbers, friable Weyl sums, and circle-method counts.

Numerical companion to the circle method over y-friable integers: counting
and enumeration of S(x, y), the saddle point alpha(x, y), Weyl sums
E_k(x, y; theta) with their major-arc main terms, Dirichlet characters and
power Gauss sums, the friable-biased local densities beta_p and the
archimedean factor beta_infty, exact representation counts and moments,
and the Diophantine detectors used by the minor-arc theory.
"""

from .circle import (
    PredictionReport,
    RepresentationQuery,
    count_exact,
    moment_exact,
    moment_scaling_report,
    predict,
    representation_count_convolution,
)
from .characters import (
    DirichletCharacter,
    character_group,
    conductor,
    gauss_sum_k,
    gauss_sums_all_a,
    principal_character,
)
from .core import (
    AsymptoticScales,
    DickmanTable,
    FriableParams,
    SaddleData,
    asymptotic_scales,
    build_dickman_table,
    dickman_rho,
    enumerate_friable,
    ht_estimate,
    psi,
    psi_char,
    saddle_alpha,
    sigma2,
    spf_sieve,
    zeta_partial,
)
from .dioph import (
    RecurrenceInstance,
    bourgain_weight,
    erdos_turan_check,
    measure_recurrence,
    rational_approx,
    sparse_vinogradov_check,
    vinogradov_detect,
)
from .errors import NumericError, ResourceLimitError
from .localfactors import (
    LocalFactor,
    LocalMeasure,
    beta_infty_closed,
    beta_infty_numeric,
    beta_p,
    m_q,
    mu_mass,
    s_q,
    s_xy_qa,
    singular_series_truncated,
)
from .weyl import (
    ArcSet,
    RationalPhase,
    arc_decompose,
    h_aq,
    in_major_arcs,
    major_arc_main_term,
    minor_arc_scan,
    minor_arc_sweep,
    mk_main_term,
    phi_check,
    rational_decompose,
    weyl_sum,
    weyl_sums_grid,
)

__version__ = "0.1.0"
