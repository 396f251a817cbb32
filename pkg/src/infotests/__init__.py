"""Exact and approximate information tests on multinomial statistical manifolds."""

__version__ = "0.1.0"

from .ait import (
    AitResult,
    EmbeddedSubmanifold,
    embed_distribution,
    fit_submanifold,
    mc_significance,
    randomized_ait_test,
    sample_distributions,
    test_statistic,
)
from .exact import (
    OutcomeTable,
    RandomizedTest,
    build_exact_test,
    chi2_critical_test,
    enumerate_outcomes,
    exact_power,
    hw_tables,
    power_curve,
)
from .learning import (
    Configuration,
    DegenerateInputError,
    DisconnectedGraphError,
    NeighborhoodGraph,
    build_epsilon_graph,
    build_knn_graph,
    embed_out_of_sample,
    embed_raw_stress,
    pairwise_hellinger,
    shortest_paths,
)
from .manifold import (
    empirical_distribution,
    fisher_information,
    hd_statistic,
    hellinger_distance,
    info_distance_multinomial,
    likelihood_ratio_statistic,
    pearson_statistic,
    wald_statistic,
)
from .stats import RngSeed, chi2_quantile, chi2_survival, multinomial_log_pmf, multinomial_sample
from .submanifolds import (
    HW,
    COARSE_MHDE_XTOL,
    SPHERICAL,
    HardyWeinberg,
    SphericalSubfamily,
    Submanifold,
    hw_info_distance,
    hw_map,
    hw_restricted_mhde,
    hw_restricted_statistic,
    hw_unrestricted_statistic,
    spherical_map,
    spherical_restricted_lrt,
    spherical_restricted_mle,
)
