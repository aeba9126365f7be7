"""Non-native hybrid algorithms for combinatorial optimization.

Emulated quantum samplers (QAOA state vectors, analog Rydberg arrays) feed
classical routines that post-process shots, mine correlations, or treat the
shot distribution as a reservoir, solving MaxCut, Max k-Cut, and maximum
independent set.  Every pipeline has a no-quantum limit for comparative
benchmarking.
"""

from .errors import (
    ConfigError,
    DimensionError,
    FormatError,
    NumericalError,
    ParameterError,
    ResourceError,
)
from .graphs import (
    Coloring,
    Graph,
    IndependentSet,
    cut_value,
    kings_subgraph,
    laplacian,
    load_graph,
    mis_status,
    random_regular,
    save_graph,
    unit_disk_edges,
)
from .samplers import (
    AnnealProtocol,
    QaoaParams,
    QuenchParams,
    RydbergModel,
    ShotSet,
    anneal_sample,
    constant_sample,
    estimate_occupations,
    load_shots,
    qaoa_expectation,
    qaoa_sample,
    qaoa_state,
    quench_sample,
    rydberg_evolve,
    save_shots,
    uniform_sample,
)
from .postprocess import greedy_add, greedy_flip, mis_repair
from .spectral import (
    CorrelationMatrix,
    FeatureMatrix,
    SpectralParams,
    classical_limit_kcut,
    k_means,
    kcut_pipeline,
    top_k_eigvecs,
    weighted_correlation,
)
from .cluster_anneal import (
    AnnealRun,
    Reservoir,
    SandpileState,
    StepRecord,
    classical_reservoir,
    merge_solutions,
    metropolis_accept,
    pair_cluster,
    radius_cluster,
    run_cluster_sa,
    sandpile_cluster,
)
from .varopt import (
    ObjectiveSpec,
    OptimizationResult,
    SearchBox,
    dfo_maximize,
    estimate_objective,
    load_angle_table,
    maxcut_objective,
    mis_cluster_objective,
    mis_greedy_objective,
    nested_optimize_spectral,
    qaoa_angle_setup,
    spectral_lambda_objective,
)
from .oracles import brute_force_kcut, brute_force_maxcut, brute_force_mis

__version__ = "0.1.0"
