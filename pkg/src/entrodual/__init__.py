"""Dual decomposition solvers for entropy-regularized p-norm fitting over networks."""

from .acrcd import ACRCDConfig, ACRCDState, acrcd_init, acrcd_step, run_acrcd
from .baseline import subgradient_baseline
from .dual import (
    INFINITE,
    DualConstants,
    DualState,
    block_radii,
    conj_F,
    conj_G,
    conj_g,
    default_regularizer_weight,
    dual_gradient,
    dual_kernel_floor,
    dual_objective,
    dual_radius,
    is_infinite,
    lipschitz_constants,
    softmax_map,
)
from .errors import ConfigError, NumericFailure
from .harness import ExperimentConfig, compare_solvers, load_config, run_experiment
from .network import (
    GossipMatrix,
    Topology,
    build_laplacian,
    gossip_from_matrix,
    lift,
    load_topology,
    make_topology,
    save_topology,
    spectral_constants,
    topology_complete,
    topology_erdos_renyi,
    topology_path,
    topology_ring,
    topology_star,
)
from .problem import (
    DataConstants,
    PrimalState,
    ProblemInstance,
    apply_blocks,
    check_simplex,
    consensus_residual,
    data_constants,
    distributed_objective,
    entropy,
    generate_instance,
    instance_checksum,
    load_instance,
    primal_objective,
    save_instance,
)
from .prox import ProxParams, project_box, prox_R, prox_lq_scalar
from .recovery import (
    GapReport,
    consensus_candidate,
    duality_gap,
    ergodic_average,
    primal_from_dual,
)
from .stm import STMConfig, STMState, run_stm, stm_init, stm_step
from .trace import RateReport, SolverTrace, fit_rate, load_trace, save_trace

__version__ = "0.1.0"
