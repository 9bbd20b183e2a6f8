"""Simulator and verification harness for a silent self-stabilizing
rooted shortest-path tree protocol with disconnection detection."""

from .graph import (
    INFINITY,
    ComponentInfo,
    WeightedGraph,
    build_graph,
    component_info,
    generate_random_graph,
    load_graph,
    parse_graph,
    root_distances,
    root_hop_distances,
    save_graph,
    weighted_distance,
)
from .protocol import ROOT_STATE, ProcessState, Rule, Status
from .engine import (
    Configuration,
    ExecutionTrace,
    StepRecord,
    enabled_set,
    is_terminal,
    normal_initial_configuration,
    random_configuration,
    run,
    step,
)
from .daemon import (
    DaemonPolicy,
    adversarial_daemon,
    central_daemon,
    parse_daemon_spec,
    random_distributed_daemon,
    synchronous_daemon,
)
from .analysis import (
    check_aar_monotone,
    check_bounds,
    check_round_milestones,
    count_rounds,
    forest_view,
    full_trace_report,
    legitimate_config,
    legitimate_state,
    round_bound,
    segment_language_check,
    step_bound,
    uniform_step_bound,
)
from .explorer import (
    CertificationResult,
    ExplorationLimits,
    StateSpaceResult,
    certify_instance,
    enumerate_initial_configs,
    explore,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
