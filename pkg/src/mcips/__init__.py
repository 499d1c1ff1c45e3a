"""Multiclass TASEP and HAD processes, their tandem-queue invariant measures,
dual points and multi-line processes.
"""

__version__ = "0.1.0"

from .duality import (
    MultiLineState,
    dual_points,
    had_dual_points,
    multiline_evolve,
    multiline_local_step,
    reverse_check,
    t_image_check,
    tasep_dual_points,
)
from .dynamics import (
    DynamicsKind,
    PointProcess,
    Trajectory,
    discrete_step,
    evolve,
    evolve_augmented,
    evolve_multiclass,
    generate_bernoulli_field,
    generate_poisson,
    had_jump,
    lrep_jump,
    recover_points,
    tasep_jump,
)
from .lattice import (
    Configuration,
    MulticlassConfig,
    OrderedStack,
    Topology,
    r_inverse,
    r_map,
    sample_bernoulli,
    sample_fixed_count,
    truncate,
)
from .queues import (
    Boundary,
    class_split_step,
    departures,
    geometric_stationary,
    m_map,
    queue_lengths,
    t_map,
    tandem,
)

__all__ = [
    "Boundary",
    "Configuration",
    "DynamicsKind",
    "MultiLineState",
    "MulticlassConfig",
    "OrderedStack",
    "PointProcess",
    "Topology",
    "Trajectory",
    "class_split_step",
    "departures",
    "discrete_step",
    "dual_points",
    "evolve",
    "evolve_augmented",
    "evolve_multiclass",
    "generate_bernoulli_field",
    "generate_poisson",
    "geometric_stationary",
    "had_dual_points",
    "had_jump",
    "lrep_jump",
    "m_map",
    "multiline_evolve",
    "multiline_local_step",
    "queue_lengths",
    "r_inverse",
    "r_map",
    "recover_points",
    "reverse_check",
    "sample_bernoulli",
    "sample_fixed_count",
    "t_image_check",
    "t_map",
    "tandem",
    "tasep_dual_points",
    "tasep_jump",
    "truncate",
]
