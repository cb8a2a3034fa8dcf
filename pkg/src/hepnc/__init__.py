"""Heterogeneous-PSK physical-layer network coding for two-way relaying.

Tools for the adaptive denoise-and-forward protocol where two users with
different PSK orders exchange data through a relay: singular-fade-state
enumeration, exclusive-law map construction, fade-plane quantization, and
Monte-Carlo error-rate simulation.
"""

from .psk import (
    PskConstellation,
    DifferencePoint,
    DifferenceConstellation,
    SchemePair,
    make_psk,
    make_scheme,
    map_bits,
    bit_patterns,
    difference_constellation,
)
from .sfs import (
    SingularFadeState,
    SingularityConstraint,
    enumerate_sfs,
    brute_force_sfs,
    sfs_circle_radii,
    singularity_constraints,
    match_sfs,
)
from .clustering import (
    ClusterMap,
    MapLibrary,
    check_exclusive_law,
    min_cluster_distance,
    removes_sfs,
    broadcast_length,
    builtin_library,
    construct_map_for_sfs,
    construct_library,
)
from .quantizer import (
    FadeState,
    RegionCurve,
    MapSelection,
    CiRegionSpec,
    SfsRegion,
    EXTERNAL_CI,
    INTERNAL_CI,
    USE_SFS_MAP,
    distance_metric,
    select_map,
    pairwise_boundary,
    external_ci_spec,
    internal_ci_spec,
    is_external_ci,
    is_internal_ci,
    region_for_sfs,
    boundary_curves,
    rasterize,
    classify_analytic_grid,
    compare_partition,
)
from .simulation import (
    AWGN_RANDOM_PHASE,
    RAYLEIGH_BLOCK,
    ChannelModel,
    SimConfig,
    SimResult,
    ma_phase_decode,
    relay_map_apply,
    bc_phase,
    user_decode,
    simulate,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "PskConstellation",
    "DifferencePoint",
    "DifferenceConstellation",
    "SchemePair",
    "make_psk",
    "make_scheme",
    "map_bits",
    "bit_patterns",
    "difference_constellation",
    "SingularFadeState",
    "SingularityConstraint",
    "enumerate_sfs",
    "brute_force_sfs",
    "sfs_circle_radii",
    "singularity_constraints",
    "match_sfs",
    "ClusterMap",
    "MapLibrary",
    "check_exclusive_law",
    "min_cluster_distance",
    "removes_sfs",
    "broadcast_length",
    "builtin_library",
    "construct_map_for_sfs",
    "construct_library",
    "FadeState",
    "RegionCurve",
    "MapSelection",
    "CiRegionSpec",
    "SfsRegion",
    "EXTERNAL_CI",
    "INTERNAL_CI",
    "USE_SFS_MAP",
    "distance_metric",
    "select_map",
    "pairwise_boundary",
    "external_ci_spec",
    "internal_ci_spec",
    "is_external_ci",
    "is_internal_ci",
    "region_for_sfs",
    "boundary_curves",
    "rasterize",
    "classify_analytic_grid",
    "compare_partition",
    "AWGN_RANDOM_PHASE",
    "RAYLEIGH_BLOCK",
    "ChannelModel",
    "SimConfig",
    "SimResult",
    "ma_phase_decode",
    "relay_map_apply",
    "bc_phase",
    "user_decode",
    "simulate",
    "sweep",
    "__version__",
]
