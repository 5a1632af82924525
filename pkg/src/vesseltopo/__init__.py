"""Topology-aware scoring, fragmentation and repair of binary vessel masks."""

from .exceptions import (
    BoundsError,
    ContractError,
    DomainError,
    EmptyInputError,
    PairingError,
    ParseError,
    ShapeError,
    TruncatedError,
    VesselTopoError,
)
from .fragment import BreakRecord, FragmentParams, VesselFragmenter, break_region_mask, generate_breaks
from .metrics import (
    MetricReport,
    aggregate,
    betti0_normalized,
    cldice,
    dice,
    iou,
    mse,
    relative_improvement,
    score_pair,
    soft_cldice_loss,
    soft_skeleton,
)
from .raster import distance_transform, draw_bridge, load_pgm, save_pgm, tile_patches
from .repair import BridgeProposal, MorphologicalRepair, RepairParams, pair_endpoints, repair_mask
from .topology import Endpoint, LabelMap, connected_components, endpoint_direction, find_endpoints, skeletonize

__version__ = "0.1.0"
