"""LOS/NLOS determination and Walfisch-Ikegami path loss with clutter correction."""

from __future__ import annotations

from radiocov.propagation.clutter import ClutterLossTable, load_clutter_losses
from radiocov.propagation.field import PathLossField, path_loss_field, slant_distances_km, transmitter_cell
from radiocov.propagation.los import (
    LosMask,
    line_of_sight,
    obstructing_samples,
    terrain_profile,
    walk_cells,
    walk_offsets,
)
from radiocov.propagation.models import (
    MIN_DISTANCE_KM,
    SPEED_OF_LIGHT_MHZ_M,
    TerrainProfile,
    cell_path_loss,
    free_space_loss,
    fresnel_radius,
    knife_edge_loss,
    los_loss,
    multi_screen_loss,
    nlos_loss,
    obstacle_losses,
    rooftop_to_street_loss,
    street_orientation_loss,
)
from radiocov.propagation.params import (
    MAX_FREQUENCY_MHZ,
    MIN_FREQUENCY_MHZ,
    PropagationParams,
    in_frequency_window,
)

__all__ = [
    # Parameters
    "PropagationParams",
    "MIN_FREQUENCY_MHZ",
    "MAX_FREQUENCY_MHZ",
    "in_frequency_window",
    # Loss terms
    "MIN_DISTANCE_KM",
    "SPEED_OF_LIGHT_MHZ_M",
    "free_space_loss",
    "los_loss",
    "knife_edge_loss",
    "fresnel_radius",
    "street_orientation_loss",
    "rooftop_to_street_loss",
    "multi_screen_loss",
    "TerrainProfile",
    "obstacle_losses",
    "nlos_loss",
    "cell_path_loss",
    # Line of sight
    "walk_offsets",
    "walk_cells",
    "terrain_profile",
    "obstructing_samples",
    "LosMask",
    "line_of_sight",
    # Clutter
    "ClutterLossTable",
    "load_clutter_losses",
    # Fields
    "PathLossField",
    "path_loss_field",
    "transmitter_cell",
    "slant_distances_km",
]
