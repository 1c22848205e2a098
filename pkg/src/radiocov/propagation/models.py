"""COST-231 Walfisch-Ikegami loss terms.

Total loss of one receiver point (applied literally, every term added):

    PL = L0(d) + L_CLUT + (L_LOS(d) if LOS else max(L_LOS(d), L_NLOS))

    L0(d)    = 32.45 + 20 log10(d) + 20 log10(F)          free space
    L_LOS(d) = 42.64 + 26 log10(d) + 20 log10(F)          line of sight
    L_NLOS   = max(0, L_RTS + L_MSD)                      rooftop-to-street + multi-screen

with d in km and F in MHz. By default L_MSD accumulates one knife-edge loss per
obstacle found on the walk from the transmitter to the receiver. The closed
COST-231 form (building separation, base-station height over the roofs) is
available through ``PropagationParams.multi_screen``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from radiocov.errors import DomainError
from radiocov.logging import get_logger
from radiocov.propagation.params import PropagationParams
from radiocov.types import MultiScreenModel

__all__ = [
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
]

logger = get_logger(__name__)

# 1 m floor on tx->rx separation
MIN_DISTANCE_KM = 0.001

# c expressed so that wavelength_m = SPEED_OF_LIGHT_MHZ_M / f_mhz
SPEED_OF_LIGHT_MHZ_M = 299.792458

FloatArray = npt.NDArray[np.float64]


def _require_positive(d_km: float, f_mhz: float) -> None:
    if not (d_km > 0 and f_mhz > 0):
        raise DomainError(f"distance and frequency must be positive, got d={d_km} km, F={f_mhz} MHz")


def free_space_loss(d_km: float, f_mhz: float) -> float:
    """Free-space attenuation L0 in dB.

    Raises:
        DomainError: If either argument is not positive
    """
    _require_positive(d_km, f_mhz)
    return float(32.45 + 20.0 * np.log10(d_km) + 20.0 * np.log10(f_mhz))


def los_loss(d_km: float, f_mhz: float) -> float:
    """Line-of-sight loss in dB.

    Raises:
        DomainError: If either argument is not positive
    """
    _require_positive(d_km, f_mhz)
    return float(42.64 + 26.0 * np.log10(d_km) + 20.0 * np.log10(f_mhz))


def knife_edge_loss(nu: float) -> float:
    """Single knife-edge diffraction loss in dB for diffraction parameter ``nu``.

    Uses 6.9 + 20 log10(sqrt((nu - 0.1)^2 + 1) + nu - 0.1) above nu = -0.7,
    zero below; never negative.
    """
    if nu <= -0.7:
        return 0.0
    loss = 6.9 + 20.0 * math.log10(math.sqrt((nu - 0.1) ** 2 + 1.0) + nu - 0.1)
    return max(0.0, loss)


def fresnel_radius(d1_m: float, d2_m: float, f_mhz: float) -> float:
    """First Fresnel zone radius in meters at distances d1/d2 from the two ends."""
    total = d1_m + d2_m
    if d1_m <= 0 or d2_m <= 0:
        return 0.0
    wavelength = SPEED_OF_LIGHT_MHZ_M / f_mhz
    return math.sqrt(wavelength * d1_m * d2_m / total)


def street_orientation_loss(angle_deg: float) -> float:
    """Street-orientation correction L_ori in dB for an incidence angle in [0, 90]."""
    if angle_deg < 35.0:
        return -10.0 + 0.354 * angle_deg
    if angle_deg < 55.0:
        return 2.5 + 0.075 * (angle_deg - 35.0)
    return 4.0 - 0.114 * (angle_deg - 55.0)


def rooftop_to_street_loss(params: PropagationParams, f_mhz: float | None = None) -> float:
    """Rooftop-to-street diffraction and scatter loss L_RTS in dB.

    Args:
        params: Street width, roof height, receiver height, street orientation
        f_mhz: Frequency override (defaults to ``params.frequency_mhz``)
    """
    freq = params.frequency_mhz if f_mhz is None else f_mhz
    delta_h_mobile = params.roof_height_m - params.rx_height_m
    return (
        -16.9
        - 10.0 * math.log10(params.street_width_m)
        + 10.0 * math.log10(freq)
        + 20.0 * math.log10(delta_h_mobile)
        + street_orientation_loss(params.street_orientation_deg)
    )


def multi_screen_loss(d_km: float, f_mhz: float, tx_height_m: float, params: PropagationParams) -> float:
    """Closed COST-231 multi-screen loss L_MSD in dB (medium-sized city).

    Uses the base-station height over the mean roof level, the building
    separation and the distance; terrain obstacles do not enter.

    Raises:
        DomainError: If distance or frequency are not positive
    """
    _require_positive(d_km, f_mhz)
    delta_hb = tx_height_m - params.roof_height_m
    if delta_hb > 0:
        shadowing = -18.0 * math.log10(1.0 + delta_hb)
        ka = 54.0
        kd = 18.0
    else:
        shadowing = 0.0
        ka = 54.0 - 0.8 * delta_hb * (1.0 if d_km >= 0.5 else d_km / 0.5)
        kd = 18.0 - 15.0 * delta_hb / params.roof_height_m
    kf = -4.0 + 0.7 * (f_mhz / 925.0 - 1.0)
    return (
        shadowing
        + ka
        + kd * math.log10(d_km)
        + kf * math.log10(f_mhz)
        - 9.0 * math.log10(params.building_separation_m)
    )


@dataclass(frozen=True, slots=True, eq=False)
class TerrainProfile:
    """Terrain samples along the walk from a transmitter to a receiver point.

    Attributes:
        distances_m: Horizontal distance of each sample from the transmitter
        heights_m: Terrain elevation of each sample
        tx_tip_m: Elevation of the antenna tip (terrain + mast)
        rx_point_m: Elevation of the receiver point (terrain + receiver height)
        total_m: Horizontal transmitter-to-receiver distance
    """

    distances_m: FloatArray = field(repr=False)
    heights_m: FloatArray = field(repr=False)
    tx_tip_m: float
    rx_point_m: float
    total_m: float

    def __post_init__(self) -> None:
        distances = np.asarray(self.distances_m, dtype=np.float64)
        heights = np.asarray(self.heights_m, dtype=np.float64)
        if distances.shape != heights.shape or distances.ndim != 1:
            raise DomainError(
                f"Profile distances {distances.shape} and heights {heights.shape} must be equal 1D arrays"
            )
        if not self.total_m > 0:
            raise DomainError(f"Profile length must be positive, got {self.total_m}")
        object.__setattr__(self, "distances_m", distances)
        object.__setattr__(self, "heights_m", heights)

    def __len__(self) -> int:
        return int(self.distances_m.shape[0])

    def sightline_height(self, index: int) -> float:
        """Height of the direct antenna-to-receiver ray above sample ``index``."""
        t = float(self.distances_m[index]) / self.total_m
        return self.tx_tip_m + t * (self.rx_point_m - self.tx_tip_m)

    def excess_height(self, index: int) -> float:
        """How far the terrain at ``index`` rises above the direct ray (negative below)."""
        return float(self.heights_m[index]) - self.sightline_height(index)


def obstacle_losses(profile: TerrainProfile, obstacles: Sequence[int], f_mhz: float) -> list[float]:
    """Knife-edge loss of each obstacle, in the order given."""
    wavelength = SPEED_OF_LIGHT_MHZ_M / f_mhz
    losses: list[float] = []
    for index in obstacles:
        d1 = float(profile.distances_m[index])
        d2 = profile.total_m - d1
        if d1 <= 0 or d2 <= 0:
            losses.append(0.0)
            continue
        nu = profile.excess_height(index) * math.sqrt(2.0 * (d1 + d2) / (wavelength * d1 * d2))
        losses.append(knife_edge_loss(nu))
    return losses


def nlos_loss(
    profile: TerrainProfile,
    obstacles: Sequence[int],
    d_km: float,
    f_mhz: float,
    params: PropagationParams,
    tx_height_m: float | None = None,
) -> float:
    """Non-line-of-sight loss L_RTS + L_MSD in dB, clamped at zero.

    Args:
        profile: Terrain along the walk, transmitter first
        obstacles: Indices into ``profile`` of the obstructing samples, in walk order
        d_km: Transmitter-to-receiver distance
        f_mhz: Frequency
        params: Street geometry for the rooftop-to-street term
        tx_height_m: Antenna height above ground, needed by the closed multi-screen form

    Raises:
        DomainError: If ``obstacles`` is empty (line-of-sight cells use :func:`los_loss`),
            distance/frequency are not positive, or the closed form lacks ``tx_height_m``
    """
    _require_positive(d_km, f_mhz)
    if not obstacles:
        raise DomainError("nlos_loss requires at least one obstacle; use los_loss for line-of-sight cells")
    if params.multi_screen is MultiScreenModel.COST231:
        if tx_height_m is None:
            raise DomainError("The cost231 multi-screen form needs the antenna height above ground")
        msd = multi_screen_loss(d_km, f_mhz, tx_height_m, params)
    else:
        msd = math.fsum(obstacle_losses(profile, obstacles, f_mhz))
    return max(0.0, rooftop_to_street_loss(params, f_mhz) + msd)


def cell_path_loss(d_km: float, f_mhz: float, clutter_db: float, branch_db: float) -> float:
    """Total loss of one cell: L0 + clutter + the LOS or NLOS branch value."""
    return free_space_loss(d_km, f_mhz) + clutter_db + branch_db
