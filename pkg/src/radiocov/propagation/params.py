"""Model parameters for the Walfisch-Ikegami path-loss computation."""

from __future__ import annotations

from typing import Any

try:
    from typing import Self
except ImportError:  # Python < 3.11
    from typing_extensions import Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from radiocov.types import MultiScreenModel, TransmitterConfig

__all__ = [
    "MIN_FREQUENCY_MHZ",
    "MAX_FREQUENCY_MHZ",
    "PropagationParams",
    "in_frequency_window",
]

MIN_FREQUENCY_MHZ = 800.0
MAX_FREQUENCY_MHZ = 2600.0


class PropagationParams(BaseModel):
    """Propagation model parameters shared by all transmitters of a run.

    Per-transmitter CSV values (frequency, radius) override the run-wide
    defaults through :meth:`for_transmitter`.

    Attributes:
        frequency_mhz: Carrier frequency F in MHz, within the model validity window
        rx_height_m: Receiver height above ground in meters
        radius_m: Transmission radius in meters
        roof_height_m: Mean building height in meters
        street_width_m: Street width in meters
        building_separation_m: Distance between building centers in meters
        street_orientation_deg: Angle between street and incident wave, in [0, 90]
        fresnel_clearance: Fraction of the first Fresnel radius that must stay clear
        multi_screen: Knife-edge sum over terrain obstacles, or the closed COST-231 form
            that uses ``building_separation_m``
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    frequency_mhz: float = Field(default=1843.0, ge=MIN_FREQUENCY_MHZ, le=MAX_FREQUENCY_MHZ)
    rx_height_m: float = Field(default=1.5, gt=0)
    radius_m: float = Field(default=2000.0, gt=0)
    roof_height_m: float = Field(default=15.0, gt=0)
    street_width_m: float = Field(default=25.0, gt=0)
    building_separation_m: float = Field(default=50.0, gt=0)
    street_orientation_deg: float = Field(default=90.0, ge=0, le=90)
    fresnel_clearance: float = Field(default=1.0, gt=0, le=1)
    multi_screen: MultiScreenModel = MultiScreenModel.KNIFE_EDGE

    @model_validator(mode="after")
    def _roof_above_receiver(self) -> Self:
        if self.roof_height_m <= self.rx_height_m:
            raise ValueError(
                f"roof_height_m ({self.roof_height_m}) must exceed rx_height_m ({self.rx_height_m}) "
                "for the rooftop-to-street term"
            )
        return self

    @property
    def wavelength_m(self) -> float:
        """Free-space wavelength in meters."""
        return 299.792458 / self.frequency_mhz

    def replace(self, **changes: Any) -> PropagationParams:
        """Validated copy with some fields changed."""
        return PropagationParams.model_validate({**self.model_dump(), **changes})

    def for_transmitter(self, tx: TransmitterConfig) -> PropagationParams:
        """Parameters with the transmitter's own frequency and radius."""
        if tx.frequency_mhz == self.frequency_mhz and tx.radius_m == self.radius_m:
            return self
        return self.replace(frequency_mhz=tx.frequency_mhz, radius_m=tx.radius_m)


def in_frequency_window(f_mhz: float) -> bool:
    """Whether ``f_mhz`` lies inside the model validity window."""
    return MIN_FREQUENCY_MHZ <= f_mhz <= MAX_FREQUENCY_MHZ
