"""Biphoton spectral model and flex-grid channel carving.

The pair source emits into a sinc-squared spectral density, expressed in
detuning from spectral degeneracy (half the pump frequency). Energy
conservation pins the two photons of a pair to opposite detunings, so an
allocatable channel is a signal slice at positive detuning plus its point
reflection at negative detuning. Detuning, not absolute frequency, is the
canonical coordinate throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .hardware import WssModel

QUADRATURE_STEP_GHZ = 0.1
"""Step of the fixed-step composite midpoint rule used for slice integrals."""

BOUNDARY_TOLERANCE_GHZ = 1e-9


@dataclass(frozen=True)
class BiphotonSpectrum:
    """Sinc-squared biphoton spectrum with a central stopband.

    first_null_detuning_ghz: detuning at which the density first reaches 0.
    stopband_halfwidth_ghz: half width of the band carved out around zero
        detuning (pump suppression); slices must not enter it.
    total_pair_flux: pairs/s emitted over the full spectrum.
    """

    first_null_detuning_ghz: float
    stopband_halfwidth_ghz: float = 0.0
    total_pair_flux: float = 0.0

    def __post_init__(self):
        if self.first_null_detuning_ghz <= 0.0:
            raise ValueError("first_null_detuning_ghz must be > 0")
        if self.stopband_halfwidth_ghz < 0.0:
            raise ValueError("stopband_halfwidth_ghz must be >= 0")
        if self.total_pair_flux < 0.0:
            raise ValueError("total_pair_flux must be >= 0")


@dataclass(frozen=True)
class SpectralSlice:
    """Contiguous detuning band [lower_ghz, upper_ghz)."""

    lower_ghz: float
    upper_ghz: float

    def __post_init__(self):
        if not self.lower_ghz < self.upper_ghz:
            raise ValueError(
                f"slice must have lower < upper, got [{self.lower_ghz}, {self.upper_ghz}]"
            )

    @property
    def width_ghz(self) -> float:
        return self.upper_ghz - self.lower_ghz


@dataclass(frozen=True)
class Channel:
    """Energy-matched pair of slices; index 1 is innermost.

    The idler slice is the point reflection of the signal slice about zero
    detuning, which is the testable form of signal + idler frequencies
    summing to the pump frequency.
    """

    index: int
    signal: SpectralSlice
    idler: SpectralSlice

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("channel index must be >= 1")
        if self.signal.lower_ghz < 0.0:
            raise ValueError("signal slice must sit at positive detunings")
        if not (
            math.isclose(self.idler.lower_ghz, -self.signal.upper_ghz, abs_tol=BOUNDARY_TOLERANCE_GHZ)
            and math.isclose(self.idler.upper_ghz, -self.signal.lower_ghz, abs_tol=BOUNDARY_TOLERANCE_GHZ)
        ):
            raise ValueError(
                f"channel {self.index}: idler slice is not the mirror of the signal slice"
            )


def mirrored_channel(index: int, signal: SpectralSlice) -> Channel:
    """Build a channel from its signal slice, mirroring the idler."""
    idler = SpectralSlice(lower_ghz=-signal.upper_ghz, upper_ghz=-signal.lower_ghz)
    return Channel(index=index, signal=signal, idler=idler)


def spectral_density(spectrum: BiphotonSpectrum, detuning_ghz) -> np.ndarray | float:
    """Relative spectral density in [0, 1] at the given detuning(s).

    sinc^2(pi * detuning / first_null) with sinc(x) = sin(x)/x; equals 1 at
    zero detuning and is even in detuning. Accepts scalars or arrays.
    """
    x = np.asarray(detuning_ghz, dtype=float) / spectrum.first_null_detuning_ghz
    out = np.sinc(x) ** 2  # np.sinc(x) = sin(pi x) / (pi x)
    if np.isscalar(detuning_ghz) or np.ndim(detuning_ghz) == 0:
        return float(out)
    return out


def carve_grid(
    spectrum: BiphotonSpectrum, slice_width_ghz: float, channel_count: int
) -> list[Channel]:
    """Carve contiguous fixed-width channels outward from the stopband edge.

    Channel i's signal slice covers
    [stopband + (i-1) * width, stopband + i * width].
    """
    if slice_width_ghz <= 0.0:
        raise ValueError("slice_width_ghz must be > 0")
    if channel_count < 1:
        raise ValueError("channel_count must be >= 1")
    base = spectrum.stopband_halfwidth_ghz
    channels = []
    for i in range(1, channel_count + 1):
        signal = SpectralSlice(
            lower_ghz=base + (i - 1) * slice_width_ghz,
            upper_ghz=base + i * slice_width_ghz,
        )
        channels.append(mirrored_channel(i, signal))
    return channels


def _midpoint_integral(spectrum: BiphotonSpectrum, lower: float, upper: float) -> float:
    width = upper - lower
    n = max(1, math.ceil(width / QUADRATURE_STEP_GHZ))
    h = width / n
    xs = lower + (np.arange(n) + 0.5) * h
    return float(np.sum(spectral_density(spectrum, xs)) * h)


def half_line_density_integral(spectrum: BiphotonSpectrum) -> float:
    """Integral of the relative density over all positive detunings.

    Closed form: the half-line integral of sinc^2(pi d / d0) is d0 / 2.
    """
    return spectrum.first_null_detuning_ghz / 2.0


def channel_flux(spectrum: BiphotonSpectrum, channel: Channel) -> float:
    """Pair flux (pairs/s) emitted into one channel.

    Signal-slice density integral (composite midpoint, QUADRATURE_STEP_GHZ)
    normalized by the half-line integral and scaled by the total flux.
    """
    numer = _midpoint_integral(spectrum, channel.signal.lower_ghz, channel.signal.upper_ghz)
    return spectrum.total_pair_flux * numer / half_line_density_integral(spectrum)


def channel_clears_stopband(spectrum: BiphotonSpectrum, channel: Channel) -> bool:
    """True when neither slice of the channel overlaps the stopband."""
    return channel.signal.lower_ghz >= spectrum.stopband_halfwidth_ghz - BOUNDARY_TOLERANCE_GHZ


@dataclass(frozen=True)
class GridViolation:
    """One switch-constraint violation found in a channel grid."""

    channel_index: int
    slice_kind: str  # "signal" or "idler"
    constraint: str  # "resolution" or "addressability"
    detail: str


def _off_pitch(boundary_ghz: float, pitch_ghz: float) -> bool:
    nearest = round(boundary_ghz / pitch_ghz) * pitch_ghz
    return abs(boundary_ghz - nearest) > BOUNDARY_TOLERANCE_GHZ * max(1.0, abs(boundary_ghz))


def validate_grid(channels: Sequence[Channel], wss: WssModel) -> list[GridViolation]:
    """Check every slice against switch resolution and addressability.

    Returns all violations (empty list = grid is routable). Violations are
    data for the caller, not faults.
    """
    violations = []
    for channel in channels:
        for kind, sl in (("signal", channel.signal), ("idler", channel.idler)):
            if sl.width_ghz < wss.resolution_ghz - BOUNDARY_TOLERANCE_GHZ:
                violations.append(
                    GridViolation(
                        channel_index=channel.index,
                        slice_kind=kind,
                        constraint="resolution",
                        detail=(
                            f"width {sl.width_ghz:g} GHz is below the switch "
                            f"resolution {wss.resolution_ghz:g} GHz"
                        ),
                    )
                )
            for boundary in (sl.lower_ghz, sl.upper_ghz):
                if _off_pitch(boundary, wss.addressability_ghz):
                    violations.append(
                        GridViolation(
                            channel_index=channel.index,
                            slice_kind=kind,
                            constraint="addressability",
                            detail=(
                                f"boundary {boundary:g} GHz is not a multiple of the "
                                f"{wss.addressability_ghz:g} GHz addressability"
                            ),
                        )
                    )
    return violations


def grid_fluxes(spectrum: BiphotonSpectrum, channels: Iterable[Channel]) -> dict[int, float]:
    """Pair flux per channel index for a carved grid."""
    return {ch.index: channel_flux(spectrum, ch) for ch in channels}
