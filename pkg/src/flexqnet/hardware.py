"""Receiver and switching hardware models.

Covers the three pieces of hardware the planner reasons about: single
photon detectors, the wavelength-selective switch (WSS) that routes
spectral slices to users at a flat insertion loss, and the passive DWDM
filter tree it replaces, whose worst-path loss grows quadratically with
the number of users.
"""

from __future__ import annotations

from dataclasses import dataclass

TWO_TRANSMISSIONS = "two_transmissions"
REFLECTION_PLUS_TRANSMISSION = "reflection_plus_transmission"


@dataclass(frozen=True)
class Detector:
    """Single-photon detector parameters.

    efficiency: detection probability for a photon that reaches the detector.
    duty_cycle: fraction of time a gated detector is live (1.0 = free running).
    dark_rate: ungated dark counts/s; gated detectors only accumulate darks
        while live, so the effective dark rate is dark_rate * duty_cycle.
    jitter_fwhm_ps: FWHM of the Gaussian timing jitter.
    """

    efficiency: float
    duty_cycle: float = 1.0
    dark_rate: float = 0.0
    jitter_fwhm_ps: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.efficiency <= 1.0:
            raise ValueError(f"efficiency must be in [0, 1], got {self.efficiency}")
        if not 0.0 < self.duty_cycle <= 1.0:
            raise ValueError(f"duty_cycle must be in (0, 1], got {self.duty_cycle}")
        if self.dark_rate < 0.0:
            raise ValueError(f"dark_rate must be >= 0, got {self.dark_rate}")
        if self.jitter_fwhm_ps < 0.0:
            raise ValueError(f"jitter_fwhm_ps must be >= 0, got {self.jitter_fwhm_ps}")


@dataclass(frozen=True)
class WssModel:
    """Wavelength-selective switch: equal insertion loss on every port.

    resolution_ghz bounds the narrowest routable slice; addressability_ghz
    is the pixel pitch every slice boundary must sit on.
    """

    port_count: int
    insertion_loss_db: float
    resolution_ghz: float
    addressability_ghz: float
    total_bandwidth_ghz: float

    def __post_init__(self):
        if self.port_count < 1:
            raise ValueError(f"port_count must be >= 1, got {self.port_count}")
        if self.insertion_loss_db < 0.0:
            raise ValueError("insertion_loss_db must be >= 0")
        if self.addressability_ghz <= 0.0:
            raise ValueError("addressability_ghz must be > 0")
        if self.resolution_ghz < self.addressability_ghz:
            raise ValueError("resolution_ghz must be >= addressability_ghz")
        if self.total_bandwidth_ghz <= 0.0:
            raise ValueError("total_bandwidth_ghz must be > 0")


@dataclass(frozen=True)
class DwdmModel:
    """Per-filter losses of a DWDM add/drop tree.

    best_case_mode selects how the most favorable path through "two
    filters" is counted; the two readings cannot be told apart from
    published loss curves, so both are supported.
    """

    reflection_loss_db: float = 0.25
    transmission_loss_db: float = 0.6
    best_case_mode: str = TWO_TRANSMISSIONS

    def __post_init__(self):
        if self.reflection_loss_db < 0.0:
            raise ValueError("reflection_loss_db must be >= 0")
        if self.transmission_loss_db < 0.0:
            raise ValueError("transmission_loss_db must be >= 0")
        if self.best_case_mode not in (TWO_TRANSMISSIONS, REFLECTION_PLUS_TRANSMISSION):
            raise ValueError(f"unknown best_case_mode {self.best_case_mode!r}")


def _require_two_users(n_users: int) -> None:
    if n_users < 2:
        raise ValueError(f"need at least 2 users for a two-party link, got {n_users}")


def dwdm_filter_count(n_users: int) -> int:
    """Number of DWDM filters for a fully connected n-user passive tree."""
    _require_two_users(n_users)
    return 2 * n_users * n_users - 3 * n_users


def dwdm_worst_loss(model: DwdmModel, n_users: int) -> float:
    """Loss (dB) of the worst spectral band: n^2 - n reflections, then one
    transmission."""
    _require_two_users(n_users)
    reflections = n_users * n_users - n_users
    return reflections * model.reflection_loss_db + model.transmission_loss_db


def dwdm_best_loss(model: DwdmModel, n_users: int) -> float:
    """Loss (dB) of the most favorable band, which crosses only two filters.

    Independent of n_users; the filter combination is set by best_case_mode.
    """
    _require_two_users(n_users)
    if model.best_case_mode == TWO_TRANSMISSIONS:
        return 2.0 * model.transmission_loss_db
    return model.reflection_loss_db + model.transmission_loss_db


def crossover_users(wss: WssModel, dwdm: DwdmModel) -> int:
    """Smallest user count at which the DWDM worst-case loss exceeds the
    flat WSS insertion loss."""
    if dwdm.reflection_loss_db <= 0.0:
        raise ValueError(
            "crossover undefined: worst-case DWDM loss does not grow when "
            "reflection_loss_db is 0"
        )
    n = 2
    while dwdm_worst_loss(dwdm, n) <= wss.insertion_loss_db:
        n += 1
    return n


def fully_connected_capacity(wss: WssModel, slice_width_ghz: float) -> int:
    """Largest user count n the switch can fully interconnect.

    Full connectivity needs n(n-1) slices of the given width inside the
    switch bandwidth, and one output port per user.
    """
    if slice_width_ghz < wss.resolution_ghz:
        raise ValueError(
            f"slice width {slice_width_ghz} GHz is below the switch "
            f"resolution {wss.resolution_ghz} GHz"
        )
    n = 1
    while (
        n + 1 <= wss.port_count
        and (n + 1) * n * slice_width_ghz <= wss.total_bandwidth_ghz
    ):
        n += 1
    return n


@dataclass(frozen=True)
class LossRow:
    """One row of the WSS vs DWDM loss comparison."""

    n_users: int
    wss_loss_db: float
    dwdm_best_db: float
    dwdm_worst_db: float


def loss_table(wss: WssModel, dwdm: DwdmModel, n_range) -> list[LossRow]:
    """Plot-ready loss comparison over a range of network sizes."""
    rows = [
        LossRow(
            n_users=n,
            wss_loss_db=wss.insertion_loss_db,
            dwdm_best_db=dwdm_best_loss(dwdm, n),
            dwdm_worst_db=dwdm_worst_loss(dwdm, n),
        )
        for n in n_range
    ]
    if not rows:
        raise ValueError("n_range must be non-empty")
    return rows
