"""Network topology: users, two-party links, and channel allocations."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

from .hardware import Detector, DwdmModel, WssModel
from .spectrum import BiphotonSpectrum, Channel, channel_flux

Link = tuple[str, str]

SYNCHRONIZED = "synchronized"
INDEPENDENT = "independent"

# Allocation: channel index -> link; absent channels are unassigned.
Allocation = dict[int, Link]


class ConfigError(ValueError):
    """An allocation or scenario references something that does not exist."""


@dataclass(frozen=True)
class User:
    """A receiver on the network.

    path_loss_db covers everything between the source and this user's
    analyzer except the shared WSS insertion loss.
    """

    name: str
    detector: Detector
    path_loss_db: float = 0.0

    def __post_init__(self):
        if not self.name:
            raise ValueError("user name must be non-empty")
        if self.path_loss_db < 0.0:
            raise ValueError(f"path_loss_db must be >= 0, got {self.path_loss_db}")


def make_link(a: str, b: str) -> Link:
    """Canonical (sorted) two-party link between distinct users."""
    if a == b:
        raise ValueError(f"a link needs two distinct users, got {a!r} twice")
    return (a, b) if a < b else (b, a)


def link_label(link: Link) -> str:
    return f"{link[0]}-{link[1]}"


@dataclass
class NetworkModel:
    """Everything the rate model needs: users, hardware, spectrum, grid.

    Channel fluxes are derived from the spectrum once and cached; the model
    is treated as immutable after construction.
    """

    users: list[User]
    wss: WssModel
    dwdm: DwdmModel
    spectrum: BiphotonSpectrum
    channels: list[Channel]
    gating: str = SYNCHRONIZED
    window_ps: int = 1024
    histogram_span_ps: int = 60_000
    offsets_ps: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.users) < 2:
            raise ValueError("a network needs at least 2 users")
        names = [u.name for u in self.users]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate user names: {names}")
        if self.gating not in (SYNCHRONIZED, INDEPENDENT):
            raise ValueError(f"unknown gating mode {self.gating!r}")
        if self.window_ps <= 0:
            raise ValueError("window_ps must be > 0")
        for name in self.offsets_ps:
            if name not in names:
                raise ConfigError(f"offset given for unknown user {name!r}")

    @cached_property
    def users_by_name(self) -> dict[str, User]:
        return {u.name: u for u in self.users}

    @cached_property
    def links(self) -> list[Link]:
        """All two-party links, in canonical alphabetical order."""
        names = sorted(u.name for u in self.users)
        return [make_link(a, b) for a, b in combinations(names, 2)]

    @cached_property
    def channel_fluxes(self) -> dict[int, float]:
        return {ch.index: channel_flux(self.spectrum, ch) for ch in self.channels}

    @cached_property
    def channels_by_index(self) -> dict[int, Channel]:
        return {ch.index: ch for ch in self.channels}

    def user(self, name: str) -> User:
        try:
            return self.users_by_name[name]
        except KeyError:
            raise ConfigError(f"unknown user {name!r}") from None

    def offset_ps(self, name: str) -> int:
        return self.offsets_ps.get(name, 0)


def validate_allocation(allocation: Allocation, network: NetworkModel) -> None:
    """Raise ConfigError if the allocation references unknown channels,
    unknown users, or non-links."""
    known_links = set(network.links)
    for index, link in allocation.items():
        if index not in network.channels_by_index:
            raise ConfigError(f"allocation references unknown channel {index}")
        if tuple(link) != tuple(make_link(*link)):
            raise ConfigError(f"link {link!r} is not in canonical order")
        if tuple(link) not in known_links:
            raise ConfigError(f"allocation references unknown link {link!r}")


def channels_for_link(allocation: Allocation, link: Link) -> list[int]:
    """Channel indices assigned to one link, ascending."""
    return sorted(i for i, l in allocation.items() if tuple(l) == tuple(link))


def channels_for_user(allocation: Allocation, name: str) -> list[int]:
    """Channel indices whose link includes the user, ascending."""
    return sorted(i for i, l in allocation.items() if name in l)


def slice_owner(link: Link, kind: str) -> str:
    """Which user of a link receives the signal or idler slice.

    The alphabetically first user takes the signal slice; the other takes
    the idler. Deterministic so spectra can be drawn without per-user
    bookkeeping.
    """
    first, second = make_link(*link)
    return first if kind == "signal" else second
