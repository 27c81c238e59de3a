"""Analytic singles, coincidence, and accidental rate predictions.

Losses enter as linear transmittances 10^(-dB/10); detection folds in
quantum efficiency and gate duty cycle. Coincidence gating across a link
uses a single shared duty factor when the two gates run off one clock
(the default) and the product of duty factors when they free-run
independently.
"""

from __future__ import annotations

from dataclasses import dataclass

from .network import (
    SYNCHRONIZED,
    Allocation,
    Link,
    NetworkModel,
    User,
    channels_for_link,
    channels_for_user,
    validate_allocation,
)

PS_PER_S = 1e12


def db_to_transmittance(loss_db: float) -> float:
    return 10.0 ** (-loss_db / 10.0)


def user_transmittance(network: NetworkModel, user: User) -> float:
    """Source-to-analyzer power transmittance for one user (WSS + path)."""
    return db_to_transmittance(network.wss.insertion_loss_db + user.path_loss_db)


def link_gating_factor(network: NetworkModel, link: Link) -> float:
    """Joint duty factor for pair detection across a link."""
    du = network.user(link[0]).detector.duty_cycle
    dv = network.user(link[1]).detector.duty_cycle
    if network.gating == SYNCHRONIZED:
        return min(du, dv)
    return du * dv


def link_gain(network: NetworkModel, link: Link) -> float:
    """Pair survival probability for a link: efficiencies, losses, gating.

    A channel assigned to the link yields coincidences at channel flux
    times this gain.
    """
    u = network.user(link[0])
    v = network.user(link[1])
    return (
        u.detector.efficiency
        * v.detector.efficiency
        * user_transmittance(network, u)
        * user_transmittance(network, v)
        * link_gating_factor(network, link)
    )


def singles_rate(user: User, allocation: Allocation, network: NetworkModel) -> float:
    """Detected singles (counts/s) at one user under an allocation.

    Dark counts accrue only while the detector is gated. Every channel on
    a link delivers one slice (and hence the full channel pair flux) to
    each of the link's two users.
    """
    validate_allocation(allocation, network)
    det = user.detector
    rate = det.dark_rate * det.duty_cycle
    factor = det.efficiency * det.duty_cycle * user_transmittance(network, user)
    for index in channels_for_user(allocation, user.name):
        rate += network.channel_fluxes[index] * factor
    return rate


def coincidence_rate(link: Link, allocation: Allocation, network: NetworkModel) -> float:
    """True pair coincidences (counts/s) on one link."""
    validate_allocation(allocation, network)
    gain = link_gain(network, link)
    return sum(
        network.channel_fluxes[index] * gain
        for index in channels_for_link(allocation, link)
    )


def accidental_rate(singles_u: float, singles_v: float, window_ps: float) -> float:
    """Random-overlap coincidences (counts/s) inside one window."""
    if window_ps <= 0:
        raise ValueError("window_ps must be > 0")
    return singles_u * singles_v * (window_ps / PS_PER_S)


@dataclass(frozen=True)
class LinkRates:
    coincidence: float
    accidental: float
    car: float | None  # undefined when the accidental rate is zero


@dataclass(frozen=True)
class BalanceMetrics:
    """Spread of true coincidence rates over links that hold spectrum."""

    max_rate: float | None
    min_rate: float | None
    score: float | None  # max/min; undefined without two-sided positive rates


@dataclass(frozen=True)
class RateReport:
    singles: dict[str, float]
    links: dict[Link, LinkRates]
    active_links: tuple[Link, ...]
    balance: BalanceMetrics

    def link(self, link: Link) -> LinkRates:
        return self.links[tuple(link)]


def predict_report(network: NetworkModel, allocation: Allocation) -> RateReport:
    """Full deterministic rate report for an allocation.

    Accidentals are predicted from the modeled singles and the configured
    coincidence window; they are reported alongside, never subtracted from,
    the true coincidence rates.
    """
    validate_allocation(allocation, network)
    singles = {
        u.name: singles_rate(u, allocation, network) for u in network.users
    }
    links: dict[Link, LinkRates] = {}
    active = []
    for link in network.links:
        true_rate = coincidence_rate(link, allocation, network)
        acc = accidental_rate(singles[link[0]], singles[link[1]], network.window_ps)
        links[link] = LinkRates(
            coincidence=true_rate,
            accidental=acc,
            car=(true_rate / acc) if acc > 0.0 else None,
        )
        if channels_for_link(allocation, link):
            active.append(link)

    active_rates = [links[l].coincidence for l in active]
    if active_rates and min(active_rates) > 0.0:
        balance = BalanceMetrics(
            max_rate=max(active_rates),
            min_rate=min(active_rates),
            score=max(active_rates) / min(active_rates),
        )
    elif active_rates:
        balance = BalanceMetrics(max_rate=max(active_rates), min_rate=0.0, score=None)
    else:
        balance = BalanceMetrics(max_rate=None, min_rate=None, score=None)

    return RateReport(
        singles=singles,
        links=links,
        active_links=tuple(active),
        balance=balance,
    )
