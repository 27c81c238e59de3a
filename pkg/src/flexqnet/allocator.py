"""Channel-to-link assignment under fixed-grid and full-flex policies.

Fixed-grid policies merge channels into contiguous center-out groups and
assign exactly one group per link, either alphabetically or by exhaustive
search over the (small) permutation space. The full-flex policy places no
restriction on which channels serve which links: a deterministic greedy
seeding feeds the worst-off link first, then a local search over single
channel moves and pairwise swaps runs until no move improves the
objective. All tie-breaking is total, so identical inputs always produce
identical plans.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations
from statistics import median

import numpy as np

from .network import Allocation, Link, NetworkModel
from .ratemodel import RateReport, link_gain, predict_report

EQUALIZE = "equalize"
MAX_MIN = "max_min"
WEIGHTED_TARGETS = "weighted_targets"
PREMIUM = "premium"

FIXED_GRID = "fixed_grid"
FULL_FLEX = "full_flex"

_EPS = 1e-12


class SizeError(ValueError):
    """Instance too large for exhaustive enumeration."""


class UndefinedScoreError(ValueError):
    """Balance score requested while some active link has zero rate."""


@dataclass(frozen=True)
class Objective:
    """Quality-of-service target for an allocation.

    equalize: minimize the max/min ratio of active-link rates.
    max_min: maximize the lowest active-link rate.
    weighted_targets: minimize the worst relative shortfall against
        per-link target rates.
    premium: maximize one link's rate subject to rate floors on the rest.
    """

    variant: str = EQUALIZE
    targets: dict[Link, float] | None = None
    premium_link: Link | None = None
    floors: dict[Link, float] | None = None

    def __post_init__(self):
        if self.variant not in (EQUALIZE, MAX_MIN, WEIGHTED_TARGETS, PREMIUM):
            raise ValueError(f"unknown objective variant {self.variant!r}")
        if self.variant == WEIGHTED_TARGETS:
            if not self.targets or any(t <= 0 for t in self.targets.values()):
                raise ValueError("weighted_targets needs positive per-link targets")
        if self.variant == PREMIUM:
            if self.premium_link is None:
                raise ValueError("premium objective needs premium_link")
            if self.floors and any(f <= 0 for f in self.floors.values()):
                raise ValueError("premium floors must be positive")

    def value(self, rates: dict[Link, float], active: list[Link]) -> float:
        """Natural objective value over the active links."""
        if self.variant == EQUALIZE:
            vals = [rates.get(l, 0.0) for l in active]
            if not vals or min(vals) <= 0.0:
                return math.inf
            return max(vals) / min(vals)
        if self.variant == MAX_MIN:
            return min((rates.get(l, 0.0) for l in active), default=0.0)
        if self.variant == WEIGHTED_TARGETS:
            assert self.targets is not None
            shortfalls = []
            for l in active:
                try:
                    target = self.targets[tuple(l)]
                except KeyError:
                    raise ValueError(f"no target rate given for active link {l!r}") from None
                shortfalls.append((target - rates.get(l, 0.0)) / target)
            return max(shortfalls) if shortfalls else 0.0
        premium = rates.get(tuple(self.premium_link), 0.0)
        return premium

    def search_key(self, rates: dict[Link, float], active: list[Link]):
        """Totally ordered key; smaller is strictly better for every variant."""
        if self.variant == EQUALIZE:
            return (self.value(rates, active),)
        if self.variant == MAX_MIN:
            return (-self.value(rates, active),)
        if self.variant == WEIGHTED_TARGETS:
            return (self.value(rates, active),)
        # premium: satisfy floors first, then push the premium link up
        worst_floor = 0.0
        for l, floor in (self.floors or {}).items():
            if tuple(l) in map(tuple, active):
                worst_floor = max(worst_floor, (floor - rates.get(tuple(l), 0.0)) / floor)
        return (worst_floor, -self.value(rates, active))

    def worst_off(self, rates: dict[Link, float], active: list[Link]) -> Link:
        """Link the greedy seeding should feed next."""
        if self.variant in (EQUALIZE, MAX_MIN):
            return min(active, key=lambda l: (rates.get(l, 0.0), l))
        if self.variant == WEIGHTED_TARGETS:
            assert self.targets is not None
            return min(
                active,
                key=lambda l: (-(self.targets[tuple(l)] - rates.get(l, 0.0)) / self.targets[tuple(l)], l),
            )
        # premium: fill unmet floors, then everything to the premium link
        needy = [
            (l, (floor - rates.get(tuple(l), 0.0)) / floor)
            for l, floor in (self.floors or {}).items()
            if tuple(l) in map(tuple, active) and rates.get(tuple(l), 0.0) < floor
        ]
        if needy:
            return max(needy, key=lambda pair: (pair[1], pair[0]))[0]
        return tuple(self.premium_link)

    def infeasible(self, rates: dict[Link, float], active: list[Link]) -> str | None:
        """Human-readable reason the target cannot be met, if any."""
        if self.variant == EQUALIZE and self.value(rates, active) == math.inf:
            return "some active link has zero achievable rate"
        if self.variant == WEIGHTED_TARGETS and self.value(rates, active) > 0.0:
            return "target rates cannot all be met"
        if self.variant == PREMIUM:
            for l, floor in (self.floors or {}).items():
                if tuple(l) in map(tuple, active) and rates.get(tuple(l), 0.0) < floor:
                    return f"floor unmet on {l[0]}-{l[1]}"
        return None


@dataclass(frozen=True)
class GridPolicy:
    """fixed_grid merges channels into group_size-wide blocks, one per
    link; full_flex allocates channels freely and may drop links."""

    variant: str = FULL_FLEX
    group_size: int = 2

    def __post_init__(self):
        if self.variant not in (FIXED_GRID, FULL_FLEX):
            raise ValueError(f"unknown grid policy {self.variant!r}")
        if self.variant == FIXED_GRID and self.group_size < 1:
            raise ValueError("group_size must be >= 1")


@dataclass
class AllocationPlan:
    allocation: Allocation
    active_links: tuple[Link, ...]
    predicted: RateReport
    objective_value: float
    diagnostics: dict = field(default_factory=dict)


def make_groups(channel_count: int, group_size: int) -> list[tuple[int, ...]]:
    """Contiguous channel groups counted from the center out."""
    if channel_count % group_size != 0:
        raise ValueError(
            f"{channel_count} channels do not split into groups of {group_size}"
        )
    return [
        tuple(range(i * group_size + 1, (i + 1) * group_size + 1))
        for i in range(channel_count // group_size)
    ]


def _group_fluxes(network: NetworkModel, groups) -> list[float]:
    return [sum(network.channel_fluxes[i] for i in group) for group in groups]


def _finish_plan(
    network: NetworkModel,
    allocation: Allocation,
    active: list[Link],
    objective: Objective,
    diagnostics: dict,
) -> AllocationPlan:
    report = predict_report(network, allocation)
    rates = {l: report.links[l].coincidence for l in network.links}
    value = objective.value(rates, active)
    reason = objective.infeasible(rates, active)
    if reason:
        diagnostics["infeasible"] = reason
    return AllocationPlan(
        allocation=dict(sorted(allocation.items())),
        active_links=tuple(active),
        predicted=report,
        objective_value=value,
        diagnostics=diagnostics,
    )


def alphabetical_fixed(network: NetworkModel, groups) -> AllocationPlan:
    """Assign group i (center out) to the i-th link in alphabetical order."""
    links = network.links
    if len(groups) != len(links):
        raise ValueError(
            f"{len(groups)} groups cannot cover {len(links)} links one-to-one"
        )
    allocation: Allocation = {}
    for group, link in zip(groups, links):
        for index in group:
            allocation[index] = link
    return _finish_plan(
        network, allocation, list(links), Objective(EQUALIZE), {"policy": "alphabetical"}
    )


def enumerate_fixed(
    network: NetworkModel, groups, objective: Objective
) -> AllocationPlan:
    """Exhaustively search all group-to-link bijections.

    Ties keep the lexicographically smallest assignment vector. Bounded at
    8 groups; larger instances belong to optimize_flex.
    """
    links = network.links
    if len(groups) != len(links):
        raise ValueError(
            f"{len(groups)} groups cannot cover {len(links)} links one-to-one"
        )
    if len(groups) > 8:
        raise SizeError(
            f"{len(groups)}! assignments is past the enumeration bound; "
            "use optimize_flex for instances this large"
        )
    gains = {link: link_gain(network, link) for link in links}
    fluxes = _group_fluxes(network, groups)
    active = list(links)

    best_key = None
    best_perm = None
    evaluations = 0
    for perm in permutations(range(len(links))):
        rates = {links[perm[g]]: fluxes[g] * gains[links[perm[g]]] for g in range(len(groups))}
        key = objective.search_key(rates, active)
        evaluations += 1
        if best_key is None or key < best_key:
            best_key = key
            best_perm = perm

    allocation: Allocation = {}
    for g, group in enumerate(groups):
        for index in group:
            allocation[index] = links[best_perm[g]]
    return _finish_plan(
        network,
        allocation,
        active,
        objective,
        {"policy": "enumerate_fixed", "evaluations": evaluations},
    )


def feasibility(
    network: NetworkModel,
    link: Link,
    channels: list[int] | None = None,
    k: int | None = None,
) -> float:
    """Best coincidence rate the link could reach with its k best channels."""
    indices = sorted(channels if channels is not None else network.channels_by_index)
    ranked = sorted(indices, key=lambda i: (-network.channel_fluxes[i], i))
    if k is not None:
        ranked = ranked[:k]
    gain = link_gain(network, tuple(link))
    return sum(network.channel_fluxes[i] * gain for i in ranked)


PAIR_MOVE_BUDGET = 2_000_000


def _strictly_better(new_key, current_key, rel=1e-10, absolute=1e-13):
    """Lexicographic comparison with a noise margin, so float drift from
    incremental rate updates can never masquerade as an improvement."""
    for new, cur in zip(new_key, current_key):
        margin = max(rel * abs(cur), absolute)
        if new < cur - margin:
            return True
        if new > cur + margin:
            return False
    return False


def _list_key_fn(objective: Objective, active: list[Link]):
    """Compile the search key into a plain function over an indexed rate
    list (one slot per active link); smaller keys are strictly better."""
    variant = objective.variant
    if variant == EQUALIZE:
        def key(rates):
            low = min(rates)
            if low <= 0.0:
                return (math.inf,)
            return (max(rates) / low,)
        return key
    if variant == MAX_MIN:
        def key(rates):
            return (-min(rates),)
        return key
    if variant == WEIGHTED_TARGETS:
        targets = []
        for link in active:
            try:
                targets.append(objective.targets[tuple(link)])
            except KeyError:
                raise ValueError(f"no target rate given for active link {link!r}") from None
        def key(rates):
            return (max((t - r) / t for t, r in zip(targets, rates)),)
        return key
    premium_index = active.index(tuple(objective.premium_link)) if tuple(objective.premium_link) in active else None
    floor_slots = [
        (active.index(tuple(link)), floor)
        for link, floor in (objective.floors or {}).items()
        if tuple(link) in active
    ]
    def key(rates):
        worst_floor = 0.0
        for slot, floor in floor_slots:
            worst_floor = max(worst_floor, (floor - rates[slot]) / floor)
        premium = rates[premium_index] if premium_index is not None else 0.0
        return (worst_floor, -premium)
    return key


def _improving_move(flux, gains, assignment, rates, key_fn, channel_ids, n_active):
    """First strictly improving move, in canonical order.

    assignment maps channel -> active-link slot or None; rates is the
    per-slot coincidence total. Neighborhood: single-channel moves
    (reassign or unassign) and channel-pair moves to any slot pair, which
    subsume pairwise swaps. Pair moves are skipped when the scan would
    exceed PAIR_MOVE_BUDGET candidates, keeping large instances at the
    single-move + swap level.
    """
    current_key = key_fn(rates)
    slots = list(range(n_active)) + [None]

    def improves():
        return _strictly_better(key_fn(rates), current_key)

    for c in channel_ids:
        holder = assignment[c]
        for target in slots:
            if target == holder:
                continue
            if holder is not None:
                rates[holder] -= flux[c] * gains[holder]
            if target is not None:
                rates[target] += flux[c] * gains[target]
            better = improves()
            if better:
                new_assignment = dict(assignment)
                new_assignment[c] = target
                return new_assignment, rates
            if target is not None:
                rates[target] -= flux[c] * gains[target]
            if holder is not None:
                rates[holder] += flux[c] * gains[holder]

    pair_scan = (len(channel_ids) * (len(channel_ids) - 1) // 2) * len(slots) ** 2
    if pair_scan <= PAIR_MOVE_BUDGET:
        for i, c1 in enumerate(channel_ids):
            h1 = assignment[c1]
            for c2 in channel_ids[i + 1 :]:
                h2 = assignment[c2]
                for t1 in slots:
                    if t1 == h1:
                        continue  # covered by single moves or the t2 loop
                    if h1 is not None:
                        rates[h1] -= flux[c1] * gains[h1]
                    if t1 is not None:
                        rates[t1] += flux[c1] * gains[t1]
                    for t2 in slots:
                        if t2 == h2:
                            continue
                        if h2 is not None:
                            rates[h2] -= flux[c2] * gains[h2]
                        if t2 is not None:
                            rates[t2] += flux[c2] * gains[t2]
                        if improves():
                            new_assignment = dict(assignment)
                            new_assignment[c1] = t1
                            new_assignment[c2] = t2
                            return new_assignment, rates
                        if t2 is not None:
                            rates[t2] -= flux[c2] * gains[t2]
                        if h2 is not None:
                            rates[h2] += flux[c2] * gains[h2]
                    if t1 is not None:
                        rates[t1] -= flux[c1] * gains[t1]
                    if h1 is not None:
                        rates[h1] += flux[c1] * gains[h1]
    else:
        for i, c1 in enumerate(channel_ids):
            h1 = assignment[c1]
            for c2 in channel_ids[i + 1 :]:
                h2 = assignment[c2]
                if h1 == h2 or h1 is None or h2 is None:
                    continue
                rates[h1] += flux[c2] * gains[h1] - flux[c1] * gains[h1]
                rates[h2] += flux[c1] * gains[h2] - flux[c2] * gains[h2]
                if improves():
                    new_assignment = dict(assignment)
                    new_assignment[c1], new_assignment[c2] = h2, h1
                    return new_assignment, rates
                rates[h1] -= flux[c2] * gains[h1] - flux[c1] * gains[h1]
                rates[h2] -= flux[c1] * gains[h2] - flux[c2] * gains[h2]
    return None


def _rates_of(flux, gains, assignment, n_active):
    rates = [0.0] * n_active
    for c, slot in assignment.items():
        if slot is not None:
            rates[slot] += flux[c] * gains[slot]
    return rates


def _descend(flux, gains, assignment, key_fn, channel_ids, n_active):
    moves = 0
    while True:
        # fresh rates per scan keep incremental-update drift bounded
        rates = _rates_of(flux, gains, assignment, n_active)
        found = _improving_move(flux, gains, assignment, rates, key_fn, channel_ids, n_active)
        if found is None:
            return assignment, moves
        assignment, _ = found
        moves += 1


def _greedy_seed(network, objective, active, gains_by_link, ordered_channels):
    allocation: Allocation = {}
    rates = {link: 0.0 for link in gains_by_link}
    for index in ordered_channels:
        link = objective.worst_off(rates, active)
        allocation[index] = link
        rates[link] += network.channel_fluxes[index] * gains_by_link[link]
    return allocation


def _round_robin_seed(active, ordered_channels):
    return {
        index: active[i % len(active)] for i, index in enumerate(ordered_channels)
    }


def _kick(assignment, channel_ids, n_active, rng):
    """Seeded perturbation for iterated local search: reassign a few
    channels to pseudo-random slots. The RNG stream is a fixed function
    of the instance shape, so plans stay deterministic."""
    kicked = dict(assignment)
    n_moves = int(rng.integers(2, 5))
    picks = rng.choice(len(channel_ids), size=min(n_moves, len(channel_ids)), replace=False)
    for pick in picks:
        slot = int(rng.integers(0, n_active + 1))
        kicked[channel_ids[int(pick)]] = slot if slot < n_active else None
    return kicked


EXACT_NODE_BUDGET = 3_000_000


def _exact_small(flux, gains, key_fn, channel_ids, n_active, variant, incumbent_key):
    """Depth-first branch and bound over all assignments, exact when it
    finishes within the node budget.

    Channels are branched brightest first; subtrees are cut with an
    optimistic bound (every remaining channel granted to each link at
    once). Only the equalize and max_min objectives have usable bounds.
    Returns (assignment, key) or None when the budget runs out.
    """
    if variant not in (EQUALIZE, MAX_MIN):
        return None
    order = sorted(channel_ids, key=lambda c: (-flux[c], c))
    remaining_after = [0.0] * (len(order) + 1)
    for i in range(len(order) - 1, -1, -1):
        remaining_after[i] = remaining_after[i + 1] + flux[order[i]]

    best_key = incumbent_key
    best_assignment = None
    rates = [0.0] * n_active
    assignment = {}
    nodes = 0

    def bound_key(depth):
        # optimistic: give all remaining flux to every link simultaneously
        remaining = remaining_after[depth]
        optimistic_min = min(rates[s] + remaining * gains[s] for s in range(n_active))
        if variant == MAX_MIN:
            return (-optimistic_min,)
        if optimistic_min <= 0.0:
            return (math.inf,)
        current_max = max(rates)
        return (max(current_max / optimistic_min, 1.0),)

    def dfs(depth):
        nonlocal nodes, best_key, best_assignment
        if nodes > EXACT_NODE_BUDGET:
            return
        nodes += 1
        if not _strictly_better(bound_key(depth), best_key):
            return
        if depth == len(order):
            key = key_fn(rates)
            if _strictly_better(key, best_key):
                best_key = key
                best_assignment = dict(assignment)
            return
        channel = order[depth]
        for slot in list(range(n_active)) + [None]:
            if slot is not None:
                rates[slot] += flux[channel] * gains[slot]
            assignment[channel] = slot
            dfs(depth + 1)
            if slot is not None:
                rates[slot] -= flux[channel] * gains[slot]
        del assignment[channel]

    dfs(0)
    if nodes > EXACT_NODE_BUDGET:
        return None
    return best_assignment, best_key


def optimize_flex(
    network: NetworkModel,
    channels: list[int] | None = None,
    objective: Objective = Objective(EQUALIZE),
    allow_drop: bool = False,
    drop_fraction: float = 0.5,
    kicks: int = 30,
) -> AllocationPlan:
    """Deterministic two-phase search over free channel assignments.

    Greedy seedings (worst-off-first and round-robin, brightest channel
    first) are each refined by local search over single-channel moves and
    channel-pair moves; converged solutions are then perturbed with a
    fixed sequence of donor-to-receiver kicks and re-descended, keeping
    the best plan seen. Every tie-break is total, so identical inputs
    give identical plans. With allow_drop, links whose best achievable
    rate falls below drop_fraction of the median achievable rate are
    removed before seeding, and their spectrum goes to the surviving
    subgraph.
    """
    channel_ids = sorted(channels if channels is not None else network.channels_by_index)
    if not channel_ids:
        raise ValueError("need at least one channel to allocate")
    links = network.links
    gains_by_link = {link: link_gain(network, link) for link in links}

    diagnostics: dict = {"policy": "optimize_flex"}
    active = list(links)
    if allow_drop:
        achievable = {link: feasibility(network, link, channel_ids) for link in links}
        cut = drop_fraction * median(achievable.values())
        active = [l for l in links if achievable[l] >= cut]
        dropped = [l for l in links if l not in active]
        diagnostics["achievable"] = {f"{l[0]}-{l[1]}": achievable[l] for l in links}
        diagnostics["drop_threshold"] = cut
        diagnostics["dropped_links"] = dropped

    slot_of = {link: i for i, link in enumerate(active)}
    flux = network.channel_fluxes
    gains = [gains_by_link[link] for link in active]
    key_fn = _list_key_fn(objective, active)
    by_flux = sorted(channel_ids, key=lambda i: (-flux[i], i))

    seed_allocations = [
        _greedy_seed(network, objective, active, gains_by_link, by_flux),
        _round_robin_seed(active, by_flux),
    ]

    best = None
    best_key = None
    total_moves = 0
    rng = np.random.default_rng(len(channel_ids) * 1009 + len(active))
    for seed in seed_allocations:
        assignment = {c: slot_of[seed[c]] for c in channel_ids if c in seed}
        assignment.update({c: None for c in channel_ids if c not in seed})
        assignment, moves = _descend(flux, gains, assignment, key_fn, channel_ids, len(active))
        total_moves += moves
        incumbent_key = key_fn(_rates_of(flux, gains, assignment, len(active)))
        for _ in range(kicks):
            kicked = _kick(assignment, channel_ids, len(active), rng)
            kicked, moves = _descend(flux, gains, kicked, key_fn, channel_ids, len(active))
            total_moves += moves
            kicked_key = key_fn(_rates_of(flux, gains, kicked, len(active)))
            if _strictly_better(kicked_key, incumbent_key):
                assignment, incumbent_key = kicked, kicked_key
        if best_key is None or _strictly_better(incumbent_key, best_key):
            best, best_key = assignment, incumbent_key
    diagnostics["local_search_moves"] = total_moves

    # small instances finish with a certified exact sweep
    search_space = (len(active) + 1) ** len(channel_ids)
    if search_space <= EXACT_NODE_BUDGET:
        exact = _exact_small(
            flux, gains, key_fn, channel_ids, len(active), objective.variant, best_key
        )
        if exact is not None:
            improved, improved_key = exact
            if improved is not None:
                best, best_key = improved, improved_key
            diagnostics["certified_optimal"] = True

    allocation = {
        c: active[slot] for c, slot in best.items() if slot is not None
    }
    return _finish_plan(network, allocation, active, objective, diagnostics)


def balance_score(report: RateReport, active_links) -> float:
    """Max/min ratio of true coincidence rates over the active links."""
    rates = [report.links[tuple(l)].coincidence for l in active_links]
    if not rates:
        raise UndefinedScoreError("no active links")
    if min(rates) <= 0.0:
        raise UndefinedScoreError("an active link has zero coincidence rate")
    return max(rates) / min(rates)


def plan_with_policy(
    network: NetworkModel,
    policy: GridPolicy,
    objective: Objective,
    allow_drop: bool = False,
    alphabetical: bool = False,
) -> AllocationPlan:
    """Dispatch helper used by the CLI and the service API."""
    if policy.variant == FIXED_GRID:
        groups = make_groups(len(network.channels), policy.group_size)
        if alphabetical:
            return alphabetical_fixed(network, groups)
        return enumerate_fixed(network, groups, objective)
    return optimize_flex(network, objective=objective, allow_drop=allow_drop)
