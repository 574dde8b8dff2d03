"""Threshold-based topology adaption.

Every link is tested against the probability threshold of its level; the
survivors form the adapted link set S-star together with the updated
per-pair probability field p-star (zero on excluded pairs).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Optional

from .basegraph import BaseGraph, best_link
from .errors import NotConnectedError
from .overlay import LinkId, NodeId, OverlayNetwork, link_existence_probability


class PStarMode(str, Enum):
    """How a retained link's updated probability is read.

    MEASURED keeps the link's measured overlay probability; THRESHOLD pins
    retained links to their level's threshold constant instead. Both
    readings of the update rule are supported; MEASURED is the default.
    """

    MEASURED = "measured"
    THRESHOLD = "threshold"


@dataclass(frozen=True)
class ThresholdPolicy:
    """Per-level probability thresholds with a default for unlisted levels."""

    default: float = 0.0
    per_level: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name, value in [("default", self.default)] + [
            (f"level {l}", t) for l, t in self.per_level.items()
        ]:
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"threshold for {name} is {value}, outside [0, 1]")

    def threshold_for(self, level: int) -> float:
        return self.per_level.get(level, self.default)


@dataclass(frozen=True)
class AdaptedLinkSet:
    """The filtered link set S-star and the updated probability field.

    p_star is keyed by canonical (low, high) node pairs and is zero for
    connected pairs whose every link fell below threshold. p_star_by_link
    carries the same field per link id for consumers that need per-link
    values (the assignment objective).
    """

    links: frozenset[LinkId]
    p_star: Mapping[tuple[NodeId, NodeId], float]
    p_star_by_link: Mapping[LinkId, float]

    def link_p_star(self, link_id: LinkId) -> float:
        return self.p_star_by_link.get(link_id, 0.0)


def _updated_link_probability(
    link, policy: ThresholdPolicy, mode: PStarMode
) -> float:
    pr = link_existence_probability(link)
    threshold = policy.threshold_for(link.level)
    if pr < threshold:
        return 0.0
    return pr if mode is PStarMode.MEASURED else threshold


def updated_probability(
    graph: BaseGraph,
    network: OverlayNetwork,
    x: NodeId,
    y: NodeId,
    policy: ThresholdPolicy,
    mode: PStarMode = PStarMode.MEASURED,
) -> float:
    """Updated pair probability under the threshold rule.

    Links meeting their level threshold keep their probability (the
    distance term and its correction cancel algebraically); links below
    threshold update to zero. Pairs with parallel links report the best
    surviving link.
    """
    links = network.links_between(x, y)
    if not links:
        raise NotConnectedError(f"no entangled link between nodes {x} and {y}")
    best_link(network, x, y)  # raises consistently when the pair is unmapped
    return max(_updated_link_probability(l, policy, mode) for l in links)


def adapt(
    graph: BaseGraph,
    network: OverlayNetwork,
    policy: ThresholdPolicy,
    mode: PStarMode = PStarMode.MEASURED,
) -> AdaptedLinkSet:
    """Filter every link against its level threshold, for all contacts of all nodes."""
    kept: set[LinkId] = set()
    p_star: dict[tuple[NodeId, NodeId], float] = {}
    by_link: dict[LinkId, float] = {}
    for link in network.links:
        updated = _updated_link_probability(link, policy, mode)
        if link_existence_probability(link) >= policy.threshold_for(link.level):
            kept.add(link.id)
        by_link[link.id] = updated
        pair = link.pair
        p_star[pair] = max(p_star.get(pair, 0.0), updated)
    return AdaptedLinkSet(
        links=frozenset(kept), p_star=p_star, p_star_by_link=by_link
    )


def adapt_and_route(
    graph: BaseGraph,
    network: OverlayNetwork,
    policy: ThresholdPolicy,
    source: NodeId,
    target: NodeId,
    rng_seed: Optional[int] = None,
    mode: PStarMode = PStarMode.MEASURED,
):
    """Run the threshold filter, then route over the adapted set."""
    from .routing import route

    adapted = adapt(graph, network, policy, mode)
    return route(graph, adapted, source, target, rng_seed=rng_seed)
