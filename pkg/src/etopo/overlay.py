"""Entangled overlay network model.

Nodes, multi-level entangled links with their stability attributes, the
per-link existence probability, and a small stochastic failure model.
All values are immutable; mutating operations return new networks.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from functools import cached_property
from typing import Iterable, Optional

from .errors import InvalidLevelError, NotFoundError, Violation

NodeId = int
LinkId = int


def hop_distance(level: int) -> int:
    """Physical hop distance spanned by a level-l entangled link: 2**(l-1)."""
    if level < 1:
        raise InvalidLevelError(f"entanglement level must be >= 1, got {level}")
    return 2 ** (level - 1)


@dataclass(frozen=True, slots=True)
class EntangledLink:
    """A level-l entangled link between two overlay nodes.

    swap_success, photon_loss, and fidelity are scalars in [0, 1] supplied
    by configuration or a generator; they are not derived from a physical
    model. throughput is measured in maximally entangled states per second
    at fidelity `fidelity`. resource_count is the number of entangled
    states stored on the link (defaults to the minimal usable value, 1).
    """

    id: LinkId
    a: NodeId
    b: NodeId
    level: int = 1
    swap_success: float = 1.0
    photon_loss: float = 0.0
    fidelity: float = 1.0
    throughput: float = 0.0
    resource_count: int = 1

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise ValueError(f"link {self.id}: endpoints must be distinct")
        if self.level < 1:
            raise InvalidLevelError(
                f"link {self.id}: level must be >= 1, got {self.level}"
            )
        for name in ("swap_success", "photon_loss", "fidelity"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"link {self.id}: {name}={value} outside [0, 1]")
        if self.throughput < 0:
            raise ValueError(f"link {self.id}: throughput must be >= 0")
        if self.resource_count < 0:
            raise ValueError(f"link {self.id}: resource_count must be >= 0")

    @property
    def endpoints(self) -> tuple[NodeId, NodeId]:
        return (self.a, self.b)

    @property
    def pair(self) -> tuple[NodeId, NodeId]:
        """Unordered endpoint pair in canonical (low, high) order."""
        return (self.a, self.b) if self.a < self.b else (self.b, self.a)

    @property
    def hop_distance(self) -> int:
        return hop_distance(self.level)

    def other(self, node: NodeId) -> NodeId:
        if node == self.a:
            return self.b
        if node == self.b:
            return self.a
        raise NotFoundError(f"node {node} is not an endpoint of link {self.id}")


def link_existence_probability(link: EntangledLink) -> float:
    """Probability that the link exists: swap success times survival times fidelity."""
    return link.swap_success * (1.0 - link.photon_loss) * link.fidelity


class FailureKind(str, Enum):
    REMOVE_LINK = "remove-link"
    DEGRADE_SWAP = "degrade-swap"
    DEGRADE_LOSS = "degrade-loss"
    DEGRADE_FIDELITY = "degrade-fidelity"


@dataclass(frozen=True, slots=True)
class FailureEvent:
    """A scheduled random failure hitting one link.

    Degrade events multiply the named attribute by (1 - magnitude), which
    keeps probabilities in range without clamping. For photon loss the
    degradation raises the loss toward 1 by the same multiplicative rule
    on the survival probability.
    """

    target: LinkId
    kind: FailureKind
    magnitude: float = 0.0
    time: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.magnitude <= 1.0:
            raise ValueError(f"magnitude {self.magnitude} outside [0, 1]")
        if self.time < 0:
            raise ValueError(f"time must be a nonnegative tick, got {self.time}")


@dataclass(frozen=True)
class OverlayNetwork:
    """The overlay quantum network: a node set and a set of entangled links."""

    nodes: frozenset[NodeId]
    links: tuple[EntangledLink, ...]

    @cached_property
    def _by_id(self) -> dict[LinkId, EntangledLink]:
        return {link.id: link for link in self.links}

    @cached_property
    def _by_pair(self) -> dict[tuple[NodeId, NodeId], tuple[EntangledLink, ...]]:
        index: dict[tuple[NodeId, NodeId], list[EntangledLink]] = {}
        for link in self.links:
            index.setdefault(link.pair, []).append(link)
        return {pair: tuple(ls) for pair, ls in index.items()}

    def link_by_id(self, link_id: LinkId) -> EntangledLink:
        try:
            return self._by_id[link_id]
        except KeyError:
            raise NotFoundError(f"no link with id {link_id}") from None

    def links_between(self, x: NodeId, y: NodeId) -> tuple[EntangledLink, ...]:
        pair = (x, y) if x < y else (y, x)
        return self._by_pair.get(pair, ())

    def neighbors(self, node: NodeId) -> tuple[tuple[NodeId, LinkId], ...]:
        """(neighbor, link id) pairs for every link incident to node."""
        out = []
        for link in self.links:
            if link.a == node:
                out.append((link.b, link.id))
            elif link.b == node:
                out.append((link.a, link.id))
        return tuple(sorted(out))


def make_network(nodes: Iterable[NodeId], links: Iterable[EntangledLink]) -> OverlayNetwork:
    return OverlayNetwork(nodes=frozenset(nodes), links=tuple(links))


def validate(network: OverlayNetwork) -> list[Violation]:
    """Check network invariants; returns every violation found (empty list means ok)."""
    violations: list[Violation] = []
    seen_ids: dict[LinkId, EntangledLink] = {}
    seen_keys: dict[tuple[NodeId, NodeId, int], LinkId] = {}
    for link in network.links:
        if link.id in seen_ids:
            violations.append(
                Violation("duplicate-link-id", link.id, f"link id {link.id} appears more than once")
            )
        seen_ids[link.id] = link
        for endpoint in link.endpoints:
            if endpoint not in network.nodes:
                violations.append(
                    Violation(
                        "unknown-endpoint",
                        link.id,
                        f"link {link.id} references node {endpoint} absent from the node set",
                    )
                )
        key = (*link.pair, link.level)
        if key in seen_keys:
            violations.append(
                Violation(
                    "duplicate-pair-level",
                    (seen_keys[key], link.id),
                    f"links {seen_keys[key]} and {link.id} both join pair {link.pair} at level {link.level}",
                )
            )
        else:
            seen_keys[key] = link.id
    return violations


def apply_failure(network: OverlayNetwork, event: FailureEvent) -> OverlayNetwork:
    """Apply one failure event, returning the resulting network."""
    link = network.link_by_id(event.target)
    if event.kind is FailureKind.REMOVE_LINK:
        return replace(network, links=tuple(l for l in network.links if l.id != event.target))
    keep = 1.0 - event.magnitude
    if event.kind is FailureKind.DEGRADE_SWAP:
        updated = replace(link, swap_success=link.swap_success * keep)
    elif event.kind is FailureKind.DEGRADE_FIDELITY:
        updated = replace(link, fidelity=link.fidelity * keep)
    elif event.kind is FailureKind.DEGRADE_LOSS:
        # Degrading the channel scales the survival probability (1 - loss).
        updated = replace(link, photon_loss=1.0 - (1.0 - link.photon_loss) * keep)
    else:  # pragma: no cover - enum is exhaustive
        raise ValueError(f"unknown failure kind {event.kind}")
    return replace(
        network,
        links=tuple(updated if l.id == event.target else l for l in network.links),
    )


def apply_failures(
    network: OverlayNetwork,
    events: Iterable[FailureEvent],
    until: Optional[int] = None,
) -> OverlayNetwork:
    """Apply every event with time <= until (all events when until is None).

    Events whose target has already been removed are skipped rather than
    raised: a schedule may remove a link and later degrade it.
    """
    for event in sorted(events, key=lambda e: (e.time, e.target, e.kind.value)):
        if until is not None and event.time > until:
            continue
        try:
            network = apply_failure(network, event)
        except NotFoundError:
            continue
    return network
