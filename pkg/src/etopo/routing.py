"""Decentralized greedy routing over the adapted link set.

Forwarding is greedy on L1 distance in the base-graph with visited-set
backtracking, so any target reachable through the adapted set is found.
A breadth-first oracle computes true shortest paths for validation.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .adaption import AdaptedLinkSet
from .basegraph import BaseGraph, l1_distance
from .overlay import LinkId, NodeId


class RouteStatus(str, Enum):
    FOUND = "found"
    UNREACHABLE = "unreachable"


@dataclass(frozen=True)
class Path:
    """A simple path: node sequence plus the link taken at each hop."""

    nodes: tuple[NodeId, ...]
    links: tuple[LinkId, ...]

    def __post_init__(self) -> None:
        if self.nodes and len(self.links) != len(self.nodes) - 1:
            raise ValueError("path must carry exactly one link per hop")


@dataclass(frozen=True)
class RoutingOutcome:
    """Result of one routing query.

    diameter is the edge count of the returned path; steps_taken counts
    every forwarding decision made, including dead-end backtracks, so it
    can exceed the diameter.
    """

    status: RouteStatus
    path: Optional[Path]
    diameter: int
    steps_taken: int

    @property
    def found(self) -> bool:
        return self.status is RouteStatus.FOUND


def _adapted_neighbors(
    graph: BaseGraph, adapted: AdaptedLinkSet, node: NodeId
) -> list[tuple[NodeId, LinkId]]:
    return [(nbr, lid) for nbr, lid in graph.contacts_of(node) if lid in adapted.links]


def route(
    graph: BaseGraph,
    adapted: AdaptedLinkSet,
    source: NodeId,
    target: NodeId,
    rng_seed: Optional[int] = None,
) -> RoutingOutcome:
    """Greedy L1 forwarding with backtracking over the adapted set.

    At each node the contact closest to the target is tried first (ties by
    lowest node id, then lowest link id); exhausted nodes are popped and
    never revisited, bounding the walk to one visit per node. The returned
    path is the final stack, which is simple by construction. rng_seed is
    accepted for interface stability; the forwarder itself is
    deterministic.
    """
    del rng_seed
    target_coord = graph.coord(target)
    graph.coord(source)
    if source == target:
        return RoutingOutcome(RouteStatus.FOUND, Path((source,), ()), 0, 0)

    visited = {source}
    stack: list[NodeId] = [source]
    link_stack: list[LinkId] = []
    steps = 0
    while stack:
        current = stack[-1]
        candidates = [
            (nbr, lid)
            for nbr, lid in _adapted_neighbors(graph, adapted, current)
            if nbr not in visited
        ]
        if candidates:
            nbr, lid = min(
                candidates,
                key=lambda c: (l1_distance(graph.coord(c[0]), target_coord), c[0], c[1]),
            )
            visited.add(nbr)
            stack.append(nbr)
            link_stack.append(lid)
            steps += 1
            if nbr == target:
                return RoutingOutcome(
                    RouteStatus.FOUND,
                    Path(tuple(stack), tuple(link_stack)),
                    len(link_stack),
                    steps,
                )
        else:
            stack.pop()
            if link_stack:
                link_stack.pop()
            steps += 1
    return RoutingOutcome(RouteStatus.UNREACHABLE, None, 0, steps)


def shortest_path_oracle(
    graph: BaseGraph,
    adapted: AdaptedLinkSet,
    source: NodeId,
    target: NodeId,
) -> RoutingOutcome:
    """Exact minimum-edge-count path via breadth-first search over the adapted set."""
    graph.coord(source)
    graph.coord(target)
    if source == target:
        return RoutingOutcome(RouteStatus.FOUND, Path((source,), ()), 0, 0)
    parent: dict[NodeId, tuple[NodeId, LinkId]] = {}
    seen = {source}
    queue = deque([source])
    while queue:
        current = queue.popleft()
        for nbr, lid in _adapted_neighbors(graph, adapted, current):
            if nbr in seen:
                continue
            seen.add(nbr)
            parent[nbr] = (current, lid)
            if nbr == target:
                nodes = [target]
                links = []
                while nodes[-1] != source:
                    prev, plid = parent[nodes[-1]]
                    nodes.append(prev)
                    links.append(plid)
                nodes.reverse()
                links.reverse()
                return RoutingOutcome(
                    RouteStatus.FOUND,
                    Path(tuple(nodes), tuple(links)),
                    len(links),
                    len(links),
                )
            queue.append(nbr)
    return RoutingOutcome(RouteStatus.UNREACHABLE, None, 0, 0)
