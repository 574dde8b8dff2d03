"""Multi-user entanglement assignment.

Users demand end-to-end entanglement across the adapted link set; each
served demand consumes one stored entangled state per link of a simple
source-to-target path. The objective charges (1 - p_star) per assigned
state, so reliable links are preferred. Interference sets encode
contention between demands for the same resource state at intermediate
nodes; capacity bounds the aggregate rate per link.

Two solvers are provided: an exact one (exhaustive for tiny instances,
branch-and-bound over per-demand path options otherwise) and a greedy
one that routes each demand and spills onto alternate links of an
intermediate node when a link's states are exhausted.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional, Sequence

from .adaption import AdaptedLinkSet
from .basegraph import BaseGraph
from .errors import NotFoundError, TooLargeError, Violation
from .overlay import LinkId, NodeId, OverlayNetwork
from .routing import route

StateId = int
DemandId = int
UserId = int
# An assignable resource state is identified by its link and in-link state id.
ResourceRef = tuple[LinkId, StateId]
CTriple = tuple[UserId, LinkId, StateId]
KTriple = tuple[UserId, DemandId, ResourceRef]


@dataclass(frozen=True, slots=True)
class Demand:
    """One user's request for end-to-end entanglement at a given rate."""

    user: UserId
    source: NodeId
    target: NodeId
    rate: float = 0.0

    def __post_init__(self) -> None:
        if self.source == self.target:
            raise ValueError("demand source and target must differ")
        if self.rate < 0:
            raise ValueError(f"demand rate must be >= 0, got {self.rate}")


@dataclass(frozen=True, slots=True)
class ResourceSet:
    """The stored entangled states available on one link."""

    link: LinkId
    states: tuple[StateId, ...]

    def __post_init__(self) -> None:
        if len(set(self.states)) != len(self.states):
            raise ValueError(f"resource set of link {self.link} has duplicate state ids")


@dataclass(frozen=True, slots=True)
class InterferenceSet:
    """Demands contending for one resource state at an intermediate node.

    competing holds (user, demand id) pairs; at most one of them may be
    granted the state.
    """

    link: LinkId
    state: StateId
    competing: tuple[tuple[UserId, DemandId], ...]

    def __post_init__(self) -> None:
        if len(self.competing) < 2:
            raise ValueError("an interference set needs at least two competing demands")

    @property
    def resource(self) -> ResourceRef:
        return (self.link, self.state)

    @property
    def competing_demands(self) -> frozenset[DemandId]:
        return frozenset(q for _, q in self.competing)


@dataclass(frozen=True)
class AssignmentInstance:
    network: OverlayNetwork
    graph: BaseGraph
    adapted: AdaptedLinkSet
    demands: tuple[Demand, ...]
    resource_sets: Mapping[LinkId, ResourceSet]
    interference: tuple[InterferenceSet, ...] = ()

    def demand(self, qid: DemandId) -> Demand:
        try:
            return self.demands[qid]
        except IndexError:
            raise NotFoundError(f"no demand with id {qid}") from None

    def demand_of_user(self, user: UserId) -> tuple[DemandId, Demand]:
        for qid, d in enumerate(self.demands):
            if d.user == user:
                return qid, d
        raise NotFoundError(f"no demand for user {user}")

    def states_of(self, link: LinkId) -> tuple[StateId, ...]:
        rs = self.resource_sets.get(link)
        return rs.states if rs is not None else ()

    def n_variables(self) -> int:
        """Total count of binary assignment variables (demands times states)."""
        return len(self.demands) * sum(len(rs.states) for rs in self.resource_sets.values())


def validate_instance(instance: AssignmentInstance) -> list[Violation]:
    """Structural checks: link membership, state sizes, user uniqueness."""
    violations: list[Violation] = []
    users = [d.user for d in instance.demands]
    if len(set(users)) != len(users):
        violations.append(
            Violation("duplicate-user", users, "each user index may carry only one demand")
        )
    for d in instance.demands:
        for node in (d.source, d.target):
            if node not in instance.graph.placement:
                violations.append(
                    Violation("unmapped-node", node, f"demand endpoint {node} is not placed")
                )
    for link_id, rs in instance.resource_sets.items():
        if link_id not in instance.adapted.links:
            violations.append(
                Violation("link-outside-adapted", link_id,
                          f"resource set references link {link_id} outside the adapted set")
            )
        try:
            link = instance.network.link_by_id(link_id)
        except NotFoundError:
            violations.append(Violation("unknown-link", link_id, f"link {link_id} not in network"))
            continue
        if len(rs.states) != link.resource_count:
            violations.append(
                Violation(
                    "resource-count-mismatch", link_id,
                    f"link {link_id} stores {link.resource_count} states but the "
                    f"resource set lists {len(rs.states)}",
                )
            )
    known = {(d.user, qid) for qid, d in enumerate(instance.demands)}
    for iset in instance.interference:
        if iset.state not in instance.states_of(iset.link):
            violations.append(
                Violation("unknown-state", iset.resource,
                          f"interference set references missing state {iset.resource}")
            )
        for entry in iset.competing:
            if entry not in known:
                violations.append(
                    Violation("unknown-demand", entry,
                              f"interference set references unknown demand {entry}")
                )
    return violations


@dataclass(frozen=True)
class AssignmentSolution:
    """Binary assignment variables as sparse sets of set-to-one triples."""

    C: frozenset[CTriple]
    K: frozenset[KTriple] = frozenset()

    @staticmethod
    def from_C(instance: AssignmentInstance, C: frozenset[CTriple]) -> "AssignmentSolution":
        return AssignmentSolution(C=frozenset(C), K=derive_grants(instance, C))


def derive_grants(instance: AssignmentInstance, C: frozenset[CTriple]) -> frozenset[KTriple]:
    """Grant variables implied by C: a competing demand holding the contested state."""
    grants: set[KTriple] = set()
    for iset in instance.interference:
        for user, qid in iset.competing:
            if (user, iset.link, iset.state) in C:
                grants.add((user, qid, iset.resource))
    return frozenset(grants)


def _check_refs(instance: AssignmentInstance, solution: AssignmentSolution) -> None:
    for user, link, state in solution.C:
        if state not in instance.states_of(link):
            raise NotFoundError(f"assignment references missing state {state} on link {link}")
        instance.demand_of_user(user)


def objective(instance: AssignmentInstance, solution: AssignmentSolution) -> float:
    """Total unreliability cost: sum of (1 - p_star) over assigned states."""
    _check_refs(instance, solution)
    return sum(1.0 - instance.adapted.link_p_star(link) for _, link, _ in solution.C)


def check_capacity(
    instance: AssignmentInstance, solution: AssignmentSolution
) -> list[Violation]:
    """Per-link aggregate rate against the link's entanglement throughput."""
    _check_refs(instance, solution)
    load: dict[LinkId, float] = {}
    for user, link, _ in solution.C:
        _, demand = instance.demand_of_user(user)
        load[link] = load.get(link, 0.0) + demand.rate
    violations = []
    for link_id in sorted(load):
        capacity = instance.network.link_by_id(link_id).throughput
        if load[link_id] > capacity:
            violations.append(
                Violation("capacity", link_id,
                          f"link {link_id}: assigned rate {load[link_id]} exceeds "
                          f"throughput {capacity}")
            )
    return violations


def check_interference(
    instance: AssignmentInstance, solution: AssignmentSolution
) -> list[Violation]:
    """At most one competing demand granted per contested resource state."""
    violations = []
    for iset in instance.interference:
        granted = set()
        for user, qid in iset.competing:
            if (user, qid, iset.resource) in solution.K:
                granted.add(qid)
            if (user, iset.link, iset.state) in solution.C:
                granted.add(qid)
        if len(granted) > 1:
            violations.append(
                Violation("interference", iset.resource,
                          f"state {iset.resource} granted to {len(granted)} competing "
                          f"demands {sorted(granted)}")
            )
    return violations


def _user_entries(solution: AssignmentSolution, user: UserId) -> list[tuple[LinkId, StateId]]:
    return sorted((link, state) for u, link, state in solution.C if u == user)


def _path_orientation(
    instance: AssignmentInstance, demand: Demand, entries: Sequence[tuple[LinkId, StateId]]
) -> Optional[list[tuple[LinkId, NodeId, NodeId]]]:
    """Orient a user's assigned links by walking from the demand source.

    Returns (link, from, to) hops when the links form a simple path rooted
    at the source with one assigned state per link; None otherwise.
    """
    counts: dict[LinkId, int] = {}
    for link, _ in entries:
        counts[link] = counts.get(link, 0) + 1
    if not counts or any(c != 1 for c in counts.values()):
        return None
    unused = set(counts)
    current = demand.source
    seen = {current}
    hops: list[tuple[LinkId, NodeId, NodeId]] = []
    while unused:
        incident = [
            lid for lid in unused
            if current in instance.network.link_by_id(lid).endpoints
        ]
        if len(incident) != 1:
            return None
        lid = incident[0]
        nxt = instance.network.link_by_id(lid).other(current)
        if nxt in seen:
            return None
        hops.append((lid, current, nxt))
        seen.add(nxt)
        unused.discard(lid)
        current = nxt
    return hops


def flow_imbalance(
    instance: AssignmentInstance,
    solution: AssignmentSolution,
    node: NodeId,
    user: UserId,
) -> int:
    """Net assigned flow of one user at a node: links out minus links onto it.

    Direction comes from walking the user's assigned links from the
    demand's source; assignments that do not form such a walk fall back to
    the links' stored endpoint order.
    """
    if node not in instance.graph.placement:
        raise NotFoundError(f"node {node} is not mapped")
    _, demand = instance.demand_of_user(user)
    entries = _user_entries(solution, user)
    hops = _path_orientation(instance, demand, entries)
    if hops is not None:
        out_flow = sum(1 for _, frm, _ in hops if frm == node)
        in_flow = sum(1 for _, _, to in hops if to == node)
        return out_flow - in_flow
    balance = 0
    for link_id, _ in entries:
        link = instance.network.link_by_id(link_id)
        if link.a == node:
            balance += 1
        elif link.b == node:
            balance -= 1
    return balance


def _served_as_path(
    instance: AssignmentInstance, solution: AssignmentSolution, qid: DemandId
) -> bool:
    demand = instance.demand(qid)
    entries = _user_entries(solution, demand.user)
    hops = _path_orientation(instance, demand, entries)
    return hops is not None and hops[-1][2] == demand.target


def solution_feasible(instance: AssignmentInstance, C: frozenset[CTriple]) -> bool:
    """Full feasibility: every demand served along a simple path, capacity
    and interference respected."""
    solution = AssignmentSolution.from_C(instance, C)
    for qid in range(len(instance.demands)):
        if not _served_as_path(instance, solution, qid):
            return False
    if check_capacity(instance, solution):
        return False
    if check_interference(instance, solution):
        return False
    return True


class SolveStatus(str, Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class SolveResult:
    """Solver outcome; on infeasibility the solution covers served demands only."""

    status: SolveStatus
    solution: AssignmentSolution
    objective: Optional[float]
    served: tuple[DemandId, ...] = ()
    rejected: tuple[DemandId, ...] = ()

    @property
    def feasible(self) -> bool:
        return self.status is SolveStatus.FEASIBLE


@dataclass(frozen=True)
class _Option:
    """One way to serve a demand: a path with one chosen state per link."""

    cost: float
    entries: tuple[tuple[LinkId, StateId], ...]
    nodes: tuple[NodeId, ...]


def enumerate_simple_paths(
    instance: AssignmentInstance, source: NodeId, target: NodeId
) -> list[tuple[tuple[NodeId, ...], tuple[LinkId, ...]]]:
    """All node-simple paths over the adapted set, link-resolved."""
    results: list[tuple[tuple[NodeId, ...], tuple[LinkId, ...]]] = []
    graph = instance.graph

    def extend(nodes: list[NodeId], links: list[LinkId]) -> None:
        current = nodes[-1]
        if current == target:
            results.append((tuple(nodes), tuple(links)))
            return
        for nbr, lid in graph.contacts_of(current):
            if lid not in instance.adapted.links or nbr in nodes:
                continue
            nodes.append(nbr)
            links.append(lid)
            extend(nodes, links)
            nodes.pop()
            links.pop()

    extend([source], [])
    return sorted(results)


def _demand_options(
    instance: AssignmentInstance, qid: DemandId, option_cap: int = 200_000
) -> list[_Option]:
    demand = instance.demand(qid)
    options: list[_Option] = []
    for nodes, links in enumerate_simple_paths(instance, demand.source, demand.target):
        state_choices = [
            [(lid, s) for s in sorted(instance.states_of(lid))] for lid in links
        ]
        if any(not choices for choices in state_choices):
            continue
        cost = sum(1.0 - instance.adapted.link_p_star(lid) for lid in links)
        for combo in itertools.product(*state_choices):
            options.append(_Option(cost=cost, entries=tuple(combo), nodes=nodes))
            if len(options) > option_cap:
                raise TooLargeError(
                    f"demand {qid} has more than {option_cap} serving options"
                )
    options.sort(key=lambda o: (o.cost, o.entries))
    return options


def _interference_index(
    instance: AssignmentInstance,
) -> dict[ResourceRef, list[InterferenceSet]]:
    index: dict[ResourceRef, list[InterferenceSet]] = {}
    for iset in instance.interference:
        index.setdefault(iset.resource, []).append(iset)
    return index


def _grant_conflict(
    index: dict[ResourceRef, list[InterferenceSet]],
    granted: dict[ResourceRef, set[DemandId]],
    qid: DemandId,
    ref: ResourceRef,
) -> bool:
    for iset in index.get(ref, ()):  # only contested states can conflict
        competitors = iset.competing_demands
        if qid in competitors and (granted.get(ref, set()) & competitors) - {qid}:
            return True
    return False


def solve_exact(
    instance: AssignmentInstance,
    exhaustive_cap: int = 12,
    bnb_cap: int = 40,
) -> SolveResult:
    """Minimum-cost assignment serving every demand, or infeasible.

    Instances with at most exhaustive_cap binary variables are solved by
    full enumeration of the variable space; up to bnb_cap by
    branch-and-bound over per-demand path options. Larger instances raise
    TooLargeError; use solve_greedy there.
    """
    n_vars = instance.n_variables()
    if n_vars <= exhaustive_cap:
        return _solve_exhaustive(instance)
    if n_vars > bnb_cap:
        raise TooLargeError(
            f"instance has {n_vars} binary variables, above the cap of {bnb_cap}"
        )
    return _solve_branch_and_bound(instance)


def _result(instance: AssignmentInstance, C: Optional[frozenset[CTriple]]) -> SolveResult:
    all_demands = tuple(range(len(instance.demands)))
    if C is None:
        return SolveResult(
            status=SolveStatus.INFEASIBLE,
            solution=AssignmentSolution(frozenset(), frozenset()),
            objective=None,
            served=(),
            rejected=all_demands,
        )
    solution = AssignmentSolution.from_C(instance, C)
    return SolveResult(
        status=SolveStatus.FEASIBLE,
        solution=solution,
        objective=objective(instance, solution),
        served=all_demands,
        rejected=(),
    )


def _solve_exhaustive(instance: AssignmentInstance) -> SolveResult:
    variables: list[CTriple] = [
        (d.user, link_id, state)
        for d in instance.demands
        for link_id in sorted(instance.resource_sets)
        for state in sorted(instance.states_of(link_id))
    ]
    best: Optional[frozenset[CTriple]] = None
    best_cost = float("inf")
    for mask in range(1 << len(variables)):
        C = frozenset(v for i, v in enumerate(variables) if mask >> i & 1)
        if not solution_feasible(instance, C):
            continue
        cost = sum(1.0 - instance.adapted.link_p_star(link) for _, link, _ in C)
        if cost < best_cost:
            best, best_cost = C, cost
    return _result(instance, best)


def _solve_branch_and_bound(instance: AssignmentInstance) -> SolveResult:
    try:
        options = {
            qid: _demand_options(instance, qid) for qid in range(len(instance.demands))
        }
    except TooLargeError:
        raise
    if any(not opts for opts in options.values()):
        return _result(instance, None)
    order = sorted(options, key=lambda q: (len(options[q]), q))
    index = _interference_index(instance)
    min_cost_tail = [0.0] * (len(order) + 1)
    for pos in range(len(order) - 1, -1, -1):
        min_cost_tail[pos] = min_cost_tail[pos + 1] + options[order[pos]][0].cost

    best: Optional[frozenset[CTriple]] = None
    best_cost = float("inf")
    chosen: dict[DemandId, _Option] = {}
    load: dict[LinkId, float] = {}
    granted: dict[ResourceRef, set[DemandId]] = {}

    def descend(pos: int, cost: float) -> None:
        nonlocal best, best_cost
        if cost + min_cost_tail[pos] >= best_cost:
            return
        if pos == len(order):
            C = frozenset(
                (instance.demand(q).user, link, state)
                for q, opt in chosen.items()
                for link, state in opt.entries
            )
            best, best_cost = C, cost
            return
        qid = order[pos]
        demand = instance.demand(qid)
        for opt in options[qid]:
            if cost + opt.cost + min_cost_tail[pos + 1] >= best_cost:
                break  # options are cost-sorted
            ok = True
            for link, _ in opt.entries:
                capacity = instance.network.link_by_id(link).throughput
                if load.get(link, 0.0) + demand.rate > capacity:
                    ok = False
                    break
            if ok:
                for ref in opt.entries:
                    if _grant_conflict(index, granted, qid, ref):
                        ok = False
                        break
            if not ok:
                continue
            chosen[qid] = opt
            for link, state in opt.entries:
                load[link] = load.get(link, 0.0) + demand.rate
                granted.setdefault((link, state), set()).add(qid)
            descend(pos + 1, cost + opt.cost)
            for link, state in opt.entries:
                load[link] -= demand.rate
                granted[(link, state)].discard(qid)
            del chosen[qid]

    descend(0, 0.0)
    return _result(instance, best)


def solve_greedy(instance: AssignmentInstance) -> SolveResult:
    """Serve demands one by one along greedy routes, spilling onto alternate
    links of an intermediate node when a link's states run out.

    Demands are admitted in order of descending rate (ties by user index);
    demands that cannot be served with the remaining resources are
    rejected, and the result is infeasible when any rejection occurs.
    States are consumed exclusively here, which is stricter than the exact
    solver's constraint set but never violates it.
    """
    index = _interference_index(instance)
    order = sorted(
        range(len(instance.demands)),
        key=lambda q: (-instance.demand(q).rate, instance.demand(q).user),
    )
    taken: set[ResourceRef] = set()
    load: dict[LinkId, float] = {}
    granted: dict[ResourceRef, set[DemandId]] = {}
    C: set[CTriple] = set()
    served: list[DemandId] = []
    rejected: list[DemandId] = []

    def pick_state(qid: DemandId, link: LinkId, pending: set[ResourceRef]) -> Optional[StateId]:
        demand = instance.demand(qid)
        capacity = instance.network.link_by_id(link).throughput
        if load.get(link, 0.0) + demand.rate > capacity:
            return None
        for state in sorted(instance.states_of(link)):
            ref = (link, state)
            if ref in taken or ref in pending:
                continue
            if _grant_conflict(index, granted, qid, ref):
                continue
            return state
        return None

    for qid in order:
        demand = instance.demand(qid)
        assignment = _greedy_serve(instance, qid, pick_state)
        if assignment is None:
            rejected.append(qid)
            continue
        served.append(qid)
        for link, state in assignment:
            C.add((demand.user, link, state))
            taken.add((link, state))
            load[link] = load.get(link, 0.0) + demand.rate
            granted.setdefault((link, state), set()).add(qid)

    solution = AssignmentSolution.from_C(instance, frozenset(C))
    status = SolveStatus.FEASIBLE if not rejected else SolveStatus.INFEASIBLE
    return SolveResult(
        status=status,
        solution=solution,
        objective=objective(instance, solution) if not rejected else None,
        served=tuple(sorted(served)),
        rejected=tuple(sorted(rejected)),
    )


def _greedy_serve(
    instance: AssignmentInstance,
    qid: DemandId,
    pick_state,
) -> Optional[list[tuple[LinkId, StateId]]]:
    demand = instance.demand(qid)
    outcome = route(instance.graph, instance.adapted, demand.source, demand.target)
    if not outcome.found:
        return None
    nodes = list(outcome.path.nodes)
    links = list(outcome.path.links)
    path_nodes = [demand.source]
    pending: set[ResourceRef] = set()
    assignment: list[tuple[LinkId, StateId]] = []
    arrived_by: Optional[LinkId] = None
    i = 0
    while i < len(links):
        current = path_nodes[-1]
        link = links[i]
        state = pick_state(qid, link, pending)
        if state is not None:
            assignment.append((link, state))
            pending.add((link, state))
            path_nodes.append(nodes[i + 1])
            arrived_by = link
            i += 1
            continue
        # The link's states are exhausted here: spill onto another link of
        # this intermediate node and route onward from its far endpoint.
        spilled = False
        for nbr, alt in instance.graph.contacts_of(current):
            if alt not in instance.adapted.links or alt == link or alt == arrived_by:
                continue
            if nbr in path_nodes:
                continue
            alt_state = pick_state(qid, alt, pending)
            if alt_state is None:
                continue
            onward = route(instance.graph, instance.adapted, nbr, demand.target)
            if not onward.found:
                continue
            if any(n in path_nodes for n in onward.path.nodes[1:]):
                continue
            assignment.append((alt, alt_state))
            pending.add((alt, alt_state))
            path_nodes.append(nbr)
            nodes = list(onward.path.nodes)
            links = list(onward.path.links)
            arrived_by = alt
            i = 0
            spilled = True
            break
        if not spilled:
            return None
    return assignment
