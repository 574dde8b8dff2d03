"""Shared samplers and independent brute-force oracles for the test suite.

The oracles here deliberately reimplement path enumeration, feasibility
checking, and cost summation from scratch so they share no code path with
the solvers they validate. Link attributes are sampled on a dyadic grid
(multiples of 1/64) so objective sums are exact in floating point and
solver-vs-oracle comparisons can demand exact equality.
"""

from __future__ import annotations

import itertools
import random
from typing import Optional

from etopo import (
    AssignmentInstance,
    Demand,
    EntangledLink,
    InterferenceSet,
    ResourceSet,
    ThresholdPolicy,
    adapt,
    make_network,
    map_overlay,
)

DENOM = 64


def dyadic(rng: random.Random, lo: float = 0.0, hi: float = 1.0) -> float:
    return rng.randint(int(lo * DENOM), int(hi * DENOM)) / DENOM


def random_overlay(
    rng: random.Random,
    num_nodes: int,
    num_links: int,
    levels=(1, 2, 3),
    throughput_hi: float = 8.0,
    resource_hi: int = 1,
):
    nodes = list(range(num_nodes))
    combos = [
        (a, b, l)
        for (a, b) in itertools.combinations(nodes, 2)
        for l in levels
    ]
    chosen = sorted(rng.sample(combos, min(num_links, len(combos))))
    links = [
        EntangledLink(
            id=i, a=a, b=b, level=l,
            swap_success=dyadic(rng, 0.25, 1.0),
            photon_loss=dyadic(rng, 0.0, 0.5),
            fidelity=dyadic(rng, 0.5, 1.0),
            throughput=float(rng.randint(1, int(throughput_hi))),
            resource_count=rng.randint(1, resource_hi),
        )
        for i, (a, b, l) in enumerate(chosen)
    ]
    return make_network(nodes, links)


def random_embedded(rng: random.Random, num_nodes=8, num_links=12, k=2, n=8,
                    threshold: Optional[float] = None, **kwargs):
    """A random overlay plus base-graph and adapted set, for routing tests."""
    network = random_overlay(rng, num_nodes, num_links, **kwargs)
    graph = map_overlay(network, k=k, n=n, seed=rng.randrange(2**32))
    policy = ThresholdPolicy(default=threshold if threshold is not None else 0.0)
    adapted = adapt(graph, network, policy)
    return network, graph, adapted


# -- assignment instance sampling ---------------------------------------------


def random_instance(
    rng: random.Random,
    max_users: int = 3,
    max_links: int = 4,
    max_states: int = 3,
    option_product_cap: int = 20_000,
    with_interference: bool = True,
) -> Optional[AssignmentInstance]:
    """A small random instance within the exhaustive-test caps.

    Returns None when the sampled instance would be too expensive for the
    product-enumeration oracle; callers resample.
    """
    num_nodes = rng.randint(3, 5)
    num_links = rng.randint(1, max_links)
    network = random_overlay(
        rng, num_nodes, num_links, levels=(1,), resource_hi=max_states,
    )
    if len(network.links) < num_links:
        return None
    graph = map_overlay(network, k=2, n=4, seed=rng.randrange(2**32))
    adapted = adapt(graph, network, ThresholdPolicy(default=0.0))

    n_users = rng.randint(1, max_users)
    demands = []
    for user in range(n_users):
        a, b = rng.sample(sorted(network.nodes), 2)
        demands.append(Demand(user=user, source=a, target=b, rate=dyadic(rng, 0.25, 3.0)))
    resource_sets = {
        link.id: ResourceSet(link=link.id, states=tuple(range(link.resource_count)))
        for link in network.links
    }
    interference = []
    if with_interference and n_users >= 2 and rng.random() < 0.7:
        for _ in range(rng.randint(1, 2)):
            link = rng.choice(sorted(resource_sets))
            state = rng.choice(resource_sets[link].states)
            size = rng.randint(2, n_users)
            qids = rng.sample(range(n_users), size)
            interference.append(
                InterferenceSet(
                    link=link, state=state,
                    competing=tuple(sorted((demands[q].user, q) for q in qids)),
                )
            )
    instance = AssignmentInstance(
        network=network, graph=graph, adapted=adapted,
        demands=tuple(demands), resource_sets=resource_sets,
        interference=tuple(interference),
    )
    product = 1
    for qid in range(len(demands)):
        count = sum(
            _count_state_combos(instance, links)
            for _, links in _oracle_paths(instance, demands[qid].source, demands[qid].target)
        )
        if count == 0:
            count = 1
        product *= count
        if product > option_product_cap:
            return None
    return instance


# -- independent oracle -------------------------------------------------------


def _oracle_paths(instance: AssignmentInstance, source: int, target: int):
    """All simple paths over the adapted links, by direct recursion on the
    network's link list (independent of the solver's path enumerator)."""
    links = [
        l for l in instance.network.links if l.id in instance.adapted.links
    ]
    paths = []

    def walk(node, node_seq, link_seq):
        if node == target:
            paths.append((tuple(node_seq), tuple(link_seq)))
            return
        for link in links:
            if node not in link.endpoints or link.id in link_seq:
                continue
            nxt = link.other(node)
            if nxt in node_seq:
                continue
            walk(nxt, node_seq + [nxt], link_seq + [link.id])

    walk(source, [source], [])
    return paths


def _count_state_combos(instance: AssignmentInstance, link_seq) -> int:
    combos = 1
    for lid in link_seq:
        combos *= len(instance.states_of(lid))
    return combos


def oracle_solve(instance: AssignmentInstance):
    """Exhaustive minimum over all per-demand (path, states) products.

    Returns (feasible, min_cost, best_C). Feasibility requires every demand
    served; capacity and interference are checked by direct summation.
    """
    per_demand = []
    for demand in instance.demands:
        options = []
        for _, link_seq in _oracle_paths(instance, demand.source, demand.target):
            state_lists = [
                [(lid, s) for s in instance.states_of(lid)] for lid in link_seq
            ]
            if any(not sl for sl in state_lists):
                continue
            for combo in itertools.product(*state_lists):
                options.append(combo)
        if not options:
            return False, None, None
        per_demand.append(options)

    best_cost = None
    best_C = None
    for selection in itertools.product(*per_demand):
        load: dict[int, float] = {}
        ok = True
        for demand, combo in zip(instance.demands, selection):
            for lid, _ in combo:
                load[lid] = load.get(lid, 0.0) + demand.rate
        for lid, total in load.items():
            if total > instance.network.link_by_id(lid).throughput:
                ok = False
                break
        if ok:
            for iset in instance.interference:
                holders = 0
                for user, qid in iset.competing:
                    if (iset.link, iset.state) in selection[qid]:
                        holders += 1
                if holders > 1:
                    ok = False
                    break
        if not ok:
            continue
        cost = sum(
            1.0 - instance.adapted.link_p_star(lid)
            for combo in selection
            for lid, _ in combo
        )
        if best_cost is None or cost < best_cost:
            best_cost = cost
            best_C = frozenset(
                (demand.user, lid, s)
                for demand, combo in zip(instance.demands, selection)
                for lid, s in combo
            )
    if best_cost is None:
        return False, None, None
    return True, best_cost, best_C


def brute_force_colorable(vertices, edges, colors: int) -> bool:
    """Direct enumeration of all colorings."""
    vs = sorted(vertices)
    if not vs:
        return True
    if colors == 0:
        return False
    index = {v: i for i, v in enumerate(vs)}
    # color classes are interchangeable, so the first vertex can be pinned
    for rest in itertools.product(range(colors), repeat=len(vs) - 1):
        assignment = (0,) + rest
        if all(assignment[index[u]] != assignment[index[v]] for u, v in edges):
            return True
    return False
