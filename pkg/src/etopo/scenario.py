"""Scenario runner: config ingestion, trial orchestration, metrics export.

A scenario describes a network source, base-graph parameters, a threshold
policy, user demands, and a failure schedule. Each trial applies the
failures due at or before its tick, adapts the topology, routes every
demand, and solves the resulting assignment instance. All randomness is
drawn from streams derived from the scenario seed, so identical scenarios
produce byte-identical outputs; timing diagnostics go to the log only.
"""

from __future__ import annotations

import csv
import io as _io
import logging
import math
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Optional

from .adaption import PStarMode, ThresholdPolicy, adapt
from .assignment import (
    AssignmentInstance,
    Demand,
    InterferenceSet,
    ResourceSet,
    SolveResult,
    SolveStatus,
    solve_exact,
    solve_greedy,
)
from .basegraph import map_overlay
from .errors import ConfigError, TooLargeError
from .generate import (
    GeneratorParams,
    derive_seed,
    generate_network,
    kleinberg_lattice,
)
from .io import (
    _require,
    demand_from_dict,
    demand_to_dict,
    failure_from_dict,
    load_network,
    network_from_dict,
    network_to_dict,
    thresholds_from_dict,
    thresholds_to_dict,
)
from .overlay import FailureEvent, OverlayNetwork, apply_failures
from .routing import RouteStatus, RoutingOutcome, route

log = logging.getLogger(__name__)

BNB_VARIABLE_CAP = 40


@dataclass(frozen=True)
class Scenario:
    seed: int
    trials: int
    network_file: Optional[str] = None
    network_inline: Optional[OverlayNetwork] = None
    generator: Optional[GeneratorParams] = None
    k: int = 2
    n: int = 8
    placement: Optional[Mapping[int, tuple[int, ...]]] = None
    thresholds: ThresholdPolicy = field(default_factory=ThresholdPolicy)
    pstar_mode: PStarMode = PStarMode.MEASURED
    demands: tuple[Demand, ...] = ()
    failures: tuple[FailureEvent, ...] = ()

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        sources = [
            s for s in (self.network_file, self.network_inline, self.generator)
            if s is not None
        ]
        if len(sources) != 1:
            raise ConfigError(
                "scenario needs exactly one network source: file, inline, or generator"
            )
        users = [d.user for d in self.demands]
        if len(set(users)) != len(users):
            raise ConfigError("scenario demands must use distinct user indices")


def scenario_from_dict(data: Mapping[str, Any], base_dir: Optional[Path] = None) -> Scenario:
    _require(
        data,
        ("seed", "trials", "base_graph", "demands"),
        "scenario",
        optional=("network", "network_file", "generator", "thresholds",
                  "pstar_mode", "failures"),
    )
    bg = data["base_graph"]
    _require(bg, ("k", "n"), "scenario.base_graph", optional=("placement",))
    placement = None
    if "placement" in bg:
        from .io import placement_from_list

        placement = placement_from_list(bg["placement"])
    generator = None
    if "generator" in data:
        try:
            gen = dict(data["generator"])
            for key in ("levels",):
                if key in gen:
                    gen[key] = tuple(gen[key])
            for key in ("swap_range", "loss_range", "fidelity_range",
                        "throughput_range", "resource_range"):
                if key in gen:
                    gen[key] = tuple(gen[key])
            generator = GeneratorParams(**gen)
        except TypeError as exc:
            raise ConfigError(f"scenario.generator: {exc}") from exc
    network_inline = network_from_dict(data["network"]) if "network" in data else None
    network_file = data.get("network_file")
    if network_file is not None and base_dir is not None:
        ref = Path(network_file)
        network_file = str(ref if ref.is_absolute() else base_dir / ref)
    try:
        mode = PStarMode(data.get("pstar_mode", "measured"))
    except ValueError as exc:
        raise ConfigError(f"scenario.pstar_mode: {exc}") from exc
    return Scenario(
        seed=data["seed"],
        trials=data["trials"],
        network_file=network_file,
        network_inline=network_inline,
        generator=generator,
        k=bg["k"],
        n=bg["n"],
        placement=placement,
        thresholds=thresholds_from_dict(data.get("thresholds", {})),
        pstar_mode=mode,
        demands=tuple(
            demand_from_dict(d, f"scenario.demands[{i}]")
            for i, d in enumerate(data["demands"])
        ),
        failures=tuple(
            failure_from_dict(f, f"scenario.failures[{i}]")
            for i, f in enumerate(data.get("failures", []))
        ),
    )


def scenario_to_dict(scenario: Scenario) -> dict:
    data: dict[str, Any] = {
        "seed": scenario.seed,
        "trials": scenario.trials,
        "base_graph": {"k": scenario.k, "n": scenario.n},
        "thresholds": thresholds_to_dict(scenario.thresholds),
        "pstar_mode": scenario.pstar_mode.value,
        "demands": [demand_to_dict(d) for d in scenario.demands],
        "failures": [
            {"target": f.target, "kind": f.kind.value,
             "magnitude": f.magnitude, "time": f.time}
            for f in scenario.failures
        ],
    }
    if scenario.placement is not None:
        data["base_graph"]["placement"] = [
            {"node": node, "coords": list(coords)}
            for node, coords in sorted(scenario.placement.items())
        ]
    if scenario.network_file is not None:
        data["network_file"] = scenario.network_file
    if scenario.network_inline is not None:
        data["network"] = network_to_dict(scenario.network_inline)
    if scenario.generator is not None:
        gen = scenario.generator
        data["generator"] = {
            "num_nodes": gen.num_nodes, "num_links": gen.num_links,
            "levels": list(gen.levels),
            "swap_range": list(gen.swap_range), "loss_range": list(gen.loss_range),
            "fidelity_range": list(gen.fidelity_range),
            "throughput_range": list(gen.throughput_range),
            "resource_range": list(gen.resource_range),
        }
    return data


@dataclass(frozen=True)
class MetricsRecord:
    trial: int
    routing: tuple[tuple[int, RoutingOutcome], ...]
    links_total: int
    links_adapted: int
    assign_status: Optional[SolveStatus]
    objective: Optional[float]
    served: tuple[int, ...]
    rejected: tuple[int, ...]
    result: Optional[SolveResult]


def _base_network(scenario: Scenario) -> OverlayNetwork:
    if scenario.network_inline is not None:
        return scenario.network_inline
    if scenario.network_file is not None:
        return load_network(scenario.network_file)
    assert scenario.generator is not None
    return generate_network(scenario.generator, derive_seed(scenario.seed, "network"))


def build_trial_instance(
    network: OverlayNetwork,
    graph,
    adapted,
    demands: tuple[Demand, ...],
    outcomes: Mapping[int, RoutingOutcome],
) -> tuple[AssignmentInstance, dict[int, int]]:
    """Assignment instance over the routable demands.

    Resource sets mirror each adapted link's stored state count; contention
    is declared on every state of a link crossed by two or more routed
    demand paths. Returns the instance plus the map from instance-local
    demand ids back to scenario demand ids.
    """
    routable = [
        qid for qid in sorted(outcomes)
        if outcomes[qid].status is RouteStatus.FOUND
    ]
    local_of = {qid: i for i, qid in enumerate(routable)}
    instance_demands = tuple(demands[qid] for qid in routable)
    resource_sets = {
        link.id: ResourceSet(link=link.id, states=tuple(range(link.resource_count)))
        for link in network.links
        if link.id in adapted.links
    }
    users_on_link: dict[int, list[int]] = {}
    for qid in routable:
        path = outcomes[qid].path
        for lid in path.links:
            users_on_link.setdefault(lid, []).append(qid)
    interference = []
    for lid in sorted(users_on_link):
        contenders = users_on_link[lid]
        if len(contenders) < 2:
            continue
        competing = tuple(
            (demands[qid].user, local_of[qid]) for qid in contenders
        )
        for state in resource_sets[lid].states:
            interference.append(InterferenceSet(link=lid, state=state, competing=competing))
    instance = AssignmentInstance(
        network=network,
        graph=graph,
        adapted=adapted,
        demands=instance_demands,
        resource_sets=resource_sets,
        interference=tuple(interference),
    )
    return instance, {i: qid for qid, i in local_of.items()}


def run_scenario(scenario: Scenario) -> list[MetricsRecord]:
    base = _base_network(scenario)
    records: list[MetricsRecord] = []
    for trial in range(scenario.trials):
        t0 = time.perf_counter()
        network = apply_failures(base, scenario.failures, until=trial)
        placement_seed = derive_seed(scenario.seed, "placement", trial)
        graph = map_overlay(
            network, scenario.k, scenario.n,
            placement=scenario.placement,
            seed=placement_seed,
        )
        adapted = adapt(graph, network, scenario.thresholds, scenario.pstar_mode)
        t1 = time.perf_counter()

        outcomes: dict[int, RoutingOutcome] = {}
        for qid, demand in enumerate(scenario.demands):
            outcomes[qid] = route(
                graph, adapted, demand.source, demand.target,
                rng_seed=derive_seed(scenario.seed, "route", trial, qid),
            )
        t2 = time.perf_counter()

        instance, back = build_trial_instance(
            network, graph, adapted, scenario.demands, outcomes
        )
        unroutable = tuple(
            qid for qid in sorted(outcomes)
            if outcomes[qid].status is not RouteStatus.FOUND
        )
        if instance.demands:
            try:
                result = solve_exact(instance, bnb_cap=BNB_VARIABLE_CAP)
            except TooLargeError:
                result = solve_greedy(instance)
            served = tuple(sorted(back[i] for i in result.served))
            rejected = tuple(sorted({back[i] for i in result.rejected} | set(unroutable)))
            status = (
                SolveStatus.INFEASIBLE if unroutable else result.status
            )
        else:
            result = None
            served = ()
            rejected = unroutable
            status = SolveStatus.INFEASIBLE if scenario.demands else None
        t3 = time.perf_counter()
        log.info(
            "trial %d timings: adapt=%.4fs route=%.4fs assign=%.4fs",
            trial, t1 - t0, t2 - t1, t3 - t2,
        )
        records.append(
            MetricsRecord(
                trial=trial,
                routing=tuple(sorted(outcomes.items())),
                links_total=len(network.links),
                links_adapted=len(adapted.links),
                assign_status=status,
                objective=result.objective if result is not None else None,
                served=served,
                rejected=rejected,
                result=result,
            )
        )
    return records


def _routing_cell(records: tuple[tuple[int, RoutingOutcome], ...]) -> str:
    parts = []
    for qid, outcome in records:
        parts.append(
            f"q{qid}:{outcome.status.value}:{outcome.diameter}:{outcome.steps_taken}"
        )
    return ";".join(parts)


CSV_COLUMNS = (
    "trial", "links_total", "links_adapted", "demands", "served", "rejected",
    "assign_status", "objective", "routing",
)


def records_to_csv(records: list[MetricsRecord]) -> str:
    buffer = _io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow([
            rec.trial,
            rec.links_total,
            rec.links_adapted,
            len(rec.routing),
            len(rec.served),
            len(rec.rejected),
            rec.assign_status.value if rec.assign_status is not None else "",
            repr(rec.objective) if rec.objective is not None else "",
            _routing_cell(rec.routing),
        ])
    return buffer.getvalue()


def records_to_solutions(scenario: Scenario, records: list[MetricsRecord]) -> dict:
    trials = []
    for rec in records:
        entry: dict[str, Any] = {
            "trial": rec.trial,
            "assign_status": rec.assign_status.value if rec.assign_status else None,
            "objective": rec.objective,
            "served": list(rec.served),
            "rejected": list(rec.rejected),
            "routing": [
                {"demand": qid, "status": o.status.value,
                 "diameter": o.diameter, "steps": o.steps_taken}
                for qid, o in rec.routing
            ],
        }
        if rec.result is not None:
            entry["C"] = [list(t) for t in sorted(rec.result.solution.C)]
            entry["K"] = [[u, q, list(ref)] for u, q, ref in sorted(rec.result.solution.K)]
        trials.append(entry)
    return {"seed": scenario.seed, "trials": trials}


@dataclass(frozen=True)
class BenchRow:
    n: int
    trials: int
    mean_steps: float
    log2n_squared: float

    @property
    def normalized(self) -> float:
        return self.mean_steps / self.log2n_squared


def bench_routing(sizes: list[int], trials: int, seed: int) -> list[BenchRow]:
    """Mean greedy step counts on lattices with long-range links, per size."""
    rows = []
    for n in sizes:
        network, graph = kleinberg_lattice(n, derive_seed(seed, "lattice", n))
        adapted = adapt(graph, network, ThresholdPolicy(default=0.0))
        rng = random.Random(derive_seed(seed, "pairs", n))
        total_steps = 0
        node_count = n * n
        for _ in range(trials):
            source = rng.randrange(node_count)
            target = rng.randrange(node_count)
            while target == source:
                target = rng.randrange(node_count)
            total_steps += route(graph, adapted, source, target).steps_taken
        rows.append(
            BenchRow(
                n=n,
                trials=trials,
                mean_steps=total_steps / trials,
                log2n_squared=math.log2(n) ** 2,
            )
        )
        log.info("bench n=%d mean_steps=%.2f", n, rows[-1].mean_steps)
    return rows
