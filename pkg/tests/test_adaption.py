import random

import pytest

from etopo import (
    EntangledLink,
    NotConnectedError,
    PStarMode,
    RouteStatus,
    ThresholdPolicy,
    adapt,
    adapt_and_route,
    link_existence_probability,
    make_network,
    map_overlay,
)
from util import random_overlay


def three_link_setup():
    # existence probabilities 0.95, 0.80, 0.99
    links = [
        EntangledLink(id=0, a=0, b=1, swap_success=0.95),
        EntangledLink(id=1, a=1, b=2, swap_success=0.80),
        EntangledLink(id=2, a=2, b=3, swap_success=0.99),
    ]
    net = make_network(range(4), links)
    graph = map_overlay(net, k=1, n=4,
                        placement={0: (0,), 1: (1,), 2: (2,), 3: (3,)})
    return net, graph


class TestUpdatedProbability:
    def test_below_threshold_zeroes(self):
        from etopo import updated_probability

        net, graph = three_link_setup()
        policy = ThresholdPolicy(default=0.9)
        assert updated_probability(graph, net, 1, 2, policy) == 0.0

    def test_above_threshold_keeps_measured(self):
        from etopo import updated_probability

        net, graph = three_link_setup()
        policy = ThresholdPolicy(default=0.9)
        assert updated_probability(graph, net, 0, 1, policy) == pytest.approx(0.95)

    def test_zero_threshold_is_identity(self):
        from etopo import updated_probability

        net, graph = three_link_setup()
        policy = ThresholdPolicy(default=0.0)
        for link in net.links:
            assert updated_probability(graph, net, link.a, link.b, policy) == \
                pytest.approx(link_existence_probability(link))

    def test_threshold_mode_pins_to_threshold(self):
        from etopo import updated_probability

        net, graph = three_link_setup()
        policy = ThresholdPolicy(default=0.9)
        assert updated_probability(
            graph, net, 0, 1, policy, mode=PStarMode.THRESHOLD
        ) == pytest.approx(0.9)

    def test_unconnected_pair(self):
        from etopo import updated_probability

        net, graph = three_link_setup()
        with pytest.raises(NotConnectedError):
            updated_probability(graph, net, 0, 3, ThresholdPolicy())


class TestAdapt:
    def test_zero_threshold_keeps_everything(self):
        net, graph = three_link_setup()
        adapted = adapt(graph, net, ThresholdPolicy(default=0.0))
        assert adapted.links == {l.id for l in net.links}

    def test_impossible_threshold_empties(self):
        net, graph = three_link_setup()
        adapted = adapt(graph, net, ThresholdPolicy(default=1.0))
        assert adapted.links == frozenset()
        assert all(p == 0.0 for p in adapted.p_star.values())

    def test_hand_enumerated_filter(self):
        net, graph = three_link_setup()
        adapted = adapt(graph, net, ThresholdPolicy(default=0.9))
        assert adapted.links == {0, 2}
        assert adapted.p_star[(1, 2)] == 0.0
        assert adapted.p_star[(0, 1)] == pytest.approx(0.95)

    def test_per_level_thresholds(self):
        links = [
            EntangledLink(id=0, a=0, b=1, level=1, swap_success=0.7),
            EntangledLink(id=1, a=1, b=2, level=2, swap_success=0.7),
        ]
        net = make_network(range(3), links)
        graph = map_overlay(net, k=1, n=4, seed=0)
        policy = ThresholdPolicy(default=0.0, per_level={2: 0.8})
        adapted = adapt(graph, net, policy)
        assert adapted.links == {0}

    def test_soundness_completeness_random(self):
        rng = random.Random(23)
        for _ in range(50):
            net = random_overlay(rng, 7, 10)
            graph = map_overlay(net, k=2, n=8, seed=rng.randrange(2**32))
            policy = ThresholdPolicy(
                default=rng.random(),
                per_level={l: rng.random() for l in (1, 2)},
            )
            adapted = adapt(graph, net, policy)
            for link in net.links:
                meets = (link_existence_probability(link)
                         >= policy.threshold_for(link.level))
                assert (link.id in adapted.links) == meets

    def test_monotonic_under_raised_policy(self):
        rng = random.Random(31)
        for _ in range(30):
            net = random_overlay(rng, 7, 10)
            graph = map_overlay(net, k=2, n=8, seed=rng.randrange(2**32))
            lo = rng.uniform(0, 0.6)
            hi = lo + rng.uniform(0, 1 - lo)
            s_lo = adapt(graph, net, ThresholdPolicy(default=lo)).links
            s_hi = adapt(graph, net, ThresholdPolicy(default=hi)).links
            assert s_hi <= s_lo

    def test_idempotent(self):
        from etopo.overlay import OverlayNetwork

        net, graph = three_link_setup()
        policy = ThresholdPolicy(default=0.9)
        first = adapt(graph, net, policy)
        survivors = OverlayNetwork(
            nodes=net.nodes,
            links=tuple(l for l in net.links if l.id in first.links),
        )
        graph2 = map_overlay(survivors, k=1, n=4, placement=dict(graph.placement))
        second = adapt(graph2, survivors, policy)
        assert second.links == first.links


class TestAdaptAndRoute:
    def test_zero_threshold_matches_plain_routing(self):
        from etopo import route

        net, graph = three_link_setup()
        adapted = adapt(graph, net, ThresholdPolicy(default=0.0))
        direct = route(graph, adapted, 0, 3)
        combined = adapt_and_route(graph, net, ThresholdPolicy(default=0.0), 0, 3)
        assert combined == direct

    def test_removed_bridge_is_unreachable(self):
        net, graph = three_link_setup()
        outcome = adapt_and_route(graph, net, ThresholdPolicy(default=0.9), 0, 2)
        assert outcome.status is RouteStatus.UNREACHABLE

    def test_source_equals_target(self):
        net, graph = three_link_setup()
        outcome = adapt_and_route(graph, net, ThresholdPolicy(default=0.9), 1, 1)
        assert outcome.found and outcome.diameter == 0 and outcome.path.links == ()
