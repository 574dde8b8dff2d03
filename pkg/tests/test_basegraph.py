import random

import pytest
from hypothesis import given, strategies as st

from etopo import (
    DimensionMismatchError,
    EntangledLink,
    LatticeCapacityError,
    NoContactsError,
    NotConnectedError,
    PlacementError,
    connection_probability,
    l1_distance,
    link_existence_probability,
    make_network,
    map_overlay,
    normalizing_term,
)
from util import random_overlay

coords = st.tuples(st.integers(-50, 50), st.integers(-50, 50))


class TestL1Distance:
    def test_table_example(self):
        assert l1_distance((0, 0), (3, 4)) == 7

    def test_identity(self):
        assert l1_distance((2, 5), (2, 5)) == 0

    def test_one_dimensional(self):
        assert l1_distance((1,), (7,)) == 6

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            l1_distance((1, 2), (1,))

    @given(a=coords, b=coords, c=coords)
    def test_metric_axioms(self, a, b, c):
        assert l1_distance(a, b) >= 0
        assert (l1_distance(a, b) == 0) == (a == b)
        assert l1_distance(a, b) == l1_distance(b, a)
        assert l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c)


def line_network(length=3):
    links = [
        EntangledLink(id=i, a=i, b=i + 1, fidelity=0.9)
        for i in range(length - 1)
    ]
    return make_network(range(length), links)


class TestMapOverlay:
    def test_explicit_placement_full_lattice(self):
        net = make_network(range(4), [])
        placement = {0: (0, 0), 1: (0, 1), 2: (1, 0), 3: (1, 1)}
        graph = map_overlay(net, k=2, n=2, placement=placement)
        assert dict(graph.placement) == placement

    def test_capacity_exceeded(self):
        net = make_network(range(5), [])
        with pytest.raises(LatticeCapacityError):
            map_overlay(net, k=1, n=4)

    def test_seeded_placement_is_deterministic(self):
        net = make_network(range(3), [])
        g1 = map_overlay(net, k=2, n=8, seed=11)
        g2 = map_overlay(net, k=2, n=8, seed=11)
        assert g1.placement == g2.placement

    def test_placement_collision_rejected(self):
        net = make_network(range(2), [])
        with pytest.raises(PlacementError):
            map_overlay(net, k=1, n=4, placement={0: (1,), 1: (1,)})

    def test_out_of_range_placement_rejected(self):
        net = make_network(range(1), [])
        with pytest.raises(PlacementError):
            map_overlay(net, k=1, n=4, placement={0: (4,)})

    def test_contacts_mirror_links(self):
        net = line_network()
        graph = map_overlay(net, k=1, n=4, placement={0: (0,), 1: (1,), 2: (2,)})
        assert graph.contacts_of(1) == ((0, 0), (2, 1))


class TestNormalizingTerm:
    def test_sums_contact_distances(self):
        net = make_network(
            range(4),
            [EntangledLink(id=i, a=0, b=i + 1) for i in range(3)],
        )
        placement = {0: (0,), 1: (1,), 2: (2,), 3: (4,)}
        graph = map_overlay(net, k=1, n=8, placement=placement)
        assert normalizing_term(graph, 0) == 7.0

    def test_single_contact(self):
        net = make_network([0, 1], [EntangledLink(id=0, a=0, b=1)])
        graph = map_overlay(net, k=1, n=4, placement={0: (0,), 1: (3,)})
        assert normalizing_term(graph, 0) == 3.0

    def test_isolated_node(self):
        net = make_network([0, 1], [])
        graph = map_overlay(net, k=1, n=4, seed=0)
        with pytest.raises(NoContactsError):
            normalizing_term(graph, 0)

    def test_strictly_positive(self):
        rng = random.Random(5)
        for _ in range(25):
            net = random_overlay(rng, 6, 8)
            graph = map_overlay(net, k=2, n=6, seed=rng.randrange(2**32))
            for node in sorted(net.nodes):
                if graph.contacts_of(node):
                    assert normalizing_term(graph, node) > 0.0


class TestConnectionProbability:
    def test_correction_cancels_lattice_term(self):
        link = EntangledLink(id=0, a=0, b=1, swap_success=0.9)
        net = make_network([0, 1], [link])
        graph = map_overlay(net, k=2, n=4, placement={0: (0, 0), 1: (1, 1)})
        cp = connection_probability(graph, net, 0, 1)
        assert cp.lattice_term == pytest.approx((2 ** -2) / 2)
        assert cp.p == pytest.approx(0.9, abs=1e-15)
        assert cp.p == cp.lattice_term + cp.correction

    def test_zero_existence_gives_zero(self):
        link = EntangledLink(id=0, a=0, b=1, swap_success=0.0)
        net = make_network([0, 1], [link])
        graph = map_overlay(net, k=1, n=4, seed=3)
        assert connection_probability(graph, net, 0, 1).p == pytest.approx(0.0, abs=1e-15)

    def test_unconnected_pair(self):
        net = line_network()
        graph = map_overlay(net, k=1, n=4, seed=1)
        with pytest.raises(NotConnectedError):
            connection_probability(graph, net, 0, 2)

    def test_identity_with_overlay_probability(self):
        rng = random.Random(17)
        for _ in range(50):
            net = random_overlay(rng, 7, 10)
            graph = map_overlay(net, k=2, n=8, seed=rng.randrange(2**32))
            for link in net.links:
                cp = connection_probability(graph, net, link.a, link.b, link_id=link.id)
                assert abs(cp.p - link_existence_probability(link)) <= 1e-12
