"""Behavior graphs and nets: reduction, sortings, net structure."""
import pytest
from helpers import uncertain_traces
from hypothesis import given, settings

from test_events import running_example

from uncertain_conform import (
    UncertainEvent,
    UncertainTrace,
    ValidationError,
    behavior_graph,
    behavior_graph_dot,
    behavior_net,
    certain_event,
    event_net,
    language,
    order_realizations,
    realizations,
    topological_sortings,
    transitive_reduction,
)


class TestTransitiveReduction:
    def test_triangle(self):
        edges = {("a", "b"), ("b", "c"), ("a", "c")}
        assert transitive_reduction("abc", edges) == {("a", "b"), ("b", "c")}

    def test_idempotent_on_chain(self):
        edges = {("a", "b"), ("b", "c")}
        once = transitive_reduction("abc", edges)
        assert once == edges
        assert transitive_reduction("abc", once) == once

    def test_cycle_rejected(self):
        with pytest.raises(ValidationError):
            transitive_reduction("ab", {("a", "b"), ("b", "a")})

    def test_running_example_drops_long_edge(self):
        # Raw precedence has four edges; the reduction drops (e1, e4).
        vertices = ["e1", "e2", "e3", "e4"]
        raw = {("e1", "e2"), ("e2", "e4"), ("e3", "e4"), ("e1", "e4")}
        assert transitive_reduction(vertices, raw) == {
            ("e1", "e2"),
            ("e2", "e4"),
            ("e3", "e4"),
        }


class TestBehaviorGraph:
    def test_running_example_edges(self):
        bg = behavior_graph(running_example())
        assert bg.edges == frozenset({("e1", "e2"), ("e2", "e4"), ("e3", "e4")})

    def test_all_overlapping_no_edges(self):
        events = tuple(UncertainEvent(f"e{i}", frozenset({"a"}), 0, 10, False) for i in range(4))
        assert behavior_graph(UncertainTrace("c", events)).edges == frozenset()

    def test_disjoint_intervals_chain(self):
        events = tuple(
            UncertainEvent(f"e{i}", frozenset({"a"}), 10 * i, 10 * i + 5, False) for i in range(4)
        )
        bg = behavior_graph(UncertainTrace("c", events))
        assert bg.edges == frozenset({("e0", "e1"), ("e1", "e2"), ("e2", "e3")})


class TestTopologicalSortings:
    def test_running_example_matches_orders(self):
        trace = running_example()
        bg = behavior_graph(trace)
        assert set(topological_sortings(bg)) == set(order_realizations(trace))

    def test_chain_has_one(self):
        events = tuple(certain_event(f"e{i}", "a", 10 * i) for i in range(4))
        bg = behavior_graph(UncertainTrace("c", events))
        assert len(topological_sortings(bg)) == 1

    def test_isolated_vertices_factorial(self):
        events = tuple(UncertainEvent(f"e{i}", frozenset({"a"}), 0, 9, False) for i in range(3))
        bg = behavior_graph(UncertainTrace("c", events))
        assert len(topological_sortings(bg)) == 6


class TestBehaviorNet:
    def test_running_example_shape(self):
        sn = behavior_net(running_example())
        assert len(sn.net.places) == 6
        assert len(sn.net.transitions) == 6
        assert sorted(sn.net.labels.values()) == [
            "Adm", "NightSweats", "PrTP", "SecTP", "Splenomeg",
        ]
        assert len(sn.net.transitions - set(sn.net.labels)) == 1  # the skip for e1
        assert sn.initial_marking.total() == 2
        assert sn.final_marking.total() == 1

    def test_certain_linear_trace_behaves_like_event_net(self):
        trace = UncertainTrace(
            "c", tuple(certain_event(f"e{i}", lbl, 10 * i) for i, lbl in enumerate("abc"))
        )
        sn = behavior_net(trace)
        assert len(sn.net.places) == 4
        assert len(sn.net.transitions) == 3
        assert not (sn.net.transitions - set(sn.net.labels))
        assert language(sn, 3) == language(event_net(["a", "b", "c"]), 3)

    def test_running_example_language_is_realizations(self):
        trace = running_example()
        assert language(behavior_net(trace), len(trace)) == realizations(trace)

    def test_and_split_width(self):
        # A vertex with k outgoing edges produces transitions with k output places.
        events = (
            UncertainEvent("e0", frozenset({"a"}), 0, 0, False),
            UncertainEvent("e1", frozenset({"b"}), 5, 20, False),
            UncertainEvent("e2", frozenset({"c"}), 10, 30, False),
            UncertainEvent("e3", frozenset({"d"}), 40, 40, False),
        )
        trace = UncertainTrace("c", events)
        bg = behavior_graph(trace)
        assert bg.successors("e0") == ("e1", "e2")
        sn = behavior_net(trace)
        assert len(sn.net.postset("e0:a")) == 2
        assert len(sn.net.preset("e3:d")) == 2

    def test_place_naming_convention(self):
        sn = behavior_net(running_example())
        assert "start→e1" in sn.net.places
        assert "e1→e2" in sn.net.places
        assert "e4→end" in sn.net.places


class TestDotExport:
    def test_dashed_for_indeterminate(self):
        dot = behavior_graph_dot(behavior_graph(running_example()))
        assert 'style="dashed"' in dot
        assert '"e1" -> "e2";' in dot
        assert "PrTP, SecTP" in dot


class TestGraphNetProperties:
    @given(uncertain_traces(max_events=6))
    @settings(max_examples=80, deadline=None)
    def test_sortings_equal_order_realizations(self, trace):
        bg = behavior_graph(trace)
        assert set(topological_sortings(bg)) == set(order_realizations(trace))

    @given(uncertain_traces(max_events=5))
    @settings(max_examples=80, deadline=None)
    def test_language_equals_realizations(self, trace):
        assert language(behavior_net(trace), len(trace)) == realizations(trace)
