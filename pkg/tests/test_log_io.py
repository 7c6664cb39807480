"""Serialization: timestamps, JSON/XES logs, JSON nets."""
import json

import pytest
from helpers import DATA_DIR, naive_xes_activity_sequences, uncertain_traces
from hypothesis import given, settings

from test_events import running_example

from uncertain_conform import (
    UncertainEvent,
    UncertainLog,
    UncertainTrace,
    ValidationError,
    certain_event,
    event_net,
    format_timestamp,
    load_log,
    load_net,
    parse_timestamp,
    save_log,
    save_net,
)
from uncertain_conform.log_io import (
    XES_KEY_ACTIVITY_SET,
    XES_KEY_INDETERMINACY,
    XES_KEY_TIME_MAX,
    XES_KEY_TIME_MIN,
    net_to_dict,
)


class TestTimestamps:
    def test_round_trip_second_precision(self):
        text = "2017-02-21T00:41:00Z"
        assert format_timestamp(parse_timestamp(text)) == text

    def test_round_trip_nanoseconds(self):
        text = "2017-02-21T00:41:00.123456789Z"
        assert format_timestamp(parse_timestamp(text)) == text

    def test_trailing_zeros_trimmed(self):
        assert format_timestamp(parse_timestamp("2020-01-01T00:00:00.500Z")) == "2020-01-01T00:00:00.5Z"

    def test_offset_zero_accepted(self):
        assert parse_timestamp("2020-01-01T00:00:00+00:00") == parse_timestamp("2020-01-01T00:00:00Z")

    @pytest.mark.parametrize("bad", ["2020-01-01", "yesterday", "2020-01-01T00:00:00+02:00", ""])
    def test_malformed_rejected(self, bad):
        with pytest.raises(ValidationError):
            parse_timestamp(bad)


class TestJsonLog:
    def test_running_example_round_trip(self):
        log = UncertainLog((running_example(),))
        assert load_log(save_log(log, "json"), "json") == log

    def test_table4_shape_from_json(self):
        doc = {
            "schema_version": "1.0",
            "traces": [
                {
                    "case_id": "ID192",
                    "events": [
                        {"id": "e1", "activities": ["NightSweats"], "t_min": "1970-01-05T00:00:00Z",
                         "t_max": "1970-01-05T00:00:00Z", "indeterminate": True},
                        {"id": "e2", "activities": ["PrTP", "SecTP"], "t_min": "1970-01-08T00:00:00Z",
                         "t_max": "1970-01-08T00:00:00Z", "indeterminate": False},
                        {"id": "e3", "activities": ["Splenomeg"], "t_min": "1970-01-04T00:00:00Z",
                         "t_max": "1970-01-10T00:00:00Z", "indeterminate": False},
                        {"id": "e4", "activities": ["Adm"], "t_min": "1970-01-12T00:00:00Z",
                         "t_max": "1970-01-12T00:00:00Z", "indeterminate": False},
                    ],
                }
            ],
        }
        log = load_log(json.dumps(doc).encode(), "json")
        trace = log.traces[0]
        assert len(trace.events) == 4
        assert trace.event("e2").activities == frozenset({"PrTP", "SecTP"})
        assert trace.event("e1").indeterminate

    def test_empty_activity_list_names_event(self):
        doc = {"traces": [{"case_id": "c", "events": [
            {"id": "broken", "activities": [], "t_min": "1970-01-01T00:00:00Z", "t_max": "1970-01-01T00:00:00Z"}
        ]}]}
        with pytest.raises(ValidationError, match="broken"):
            load_log(json.dumps(doc).encode(), "json")

    def test_inverted_interval_names_event(self):
        doc = {"traces": [{"case_id": "c", "events": [
            {"id": "inv", "activities": ["a"], "t_min": "1970-01-02T00:00:00Z", "t_max": "1970-01-01T00:00:00Z"}
        ]}]}
        with pytest.raises(ValidationError, match="inv"):
            load_log(json.dumps(doc).encode(), "json")

    def test_malformed_json(self):
        with pytest.raises(ValidationError, match="malformed"):
            load_log(b"{not json", "json")

    def test_unknown_attributes_warn(self):
        doc = {"traces": [{"case_id": "c", "events": [
            {"id": "e", "activities": ["a"], "t_min": "1970-01-01T00:00:00Z",
             "t_max": "1970-01-01T00:00:00Z", "color": "red"}
        ]}]}
        with pytest.warns(UserWarning, match="dropped 1"):
            load_log(json.dumps(doc).encode(), "json")

    @given(uncertain_traces(max_events=5))
    @settings(max_examples=50, deadline=None)
    def test_random_round_trip(self, trace):
        log = UncertainLog((trace,))
        assert load_log(save_log(log, "json"), "json") == log


class TestXesLog:
    def test_round_trip(self):
        log = UncertainLog((running_example(),))
        assert load_log(save_log(log, "xes"), "xes") == log

    def test_certain_log_has_no_uncertainty_keys(self):
        trace = UncertainTrace("c", (certain_event("e1", "a", 0), certain_event("e2", "b", 60)))
        data = save_log(UncertainLog((trace,)), "xes").decode()
        for key in (XES_KEY_ACTIVITY_SET, XES_KEY_TIME_MIN, XES_KEY_TIME_MAX, XES_KEY_INDETERMINACY):
            assert key not in data

    def test_indeterminate_event_carries_marker(self):
        trace = UncertainTrace("c", (UncertainEvent("e1", frozenset({"a"}), 0, 0, True),))
        data = save_log(UncertainLog((trace,)), "xes").decode()
        assert XES_KEY_INDETERMINACY in data

    def test_plain_xes_event_loads_as_certain(self):
        data = b"""<?xml version='1.0' encoding='utf-8'?>
<log xes.version="1849-2016">
  <trace>
    <string key="concept:name" value="case1"/>
    <event>
      <string key="concept:name" value="a"/>
      <date key="time:timestamp" value="2020-01-01T00:00:00Z"/>
    </event>
  </trace>
</log>
"""
        log = load_log(data, "xes")
        event = log.traces[0].events[0]
        assert event.activities == frozenset({"a"})
        assert event.t_min == event.t_max
        assert not event.indeterminate

    def test_naive_reader_sees_fallback_values(self):
        log = UncertainLog((running_example(),))
        rows = naive_xes_activity_sequences(save_log(log, "xes"))
        assert rows == [[
            ("NightSweats", "1970-01-06T00:00:00Z"),
            ("PrTP", "1970-01-09T00:00:00Z"),
            ("Splenomeg", "1970-01-05T00:00:00Z"),
            ("Adm", "1970-01-13T00:00:00Z"),
        ]]

    def test_event_without_activity_rejected(self):
        data = b"""<log><trace><event><date key="time:timestamp" value="2020-01-01T00:00:00Z"/></event></trace></log>"""
        with pytest.raises(ValidationError, match="no activity"):
            load_log(data, "xes")

    def test_malformed_xml(self):
        with pytest.raises(ValidationError, match="malformed"):
            load_log(b"<log><trace>", "xes")

    @given(uncertain_traces(max_events=5))
    @settings(max_examples=50, deadline=None)
    def test_random_round_trip(self, trace):
        log = UncertainLog((trace,))
        assert load_log(save_log(log, "xes"), "xes") == log


class TestNetIo:
    def test_icu_fixture_shape(self):
        icu = load_net(DATA_DIR / "icu_net.json")
        assert len(icu.net.transitions) == 16
        invisible = icu.net.transitions - set(icu.net.labels)
        assert invisible == {"t7", "t11", "t14"}
        assert len(icu.net.places) == 17

    def test_event_net_round_trip(self):
        sn = event_net(["a", "b"])
        loaded = load_net(save_net(sn))
        assert net_to_dict(loaded) == net_to_dict(sn)
        assert save_net(loaded) == save_net(sn)

    def test_arc_to_unknown_place(self):
        doc = {
            "places": ["p1"],
            "transitions": [{"id": "t1", "label": "a"}],
            "arcs": [["p1", "t1"], ["t1", "p9"]],
            "initial_marking": {"p1": 1},
            "final_marking": {"p1": 1},
        }
        with pytest.raises(ValidationError):
            load_net(json.dumps(doc).encode())

    def test_marking_over_unknown_place(self):
        doc = {
            "places": ["p1", "p2"],
            "transitions": [{"id": "t1", "label": "a"}],
            "arcs": [["p1", "t1"], ["t1", "p2"]],
            "initial_marking": {"nope": 1},
            "final_marking": {"p2": 1},
        }
        with pytest.raises(ValidationError):
            load_net(json.dumps(doc).encode())

    def test_null_label_means_invisible(self):
        doc = {
            "places": ["p1", "p2"],
            "transitions": [{"id": "t1", "label": None}],
            "arcs": [["p1", "t1"], ["t1", "p2"]],
            "initial_marking": {"p1": 1},
            "final_marking": {"p2": 1},
        }
        sn = load_net(json.dumps(doc).encode())
        assert sn.net.label("t1") is None
