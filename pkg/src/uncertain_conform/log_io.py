"""Reading and writing uncertain logs (JSON, XES) and nets (JSON).

Timestamps travel as UTC ISO-8601 strings with a "Z" suffix; nanosecond
fractions survive round-trips. The XES mapping keeps uncertainty in dedicated
meta-attributes and always writes fallback values (``concept:name`` is the
lexicographically least candidate activity, ``time:timestamp`` the interval
start) so uncertainty-unaware consumers still see a plain certain log.
"""
from __future__ import annotations

import calendar
import io
import json
import re
import warnings
import xml.etree.ElementTree as ET
from datetime import datetime, timezone
from pathlib import Path
from typing import Union

from .errors import ValidationError
from .events import UncertainEvent, UncertainLog, UncertainTrace
from .petri import Marking, PetriNet, SystemNet

SCHEMA_VERSION = "1.0"

#: XES attribute keys carrying uncertainty; everything else falls back to the
#: standard concept/time keys.
XES_KEY_ACTIVITY_SET = "uncertainty:activity"
XES_KEY_TIME_MIN = "uncertainty:time:min"
XES_KEY_TIME_MAX = "uncertainty:time:max"
XES_KEY_INDETERMINACY = "uncertainty:indeterminacy"
XES_KEY_EVENT_ID = "identity:id"

_KNOWN_EVENT_KEYS = {
    "concept:name",
    "time:timestamp",
    XES_KEY_ACTIVITY_SET,
    XES_KEY_TIME_MIN,
    XES_KEY_TIME_MAX,
    XES_KEY_INDETERMINACY,
    XES_KEY_EVENT_ID,
}

_NS_PER_SECOND = 10**9

_TIMESTAMP_RE = re.compile(
    r"(\d{4})-(\d{2})-(\d{2})[T ](\d{2}):(\d{2}):(\d{2})(?:\.(\d{1,9}))?(?:Z|\+00:00)"
)

Source = Union[str, Path, bytes, io.IOBase]


def parse_timestamp(text: str) -> int:
    """UTC ISO-8601 ("Z" or "+00:00") to integer nanoseconds since the epoch."""
    m = _TIMESTAMP_RE.fullmatch(text.strip())
    if m is None:
        raise ValidationError(f"not a UTC ISO-8601 timestamp: {text!r}")
    year, month, day, hour, minute, second = (int(m.group(i)) for i in range(1, 7))
    seconds = calendar.timegm((year, month, day, hour, minute, second, 0, 0, 0))
    fraction = m.group(7) or ""
    nanos = int(fraction.ljust(9, "0")) if fraction else 0
    return seconds * _NS_PER_SECOND + nanos


def format_timestamp(ns: int) -> str:
    """Integer nanoseconds to canonical UTC ISO-8601 (fraction only if nonzero)."""
    seconds, nanos = divmod(ns, _NS_PER_SECOND)
    stamp = datetime.fromtimestamp(seconds, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%S")
    if nanos:
        stamp += f".{nanos:09d}".rstrip("0")
    return stamp + "Z"


def _read_bytes(source: Source) -> bytes:
    if isinstance(source, bytes):
        return source
    if isinstance(source, (str, Path)):
        return Path(source).read_bytes()
    data = source.read()
    return data if isinstance(data, bytes) else data.encode("utf-8")


# ---------------------------------------------------------------------------
# Uncertain log: JSON


def log_to_dict(log: UncertainLog) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "traces": [
            {
                "case_id": trace.case_id,
                "events": [
                    {
                        "id": e.id,
                        "activities": sorted(e.activities),
                        "t_min": format_timestamp(e.t_min),
                        "t_max": format_timestamp(e.t_max),
                        "indeterminate": e.indeterminate,
                    }
                    for e in trace.events
                ],
            }
            for trace in log
        ],
    }


def _event_from_dict(raw: dict, context: str) -> UncertainEvent:
    try:
        event_id = raw["id"]
        activities = raw["activities"]
        t_min = parse_timestamp(raw["t_min"])
        t_max = parse_timestamp(raw["t_max"])
    except KeyError as exc:
        raise ValidationError(f"{context}: event is missing field {exc.args[0]!r}") from exc
    if not isinstance(activities, list) or not activities:
        raise ValidationError(f"{context}: event {event_id!r} needs a nonempty activity list")
    return UncertainEvent(
        id=str(event_id),
        activities=frozenset(str(a) for a in activities),
        t_min=t_min,
        t_max=t_max,
        indeterminate=bool(raw.get("indeterminate", False)),
    )


def log_from_dict(doc: dict) -> UncertainLog:
    if "traces" not in doc:
        raise ValidationError("log document has no 'traces' field")
    unknown = 0
    traces = []
    for i, raw_trace in enumerate(doc["traces"]):
        case_id = str(raw_trace.get("case_id", f"case{i}"))
        context = f"trace {case_id!r}"
        events = [_event_from_dict(raw, context) for raw in raw_trace.get("events", [])]
        unknown += sum(
            1
            for raw in raw_trace.get("events", [])
            for key in raw
            if key not in {"id", "activities", "t_min", "t_max", "indeterminate"}
        )
        traces.append(UncertainTrace(case_id, tuple(events)))
    if unknown:
        warnings.warn(f"dropped {unknown} unrecognized event attribute(s) while loading", stacklevel=2)
    return UncertainLog(tuple(traces))


# ---------------------------------------------------------------------------
# Uncertain log: XES


def _xes_attr(parent: ET.Element, tag: str, key: str, value: str) -> ET.Element:
    return ET.SubElement(parent, tag, {"key": key, "value": value})


def _log_to_xes(log: UncertainLog) -> bytes:
    root = ET.Element("log", {"xes.version": "1849-2016", "xes.features": "nested-attributes"})
    ET.SubElement(root, "extension", {"name": "Concept", "prefix": "concept", "uri": "http://www.xes-standard.org/concept.xesext"})
    ET.SubElement(root, "extension", {"name": "Time", "prefix": "time", "uri": "http://www.xes-standard.org/time.xesext"})
    for trace in log:
        trace_el = ET.SubElement(root, "trace")
        _xes_attr(trace_el, "string", "concept:name", trace.case_id)
        for e in trace.events:
            event_el = ET.SubElement(trace_el, "event")
            _xes_attr(event_el, "string", "concept:name", min(e.activities))
            _xes_attr(event_el, "date", "time:timestamp", format_timestamp(e.t_min))
            _xes_attr(event_el, "string", XES_KEY_EVENT_ID, e.id)
            if len(e.activities) > 1:
                list_el = ET.SubElement(event_el, "list", {"key": XES_KEY_ACTIVITY_SET})
                values_el = ET.SubElement(list_el, "values")
                for label in sorted(e.activities):
                    _xes_attr(values_el, "string", "activity", label)
            if e.t_min != e.t_max:
                _xes_attr(event_el, "date", XES_KEY_TIME_MIN, format_timestamp(e.t_min))
                _xes_attr(event_el, "date", XES_KEY_TIME_MAX, format_timestamp(e.t_max))
            if e.indeterminate:
                _xes_attr(event_el, "boolean", XES_KEY_INDETERMINACY, "true")
    tree = ET.ElementTree(root)
    ET.indent(tree)
    buffer = io.BytesIO()
    tree.write(buffer, encoding="utf-8", xml_declaration=True)
    return buffer.getvalue() + b"\n"


def _xes_event(event_el: ET.Element, context: str, fallback_id: str) -> tuple[UncertainEvent, int]:
    attrs: dict[str, str] = {}
    activity_set: list[str] = []
    unknown = 0
    for child in event_el:
        key = child.get("key", "")
        if child.tag == "list" and key == XES_KEY_ACTIVITY_SET:
            for sub in child.iter("string"):
                if sub.get("key") == "activity" and sub.get("value") is not None:
                    activity_set.append(sub.get("value", ""))
        elif key in _KNOWN_EVENT_KEYS:
            attrs[key] = child.get("value", "")
        else:
            unknown += 1

    event_id = attrs.get(XES_KEY_EVENT_ID, fallback_id)
    if activity_set:
        activities = frozenset(activity_set)
    elif "concept:name" in attrs:
        activities = frozenset([attrs["concept:name"]])
    else:
        raise ValidationError(f"{context}: event {event_id!r} has no activity information")

    if XES_KEY_TIME_MIN in attrs or XES_KEY_TIME_MAX in attrs:
        if XES_KEY_TIME_MIN not in attrs or XES_KEY_TIME_MAX not in attrs:
            raise ValidationError(f"{context}: event {event_id!r} needs both interval endpoints")
        t_min = parse_timestamp(attrs[XES_KEY_TIME_MIN])
        t_max = parse_timestamp(attrs[XES_KEY_TIME_MAX])
    elif "time:timestamp" in attrs:
        t_min = t_max = parse_timestamp(attrs["time:timestamp"])
    else:
        raise ValidationError(f"{context}: event {event_id!r} has no timestamp information")

    indeterminate = attrs.get(XES_KEY_INDETERMINACY, "false").lower() == "true"
    return UncertainEvent(event_id, activities, t_min, t_max, indeterminate), unknown


def _log_from_xes(data: bytes) -> UncertainLog:
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise ValidationError(f"malformed XES document: {exc}") from exc
    if root.tag != "log":
        raise ValidationError(f"expected <log> root element, found <{root.tag}>")
    traces = []
    unknown = 0
    for i, trace_el in enumerate(root.iter("trace")):
        case_id = f"trace{i}"
        for child in trace_el:
            if child.tag == "string" and child.get("key") == "concept:name":
                case_id = child.get("value", case_id)
        context = f"trace {case_id!r}"
        events = []
        for j, event_el in enumerate(trace_el.iter("event")):
            event, dropped = _xes_event(event_el, context, fallback_id=f"{case_id}:e{j + 1}")
            unknown += dropped
            events.append(event)
        traces.append(UncertainTrace(case_id, tuple(events)))
    if unknown:
        warnings.warn(f"dropped {unknown} unrecognized event attribute(s) while loading", stacklevel=2)
    return UncertainLog(tuple(traces))


def save_log(log: UncertainLog, format: str = "json") -> bytes:
    """Serialize a log; round-trips through :func:`load_log` losslessly."""
    if format == "json":
        return (json.dumps(log_to_dict(log), indent=2, sort_keys=True) + "\n").encode("utf-8")
    if format == "xes":
        return _log_to_xes(log)
    raise ValidationError(f"unsupported log format {format!r} (expected 'json' or 'xes')")


def load_log(source: Source, format: str = "json") -> UncertainLog:
    """Parse a log document; validation failures name the offending event."""
    data = _read_bytes(source)
    if format == "json":
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed JSON log: {exc}") from exc
        return log_from_dict(doc)
    if format == "xes":
        return _log_from_xes(data)
    raise ValidationError(f"unsupported log format {format!r} (expected 'json' or 'xes')")


# ---------------------------------------------------------------------------
# Nets: JSON


def net_to_dict(sn: SystemNet) -> dict:
    net = sn.net
    return {
        "places": sorted(net.places),
        "transitions": [
            {"id": t, "label": net.label(t)} for t in sorted(net.transitions)
        ],
        "arcs": sorted([list(arc) for arc in net.arcs]),
        "initial_marking": {p: c for p, c in sorted(sn.initial_marking.items())},
        "final_marking": {p: c for p, c in sorted(sn.final_marking.items())},
    }


def net_from_dict(doc: dict) -> SystemNet:
    try:
        places = list(doc["places"])
        raw_transitions = list(doc["transitions"])
        arcs = [tuple(arc) for arc in doc["arcs"]]
    except KeyError as exc:
        raise ValidationError(f"net document is missing field {exc.args[0]!r}") from exc
    ids = []
    labels = {}
    for entry in raw_transitions:
        if "id" not in entry:
            raise ValidationError("net transition entry without an 'id'")
        tid = str(entry["id"])
        ids.append(tid)
        if entry.get("label") is not None:
            labels[tid] = str(entry["label"])
    if len(set(ids)) != len(ids):
        raise ValidationError("net document has duplicate transition ids")
    if len(set(places)) != len(places):
        raise ValidationError("net document has duplicate places")
    net = PetriNet(places, ids, arcs, labels)
    return SystemNet(
        net,
        Marking(dict(doc.get("initial_marking", {}))),
        Marking(dict(doc.get("final_marking", {}))),
    )


def save_net(sn: SystemNet) -> bytes:
    return (json.dumps(net_to_dict(sn), indent=2, sort_keys=True) + "\n").encode("utf-8")


def load_net(source: Source) -> SystemNet:
    data = _read_bytes(source)
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON net: {exc}") from exc
    return net_from_dict(doc)
