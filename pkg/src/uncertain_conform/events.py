"""Uncertain events, traces and logs, and brute-force realization enumeration.

An uncertain event carries a set of candidate activity labels, a closed
timestamp interval, and an indeterminacy flag ("?" events may not have
happened at all). Timestamps are integers (nanoseconds since the epoch);
only their total order matters here.

The enumeration routines in this module are deliberately straightforward:
they are the ground truth the graph- and net-based machinery elsewhere is
checked against.
"""
from __future__ import annotations

import itertools
import os
from collections.abc import Iterator
from dataclasses import dataclass

from .errors import CapExceeded, ValidationError

#: Environment variable overriding enumeration caps: "EVENTS" or "EVENTS,REALIZATIONS".
CAP_ENV_VAR = "UNCERTAIN_CONFORM_CAP"

_SKIP = object()  # sentinel: indeterminate event left out of a realization


@dataclass(frozen=True)
class EnumerationCaps:
    """Limits for realization enumeration; exceeding one raises CapExceeded."""

    max_events: int = 12
    max_realizations: int = 1_000_000

    @classmethod
    def from_env(cls) -> "EnumerationCaps":
        """Default caps, overridden by UNCERTAIN_CONFORM_CAP ("N" or "N,M")."""
        raw = os.environ.get(CAP_ENV_VAR)
        if not raw:
            return cls()
        parts = raw.split(",")
        try:
            if len(parts) == 1:
                return cls(max_events=int(parts[0]))
            if len(parts) == 2:
                return cls(max_events=int(parts[0]), max_realizations=int(parts[1]))
        except ValueError:
            pass
        raise ValidationError(f"{CAP_ENV_VAR} must be an integer or 'events,realizations': {raw!r}")


@dataclass(frozen=True)
class UncertainEvent:
    """One recorded event with uncertain activity, timestamp interval, indeterminacy."""

    id: str
    activities: frozenset[str]
    t_min: int
    t_max: int
    indeterminate: bool = False

    def __post_init__(self):
        object.__setattr__(self, "activities", frozenset(self.activities))
        if not self.activities:
            raise ValidationError(f"event {self.id!r} has an empty activity set")
        if self.t_min > self.t_max:
            raise ValidationError(f"event {self.id!r} has t_min > t_max")

    @property
    def is_certain(self) -> bool:
        """Single activity, point timestamp, determinate."""
        return len(self.activities) == 1 and self.t_min == self.t_max and not self.indeterminate

    def sorted_activities(self) -> tuple[str, ...]:
        return tuple(sorted(self.activities))


def certain_event(event_id: str, activity: str, timestamp: int) -> UncertainEvent:
    """Event with no uncertainty: one label, point timestamp, determinate."""
    return UncertainEvent(event_id, frozenset([activity]), timestamp, timestamp, False)


@dataclass(frozen=True)
class UncertainTrace:
    """A nonempty set of uncertain events sharing a case. Storage order is
    presentational only; ordering semantics come from the timestamps."""

    case_id: str
    events: tuple[UncertainEvent, ...]

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        if not self.events:
            raise ValidationError(f"trace {self.case_id!r} has no events")
        ids = [e.id for e in self.events]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValidationError(f"trace {self.case_id!r} has duplicate event ids: {dupes}")

    def __len__(self) -> int:
        return len(self.events)

    def event(self, event_id: str) -> UncertainEvent:
        for e in self.events:
            if e.id == event_id:
                return e
        raise KeyError(event_id)

    def activity_universe(self) -> frozenset[str]:
        out: set[str] = set()
        for e in self.events:
            out |= e.activities
        return frozenset(out)


@dataclass(frozen=True)
class UncertainLog:
    """A collection of uncertain traces with globally unique event ids."""

    traces: tuple[UncertainTrace, ...]

    def __post_init__(self):
        object.__setattr__(self, "traces", tuple(self.traces))
        seen: dict[str, str] = {}
        for trace in self.traces:
            for e in trace.events:
                if e.id in seen:
                    raise ValidationError(
                        f"event id {e.id!r} appears in both trace {seen[e.id]!r} and trace {trace.case_id!r}"
                    )
                seen[e.id] = trace.case_id

    def __len__(self) -> int:
        return len(self.traces)

    def __iter__(self) -> Iterator[UncertainTrace]:
        return iter(self.traces)


def precedes(e: UncertainEvent, e2: UncertainEvent) -> bool:
    """Strict partial order on events: e certainly happened before e2.

    Holds iff e's latest possible instant is before e2's earliest one; events
    with overlapping intervals are uncomparable.
    """
    return e.t_max < e2.t_min


def order_realizations(
    trace: UncertainTrace, caps: EnumerationCaps | None = None
) -> list[tuple[str, ...]]:
    """All event-id permutations that are linear extensions of the timestamp order.

    Deterministic: candidates are explored in lexicographic event-id order.
    """
    caps = caps or EnumerationCaps.from_env()
    if len(trace) > caps.max_events:
        raise CapExceeded(
            f"trace {trace.case_id!r} has {len(trace)} events, over the enumeration cap ({caps.max_events})"
        )
    events = sorted(trace.events, key=lambda e: e.id)
    preds: dict[str, set[str]] = {
        e.id: {p.id for p in events if precedes(p, e)} for e in events
    }
    out: list[tuple[str, ...]] = []
    prefix: list[str] = []
    placed: set[str] = set()

    def extend(remaining: list[UncertainEvent]) -> None:
        if not remaining:
            out.append(tuple(prefix))
            if len(out) > caps.max_realizations:
                raise CapExceeded(
                    f"trace {trace.case_id!r} exceeds the realization cap ({caps.max_realizations})"
                )
            return
        for i, e in enumerate(remaining):
            if preds[e.id] <= placed:
                prefix.append(e.id)
                placed.add(e.id)
                extend(remaining[:i] + remaining[i + 1 :])
                placed.discard(e.id)
                prefix.pop()

    extend(events)
    return out


def iter_realizations(
    trace: UncertainTrace, caps: EnumerationCaps | None = None
) -> Iterator[tuple[str, ...]]:
    """Distinct realizations in a deterministic order.

    For every order-realization, every choice of one label per event is
    expanded, with indeterminate events additionally allowed to be absent.
    Duplicates across orderings are suppressed (first occurrence wins).
    """
    caps = caps or EnumerationCaps.from_env()
    seen: set[tuple[str, ...]] = set()
    for order in order_realizations(trace, caps):
        options = []
        for event_id in order:
            e = trace.event(event_id)
            choices: list[object] = list(e.sorted_activities())
            if e.indeterminate:
                choices.append(_SKIP)
            options.append(choices)
        for combo in itertools.product(*options):
            seq = tuple(a for a in combo if a is not _SKIP)
            if seq in seen:
                continue
            seen.add(seq)
            if len(seen) > caps.max_realizations:
                raise CapExceeded(
                    f"trace {trace.case_id!r} exceeds the realization cap ({caps.max_realizations})"
                )
            yield seq


def realizations(trace: UncertainTrace, caps: EnumerationCaps | None = None) -> set[tuple[str, ...]]:
    """The set of activity sequences the uncertain trace may stand for."""
    return set(iter_realizations(trace, caps))


def count_realizations(log: UncertainLog, caps: EnumerationCaps | None = None) -> int:
    """Sum of per-trace realization counts; cap errors name the offending case."""
    total = 0
    for trace in log:
        try:
            total += sum(1 for _ in iter_realizations(trace, caps))
        except CapExceeded as exc:
            raise CapExceeded(f"case {trace.case_id!r}: {exc}") from exc
    return total


def certain_view(trace: UncertainTrace) -> tuple[str, ...] | None:
    """The unique realization of a trace without uncertainty, else None.

    Requires singleton activity sets, determinate events, and pairwise
    distinct point timestamps (equal points leave the order ambiguous).
    """
    if not all(e.is_certain for e in trace.events):
        return None
    stamps = [e.t_min for e in trace.events]
    if len(set(stamps)) != len(stamps):
        return None
    ordered = sorted(trace.events, key=lambda e: e.t_min)
    return tuple(next(iter(e.activities)) for e in ordered)
