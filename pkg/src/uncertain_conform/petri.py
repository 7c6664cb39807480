"""Labeled Petri nets: token-game semantics, event nets, product nets, bounded language.

Nets and markings are immutable values; every operation is a pure function of
its inputs, so they can be shared freely across threads.
"""
from __future__ import annotations

from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from typing import Union

from .errors import CapExceeded, ValidationError

#: Display symbol for unlabeled (invisible) transitions. Never a valid label.
TAU = "τ"

#: Labels that cannot be assigned to transitions (reserved by the alignment
#: JSON encoding and the τ convention).
RESERVED_LABELS = frozenset({TAU, "tau", ">>"})

#: Placeholder for "no move" in product-net transition identifiers.
NO_MOVE = ">>"


class Marking(Mapping[str, int]):
    """Immutable multiset of places. Missing places count 0, like a Counter."""

    __slots__ = ("_counts", "_hash")

    def __init__(self, counts: Union[Mapping[str, int], Iterable[str], None] = None):
        items: dict[str, int] = {}
        if counts is None:
            pass
        elif isinstance(counts, Mapping):
            for place, count in counts.items():
                if not isinstance(count, int) or count < 0:
                    raise ValidationError(f"marking count for {place!r} must be a nonnegative integer")
                if count:
                    items[place] = count
        else:
            for place in counts:
                items[place] = items.get(place, 0) + 1
        object.__setattr__(self, "_counts", items)
        object.__setattr__(self, "_hash", hash(frozenset(items.items())))

    def __setattr__(self, name, value):
        raise AttributeError("Marking is immutable")

    @classmethod
    def _raw(cls, counts: dict[str, int]) -> "Marking":
        """Internal fast path: counts must already be positive ints, no zeros."""
        marking = object.__new__(cls)
        object.__setattr__(marking, "_counts", counts)
        object.__setattr__(marking, "_hash", hash(frozenset(counts.items())))
        return marking

    def __getitem__(self, place: str) -> int:
        return self._counts.get(place, 0)

    def __iter__(self) -> Iterator[str]:
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, Marking):
            return self._counts == other._counts
        return NotImplemented

    def __repr__(self) -> str:
        inside = ", ".join(
            p if c == 1 else f"{p}^{c}" for p, c in sorted(self._counts.items())
        )
        return f"[{inside}]"

    def total(self) -> int:
        """Total number of tokens."""
        return sum(self._counts.values())

    def key(self) -> tuple[tuple[str, int], ...]:
        """Canonical hashable form (sorted place/count pairs)."""
        return tuple(sorted(self._counts.items()))


class PetriNet:
    """A labeled Petri net. Transitions absent from ``labels`` are invisible (τ).

    Treated as an immutable value after construction; equality is identity,
    which lets derived structures (reachability graphs) be cached per net.
    """

    def __init__(
        self,
        places: Iterable[str],
        transitions: Iterable[str],
        arcs: Iterable[tuple[str, str]],
        labels: Mapping[str, str],
    ):
        self.places: frozenset[str] = frozenset(places)
        self.transitions: frozenset[str] = frozenset(transitions)
        self.arcs: frozenset[tuple[str, str]] = frozenset((s, t) for s, t in arcs)
        self.labels: dict[str, str] = dict(labels)
        self._validate()
        pre: dict[str, list[str]] = {t: [] for t in self.transitions}
        post: dict[str, list[str]] = {t: [] for t in self.transitions}
        for src, dst in sorted(self.arcs):
            if dst in pre:
                pre[dst].append(src)
            if src in post:
                post[src].append(dst)
        self._pre = {t: tuple(v) for t, v in pre.items()}
        self._post = {t: tuple(v) for t, v in post.items()}
        self._sorted_transitions = tuple(sorted(self.transitions))

    def __repr__(self) -> str:
        return (
            f"PetriNet({len(self.places)} places, {len(self.transitions)} transitions, "
            f"{len(self.arcs)} arcs, {len(self.labels)} visible)"
        )

    @classmethod
    def _trusted(
        cls,
        places: Iterable[str],
        labels: Mapping[str, str],
        pre: Mapping[str, tuple[str, ...]],
        post: Mapping[str, tuple[str, ...]],
    ) -> "PetriNet":
        """Internal constructor for nets built by this package: the flow maps
        are taken as-is and no validation runs (the builders are covered by
        structural tests)."""
        net = object.__new__(cls)
        net.places = frozenset(places)
        net.transitions = frozenset(pre)
        net.arcs = frozenset(
            [(p, t) for t, ps in pre.items() for p in ps]
            + [(t, p) for t, ps in post.items() for p in ps]
        )
        net.labels = dict(labels)
        net._pre = dict(pre)
        net._post = dict(post)
        net._sorted_transitions = tuple(sorted(net.transitions))
        return net

    def _validate(self) -> None:
        if not self.places or not self.transitions:
            raise ValidationError("a net needs at least one place and one transition")
        if self.places & self.transitions:
            clash = sorted(self.places & self.transitions)
            raise ValidationError(f"places and transitions must be disjoint, both contain: {clash}")
        for src, dst in self.arcs:
            if src in self.places and dst in self.transitions:
                continue
            if src in self.transitions and dst in self.places:
                continue
            raise ValidationError(f"arc ({src!r}, {dst!r}) must connect a place and a transition of the net")
        for t, label in self.labels.items():
            if t not in self.transitions:
                raise ValidationError(f"label assigned to unknown transition {t!r}")
            if label in RESERVED_LABELS:
                raise ValidationError(f"transition {t!r} uses reserved label {label!r}; invisibility is expressed by omitting the label")

    def preset(self, t: str) -> tuple[str, ...]:
        """Input places of transition ``t``, in sorted order."""
        return self._pre[t]

    def postset(self, t: str) -> tuple[str, ...]:
        """Output places of transition ``t``, in sorted order."""
        return self._post[t]

    def label(self, t: str) -> str | None:
        """Visible label of ``t``, or None when invisible."""
        return self.labels.get(t)

    def visible_transitions(self) -> frozenset[str]:
        return frozenset(self.labels)


@dataclass(frozen=True, eq=False)
class SystemNet:
    """A labeled Petri net together with its initial and final markings."""

    net: PetriNet
    initial_marking: Marking
    final_marking: Marking

    def __post_init__(self):
        for name, marking in (("initial", self.initial_marking), ("final", self.final_marking)):
            unknown = set(marking) - self.net.places
            if unknown:
                raise ValidationError(f"{name} marking uses unknown places: {sorted(unknown)}")


def enabled(net: PetriNet, marking: Marking, t: str) -> bool:
    """True iff every input place of ``t`` holds at least one token."""
    if t not in net.transitions:
        raise ValidationError(f"unknown transition {t!r}")
    return all(marking[p] >= 1 for p in net.preset(t))


def fire(net: PetriNet, marking: Marking, t: str) -> Marking:
    """Fire ``t``, returning the successor marking. The input marking is unchanged."""
    if not enabled(net, marking, t):
        raise ValidationError(f"transition {t!r} is not enabled in {marking}")
    return _fire_unchecked(net, marking, t)


def _fire_unchecked(net: PetriNet, marking: Marking, t: str) -> Marking:
    counts = dict(marking._counts)
    for p in net._pre[t]:
        if counts[p] == 1:
            del counts[p]
        else:
            counts[p] -= 1
    for p in net._post[t]:
        counts[p] = counts.get(p, 0) + 1
    return Marking._raw(counts)


def enabled_transitions(net: PetriNet, marking: Marking) -> list[str]:
    """All enabled transitions, sorted for deterministic iteration."""
    pre = net._pre
    counts = marking._counts  # zero counts are never stored
    return [t for t in net._sorted_transitions if all(p in counts for p in pre[t])]


def event_net(trace: Iterable[str]) -> SystemNet:
    """Sequence-shaped net whose language is exactly ``{trace}``.

    Places p1..p(n+1), one visible transition per event; rejects the empty
    trace (its net would have equal initial and final markings).
    """
    labels = list(trace)
    if not labels:
        raise ValidationError("cannot build an event net for an empty trace")
    n = len(labels)
    places = [f"p{i}" for i in range(1, n + 2)]
    transitions = [f"t{i}" for i in range(1, n + 1)]
    pre = {transitions[i]: (places[i],) for i in range(n)}
    post = {transitions[i]: (places[i + 1],) for i in range(n)}
    net = PetriNet._trusted(places, dict(zip(transitions, labels)), pre, post)
    return SystemNet(net, Marking([places[0]]), Marking([places[-1]]))


def product_net(s1: SystemNet, s2: SystemNet) -> SystemNet:
    """Synchronous product of two system nets.

    Component identifiers are qualified with a side tag ("l:"/"r:") so the
    construction never collides; transition identifiers record their origin
    pair, e.g. "(t1,>>)", "(>>,t2)", "(t1,t2)".
    """
    n1, n2 = s1.net, s2.net
    lp = {p: f"l:{p}" for p in n1.places}
    rp = {p: f"r:{p}" for p in n2.places}

    places = list(lp.values()) + list(rp.values())
    transitions: list[str] = []
    arcs: list[tuple[str, str]] = []
    labels: dict[str, str] = {}

    def add(tid: str, label: str | None, pre: Iterable[str], post: Iterable[str]) -> None:
        transitions.append(tid)
        if label is not None:
            labels[tid] = label
        for p in pre:
            arcs.append((p, tid))
        for p in post:
            arcs.append((tid, p))

    for t in sorted(n1.transitions):
        add(f"({t},{NO_MOVE})", n1.label(t), (lp[p] for p in n1.preset(t)), (lp[p] for p in n1.postset(t)))
    for t in sorted(n2.transitions):
        add(f"({NO_MOVE},{t})", n2.label(t), (rp[p] for p in n2.preset(t)), (rp[p] for p in n2.postset(t)))
    for t1 in sorted(n1.transitions):
        label = n1.label(t1)
        if label is None:
            continue
        for t2 in sorted(n2.transitions):
            if n2.label(t2) != label:
                continue
            add(
                f"({t1},{t2})",
                label,
                [lp[p] for p in n1.preset(t1)] + [rp[p] for p in n2.preset(t2)],
                [lp[p] for p in n1.postset(t1)] + [rp[p] for p in n2.postset(t2)],
            )

    initial = {lp[p]: c for p, c in s1.initial_marking.items()}
    initial.update({rp[p]: c for p, c in s2.initial_marking.items()})
    final = {lp[p]: c for p, c in s1.final_marking.items()}
    final.update({rp[p]: c for p, c in s2.final_marking.items()})
    net = PetriNet(places, transitions, arcs, labels)
    return SystemNet(net, Marking(initial), Marking(final))


def language(sn: SystemNet, max_len: int, max_firings: int = 10_000) -> set[tuple[str, ...]]:
    """Visible label sequences of complete firing sequences, up to ``max_len``.

    τ firings are excluded from the projection but still bounded by the total
    firing cap, which guards against nets with τ loops.
    """
    if max_len < 0:
        raise ValidationError("max_len must be nonnegative")
    net = sn.net
    final = sn.final_marking
    results: set[tuple[str, ...]] = set()
    fired = 0

    def explore(marking: Marking, word: tuple[str, ...], silent_seen: frozenset[Marking]) -> None:
        nonlocal fired
        if marking == final:
            results.add(word)
        for t in enabled_transitions(net, marking):
            label = net.label(t)
            if label is None:
                nxt = fire(net, marking, t)
                if nxt in silent_seen:
                    continue  # τ loop: no visible progress since last visit
                fired += 1
                if fired > max_firings:
                    raise CapExceeded(f"language exploration exceeded the firing cap ({max_firings})")
                explore(nxt, word, silent_seen | {nxt})
            elif len(word) < max_len:
                fired += 1
                if fired > max_firings:
                    raise CapExceeded(f"language exploration exceeded the firing cap ({max_firings})")
                nxt = fire(net, marking, t)
                explore(nxt, word + (label,), frozenset((nxt,)))

    explore(sn.initial_marking, (), frozenset((sn.initial_marking,)))
    return results


def is_perfectly_fitting(log: Iterable[Iterable[str]], sn: SystemNet) -> bool:
    """True iff every trace replays on ``sn`` with optimal alignment cost 0."""
    from .align import STANDARD_COST, optimal_alignment  # local import: align builds on this module

    return all(optimal_alignment(list(trace), sn, STANDARD_COST).cost == 0 for trace in log)
