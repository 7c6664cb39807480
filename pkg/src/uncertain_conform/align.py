"""Optimal alignments and conformance bounds for uncertain traces.

The search runs over the reachable markings of the product of the trace-side
net (event net or behavior net) and the model. Both sides are first compiled
to reachability graphs; model-move shortest paths are precomputed as a
min-plus closure so that consuming one trace symbol is a vectorized relax
step. This is a uniform-cost search in disguise: no heuristic, exact costs.

The upper bound is computed the honest way, by enumerating realizations and
aligning each one (with a bounded memoization cache); the lower bound goes
through the behavior net and needs a single search.
"""
from __future__ import annotations

import heapq
import itertools
import threading
from collections import OrderedDict
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from weakref import WeakKeyDictionary

import numpy as np

from .behavior import behavior_net
from .errors import CapExceeded, ValidationError
from .events import EnumerationCaps, UncertainLog, UncertainTrace, iter_realizations
from .petri import Marking, SystemNet, _fire_unchecked, event_net

#: Markings explored per net before giving up (guards unbounded nets).
STATE_CAP = 200_000

NO_MOVE = ">>"
TAU_MARKER = "tau"


@dataclass(frozen=True)
class CostFunction:
    """Per-move-class costs. Synchronous moves and invisible model moves are
    always free; only the two deviation classes are configurable."""

    log_move: int = 1
    model_move: int = 1

    def __post_init__(self):
        if self.log_move < 0 or self.model_move < 0:
            raise ValidationError("move costs must be nonnegative")


STANDARD_COST = CostFunction()


@dataclass(frozen=True)
class Move:
    """One alignment move: log side, model side, or both (synchronous)."""

    log_label: str | None
    model_label: str | None
    model_transition: str | None

    def __post_init__(self):
        if self.log_label is None and self.model_transition is None:
            raise ValidationError("a move needs a log side or a model side")

    @property
    def is_sync(self) -> bool:
        return self.log_label is not None and self.model_transition is not None

    @property
    def is_log_move(self) -> bool:
        return self.model_transition is None

    @property
    def is_model_move(self) -> bool:
        return self.log_label is None

    @property
    def is_invisible(self) -> bool:
        return self.is_model_move and self.model_label is None

    def cost(self, cost: CostFunction) -> int:
        if self.is_sync or self.is_invisible:
            return 0
        return cost.log_move if self.is_log_move else cost.model_move

    def as_dict(self) -> dict:
        if self.is_model_move:
            model_label = TAU_MARKER if self.model_label is None else self.model_label
        else:
            model_label = self.model_label if self.model_label is not None else NO_MOVE
        return {
            "log": self.log_label if self.log_label is not None else NO_MOVE,
            "model_label": model_label,
            "model_transition": self.model_transition,
        }


@dataclass(frozen=True)
class Alignment:
    """A sequence of legal moves with its total cost under the active costs."""

    moves: tuple[Move, ...]
    cost: int

    def log_projection(self) -> tuple[str, ...]:
        return tuple(m.log_label for m in self.moves if m.log_label is not None)

    def model_projection(self) -> tuple[str, ...]:
        return tuple(m.model_transition for m in self.moves if m.model_transition is not None)

    def as_dict(self) -> dict:
        return {"cost": self.cost, "moves": [m.as_dict() for m in self.moves]}


class ReachabilityGraph:
    """Explicit reachable-marking graph of a system net (BFS order, deterministic)."""

    def __init__(self, sn: SystemNet, state_cap: int = STATE_CAP):
        net = sn.net
        nodes: list[Marking] = [sn.initial_marking]
        index: dict[Marking, int] = {sn.initial_marking: 0}
        edges: list[list[tuple[str, str | None, int]]] = []
        frontier = 0
        order = net._sorted_transitions
        presets = net._pre
        while frontier < len(nodes):
            marking = nodes[frontier]
            counts = marking._counts  # zero counts are never stored
            out: list[tuple[str, str | None, int]] = []
            for t in order:
                if not all(p in counts for p in presets[t]):
                    continue
                nxt = _fire_unchecked(net, marking, t)
                if nxt not in index:
                    if len(nodes) >= state_cap:
                        raise CapExceeded(f"reachability exploration exceeded the state cap ({state_cap})")
                    index[nxt] = len(nodes)
                    nodes.append(nxt)
                out.append((t, net.label(t), index[nxt]))
            edges.append(out)
            frontier += 1

        self.sn = sn
        self.nodes = nodes
        self.index = index
        self.edges = edges
        self.n = len(nodes)
        self.initial = 0
        self.final: int | None = index.get(sn.final_marking)
        self.topo_order = self._topological_order()
        self._sync: dict[str, tuple[np.ndarray, np.ndarray, tuple[str, ...]]] | None = None
        self._in_edges: list[list[tuple[int, str, str | None]]] | None = None
        self._closures: dict[CostFunction, "_Closure"] = {}

    def _topological_order(self) -> list[int] | None:
        indeg = [0] * self.n
        for out in self.edges:
            for _, _, dst in out:
                indeg[dst] += 1
        ready = [v for v in range(self.n) if indeg[v] == 0]
        order: list[int] = []
        while ready:
            v = ready.pop()
            order.append(v)
            for _, _, dst in self.edges[v]:
                indeg[dst] -= 1
                if indeg[dst] == 0:
                    ready.append(dst)
        return order if len(order) == self.n else None

    def sync_edges(self) -> dict[str, tuple[np.ndarray, np.ndarray, tuple[str, ...]]]:
        """Per visible label: (source nodes, target nodes, transition ids)."""
        if self._sync is None:
            raw: dict[str, list[tuple[int, int, str]]] = {}
            for src, out in enumerate(self.edges):
                for tid, label, dst in out:
                    if label is not None:
                        raw.setdefault(label, []).append((src, dst, tid))
            self._sync = {
                label: (
                    np.array([s for s, _, _ in triples], dtype=np.intp),
                    np.array([d for _, d, _ in triples], dtype=np.intp),
                    tuple(t for _, _, t in triples),
                )
                for label, triples in raw.items()
            }
        return self._sync

    def in_edges(self) -> list[list[tuple[int, str, str | None]]]:
        if self._in_edges is None:
            rev: list[list[tuple[int, str, str | None]]] = [[] for _ in range(self.n)]
            for src, out in enumerate(self.edges):
                for tid, label, dst in out:
                    rev[dst].append((src, tid, label))
            self._in_edges = rev
        return self._in_edges

    def closure(self, cost: CostFunction) -> "_Closure":
        if cost not in self._closures:
            self._closures[cost] = _Closure(self, cost)
        return self._closures[cost]


class _Closure:
    """All-pairs cheapest model-move paths over a reachability graph."""

    def __init__(self, rg: ReachabilityGraph, cost: CostFunction):
        self.rg = rg
        self.cost = cost
        n = rg.n
        dist = np.full((n, n), np.inf)
        dist[np.arange(n), np.arange(n)] = 0.0
        if rg.topo_order is not None:
            for u in reversed(rg.topo_order):
                row = dist[u]
                for _, label, dst in rg.edges[u]:
                    c = 0.0 if label is None else float(cost.model_move)
                    np.minimum(row, c + dist[dst], out=row)
        else:
            for source in range(n):
                dist[source] = self._dijkstra_row(source)
        self.dist = dist

    def _dijkstra_row(self, source: int) -> np.ndarray:
        rg, cost = self.rg, self.cost
        row = np.full(rg.n, np.inf)
        row[source] = 0.0
        heap = [(0.0, source)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > row[u]:
                continue
            for _, label, dst in rg.edges[u]:
                c = d + (0.0 if label is None else float(cost.model_move))
                if c < row[dst]:
                    row[dst] = c
                    heapq.heappush(heap, (c, dst))
        return row

    def expand(self, u: int, v: int) -> list[Move]:
        """Reconstruct one cheapest model-move path u -> v as explicit moves."""
        rg, cost, dist = self.rg, self.cost, self.dist
        moves: list[Move] = []
        guard = 0
        while u != v:
            for tid, label, dst in rg.edges[u]:
                c = 0.0 if label is None else float(cost.model_move)
                if c + dist[dst, v] == dist[u, v]:
                    moves.append(Move(None, label, tid))
                    u = dst
                    break
            else:
                raise AssertionError("closure path reconstruction lost its way")
            guard += 1
            if guard > rg.n + 1:
                raise AssertionError("closure path longer than the state space")
        return moves


_rg_cache: "WeakKeyDictionary[SystemNet, ReachabilityGraph]" = WeakKeyDictionary()
_rg_lock = threading.Lock()


def reachability_graph(sn: SystemNet, state_cap: int = STATE_CAP) -> ReachabilityGraph:
    """Cached reachability graph of a system net."""
    with _rg_lock:
        rg = _rg_cache.get(sn)
    if rg is None:
        rg = ReachabilityGraph(sn, state_cap)
        with _rg_lock:
            _rg_cache[sn] = rg
    return rg


def _model_structures(model: SystemNet, cost: CostFunction) -> tuple[ReachabilityGraph, _Closure]:
    rg = reachability_graph(model)
    if rg.final is None:
        raise ValidationError("model has empty language: its final marking is unreachable")
    return rg, rg.closure(cost)


def prepare_model(model: SystemNet, cost: CostFunction = STANDARD_COST) -> None:
    """Precompute and cache the model-side search structures."""
    _model_structures(model, cost)


def _sequence_cost(seq: Sequence[str], rg: ReachabilityGraph, closure: _Closure, cost: CostFunction) -> int:
    """Optimal alignment cost of a plain activity sequence against the model."""
    sync = rg.sync_edges()
    row = closure.dist[rg.initial].copy()
    log_cost = float(cost.log_move)
    for label in seq:
        shifted = row + log_cost
        pair = sync.get(label)
        if pair is not None:
            np.minimum.at(shifted, pair[1], row[pair[0]])
        row = (shifted[:, None] + closure.dist).min(axis=0)
    value = row[rg.final]
    if not np.isfinite(value):
        raise ValidationError("model has empty language: its final marking is unreachable")
    return int(value)


def _product_alignment(
    left: ReachabilityGraph,
    model: ReachabilityGraph,
    closure: _Closure,
    cost: CostFunction,
) -> tuple[int, tuple[Move, ...]]:
    """Cheapest product run of the left net (trace side) and the model.

    Left invisible transitions (behavior-net τ skips) cost nothing and leave
    no move in the witness: the witness relates the chosen realization to the
    model.
    """
    if left.topo_order is None:
        raise ValidationError("trace-side net must be acyclic")
    if left.final is None:
        raise ValidationError("trace-side net cannot reach its final marking")
    sync = model.sync_edges()
    dist = closure.dist
    B, V = left.n, model.n
    pre = np.full((B, V), np.inf)
    post = np.full((B, V), np.inf)
    pre[left.initial, model.initial] = 0.0
    in_edges = left.in_edges()
    log_cost = float(cost.log_move)

    order = [b for b in left.topo_order]
    for b in order:
        acc = pre[b]
        for bsrc, _tid, label in in_edges[b]:
            base = post[bsrc]
            np.minimum(acc, base + (0.0 if label is None else log_cost), out=acc)
            if label is not None:
                pair = sync.get(label)
                if pair is not None:
                    np.minimum.at(acc, pair[1], base[pair[0]])
        post[b] = (acc[:, None] + dist).min(axis=0)

    total = post[left.final, model.final]
    if not np.isfinite(total):
        raise ValidationError("no complete product run exists")

    # Walk backwards, peeling one transfer (sync/log/invisible-left) plus the
    # model-move segment that followed it, until the initial pair is reached.
    moves_rev: list[Move] = []
    sync_by_label_dst: dict[tuple[str, int], list[tuple[int, str]]] = {}
    for label, (us, vs, tids) in sync.items():
        for u, v, tid in zip(us.tolist(), vs.tolist(), tids):
            sync_by_label_dst.setdefault((label, v), []).append((u, tid))

    b, v = left.final, model.final
    while True:
        candidates = pre[b] + dist[:, v]
        u = int(np.argmin(candidates))
        for move in reversed(closure.expand(u, v)):
            moves_rev.append(move)
        if b == left.initial and u == model.initial:
            break
        value = pre[b, u]
        found = False
        # Tie-break order: synchronous, then invisible left, then log move.
        for bsrc, _tid, label in in_edges[b]:
            if label is None:
                continue
            for msrc, mtid in sync_by_label_dst.get((label, u), ()):
                if post[bsrc, msrc] == value:
                    moves_rev.append(Move(label, label, mtid))
                    b, v = bsrc, msrc
                    found = True
                    break
            if found:
                break
        if not found:
            for bsrc, _tid, label in in_edges[b]:
                if label is None and post[bsrc, u] == value:
                    b, v = bsrc, u
                    found = True
                    break
        if not found:
            for bsrc, _tid, label in in_edges[b]:
                if label is not None and post[bsrc, u] + log_cost == value:
                    moves_rev.append(Move(label, None, None))
                    b, v = bsrc, u
                    found = True
                    break
        if not found:
            raise AssertionError("witness reconstruction found no producing move")

    return int(total), tuple(reversed(moves_rev))


def optimal_alignment(
    trace: Sequence[str], model: SystemNet, cost: CostFunction = STANDARD_COST
) -> Alignment:
    """A minimum-cost alignment of a certain trace against the model.

    Deterministic for fixed inputs. Raises if the model's final marking is
    unreachable. The empty trace aligns through model moves alone.
    """
    trace = list(trace)
    rg, closure = _model_structures(model, cost)
    if not trace:
        moves = tuple(closure.expand(rg.initial, rg.final))
        total = sum(m.cost(cost) for m in moves)
        return Alignment(moves, total)
    left = reachability_graph(event_net(trace))
    total, moves = _product_alignment(left, rg, closure, cost)
    return Alignment(moves, total)


class AlignmentCostCache:
    """Bounded LRU of optimal alignment costs, keyed by model and realization."""

    def __init__(self, maxsize: int = 100_000):
        self.maxsize = maxsize
        self._data: OrderedDict[tuple, int] = OrderedDict()
        self._lock = threading.Lock()
        self._tokens: "WeakKeyDictionary[SystemNet, int]" = WeakKeyDictionary()
        self._counter = itertools.count()

    def _token(self, model: SystemNet) -> int:
        token = self._tokens.get(model)
        if token is None:
            token = next(self._counter)
            self._tokens[model] = token
        return token

    def lookup(self, model: SystemNet, cost: CostFunction, seq: tuple[str, ...]) -> int | None:
        key = (self._token(model), cost, seq)
        with self._lock:
            value = self._data.get(key)
            if value is not None:
                self._data.move_to_end(key)
            return value

    def store(self, model: SystemNet, cost: CostFunction, seq: tuple[str, ...], value: int) -> None:
        key = (self._token(model), cost, seq)
        with self._lock:
            self._data[key] = value
            self._data.move_to_end(key)
            while len(self._data) > self.maxsize:
                self._data.popitem(last=False)

    def __len__(self) -> int:
        return len(self._data)

    def clear(self) -> None:
        with self._lock:
            self._data.clear()


#: Process-wide cache consulted by upper_bound.
GLOBAL_CACHE = AlignmentCostCache()


def lower_bound(
    trace: UncertainTrace, model: SystemNet, cost: CostFunction = STANDARD_COST
) -> tuple[int, Alignment]:
    """Best-case conformance cost over all realizations, with a witness.

    One search over the product of the trace's behavior net and the model;
    the witness's log projection is the realization achieving the minimum.
    """
    rg, closure = _model_structures(model, cost)
    left = reachability_graph(behavior_net(trace))
    total, moves = _product_alignment(left, rg, closure, cost)
    return total, Alignment(moves, total)


def lower_bound_bruteforce(
    trace: UncertainTrace,
    model: SystemNet,
    cost: CostFunction = STANDARD_COST,
    caps: EnumerationCaps | None = None,
) -> int:
    """Best-case cost by enumerating every realization and aligning each.

    The oracle counterpart of :func:`lower_bound`; returns only the cost and
    deliberately uses no memoization.
    """
    rg, closure = _model_structures(model, cost)
    best: int | None = None
    for seq in iter_realizations(trace, caps):
        value = _sequence_cost(seq, rg, closure, cost)
        if best is None or value < best:
            best = value
    assert best is not None  # traces are nonempty, so at least one realization exists
    return best


def _worst_realization(
    seqs: Iterable[tuple[str, ...]],
    model: SystemNet,
    rg: ReachabilityGraph,
    closure: _Closure,
    cost: CostFunction,
    cache: AlignmentCostCache,
) -> tuple[int, tuple[str, ...]]:
    worst: int | None = None
    worst_seq: tuple[str, ...] | None = None
    for seq in seqs:
        value = cache.lookup(model, cost, seq)
        if value is None:
            value = _sequence_cost(seq, rg, closure, cost)
            cache.store(model, cost, seq, value)
        if worst is None or value > worst:
            worst, worst_seq = value, seq
    assert worst is not None and worst_seq is not None  # traces are nonempty
    return worst, worst_seq


def upper_bound(
    trace: UncertainTrace,
    model: SystemNet,
    cost: CostFunction = STANDARD_COST,
    caps: EnumerationCaps | None = None,
    cache: AlignmentCostCache | None = None,
) -> tuple[int, Alignment]:
    """Worst-case conformance cost over all realizations, with a witness.

    Enumerates realizations (bounded by ``caps``), consulting the memoization
    cache per realization. The witness aligns the first realization attaining
    the maximum, in enumeration order.
    """
    cache = GLOBAL_CACHE if cache is None else cache
    rg, closure = _model_structures(model, cost)
    worst, worst_seq = _worst_realization(
        iter_realizations(trace, caps), model, rg, closure, cost, cache
    )
    return worst, optimal_alignment(worst_seq, model, cost)


@dataclass(frozen=True)
class BoundsReport:
    """Per-trace conformance bounds with witness alignments."""

    case_id: str
    lower_cost: int | None
    upper_cost: int | None
    lower_witness: Alignment | None
    upper_witness: Alignment | None
    realization_count: int | None
    error: str | None = None

    def __post_init__(self):
        if self.lower_cost is not None and self.upper_cost is not None:
            if self.lower_cost > self.upper_cost:
                raise ValidationError(
                    f"case {self.case_id!r}: lower bound {self.lower_cost} exceeds upper bound {self.upper_cost}"
                )

    def as_dict(self) -> dict:
        return {
            "case_id": self.case_id,
            "lower_cost": self.lower_cost,
            "upper_cost": self.upper_cost,
            "lower_witness": self.lower_witness.as_dict() if self.lower_witness else None,
            "upper_witness": self.upper_witness.as_dict() if self.upper_witness else None,
            "realization_count": self.realization_count,
            "error": self.error,
        }


@dataclass(frozen=True)
class LogBounds:
    """Bounds for every trace of a log plus the log-level totals."""

    reports: tuple[BoundsReport, ...]
    total_lower: int
    total_upper: int


def log_bounds(
    log: UncertainLog,
    model: SystemNet,
    cost: CostFunction = STANDARD_COST,
    caps: EnumerationCaps | None = None,
    cache: AlignmentCostCache | None = None,
) -> LogBounds:
    """Bounds for each trace; per-trace cap errors are recorded, not fatal.

    When only the (enumeration-bound) upper side caps, the lower bound is
    still reported. Totals sum whatever bounds were computed.
    """
    cache = GLOBAL_CACHE if cache is None else cache
    rg, closure = _model_structures(model, cost)
    reports: list[BoundsReport] = []
    total_lower = 0
    total_upper = 0
    for trace in log:
        low: int | None = None
        low_witness: Alignment | None = None
        try:
            low, low_witness = lower_bound(trace, model, cost)
            realization_list = list(iter_realizations(trace, caps))
            worst, worst_seq = _worst_realization(
                realization_list, model, rg, closure, cost, cache
            )
            report = BoundsReport(
                case_id=trace.case_id,
                lower_cost=low,
                upper_cost=worst,
                lower_witness=low_witness,
                upper_witness=optimal_alignment(worst_seq, model, cost),
                realization_count=len(realization_list),
            )
            total_upper += worst
        except CapExceeded as exc:
            report = BoundsReport(
                case_id=trace.case_id,
                lower_cost=low,
                upper_cost=None,
                lower_witness=low_witness,
                upper_witness=None,
                realization_count=None,
                error=str(exc),
            )
        if low is not None:
            total_lower += low
        reports.append(report)
    return LogBounds(tuple(reports), total_lower, total_upper)
