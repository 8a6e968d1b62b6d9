"""Structural controllability verification and driver node selection.

A driver set renders the system structurally controllable when every state
node is accessible from the drivers and the signal expansion, extended with a
singleton input per driver, has a matching covering every state node.
"""

from __future__ import annotations

import gc
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Iterable, Iterator

from .errors import CapacityError, ValidationError
from .hypergraph import DirectedHypergraph, check_nodes
from .matching import (
    _require_uncontrolled,
    hopcroft_karp,
    matching_lower_bound,
    signal_expansion,
    uncovered_with_drivers,
)
from .reach import IncrementalReach, walk_reach

METHODS = ("matching", "greedy", "mag", "optimal")


@dataclass
class SelectionResult:
    drivers: tuple[int, ...]
    method: str
    lower_bound: int
    controllable: bool
    runtime: float
    steps: list[tuple[int, int]] = field(default_factory=list)

    @property
    def num_drivers(self) -> int:
        return len(self.drivers)

    def to_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "drivers": [v + 1 for v in self.drivers],
            "num_drivers": self.num_drivers,
            "lower_bound": self.lower_bound,
            "controllable": self.controllable,
            "runtime_ms": round(self.runtime * 1000.0, 3),
            "steps": [{"node": v + 1, "gain": g} for v, g in self.steps],
        }


@contextmanager
def _gc_paused() -> Iterator[None]:
    """Pause the cyclic collector; the selection engines allocate many containers but no cycles."""
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()


def verify_structural_controllability(
    h: DirectedHypergraph, drivers: Iterable[int]
) -> tuple[bool, dict[str, Any]]:
    """Check accessibility and absence of dilations for ``drivers``.

    Diagnostics hold 0-based ``inaccessible`` and ``uncovered`` node lists.  For
    odd ``k`` (even-degree dynamics) a pass certifies strong accessibility only,
    flagged as ``strong_accessibility_only``.
    """
    drivers = check_nodes(h, drivers)
    acc = walk_reach(h, drivers).accessible
    inaccessible = sorted(set(range(h.n)) - acc)
    uncovered = sorted(uncovered_with_drivers(h, drivers))
    ok = not inaccessible and not uncovered
    return ok, {
        "inaccessible": inaccessible,
        "uncovered": uncovered,
        "strong_accessibility_only": h.k % 2 == 1,
    }


def is_structurally_controllable(h: DirectedHypergraph, drivers: Iterable[int]) -> bool:
    return verify_structural_controllability(h, drivers)[0]


def select_matching_only(h: DirectedHypergraph) -> SelectionResult:
    """Drivers = nodes left uncovered by a maximum matching; may be insufficient."""
    _require_uncontrolled(h)
    with _gc_paused():
        t0 = time.perf_counter()
        lb, uncovered = matching_lower_bound(h)
        drivers = tuple(sorted(uncovered))
        runtime = time.perf_counter() - t0
    ok, _ = verify_structural_controllability(h, drivers)
    return SelectionResult(drivers, "matching", lb, ok, runtime)


def _greedy_complete(engine: IncrementalReach, drivers: list[int], steps: list[tuple[int, int]]) -> None:
    while not engine.complete:
        v, gain = engine.best()
        engine.add(v)
        drivers.append(v)
        steps.append((v, gain))


def select_mag(h: DirectedHypergraph) -> SelectionResult:
    """Matching-augmented greedy: uncovered nodes first, then greedy accessibility completion."""
    _require_uncontrolled(h)
    with _gc_paused():
        t0 = time.perf_counter()
        lb, uncovered = matching_lower_bound(h)
        drivers = sorted(uncovered)
        engine = IncrementalReach(h, drivers)
        steps: list[tuple[int, int]] = []
        _greedy_complete(engine, drivers, steps)
        runtime = time.perf_counter() - t0
    return SelectionResult(tuple(sorted(drivers)), "mag", lb, True, runtime, steps)


def select_greedy(h: DirectedHypergraph) -> SelectionResult:
    """Accessibility-greedy from the empty set, then dilation repair with uncovered nodes."""
    _require_uncontrolled(h)
    with _gc_paused():
        t0 = time.perf_counter()
        drivers: list[int] = []
        steps: list[tuple[int, int]] = []
        engine = IncrementalReach(h)
        _greedy_complete(engine, drivers, steps)
        while True:
            extra = sorted(uncovered_with_drivers(h, drivers))
            if not extra:
                break
            drivers.extend(extra)
            steps.extend((v, 0) for v in extra)
        runtime = time.perf_counter() - t0
    lb, _ = matching_lower_bound(h)
    return SelectionResult(tuple(sorted(drivers)), "greedy", lb, True, runtime, steps)


class _SmallVerifier:
    """Bitmask verifier for exhaustive search on small hypergraphs."""

    def __init__(self, h: DirectedHypergraph):
        self.n = h.n
        self.edges = [
            (sum(1 << v for v in h.edges[eid].distinct_tail), sum(1 << v for v in h.edges[eid].head))
            for eid in h.state_edge_ids
        ]
        s = signal_expansion(h)
        self.columns = s.head_adjacency

    def accessible(self, seeds: int) -> int:
        acc = seeds
        pending = self.edges
        while True:
            rest = []
            grown = acc
            for tail, head in pending:
                if tail & grown == tail:
                    grown |= head
                else:
                    rest.append((tail, head))
            if grown == acc:
                return acc
            acc = grown
            pending = rest

    def ok(self, subset: tuple[int, ...]) -> bool:
        seeds = sum(1 << v for v in subset)
        full = (1 << self.n) - 1
        if self.accessible(seeds) != full:
            return False
        free = [v for v in range(self.n) if not seeds >> v & 1]
        index = {v: i for i, v in enumerate(free)}
        adj = [[index[v] for v in col if v in index] for col in self.columns]
        match = hopcroft_karp(adj, len(free))
        return sum(1 for v in match if v != -1) == len(free)


def select_optimal_bfs(h: DirectedHypergraph, max_n: int = 12) -> SelectionResult:
    """Minimum driver set by exhaustive enumeration (size ascending, then lexicographic).

    Sizes below the matching lower bound are skipped, and nodes that appear in
    no state edge head are forced in; neither changes which subset is found
    first.
    """
    _require_uncontrolled(h)
    if h.n > max_n:
        raise CapacityError(f"brute-force selection limited to n <= {max_n}, got n={h.n}")
    t0 = time.perf_counter()
    lb, _ = matching_lower_bound(h)
    checker = _SmallVerifier(h)
    forced = tuple(v for v in range(h.n) if not any(h.edges[e].kind == "state" for e in h.head_index[v]))
    free = [v for v in range(h.n) if v not in forced]
    for size in range(max(lb, len(forced)), h.n + 1):
        for extra in combinations(free, size - len(forced)):
            subset = tuple(sorted(forced + extra))
            if checker.ok(subset):
                runtime = time.perf_counter() - t0
                return SelectionResult(subset, "optimal", lb, True, runtime)
    raise AssertionError("the full node set always verifies")


def select(h: DirectedHypergraph, method: str, **kwargs: Any) -> SelectionResult:
    try:
        fn = {
            "matching": select_matching_only,
            "greedy": select_greedy,
            "mag": select_mag,
            "optimal": select_optimal_bfs,
        }[method]
    except KeyError:
        raise ValidationError(f"unknown method {method!r}; expected one of {METHODS}") from None
    return fn(h, **kwargs)
