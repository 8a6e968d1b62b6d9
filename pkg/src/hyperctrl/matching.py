"""Dilation detection by maximum matching on the star expansion.

Every hyperedge node may be matched to one node of its head.  State nodes left
uncovered by a maximum matching cannot each receive an independent signal and
so need their own input; their count lower-bounds the driver set size.

The dilation test runs on the *signal expansion* rather than the raw star
expansion: state edges sharing the same tail multiset are merged into one
right node whose head is the union of their heads, and control edges from the
same input are merged likewise.  Such edges are driven by one monomial (one
column of the unfolded tensor), so they carry a single independent signal no
matter how many rows they write to.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .errors import CapacityError, ValidationError
from .hypergraph import DirectedHypergraph, StarExpansion, check_nodes


@dataclass(frozen=True)
class Matching:
    """Right-node -> state-node assignments of a bipartite matching over head arcs."""

    pairs: tuple[tuple[int, int], ...]
    num_state: int

    @property
    def size(self) -> int:
        return len(self.pairs)

    @property
    def covered(self) -> frozenset[int]:
        return frozenset(v for _, v in self.pairs)

    @property
    def uncovered(self) -> frozenset[int]:
        return frozenset(range(self.num_state)) - self.covered

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)


@dataclass(frozen=True)
class DilationWitness:
    node_set: tuple[int, ...]
    distinct_head_intersections: int

    @property
    def deficiency(self) -> int:
        return len(self.node_set) - self.distinct_head_intersections


def hopcroft_karp(adj: Sequence[Sequence[int]], num_targets: int) -> list[int]:
    """Maximum bipartite matching; returns ``match[u]`` (target or -1) per source.

    Sources are scanned in ascending order and each adjacency list is tried in
    the order given, so the result is a pure function of the input.  A greedy
    pass seeds the matching before the phased augmentation.
    """
    nu = len(adj)
    match_u = [-1] * nu
    match_v = [-1] * num_targets
    for u in range(nu):
        for v in adj[u]:
            if match_v[v] == -1:
                match_u[u] = v
                match_v[v] = u
                break

    while True:
        dist = [-1] * nu
        queue = deque()
        for u in range(nu):
            if match_u[u] == -1:
                dist[u] = 0
                queue.append(u)
        found = False
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                w = match_v[v]
                if w == -1:
                    found = True
                elif dist[w] == -1:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if not found:
            return match_u

        ptr = [0] * nu
        for root in range(nu):
            if match_u[root] != -1:
                continue
            # iterative DFS along the layered graph; paths can be long
            stack = [root]
            path: list[int] = []
            while stack:
                u = stack[-1]
                nbrs = adj[u]
                advanced = False
                while ptr[u] < len(nbrs):
                    v = nbrs[ptr[u]]
                    ptr[u] += 1
                    w = match_v[v]
                    if w == -1:
                        path.append(v)
                        for uu, vv in zip(stack, path):
                            match_u[uu] = vv
                            match_v[vv] = uu
                        stack = []
                        advanced = True
                        break
                    if dist[w] == dist[u] + 1:
                        path.append(v)
                        stack.append(w)
                        advanced = True
                        break
                if not advanced:
                    dist[u] = -2
                    stack.pop()
                    if path:
                        path.pop()


def maximum_matching(s: StarExpansion) -> Matching:
    """Maximum matching over the head arcs (right node -> state node) of ``s``."""
    match = hopcroft_karp(s.head_adjacency, s.num_state)
    return Matching(tuple((r, v) for r, v in enumerate(match) if v != -1), s.num_state)


def signal_expansion(h: DirectedHypergraph, drivers: Iterable[int] = ()) -> StarExpansion:
    """Star expansion with edges grouped by tail multiset, plus one singleton right node per driver.

    Right nodes are ordered by the smallest edge id they contain; driver nodes
    follow in ascending order.
    """
    drivers = check_nodes(h, drivers)
    groups: dict[tuple[str, tuple[int, ...]], list[int]] = {}
    for eid, e in enumerate(h.edges):
        groups.setdefault((e.kind, e.tail), []).append(eid)
    sources = list(groups.values())
    heads = [sorted({v for eid in grp for v in h.edges[eid].head}) for grp in sources]
    tails = [h.edges[grp[0]].distinct_tail for grp in sources]
    for d in drivers:
        sources.append(())
        heads.append([d])
        tails.append(())
    tail_arcs = tuple((v, r) for r, t in enumerate(tails) for v in t if v < h.n)
    head_arcs = tuple((r, v) for r, hd in enumerate(heads) for v in hd)
    return StarExpansion(h.n, len(sources), tail_arcs, head_arcs, tuple(tuple(s) for s in sources))


def _require_uncontrolled(h: DirectedHypergraph) -> None:
    if h.has_controls:
        raise ValidationError("expected an uncontrolled hypergraph; call strip_controls() first")


def matching_lower_bound(h: DirectedHypergraph) -> tuple[int, frozenset[int]]:
    """Number of state nodes a maximum matching leaves uncovered, and those nodes."""
    _require_uncontrolled(h)
    m = maximum_matching(signal_expansion(h))
    return h.n - m.size, m.uncovered


def has_dilation_matching(h: DirectedHypergraph, drivers: Iterable[int] = ()) -> bool:
    """True when no matching covers every state node once each driver gets its own input."""
    m = maximum_matching(signal_expansion(h, drivers))
    return m.size < h.n


def uncovered_with_drivers(h: DirectedHypergraph, drivers: Iterable[int] = ()) -> frozenset[int]:
    return maximum_matching(signal_expansion(h, drivers)).uncovered


def hall_violator(s: StarExpansion, m: Matching) -> tuple[frozenset[int], frozenset[int]]:
    """Certificate that ``m`` is maximum: a node set S and its neighbourhood N(S), |N(S)| < |S|.

    Built by alternating search from the uncovered state nodes.  Empty when the
    matching covers every state node.
    """
    into: list[list[int]] = [[] for _ in range(s.num_state)]
    for r, v in s.head_arcs:
        into[v].append(r)
    owner = {r: v for r, v in m.pairs}
    nodes = set(m.uncovered)
    right: set[int] = set()
    queue = deque(sorted(nodes))
    while queue:
        v = queue.popleft()
        for r in into[v]:
            if r in right:
                continue
            right.add(r)
            w = owner.get(r)
            if w is not None and w not in nodes:
                nodes.add(w)
                queue.append(w)
    return frozenset(nodes), frozenset(right)


def find_dilation_exact(
    h: DirectedHypergraph, drivers: Iterable[int] = (), max_n: int = 20
) -> DilationWitness | None:
    """Smallest node set whose distinct head intersections are fewer than its size.

    Exhaustive over subsets, by size and then lexicographically.  Each driver
    contributes a singleton head, as do existing control edges.
    """
    if h.n > max_n:
        raise CapacityError(f"exact dilation scan limited to n <= {max_n}, got n={h.n}")
    drivers = check_nodes(h, drivers)
    masks = {sum(1 << v for v in e.head) for e in h.edges}
    masks |= {1 << d for d in drivers}
    masks = sorted(masks)
    for size in range(1, h.n + 1):
        for subset in combinations(range(h.n), size):
            s = sum(1 << v for v in subset)
            count = len({hm & s for hm in masks if hm & s})
            if count < size:
                return DilationWitness(subset, count)
    return None


@dataclass(frozen=True)
class DilationComparison:
    """Outcome of running both dilation tests on one (hypergraph, drivers) pair."""

    matching_dilation: bool
    exact_witness: DilationWitness | None
    matching_certificate: tuple[frozenset[int], frozenset[int]]

    @property
    def exact_dilation(self) -> bool:
        return self.exact_witness is not None

    @property
    def agree(self) -> bool:
        return self.matching_dilation == self.exact_dilation

    def to_dict(self, n: int) -> dict:
        nodes, signals = self.matching_certificate
        w = self.exact_witness
        return {
            "matching_dilation": self.matching_dilation,
            "exact_dilation": self.exact_dilation,
            "agree": self.agree,
            "exact_witness": None
            if w is None
            else {
                "node_set": [v + 1 for v in w.node_set],
                "distinct_head_intersections": w.distinct_head_intersections,
                "deficiency": w.deficiency,
            },
            "matching_certificate": {
                "node_set": sorted(v + 1 for v in nodes),
                "num_signals": len(signals),
            },
        }


def compare_dilation_tests(
    h: DirectedHypergraph, drivers: Iterable[int] = (), max_n: int = 20
) -> DilationComparison:
    drivers = check_nodes(h, drivers)
    s = signal_expansion(h, drivers)
    m = maximum_matching(s)
    return DilationComparison(m.size < h.n, find_dilation_exact(h, drivers, max_n), hall_violator(s, m))
