"""Forward propagation of control influence over a directed hypergraph.

A state hyperedge fires once every distinct node of its tail has been visited,
and firing visits every node of its head.  Control edges visit their heads
immediately.  ``walk_reach`` computes the least fixed point with one counter
per edge, so the work is linear in the total tail size.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable

from .hypergraph import DirectedHypergraph, check_nodes


@dataclass(frozen=True)
class ReachResult:
    accessible: frozenset[int]
    activation_order: tuple[tuple[int, int], ...]
    frontier_trace: tuple[frozenset[int], ...] | None = None


def walk_reach(h: DirectedHypergraph, seeds: Iterable[int] = (), trace: bool = False) -> ReachResult:
    """Accessible state nodes from ``seeds`` plus the heads of existing control edges.

    Edges are activated in rounds: round ``j`` fires every edge whose tail was
    completed by nodes visited in round ``j - 1``, in ascending edge id.
    ``activation_order`` lists ``(edge id, round)``; control edges fire in round 0.
    With ``trace=True`` the cumulative visited set after each round is kept.
    """
    seeds = check_nodes(h, seeds)
    acc = bytearray(h.n)
    order: list[tuple[int, int]] = []
    frontier: list[int] = []
    for v in seeds:
        acc[v] = 1
        frontier.append(v)
    for eid in h.control_edge_ids:
        order.append((eid, 0))
        v = h.edges[eid].head[0]
        if not acc[v]:
            acc[v] = 1
            frontier.append(v)

    missing = [len(t) for t in h.distinct_tails]
    visited = set(frontier) if trace else None
    history = [frozenset(visited)] if trace else None
    step = 0
    while frontier:
        step += 1
        ready = []
        for v in frontier:
            for eid in h.tail_index[v]:
                missing[eid] -= 1
                if missing[eid] == 0:
                    ready.append(eid)
        ready.sort()
        frontier = []
        for eid in ready:
            order.append((eid, step))
            for w in h.edges[eid].head:
                if not acc[w]:
                    acc[w] = 1
                    frontier.append(w)
        if trace and frontier:
            visited.update(frontier)
            history.append(frozenset(visited))

    accessible = frozenset(v for v in range(h.n) if acc[v])
    return ReachResult(accessible, tuple(order), tuple(history) if trace else None)


def inaccessible_set(h: DirectedHypergraph, seeds: Iterable[int] = ()) -> frozenset[int]:
    acc = walk_reach(h, seeds).accessible
    return frozenset(range(h.n)) - acc


def target_accessible(h: DirectedHypergraph, seeds: Iterable[int], targets: Iterable[int]) -> bool:
    """True when every target node is reachable from the seeds (target control query)."""
    targets = check_nodes(h, targets)
    acc = walk_reach(h, seeds).accessible
    return acc.issuperset(targets)


class IncrementalReach:
    """Accessible set under a growing seed set, with cached marginal gains.

    For every inaccessible node ``v`` the engine keeps the cascade of nodes
    that would become accessible if ``v`` were seeded, plus an inverse index
    from each node to the cascades holding it.  After a commit:

    * newly accessible nodes are deleted from every cascade holding them;
    * a cascade can only grow by newly firing an edge whose missing-tail
      counter moved, which requires all remaining missing tails of that edge
      to lie in the cascade; such cascades are extended from the edge heads.

    Closure is monotone, so ``u`` in the cascade of ``v`` implies
    ``cascade(u) <= cascade(v)``.  A stale node covered by a current cascade
    is not recomputed: it sits in the heap with that cascade's size as an
    upper bound (its owner) and is probed only if it reaches the top.  Any
    change to ``u``'s true cascade also changes its owner's, so the bound is
    rechecked whenever the owner is updated.
    """

    def __init__(self, h: DirectedHypergraph, seeds: Iterable[int] = ()):
        self.h = h
        self._tails = h.tail_index
        self._heads = [e.head for e in h.edges]
        self._dtails = h.distinct_tails
        self._missing = [len(t) for t in self._dtails]
        self._acc = bytearray(h.n)
        self.num_accessible = 0

        start = set(check_nodes(h, seeds))
        start.update(h.edges[eid].head[0] for eid in h.control_edge_ids)
        self._absorb(sorted(start))

        self._cascade: dict[int, set[int]] = {}
        self._inv: list[set[int]] = [set() for _ in range(h.n)]
        self._owner: dict[int, int] = {}
        self._owned: dict[int, set[int]] = {}
        self._version = [0] * h.n
        self._heap: list[tuple[int, int, int]] = []
        for v in range(h.n):
            if not self._acc[v]:
                self._refresh(v)

    @property
    def complete(self) -> bool:
        return self.num_accessible == self.h.n

    def is_accessible(self, v: int) -> bool:
        return bool(self._acc[v])

    def accessible(self) -> frozenset[int]:
        return frozenset(v for v in range(self.h.n) if self._acc[v])

    def probe(self, v: int) -> list[int]:
        """Nodes that seeding ``v`` would make accessible (``v`` first); state is untouched."""
        if self._acc[v]:
            return []
        acc, missing, heads, tails = self._acc, self._missing, self._heads, self._tails
        new = [v]
        seen = {v}
        dec: dict[int, int] = {}
        i = 0
        while i < len(new):
            u = new[i]
            i += 1
            for eid in tails[u]:
                c = dec.get(eid, missing[eid]) - 1
                dec[eid] = c
                if c == 0:
                    for w in heads[eid]:
                        if not acc[w] and w not in seen:
                            seen.add(w)
                            new.append(w)
        return new

    def gain(self, v: int) -> int:
        if v in self._cascade:
            return len(self._cascade[v])
        return len(self.probe(v))

    def best(self) -> tuple[int, int] | None:
        """Inaccessible node with the largest cascade (lowest id on ties) and its size."""
        heap = self._heap
        while heap:
            neg, v, ver = heap[0]
            if self._acc[v] or ver != self._version[v]:
                heapq.heappop(heap)
                continue
            if v in self._owner:
                heapq.heappop(heap)
                self._settle([], self._refresh(v))
                continue
            return v, -neg
        return None

    def add(self, v: int) -> list[int]:
        """Seed ``v`` and return the nodes that became accessible."""
        delta, touched = self._absorb([v])
        if not delta:
            return delta
        inv, acc = self._inv, self._acc
        # A cascade can only grow by newly firing an edge whose counter moved,
        # which needs every remaining missing tail of that edge in the cascade.
        fire: dict[int, list[int]] = {}
        for eid in touched:
            if self._missing[eid] > 0:
                rest = [w for w in self._dtails[eid] if not acc[w]]
                if len(rest) == 1:
                    common = inv[rest[0]]
                else:
                    sets = sorted((inv[w] for w in rest), key=len)
                    common = sets[0].intersection(*sets[1:])
                for c in common:
                    fire.setdefault(c, []).append(eid)
        grow = set(fire)
        # Any other cascade that held a newly accessible node just loses those nodes.
        shrink: set[int] = set()
        orphans: list[int] = []
        for u in delta:
            shrink |= inv[u]
            for c in inv[u]:
                if c != u:
                    self._cascade[c].discard(u)
            owned = self._owned.pop(u, None)
            if owned:
                for w in sorted(owned):
                    del self._owner[w]
                    orphans.append(w)
        for u in delta:
            self._drop(u)
            inv[u].clear()
        for u in sorted(shrink - grow):
            if not acc[u]:
                orphans.extend(self._publish(u))
        # likely dominators first, so their fresh cascades cover the rest
        order = sorted((u for u in grow if not acc[u]), key=lambda u: (-len(self._cascade[u]), u))
        self._settle(order, orphans, fire)
        return delta

    def _settle(self, order: list[int], extra: list[int] = (), fire: dict[int, list[int]] | None = None) -> None:
        """Re-evaluate stale nodes in ``order`` and unowned nodes in ``extra``.

        A node contained in some current exact cascade is deferred to the
        smallest such cascade.  Otherwise a node with a stale exact cascade is
        extended through the edges listed for it in ``fire``; anything else is
        probed from scratch.
        """
        fire = fire or {}
        pending = set(order)
        work = list(reversed(order)) + list(reversed(extra))
        while work:
            u = work.pop()
            pending.discard(u)
            if self._acc[u]:
                continue
            owner = self._cover(u, pending)
            if owner is not None:
                work.extend(reversed(self._defer(u, owner)))
            elif u in self._cascade and u in fire:
                work.extend(reversed(self._extend(u, fire[u])))
            else:
                work.extend(reversed(self._refresh(u)))

    def _cover(self, u: int, pending: set[int]) -> int | None:
        best = None
        for o in self._inv[u]:
            if o != u and o not in pending:
                key = (len(self._cascade[o]), o)
                if best is None or key < best:
                    best = key
        return None if best is None else best[1]

    def _drop(self, u: int) -> None:
        """Forget any cached cascade or deferral of ``u``."""
        inv = self._inv
        for x in self._cascade.pop(u, ()):
            inv[x].discard(u)
        o = self._owner.pop(u, None)
        if o is not None and o in self._owned:
            self._owned[o].discard(u)

    def _defer(self, u: int, owner: int) -> list[int]:
        """Replace ``u``'s cascade by an upper bound from ``owner``; return nodes ``u`` owned."""
        self._drop(u)
        owned = self._owned.pop(u, None)
        orphans = sorted(owned) if owned else []
        for w in orphans:
            del self._owner[w]
        self._owner[u] = owner
        self._owned.setdefault(owner, set()).add(u)
        self._version[u] += 1
        heapq.heappush(self._heap, (-len(self._cascade[owner]), u, self._version[u]))
        return orphans

    def _refresh(self, v: int) -> list[int]:
        """Recompute ``v``'s cascade exactly; return deferred nodes it no longer covers."""
        self._drop(v)
        inv = self._inv
        cascade = self.probe(v)
        self._cascade[v] = set(cascade)
        for x in cascade:
            inv[x].add(v)
        return self._publish(v)

    def _extend(self, v: int, edges: list[int]) -> list[int]:
        """Grow a cascade (already stripped of accessible nodes) through newly fireable ``edges``."""
        acc, heads, tails, dtails, inv = self._acc, self._heads, self._tails, self._dtails, self._inv
        seen = self._cascade[v]
        new: list[int] = []
        for eid in edges:
            for w in heads[eid]:
                if not acc[w] and w not in seen:
                    seen.add(w)
                    new.append(w)
        i = 0
        while i < len(new):
            u = new[i]
            i += 1
            for eid in tails[u]:
                for t in dtails[eid]:
                    if not acc[t] and t not in seen:
                        break
                else:
                    for w in heads[eid]:
                        if not acc[w] and w not in seen:
                            seen.add(w)
                            new.append(w)
        for x in new:
            inv[x].add(v)
        return self._publish(v)

    def _publish(self, v: int) -> list[int]:
        """Push ``v``'s current cascade size and re-bound the nodes it owns."""
        cascade = self._cascade[v]
        self._version[v] += 1
        heapq.heappush(self._heap, (-len(cascade), v, self._version[v]))
        owned = self._owned.get(v)
        if not owned:
            return []
        orphans = []
        for u in sorted(owned):
            if self._acc[u]:
                owned.discard(u)
            elif v in self._inv[u]:
                self._version[u] += 1
                heapq.heappush(self._heap, (-len(cascade), u, self._version[u]))
            else:
                orphans.append(u)
        for u in orphans:
            owned.discard(u)
            del self._owner[u]
        return orphans

    def _absorb(self, nodes: list[int]) -> tuple[list[int], set[int]]:
        acc, missing, heads, tails = self._acc, self._missing, self._heads, self._tails
        delta: list[int] = []
        for v in nodes:
            if not acc[v]:
                acc[v] = 1
                delta.append(v)
        touched: set[int] = set()
        i = 0
        while i < len(delta):
            u = delta[i]
            i += 1
            for eid in tails[u]:
                missing[eid] -= 1
                touched.add(eid)
                if missing[eid] == 0:
                    for w in heads[eid]:
                        if not acc[w]:
                            acc[w] = 1
                            delta.append(w)
        self.num_accessible += len(delta)
        return delta, touched
