"""Directed hypergraphs induced by the sparsity pattern of a tensor polynomial system.

A nonzero entry ``A[h, t1, ..., t_{k-1}]`` of the order-k dynamics tensor becomes
a state hyperedge with head ``{h}`` and tail multiset ``{t1, ..., t_{k-1}}``; a
nonzero ``B[i, j]`` becomes a control hyperedge from control node ``u_j`` to
state node ``v_i``.  Nodes are 0-based in memory and rendered 1-based in I/O.
Control node ``j`` has internal id ``n + j``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Literal

import networkx as nx

from .errors import ParseError, ValidationError

EdgeKind = Literal["state", "control"]


def node_label(index: int, n: int) -> str:
    """Render an internal node id the way the I/O layer does (``v1``, ``u1``)."""
    return f"v{index + 1}" if index < n else f"u{index - n + 1}"


@dataclass(frozen=True)
class Hyperedge:
    """A directed hyperedge.

    ``head`` is a sorted tuple of distinct nodes, ``tail`` a sorted tuple that
    keeps multiplicity (``x2**2`` gives tail ``(1, 1)``).
    """

    head: tuple[int, ...]
    tail: tuple[int, ...]
    kind: EdgeKind = "state"

    @classmethod
    def make(cls, head: Iterable[int], tail: Iterable[int], kind: EdgeKind = "state") -> "Hyperedge":
        return cls(tuple(sorted(set(head))), tuple(sorted(tail)), kind)

    @property
    def distinct_tail(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.tail)))

    def sort_key(self) -> tuple:
        return (self.head[0] if self.head else -1, self.head, self.tail)


@dataclass(frozen=True)
class SparsityPattern:
    """Zero/nonzero support of a pair (A, B).

    ``nonzeros_A`` holds k-tuples whose first index is the head row;
    ``nonzeros_B`` holds ``(row, input)`` pairs.
    """

    n: int
    k: int
    nonzeros_A: frozenset[tuple[int, ...]] = frozenset()
    m: int = 0
    nonzeros_B: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "nonzeros_A", frozenset(tuple(int(i) for i in t) for t in self.nonzeros_A))
        object.__setattr__(self, "nonzeros_B", frozenset((int(r), int(c)) for r, c in self.nonzeros_B))

    def validate(self) -> None:
        if self.k < 2:
            raise ValidationError(f"tensor order k must be >= 2, got {self.k}")
        if self.n < 0 or self.m < 0:
            raise ValidationError("dimensions must be non-negative")
        for t in sorted(self.nonzeros_A):
            if len(t) != self.k:
                raise ValidationError(f"tensor index {_one_based(t)} has {len(t)} entries, expected k={self.k}")
            if any(i < 0 or i >= self.n for i in t):
                raise ValidationError(f"tensor index {_one_based(t)} out of range for n={self.n}")
        for r, c in sorted(self.nonzeros_B):
            if not (0 <= r < self.n and 0 <= c < self.m):
                raise ValidationError(f"input entry ({r + 1}, {c + 1}) out of range for n={self.n}, m={self.m}")


def _one_based(t: Iterable[int]) -> tuple[int, ...]:
    return tuple(i + 1 for i in t)


@dataclass(frozen=True)
class DirectedHypergraph:
    """Immutable directed hypergraph over ``n`` state and ``num_controls`` control nodes.

    The edge list is canonicalized on construction: duplicate edges merge and
    edges are sorted by ``(min head, head, tail)``.  Edge ids are positions in
    ``edges``.
    """

    n: int
    k: int
    edges: tuple[Hyperedge, ...] = ()
    num_controls: int | None = None

    head_index: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    tail_index: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValidationError(f"tensor order k must be >= 2, got {self.k}")
        if self.n < 0:
            raise ValidationError("n must be non-negative")
        edges = [e if isinstance(e, Hyperedge) else Hyperedge.make(*e) for e in self.edges]
        if self.num_controls is None:
            used = [e.tail[0] - self.n + 1 for e in edges if e.kind == "control" and e.tail]
            object.__setattr__(self, "num_controls", max(used, default=0))
        for e in edges:
            self._check_edge(e)
        canon = sorted(set(edges), key=lambda e: (e.sort_key(), e.kind))
        object.__setattr__(self, "edges", tuple(canon))

        total = self.n + self.num_controls
        heads: list[list[int]] = [[] for _ in range(total)]
        tails: list[list[int]] = [[] for _ in range(total)]
        for eid, e in enumerate(canon):
            for v in e.head:
                heads[v].append(eid)
            for v in e.distinct_tail:
                tails[v].append(eid)
        object.__setattr__(self, "head_index", tuple(map(tuple, heads)))
        object.__setattr__(self, "tail_index", tuple(map(tuple, tails)))

    def _check_edge(self, e: Hyperedge) -> None:
        n, m = self.n, self.num_controls
        if not e.head:
            raise ValidationError(f"hyperedge with tail {_one_based(e.tail)} has an empty head")
        if any(v < 0 or v >= n for v in e.head):
            raise ValidationError(f"head {_one_based(e.head)} out of range for n={n}")
        if e.kind == "state":
            if len(e.tail) != self.k - 1:
                raise ValidationError(
                    f"state edge {_one_based(e.head)} <- {_one_based(e.tail)} has tail size "
                    f"{len(e.tail)}, expected k-1={self.k - 1}"
                )
            if any(v < 0 or v >= n for v in e.tail):
                raise ValidationError(f"tail {_one_based(e.tail)} out of range for n={n}")
        elif e.kind == "control":
            if len(e.head) != 1 or len(e.tail) != 1:
                raise ValidationError("control edges need exactly one head and one control tail node")
            if not n <= e.tail[0] < n + m:
                raise ValidationError(f"control tail {e.tail[0] + 1} is not a control node")
        else:
            raise ValidationError(f"unknown edge kind {e.kind!r}")

    @property
    def num_nodes(self) -> int:
        return self.n + self.num_controls

    @cached_property
    def state_edge_ids(self) -> tuple[int, ...]:
        return tuple(i for i, e in enumerate(self.edges) if e.kind == "state")

    @cached_property
    def control_edge_ids(self) -> tuple[int, ...]:
        return tuple(i for i, e in enumerate(self.edges) if e.kind == "control")

    @property
    def has_controls(self) -> bool:
        return bool(self.control_edge_ids)

    @cached_property
    def distinct_tails(self) -> tuple[tuple[int, ...], ...]:
        return tuple(e.distinct_tail for e in self.edges)

    def state_edges(self) -> list[Hyperedge]:
        return [self.edges[i] for i in self.state_edge_ids]

    def with_drivers(self, drivers: Iterable[int]) -> "DirectedHypergraph":
        """Return a copy with one fresh control input attached to each driver node."""
        drivers = check_nodes(self, drivers)
        base = self.num_controls
        new =[Hyperedge((d,), (self.n + base + i,), "control") for i, d in enumerate(drivers)]
        return DirectedHypergraph(self.n, self.k, self.edges + tuple(new), base + len(drivers))

    def strip_controls(self) -> "DirectedHypergraph":
        return DirectedHypergraph(self.n, self.k, tuple(self.state_edges()), 0)

    def label(self, v: int) -> str:
        return node_label(v, self.n)


def check_nodes(h: DirectedHypergraph, nodes: Iterable[int]) -> tuple[int, ...]:
    """Validate that ``nodes`` are state node ids and return them sorted and distinct."""
    out = sorted(set(int(v) for v in nodes))
    for v in out:
        if not 0 <= v < h.n:
            raise ValidationError(f"node id {v + 1} out of range for n={h.n}")
    return tuple(out)


def build_hypergraph(pattern: SparsityPattern) -> DirectedHypergraph:
    """Associated directed hypergraph of a sparsity pattern.

    Index tuples that differ only by a permutation of modes 2..k collapse to
    one state edge.
    """
    pattern.validate()
    edges = {Hyperedge.make((t[0],), t[1:]) for t in pattern.nonzeros_A}
    edges |= {Hyperedge((r,), (pattern.n + c,), "control") for r, c in pattern.nonzeros_B}
    return DirectedHypergraph(pattern.n, pattern.k, tuple(edges), pattern.m)


def pattern_from_hypergraph(h: DirectedHypergraph) -> SparsityPattern:
    """One tensor nonzero per (head node, tail multiset); one B nonzero per control edge.

    A multi-node head yields independent entries for each of its head rows.
    """
    a = set()
    b = set()
    for e in h.edges:
        if e.kind == "state":
            a.update((v, *e.tail) for v in e.head)
        else:
            b.add((e.head[0], e.tail[0] - h.n))
    return SparsityPattern(h.n, h.k, frozenset(a), h.num_controls, frozenset(b))


@dataclass(frozen=True)
class StarExpansion:
    """Bipartite digraph between state nodes (left) and hyperedge nodes (right).

    ``sources[r]`` lists the hypergraph edge ids represented by right node ``r``;
    for a plain star expansion this is just ``(r,)``.
    """

    num_state: int
    num_right: int
    tail_arcs: tuple[tuple[int, int], ...]
    head_arcs: tuple[tuple[int, int], ...]
    sources: tuple[tuple[int, ...], ...]

    @cached_property
    def head_adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.num_right)]
        for r, v in self.head_arcs:
            adj[r].append(v)
        return tuple(tuple(sorted(a)) for a in adj)


def star_expand(h: DirectedHypergraph) -> StarExpansion:
    """Tail arcs ``v -> e`` for ``v`` in the (distinct) tail, head arcs ``e -> v``.

    Control nodes are not on the left side, so control edges contribute head
    arcs only.
    """
    tail_arcs = []
    head_arcs = []
    for eid, e in enumerate(h.edges):
        tail_arcs.extend((v, eid) for v in e.distinct_tail if v < h.n)
        head_arcs.extend((eid, v) for v in e.head)
    return StarExpansion(
        h.n, len(h.edges), tuple(tail_arcs), tuple(head_arcs), tuple((i,) for i in range(len(h.edges)))
    )


def projection_digraph(h: DirectedHypergraph) -> nx.DiGraph:
    """Simple digraph on state nodes with ``u -> v`` iff some edge has u in its tail and v in its head."""
    g = nx.DiGraph()
    g.add_nodes_from(range(h.n))
    for eid in h.state_edge_ids:
        e = h.edges[eid]
        g.add_edges_from((u, v) for u in e.distinct_tail for v in e.head)
    return g


# -- serialization ---------------------------------------------------------


def hypergraph_to_dict(h: DirectedHypergraph, metadata: dict[str, Any] | None = None) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "n": h.n,
        "k": h.k,
        "edges": [
            {"head": [v + 1 for v in e.head], "tail": [v + 1 for v in e.tail]}
            for e in h.edges
            if e.kind == "state"
        ],
        "controls": [
            {"node": e.head[0] + 1, "input": e.tail[0] - h.n + 1} for e in h.edges if e.kind == "control"
        ],
    }
    if metadata is not None:
        doc["metadata"] = metadata
    return doc


def hypergraph_from_dict(doc: Any) -> DirectedHypergraph:
    if not isinstance(doc, dict):
        raise ParseError("hypergraph document must be a JSON object")
    missing = [key for key in ("n", "k", "edges") if key not in doc]
    if missing:
        raise ParseError(f"hypergraph document is missing keys {missing}")
    try:
        n = int(doc["n"])
        k = int(doc["k"])
        edges = [Hyperedge.make([v - 1 for v in e["head"]], [v - 1 for v in e["tail"]]) for e in doc["edges"]]
        controls = [(int(c["node"]) - 1, int(c["input"]) - 1) for c in doc.get("controls", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed hypergraph document: {exc!r}") from exc
    if any(j < 0 for _, j in controls):
        raise ValidationError("control input ids are 1-based")
    m = max((j + 1 for _, j in controls), default=0)
    edges += [Hyperedge((v,), (n + j,), "control") for v, j in controls]
    return DirectedHypergraph(n, k, tuple(edges), m)


def dumps_hypergraph(h: DirectedHypergraph, metadata: dict[str, Any] | None = None) -> str:
    """Canonical text form: fixed key order, one edge or control per line."""
    doc = hypergraph_to_dict(h, metadata)
    lines = ["{", f'  "n": {doc["n"]},', f'  "k": {doc["k"]},']
    for key in ("edges", "controls"):
        items = [json.dumps(item) for item in doc[key]]
        body = ",\n".join(f"    {item}" for item in items)
        lines.append(f'  "{key}": [\n{body}\n  ],' if items else f'  "{key}": [],')
    if metadata is not None:
        lines.append(f'  "metadata": {json.dumps(metadata, sort_keys=True)}')
    else:
        lines[-1] = lines[-1].rstrip(",")
    lines.append("}")
    return "\n".join(lines) + "\n"


def loads_hypergraph(text: str) -> DirectedHypergraph:
    return load_document(text)[0]


def load_document(text: str) -> tuple[DirectedHypergraph, dict[str, Any] | None]:
    """Parse a hypergraph file body, returning the hypergraph and its metadata block."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from exc
    return hypergraph_from_dict(doc), (doc.get("metadata") if isinstance(doc, dict) else None)


def write_hypergraph(h: DirectedHypergraph, path: str | Path, metadata: dict[str, Any] | None = None) -> None:
    Path(path).write_text(dumps_hypergraph(h, metadata), encoding="utf-8")


def read_hypergraph(path: str | Path) -> DirectedHypergraph:
    return loads_hypergraph(Path(path).read_text(encoding="utf-8"))
