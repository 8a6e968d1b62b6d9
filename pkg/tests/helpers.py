from __future__ import annotations

from hypothesis import strategies as st

from hyperctrl import DirectedHypergraph, Hyperedge


def make(n, k, edges, controls=()):
    """Build from 1-based ``(head, tail)`` pairs and 1-based ``(node, input)`` controls."""
    es = [Hyperedge.make([v - 1 for v in hd], [v - 1 for v in tl]) for hd, tl in edges]
    m = max((u for _, u in controls), default=0)
    es += [Hyperedge((v - 1,), (n + u - 1,), "control") for v, u in controls]
    return DirectedHypergraph(n, k, tuple(es), m)


@st.composite
def hypergraphs(draw, min_n=1, max_n=8, ks=(2, 3, 4), max_edges=12, max_head=2, controls=False):
    n = draw(st.integers(min_n, max_n))
    k = draw(st.sampled_from(ks))
    node = st.integers(0, n - 1)
    edges = draw(
        st.lists(
            st.tuples(st.sets(node, min_size=1, max_size=max_head), st.lists(node, min_size=k - 1, max_size=k - 1)),
            max_size=max_edges,
        )
    )
    es = [Hyperedge.make(hd, tl) for hd, tl in edges]
    m = 0
    if controls:
        ctrl = draw(st.lists(node, max_size=3, unique=True))
        m = len(ctrl)
        es += [Hyperedge((v,), (n + i,), "control") for i, v in enumerate(ctrl)]
    return DirectedHypergraph(n, k, tuple(es), m)


def node_sets(n):
    return st.sets(st.integers(0, n - 1), max_size=n)
