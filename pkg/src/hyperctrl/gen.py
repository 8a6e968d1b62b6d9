"""Seeded random hypergraph generators.

All generators draw ``m = round(alpha * n)`` distinct state hyperedges with one
head node and ``k - 1`` tail slots (sampled with replacement, so repeated tail
nodes are possible).  A candidate edge that duplicates an earlier one is
redrawn.  Output is a pure function of the config, seed included.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from typing import Any, Callable

import numpy as np

from .errors import ValidationError
from .hypergraph import DirectedHypergraph, Hyperedge

TOPOLOGIES = ("uniform", "scale_free", "clustered", "small_world")
GENERATOR_VERSION = 1
MAX_REDRAWS = 1000


@dataclass(frozen=True)
class GenConfig:
    n: int
    k: int
    alpha: float
    topology: str = "uniform"
    seed: int = 0
    modules: int = 5
    p_intra: float = 0.9
    rewire: float = 0.1
    window: int | None = None
    max_head: int = 1

    @property
    def m(self) -> int:
        return int(round(self.alpha * self.n))

    @property
    def ring_window(self) -> int:
        return self.window if self.window is not None else 2 * self.k

    def validate(self) -> None:
        if self.topology not in TOPOLOGIES:
            raise ValidationError(f"unknown topology {self.topology!r}; expected one of {TOPOLOGIES}")
        if self.k < 2:
            raise ValidationError("k must be >= 2")
        if self.n < self.k - 1:
            raise ValidationError(f"need n >= k-1, got n={self.n}, k={self.k}")
        if not self.alpha > 0:
            raise ValidationError("alpha must be positive")
        if self.m < 1:
            raise ValidationError(f"round(alpha*n) must be >= 1, got {self.m}")
        if not 1 <= self.max_head <= self.n:
            raise ValidationError("max_head must lie in [1, n]")
        if self.topology == "clustered":
            if self.modules < 2:
                raise ValidationError("clustered topology needs at least 2 modules")
            if self.n // self.modules < self.k - 1:
                raise ValidationError(
                    f"module size {self.n // self.modules} is smaller than k-1={self.k - 1}"
                )
        if self.topology == "small_world" and self.ring_window < 1:
            raise ValidationError("ring window must be positive")

    def metadata(self) -> dict[str, Any]:
        meta = {"generator": "hyperctrl.gen", "version": GENERATOR_VERSION, **asdict(self), "m": self.m}
        meta["window"] = self.ring_window
        return meta

    def metadata_hash(self) -> str:
        return metadata_hash(self.metadata())


def metadata_hash(meta: dict[str, Any]) -> str:
    blob = json.dumps(meta, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _collect(
    cfg: GenConfig,
    draw: Callable[[], tuple[list[int], list[int]]],
    accept: Callable[[Hyperedge], None] | None = None,
) -> DirectedHypergraph:
    seen: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()
    edges = []
    for _ in range(cfg.m):
        for _ in range(MAX_REDRAWS):
            head, tail = draw()
            e = Hyperedge.make(head, tail)
            if (e.head, e.tail) not in seen:
                break
        else:
            raise ValidationError(f"could not draw {cfg.m} distinct edges for n={cfg.n}, k={cfg.k}")
        seen.add((e.head, e.tail))
        edges.append(e)
        if accept is not None:
            accept(e)
    return DirectedHypergraph(cfg.n, cfg.k, tuple(edges), 0)


def gen_uniform(cfg: GenConfig) -> DirectedHypergraph:
    """Head uniform (``max_head > 1`` draws 1..max_head distinct heads), tail uniform with replacement."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    n, d = cfg.n, cfg.k - 1

    def draw():
        size = 1 if cfg.max_head == 1 else int(rng.integers(1, cfg.max_head + 1))
        head = rng.choice(n, size=size, replace=False).tolist() if size > 1 else [int(rng.integers(n))]
        return head, rng.integers(n, size=d).tolist()

    return _collect(cfg, draw)


def gen_scale_free(cfg: GenConfig) -> DirectedHypergraph:
    """Preferential attachment: every slot picks a node with probability proportional to degree + 1.

    Degree counts all incidences of accepted edges so far.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    # urn holds each node once plus one copy per incidence
    urn = list(range(cfg.n))
    d = cfg.k - 1

    def draw():
        picks = [urn[int(u * len(urn))] for u in rng.random(d + 1)]
        return picks[:1], picks[1:]

    def accept(e: Hyperedge) -> None:
        urn.extend(e.head)
        urn.extend(e.tail)

    return _collect(cfg, draw, accept)


def module_of(cfg: GenConfig) -> np.ndarray:
    """Module label per node: contiguous, near-equal blocks."""
    return (np.arange(cfg.n) * cfg.modules) // cfg.n


def gen_clustered(cfg: GenConfig) -> DirectedHypergraph:
    """Each edge lies inside one uniformly chosen module with probability ``p_intra``, else is global."""
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    labels = module_of(cfg)
    members = [np.flatnonzero(labels == i) for i in range(cfg.modules)]
    d = cfg.k - 1

    def draw():
        if rng.random() < cfg.p_intra:
            pool = members[int(rng.integers(cfg.modules))]
        else:
            pool = np.arange(cfg.n)
        picks = pool[rng.integers(len(pool), size=d + 1)].tolist()
        return picks[:1], picks[1:]

    return _collect(cfg, draw)


def gen_small_world(cfg: GenConfig) -> DirectedHypergraph:
    """Ring lattice edges: all slots from a window of width ``w`` around a random centre.

    Each tail slot is then independently rewired to a uniform node with
    probability ``rewire``.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    n, d, w = cfg.n, cfg.k - 1, cfg.ring_window
    offsets = np.arange(w) - w // 2

    def draw():
        centre = int(rng.integers(n))
        picks = ((centre + offsets[rng.integers(w, size=d + 1)]) % n).tolist()
        rewire = rng.random(d) < cfg.rewire
        targets = rng.integers(n, size=d)
        tail = [int(t) if r else p for p, r, t in zip(picks[1:], rewire, targets)]
        return picks[:1], tail

    return _collect(cfg, draw)


GENERATORS = {
    "uniform": gen_uniform,
    "scale_free": gen_scale_free,
    "clustered": gen_clustered,
    "small_world": gen_small_world,
}


def generate(cfg: GenConfig) -> DirectedHypergraph:
    cfg.validate()
    return GENERATORS[cfg.topology](cfg)
