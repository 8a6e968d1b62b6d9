"""Benchmark harness: small-scale method comparison, scaling runs, structured topologies.

Every trial draws its hypergraph from a seed derived from the base seed and the
trial's grid coordinates, so rows are reproducible one by one and independent
of grid order.  Runtime columns are wall-clock of the selection call only; set
``timing=False`` to zero them for byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import networkx as nx
import numpy as np

from .errors import CapacityError, ValidationError
from .gen import TOPOLOGIES, GenConfig, generate
from .hypergraph import DirectedHypergraph, projection_digraph
from .select import METHODS, select

OPTIMAL_MAX_N = 12
# centrality is measured on the tail->head projection, not on the hypergraph itself
CENTRALITY_GRAPH = "projection"

SMALL_HEADER = [
    "experiment", "k", "alpha", "n", "topology", "method", "trial", "seed",
    "num_drivers", "lower_bound", "controllable", "runtime_ms", "meta_hash",
]
LARGE_HEADER = SMALL_HEADER[:-1] + ["num_edges", "structure_size", "meta_hash"]
STRUCTURED_HEADER = [
    "experiment", "k", "alpha", "n", "topology", "trial", "seed", "num_drivers",
    "driver_in_degree", "nondriver_in_degree", "network_in_degree",
    "driver_betweenness", "nondriver_betweenness", "network_betweenness", "centrality_graph",
    "meta_hash",
]
STRUCTURED_SUMMARY_HEADER = [
    "topology", "alpha", "n", "realizations", "num_drivers_mean", "num_drivers_std",
    "driver_in_degree_mean", "network_in_degree_mean", "driver_betweenness_mean",
    "network_betweenness_mean", "driver_below_mean_in_degree",
]


@dataclass
class ExperimentSpec:
    experiment: str = "small_scale"
    ks: tuple[int, ...] = (4,)
    alphas: tuple[float, ...] = (0.5, 1.0)
    ns: tuple[int, ...] = (10,)
    topologies: tuple[str, ...] = ("uniform",)
    trials: int = 5
    seed: int = 0
    methods: tuple[str, ...] = ("matching", "mag", "greedy", "optimal")
    timing: bool = True
    jobs: int = 1
    gen_params: dict[str, Any] = field(default_factory=dict)

    def validate(self) -> None:
        if self.experiment not in ("small_scale", "large_scale", "structured"):
            raise ValidationError(f"unknown experiment {self.experiment!r}")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise ValidationError(f"unknown methods {sorted(bad)}")
        bad = set(self.topologies) - set(TOPOLOGIES)
        if bad:
            raise ValidationError(f"unknown topologies {sorted(bad)}")
        if self.trials < 0:
            raise ValidationError("trials must be non-negative")
        # the structured experiment always places drivers with MaG
        uses_optimal = "optimal" in self.methods and self.experiment != "structured"
        if uses_optimal and self.ns and max(self.ns) > OPTIMAL_MAX_N:
            raise CapacityError(f"method 'optimal' is limited to n <= {OPTIMAL_MAX_N}")


def derive_seed(base: int, k: int, n: int, alpha: float, topology: str, trial: int) -> int:
    parts = [base, k, n, int(round(alpha * 1000)), TOPOLOGIES.index(topology), trial]
    return int(np.random.SeedSequence(parts).generate_state(1)[0])


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _alpha(a: float) -> str:
    return f"{a:g}"


def _map(fn: Callable, units: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(units) <= 1:
        return [fn(u) for u in units]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, units))


def _grid(spec: ExperimentSpec) -> list[tuple[int, float, int, str, int]]:
    return [
        (k, a, n, topo, t)
        for k in spec.ks
        for a in spec.alphas
        for n in spec.ns
        for topo in spec.topologies
        for t in range(spec.trials)
    ]


def _config(spec: ExperimentSpec, k: int, a: float, n: int, topo: str, t: int) -> GenConfig:
    return GenConfig(n, k, a, topo, derive_seed(spec.seed, k, n, a, topo, t), **spec.gen_params)


def _selection_rows(args: tuple[ExperimentSpec, tuple]) -> list[dict[str, Any]]:
    spec, (k, a, n, topo, t) = args
    cfg = _config(spec, k, a, n, topo, t)
    h = generate(cfg)
    rows = []
    for method in spec.methods:
        res = select(h, method)
        row = {
            "experiment": spec.experiment,
            "k": k,
            "alpha": _alpha(a),
            "n": n,
            "topology": topo,
            "method": method,
            "trial": t,
            "seed": cfg.seed,
            "num_drivers": res.num_drivers,
            "lower_bound": res.lower_bound,
            "controllable": int(res.controllable),
            "runtime_ms": _fmt(res.runtime * 1000.0 if spec.timing else 0.0),
            "meta_hash": cfg.metadata_hash(),
        }
        if spec.experiment == "large_scale":
            row["num_edges"] = len(h.edges)
            row["structure_size"] = sum(len(e.head) + len(e.tail) for e in h.edges)
        rows.append(row)
    return rows


def _aggregate(rows: list[dict[str, Any]], spec: ExperimentSpec) -> list[dict[str, Any]]:
    groups: dict[tuple, list[dict[str, Any]]] = {}
    for r in rows:
        groups.setdefault((r["k"], r["alpha"], r["n"], r["topology"], r["method"]), []).append(r)
    out = []
    for (k, a, n, topo, method), grp in groups.items():
        drivers = [r["num_drivers"] for r in grp]
        lbs = [r["lower_bound"] for r in grp]
        ctrl = [r["controllable"] for r in grp]
        rt = [float(r["runtime_ms"]) for r in grp]
        for stat, fn in (("mean", statistics.fmean), ("std", _std)):
            row = {
                "experiment": spec.experiment, "k": k, "alpha": a, "n": n, "topology": topo,
                "method": method, "trial": stat, "seed": "",
                "num_drivers": _fmt(fn(drivers)), "lower_bound": _fmt(fn(lbs)),
                "controllable": _fmt(fn(ctrl)), "runtime_ms": _fmt(fn(rt)), "meta_hash": "",
            }
            if spec.experiment == "large_scale":
                row["num_edges"] = _fmt(fn([r["num_edges"] for r in grp]))
                row["structure_size"] = _fmt(fn([r["structure_size"] for r in grp]))
            out.append(row)
    return out


def _std(xs: Sequence[float]) -> float:
    return statistics.stdev(xs) if len(xs) > 1 else 0.0


def run_small_scale(spec: ExperimentSpec) -> list[dict[str, Any]]:
    """Per-trial rows for every method, followed by mean and std rows per configuration."""
    spec.validate()
    units = [(spec, g) for g in _grid(spec)]
    rows = [r for chunk in _map(_selection_rows, units, spec.jobs) for r in chunk]
    return rows + _aggregate(rows, spec)


def run_large_scale(spec: ExperimentSpec) -> list[dict[str, Any]]:
    """Runtime and driver counts per (n, method); includes edge-structure size per instance."""
    if "optimal" in spec.methods:
        raise CapacityError("method 'optimal' is not available in the large-scale experiment")
    spec.validate()
    units = [(spec, g) for g in _grid(spec)]
    rows = [r for chunk in _map(_selection_rows, units, spec.jobs) for r in chunk]
    return rows + _aggregate(rows, spec)


def log_sizes(lo: int = 10, hi: int = 20000, count: int = 8) -> tuple[int, ...]:
    return tuple(int(round(x)) for x in np.geomspace(lo, hi, count))


def audit_small_scale(rows: Iterable[dict[str, Any]]) -> list[str]:
    """Sandwich violations (matching <= optimal <= mag, optimal <= greedy) in per-trial rows."""
    by_trial: dict[tuple, dict[str, int]] = {}
    for r in rows:
        if r["trial"] in ("mean", "std"):
            continue
        key = (r["k"], r["alpha"], r["n"], r["topology"], r["trial"])
        by_trial.setdefault(key, {})[r["method"]] = int(r["num_drivers"])
    problems = []
    for key, d in by_trial.items():
        opt = d.get("optimal")
        if opt is None:
            continue
        if "matching" in d and d["matching"] > opt:
            problems.append(f"{key}: matching {d['matching']} > optimal {opt}")
        for m in ("mag", "greedy"):
            if m in d and d[m] < opt:
                problems.append(f"{key}: {m} {d[m]} < optimal {opt}")
    return problems


# -- node statistics ------------------------------------------------------


@dataclass(frozen=True)
class NodeStats:
    node: int
    in_degree: int
    betweenness: float
    is_driver: bool


def compute_node_stats(h: DirectedHypergraph, drivers: Iterable[int]) -> list[NodeStats]:
    """In-degree and exact unnormalized betweenness on the tail->head projection digraph."""
    drivers = set(drivers)
    g = projection_digraph(h)
    bc = nx.betweenness_centrality(g, normalized=False)
    return [NodeStats(v, g.in_degree(v), float(bc[v]), v in drivers) for v in range(h.n)]


def _mean(xs: Sequence[float]) -> float:
    return statistics.fmean(xs) if xs else float("nan")


def _structured_row(args: tuple[ExperimentSpec, tuple]) -> dict[str, Any]:
    spec, (k, a, n, topo, t) = args
    cfg = _config(spec, k, a, n, topo, t)
    h = generate(cfg)
    res = select(h, "mag")
    stats = compute_node_stats(h, res.drivers)
    drv = [s for s in stats if s.is_driver]
    rest = [s for s in stats if not s.is_driver]
    return {
        "experiment": "structured", "k": k, "alpha": _alpha(a), "n": n, "topology": topo,
        "trial": t, "seed": cfg.seed, "num_drivers": len(drv),
        "driver_in_degree": _fmt(_mean([s.in_degree for s in drv])),
        "nondriver_in_degree": _fmt(_mean([s.in_degree for s in rest])),
        "network_in_degree": _fmt(_mean([s.in_degree for s in stats])),
        "driver_betweenness": _fmt(_mean([s.betweenness for s in drv])),
        "nondriver_betweenness": _fmt(_mean([s.betweenness for s in rest])),
        "network_betweenness": _fmt(_mean([s.betweenness for s in stats])),
        "centrality_graph": CENTRALITY_GRAPH,
        "meta_hash": cfg.metadata_hash(),
    }


def run_structured(spec: ExperimentSpec) -> tuple[list[dict[str, Any]], list[dict[str, Any]]]:
    """MaG driver placement statistics per realization, and per-(topology, alpha) summaries."""
    spec.validate()
    structured = {"scale_free", "clustered", "small_world"}
    if not set(spec.topologies) <= structured:
        raise ValidationError(f"structured experiment topologies must be among {sorted(structured)}")
    units = [(spec, g) for g in _grid(spec)]
    rows = _map(_structured_row, units, spec.jobs)

    groups: dict[tuple, list[dict[str, Any]]] = {}
    for r in rows:
        groups.setdefault((r["topology"], r["alpha"], r["n"]), []).append(r)
    summary = []
    for (topo, a, n), grp in groups.items():
        col = lambda name: [float(r[name]) for r in grp]  # noqa: E731
        below = sum(float(r["driver_in_degree"]) < float(r["network_in_degree"]) for r in grp)
        summary.append({
            "topology": topo, "alpha": a, "n": n, "realizations": len(grp),
            "num_drivers_mean": _fmt(_mean(col("num_drivers"))),
            "num_drivers_std": _fmt(_std(col("num_drivers"))),
            "driver_in_degree_mean": _fmt(_mean(col("driver_in_degree"))),
            "network_in_degree_mean": _fmt(_mean(col("network_in_degree"))),
            "driver_betweenness_mean": _fmt(_mean(col("driver_betweenness"))),
            "network_betweenness_mean": _fmt(_mean(col("network_betweenness"))),
            "driver_below_mean_in_degree": below,
        })
    return rows, summary


# -- output ---------------------------------------------------------------


def to_csv(rows: Iterable[dict[str, Any]], header: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(header), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def to_json(rows: Iterable[dict[str, Any]]) -> str:
    return json.dumps(list(rows), indent=1) + "\n"
