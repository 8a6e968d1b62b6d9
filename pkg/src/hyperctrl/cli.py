"""Command-line interface.

Node ids on the command line and in every output are 1-based.  Exit codes:
0 success, 2 invalid input, 3 capacity exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from .errors import CapacityError, ValidationError
from .experiments import (
    LARGE_HEADER,
    SMALL_HEADER,
    STRUCTURED_HEADER,
    STRUCTURED_SUMMARY_HEADER,
    ExperimentSpec,
    log_sizes,
    run_large_scale,
    run_small_scale,
    run_structured,
    to_csv,
    to_json,
)
from .gen import TOPOLOGIES, GenConfig, generate
from .hypergraph import DirectedHypergraph, dumps_hypergraph, load_document, pattern_from_hypergraph
from .matching import compare_dilation_tests, hall_violator, maximum_matching, signal_expansion
from .oracle import DEFAULT_CAP, cross_validate
from .reach import target_accessible, walk_reach
from .select import METHODS, select, verify_structural_controllability

EXIT_OK, EXIT_VALIDATION, EXIT_CAPACITY = 0, 2, 3


def _ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()] if text else []


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _words(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _node_ids(text: str, h: DirectedHypergraph, what: str = "driver") -> list[int]:
    try:
        ids = _ints(text)
    except ValueError:
        raise ValidationError(f"{what} list must be comma-separated integers, got {text!r}") from None
    for v in ids:
        if not 1 <= v <= h.n:
            raise ValidationError(f"{what} {v} out of range 1..{h.n}")
    return [v - 1 for v in ids]


def _read_input(path: str) -> tuple[DirectedHypergraph, dict[str, Any] | None]:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    return load_document(text)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(obj: Any) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _one_based(nodes) -> list[int]:
    return [v + 1 for v in sorted(nodes)]


# -- subcommands ----------------------------------------------------------


def cmd_gen(args: argparse.Namespace) -> int:
    cfg = GenConfig(
        n=args.n, k=args.k, alpha=args.alpha, topology=args.topology, seed=args.seed,
        modules=args.modules, p_intra=args.p_intra, rewire=args.rewire,
        window=args.window, max_head=args.max_head,
    )
    h = generate(cfg)
    meta = cfg.metadata()
    meta["meta_hash"] = cfg.metadata_hash()
    _emit(dumps_hypergraph(h, meta), args.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    h, _ = _read_input(args.input)
    drivers = _node_ids(args.drivers, h)
    base = h.strip_controls()
    ok, diag = verify_structural_controllability(base, drivers)
    reach = walk_reach(base, drivers)
    report: dict[str, Any] = {
        "drivers": _one_based(drivers),
        "controllable": ok,
        "accessible": _one_based(reach.accessible),
        "inaccessible": _one_based(diag["inaccessible"]),
        "uncovered": _one_based(diag["uncovered"]),
        "strong_accessibility_only": diag["strong_accessibility_only"],
    }
    if args.targets:
        targets = _node_ids(args.targets, h, "target")
        report["targets"] = _one_based(targets)
        report["target_accessible"] = target_accessible(base, drivers, targets)
    if args.dilation in ("exact", "both"):
        cmp = compare_dilation_tests(base, drivers, args.max_n)
        d = cmp.to_dict(h.n)
        if args.dilation == "exact":
            d = {"exact_dilation": d["exact_dilation"], "exact_witness": d["exact_witness"]}
        report["dilation"] = d
    else:
        s = signal_expansion(base, drivers)
        m = maximum_matching(s)
        nodes, signals = hall_violator(s, m)
        report["dilation"] = {
            "matching_dilation": m.size < h.n,
            "matching_certificate": {"node_set": _one_based(nodes), "num_signals": len(signals)},
        }
    _emit(_dump(report), args.out)
    return EXIT_OK


def cmd_select(args: argparse.Namespace) -> int:
    h, _ = _read_input(args.input)
    base = h.strip_controls()
    kwargs = {"max_n": args.max_n} if args.method == "optimal" else {}
    res = select(base, args.method, **kwargs)
    if args.no_timing:
        res.runtime = 0.0
    _emit(_dump(res.to_dict()), args.out)
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    h, _ = _read_input(args.input)
    drivers = _node_ids(args.drivers, h)
    report = cross_validate(pattern_from_hypergraph(h.strip_controls()), drivers, args.trials, args.seed, cap=args.cap)
    out = report.to_dict()
    out["drivers"] = _one_based(drivers)
    _emit(_dump(out), args.out)
    return EXIT_OK


def _experiment_spec(args: argparse.Namespace, name: str) -> ExperimentSpec:
    return ExperimentSpec(
        experiment=name,
        ks=tuple(_ints(args.ks)),
        alphas=tuple(_floats(args.alphas)),
        ns=tuple(_ints(args.ns)) if args.ns else log_sizes(),
        topologies=tuple(_words(args.topologies)),
        trials=args.trials,
        seed=args.seed,
        methods=tuple(_words(args.methods)),
        timing=not args.no_timing,
        jobs=args.jobs,
    )


def _table(rows: list[dict[str, Any]], header: Sequence[str], fmt: str) -> str:
    return to_json(rows) if fmt == "json" else to_csv(rows, header)


def cmd_experiment(args: argparse.Namespace) -> int:
    defaults = {
        "small": dict(ks="4,6", alphas="0.5,1.0", ns="10", topologies="uniform",
                      trials=5, methods="matching,greedy,mag,optimal"),
        "large": dict(ks="4", alphas="1.0", ns="", topologies="uniform", trials=3,
                      methods="matching,greedy,mag"),
        "structured": dict(ks="4", alphas="0.5,1.0,2.0", ns="100",
                           topologies="scale_free,clustered,small_world", trials=10, methods="mag"),
    }[args.which]
    for key, val in defaults.items():
        if getattr(args, key) is None:
            setattr(args, key, val)
    if args.which == "small":
        rows = run_small_scale(_experiment_spec(args, "small_scale"))
        _emit(_table(rows, SMALL_HEADER, args.format), args.out)
    elif args.which == "large":
        rows = run_large_scale(_experiment_spec(args, "large_scale"))
        _emit(_table(rows, LARGE_HEADER, args.format), args.out)
    else:
        rows, summary = run_structured(_experiment_spec(args, "structured"))
        _emit(_table(rows, STRUCTURED_HEADER, args.format), args.out)
        if args.summary_out:
            _emit(_table(summary, STRUCTURED_SUMMARY_HEADER, args.format), args.summary_out)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    spec = ExperimentSpec(
        experiment="large_scale",
        ks=(args.k,),
        alphas=(args.alpha,),
        ns=tuple(_ints(args.ns)),
        topologies=(args.topology,),
        trials=args.trials,
        seed=args.seed,
        methods=tuple(_words(args.methods)),
        timing=not args.no_timing,
    )
    rows = [r for r in run_large_scale(spec) if r["trial"] == "mean"]
    header = ["n", "method", "num_drivers", "runtime_ms", "num_edges", "structure_size"]
    _emit(_table(rows, header, args.format), args.out)
    return EXIT_OK


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="base random seed (default 0)")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="table format")
    common.add_argument("--no-timing", action="store_true", help="report runtimes as 0 for reproducible output")

    p = argparse.ArgumentParser(prog="hyperctrl", description="Structural controllability of hypergraph polynomial systems.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a random hypergraph")
    g.add_argument("--topology", choices=TOPOLOGIES, default="uniform")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--alpha", type=float, required=True)
    g.add_argument("--modules", type=int, default=5)
    g.add_argument("--p-intra", type=float, default=0.9)
    g.add_argument("--rewire", type=float, default=0.1)
    g.add_argument("--window", type=int, default=None)
    g.add_argument("--max-head", type=int, default=1)
    g.set_defaults(func=cmd_gen)

    v = sub.add_parser("verify", parents=[common], help="check a driver set")
    v.add_argument("--input", required=True)
    v.add_argument("--drivers", default="", help="comma-separated 1-based node ids")
    v.add_argument("--targets", default="", help="optional target nodes for a reachability query")
    v.add_argument("--dilation", choices=("exact", "matching", "both"), default="matching")
    v.add_argument("--max-n", type=int, default=20, help="size limit for the exact dilation scan")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("select", parents=[common], help="select driver nodes")
    s.add_argument("--input", required=True)
    s.add_argument("--method", choices=METHODS, default="mag")
    s.add_argument("--max-n", type=int, default=12, help="size limit for the optimal method")
    s.set_defaults(func=cmd_select)

    o = sub.add_parser("oracle", parents=[common], help="numeric rank cross-check on random realizations")
    o.add_argument("--input", required=True)
    o.add_argument("--drivers", default="")
    o.add_argument("--trials", type=int, default=10)
    o.add_argument("--cap", type=int, default=DEFAULT_CAP)
    o.set_defaults(func=cmd_oracle)

    e = sub.add_parser("experiment", parents=[common], help="run a benchmark experiment")
    e.add_argument("which", choices=("small", "large", "structured"))
    e.add_argument("--ks", default=None, help="comma-separated tensor orders")
    e.add_argument("--alphas", default=None)
    e.add_argument("--ns", default=None)
    e.add_argument("--topologies", default=None)
    e.add_argument("--trials", type=int, default=None)
    e.add_argument("--methods", default=None)
    e.add_argument("--jobs", type=int, default=1, help="worker processes")
    e.add_argument("--summary-out", default=None, help="structured experiment summary table")
    e.set_defaults(func=cmd_experiment)

    b = sub.add_parser("bench", parents=[common], help="mean runtime per (n, method)")
    b.add_argument("--ns", default="1000,2000,4000,8000")
    b.add_argument("--k", type=int, default=4)
    b.add_argument("--alpha", type=float, default=1.0)
    b.add_argument("--topology", choices=TOPOLOGIES, default="uniform")
    b.add_argument("--trials", type=int, default=3)
    b.add_argument("--methods", default="mag")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
