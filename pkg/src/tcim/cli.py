"""Command-line harness.

Subcommands:
  gen        write a synthetic edge-list graph
  select     run the two-phase seed selection
  baseline   run a comparison algorithm (greedymc, celf, celfpp, singlediscount)
  grid       sweep (algorithm, k, epsilon, |S_A|) combinations into a CSV
  influence  Monte-Carlo influence estimate for fixed seed sets

Exit codes: 0 success, 2 usage error, 3 contract violation, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

from . import __version__
from ._backend import BACKEND_NAME
from .baselines import celf, estimate_sigma_mc, greedy_mc, greedymc_min_r, single_discount
from .engine import STREAM_SELECT, TcimParams, tcim
from .errors import ContractViolation, EdgeListParseError
from .graph import (assign_weighted_ic, generate_synthetic, load_edge_list,
                    serialize_edge_list)
from .models import ModelKind
from .rng import RngStream

# stream index for post-selection Monte-Carlo evaluation (the pipeline
# itself uses indices 0-2)
STREAM_EVAL = 3

CSV_FIELDS = ["algorithm", "model", "k", "epsilon", "ell", "sa_size", "seed",
              "seeds", "spread_estimate", "spread_mc", "wall_time", "theta",
              "lb_estimate", "lb_refined", "memory_estimate",
              "simulations_used", "error"]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _add_common(p: argparse.ArgumentParser, multi: bool = False) -> None:
    p.add_argument("--graph", required=True,
                   help="edge-list file: 'u v [p]' per line, '#' comments")
    p.add_argument("--model", choices=[m.value for m in ModelKind],
                   default="coicm", help="propagation model (default: coicm)")
    if multi:
        p.add_argument("--k", type=_int_list, default=[1],
                       help="comma-separated list of seed budgets")
        p.add_argument("--epsilon", type=_float_list, default=[0.5],
                       help="comma-separated list of accuracy parameters in (0,1]")
    else:
        p.add_argument("--k", type=int, default=1, help="seed budget (default: 1)")
        p.add_argument("--epsilon", type=float, default=0.5,
                       help="accuracy parameter in (0,1] (default: 0.5)")
    p.add_argument("--ell", type=float, default=1.0,
                   help="confidence exponent >= 0.5 (default: 1.0)")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--seed-a-file",
                       help="file of opponent seed node ids (whitespace separated)")
    if multi:
        group.add_argument("--seed-a-auto", type=_int_list, metavar="J",
                           help="comma-separated opponent seed counts; each is "
                                "auto-generated by a selection run with no "
                                "opponent, epsilon=0.5, ell=1")
    else:
        group.add_argument("--seed-a-auto", type=int, metavar="J",
                           help="auto-generate J opponent seeds via a selection "
                                "run with no opponent, epsilon=0.5, ell=1")
    p.add_argument("--seed", type=int, default=0, help="64-bit RNG seed (default: 0)")
    p.add_argument("--sims", type=int, default=50_000,
                   help="Monte-Carlo simulations for spread_mc (default: 50000)")
    p.add_argument("--threads", type=int, default=1,
                   help="worker cap for instance sampling (currently 1)")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"], default=None,
                   help="output format (default: json; grid defaults to csv)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tcim",
        description="Competitive influence maximization toolkit "
                    f"(kernel backend: {BACKEND_NAME})")
    parser.add_argument("--version", action="version", version=f"tcim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic edge-list graph")
    g.add_argument("--kind",
                   choices=["erdos_renyi", "random_k_out", "power_law_out"],
                   default="random_k_out")
    g.add_argument("--n", type=int, required=True, help="node count")
    g.add_argument("--param", type=float, required=True,
                   help="edge probability (erdos_renyi) or out-degree (random_k_out)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--weighted-ic", action="store_true",
                   help="assign p_uv = 1/in_degree(v)")
    g.add_argument("--out", help="output path (default: stdout)")

    s = sub.add_parser("select", help="two-phase competitive seed selection")
    _add_common(s)

    b = sub.add_parser("baseline", help="run a comparison algorithm")
    b.add_argument("--algorithm", required=True,
                   choices=["greedymc", "celf", "celfpp", "singlediscount"])
    b.add_argument("--r", type=int, default=10_000,
                   help="simulations per marginal-gain estimate (default: 10000)")
    b.add_argument("--print-min-r", action="store_true",
                   help="also report the theoretically sufficient r "
                        "(optimum lower-bounded by k)")
    _add_common(b)

    gr = sub.add_parser("grid", help="sweep parameter combinations into a CSV")
    gr.add_argument("--algorithm", default="tcim",
                    help="comma-separated subset of "
                         "tcim,greedymc,celf,celfpp,singlediscount")
    gr.add_argument("--r", type=int, default=10_000,
                    help="simulations per baseline marginal estimate")
    _add_common(gr, multi=True)

    i = sub.add_parser("influence", help="Monte-Carlo influence of fixed seed sets")
    i.add_argument("--graph", required=True)
    i.add_argument("--model", choices=[m.value for m in ModelKind], default="coicm")
    i.add_argument("--seed-a-file", help="opponent seed file (default: empty set)")
    i.add_argument("--seed-b-file", required=True, help="evaluated seed file")
    i.add_argument("--seed", type=int, default=0)
    i.add_argument("--sims", type=int, default=50_000)
    i.add_argument("--out")
    i.add_argument("--format", choices=["json", "csv"], default=None)
    return parser


def _read_seed_file(path: str) -> list[int]:
    with open(path, encoding="utf-8") as fh:
        return [int(tok) for tok in fh.read().split()]


def _load_graph(path: str):
    with open(path, encoding="utf-8") as fh:
        return load_edge_list(fh)


def _resolve_sa(args, graph, model, auto_j=None) -> list[int]:
    if args.seed_a_file:
        return sorted(_read_seed_file(args.seed_a_file))
    j = auto_j if auto_j is not None else getattr(args, "seed_a_auto", None)
    if j:
        params = TcimParams(k=j, epsilon=0.5, ell=1.0, model=model, seed=args.seed)
        return sorted(tcim(graph, [], params).seeds_B.as_array().tolist())
    return []


def _emit(record: dict, args) -> None:
    fmt = args.format or "json"
    if fmt == "json":
        text = json.dumps(record, sort_keys=True, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, extrasaction="ignore")
        writer.writeheader()
        writer.writerow({k: record.get(k, "") for k in CSV_FIELDS})
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    graph = generate_synthetic(args.kind, args.n, args.param, args.seed)
    if args.weighted_ic:
        graph = assign_weighted_ic(graph)
    buf = io.StringIO()
    serialize_edge_list(graph, buf)
    text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_select(args) -> int:
    graph = _load_graph(args.graph)
    model = ModelKind(args.model)
    sa = _resolve_sa(args, graph, model)
    params = TcimParams(k=args.k, epsilon=args.epsilon, ell=args.ell,
                        model=model, seed=args.seed)
    result = tcim(graph, sa, params)
    spread_mc = estimate_sigma_mc(model, graph, sa,
                                  result.seeds_B.as_array(), args.sims,
                                  RngStream(args.seed, STREAM_EVAL))
    _emit({
        "algorithm": "tcim",
        "model": model.value,
        "k": args.k,
        "epsilon": args.epsilon,
        "ell": args.ell,
        "seed": args.seed,
        "sa_size": len(sa),
        "seeds": sorted(int(u) for u in result.seeds_B.as_array()),
        "theta": result.theta,
        "lb_estimate": result.lb_estimate,
        "lb_refined": result.lb_refined,
        "spread_estimate": result.spread_estimate,
        "spread_mc": spread_mc,
        "timings": result.wall_times,
        "memory_estimate": result.peak_memory_estimate,
        "backend": BACKEND_NAME,
    }, args)
    return 0


def _run_baseline(algorithm, model, graph, sa, k, r, seed):
    stream = RngStream(seed, STREAM_SELECT)
    if algorithm == "greedymc":
        return greedy_mc(model, graph, sa, k, r, stream)
    if algorithm == "celf":
        return celf(model, graph, sa, k, r, stream)
    if algorithm == "celfpp":
        return celf(model, graph, sa, k, r, stream, plus_plus_flag=True)
    if algorithm == "singlediscount":
        return single_discount(graph, sa, k)
    raise ContractViolation(f"unknown algorithm {algorithm!r}")


def cmd_baseline(args) -> int:
    graph = _load_graph(args.graph)
    model = ModelKind(args.model)
    sa = _resolve_sa(args, graph, model)
    result = _run_baseline(args.algorithm, model, graph, sa, args.k,
                           args.r, args.seed)
    spread_mc = estimate_sigma_mc(model, graph, sa,
                                  result.seeds_B.as_array(), args.sims,
                                  RngStream(args.seed, STREAM_EVAL))
    record = {
        "algorithm": args.algorithm,
        "model": model.value,
        "k": args.k,
        "seed": args.seed,
        "sa_size": len(sa),
        "seeds": sorted(int(u) for u in result.seeds_B.as_array()),
        "spread_mc": spread_mc,
        "simulations_used": result.simulations_used,
        "wall_time": result.wall_time,
        "backend": BACKEND_NAME,
    }
    if args.print_min_r:
        record["min_r"] = greedymc_min_r(graph.n, args.k, args.ell,
                                         args.epsilon, opt_lower=args.k)
    _emit(record, args)
    return 0


def cmd_influence(args) -> int:
    graph = _load_graph(args.graph)
    model = ModelKind(args.model)
    sa = sorted(_read_seed_file(args.seed_a_file)) if args.seed_a_file else []
    sb = sorted(_read_seed_file(args.seed_b_file))
    sigma = estimate_sigma_mc(model, graph, sa, sb, args.sims,
                              RngStream(args.seed, STREAM_EVAL))
    _emit({"model": model.value, "sa_size": len(sa), "seeds": sb,
           "spread_mc": sigma, "simulations_used": args.sims,
           "seed": args.seed}, args)
    return 0


def _grid_row(algorithm, model, graph, sa, k, epsilon, ell, seed, r, sims):
    row = {"algorithm": algorithm, "model": model.value, "k": k,
           "epsilon": epsilon, "ell": ell, "sa_size": len(sa), "seed": seed}
    t0 = time.perf_counter()
    if algorithm == "tcim":
        result = tcim(graph, sa, TcimParams(k=k, epsilon=epsilon, ell=ell,
                                            model=model, seed=seed))
        seeds = result.seeds_B
        row.update(theta=result.theta, lb_estimate=result.lb_estimate,
                   lb_refined=result.lb_refined,
                   spread_estimate=result.spread_estimate,
                   memory_estimate=result.peak_memory_estimate)
    else:
        result = _run_baseline(algorithm, model, graph, sa, k, r, seed)
        seeds = result.seeds_B
        row.update(simulations_used=result.simulations_used)
    row["wall_time"] = time.perf_counter() - t0
    row["seeds"] = " ".join(str(int(u)) for u in sorted(seeds.as_array().tolist()))
    row["spread_mc"] = estimate_sigma_mc(model, graph, sa, seeds.as_array(),
                                         sims, RngStream(seed, STREAM_EVAL))
    return row


def cmd_grid(args) -> int:
    graph = _load_graph(args.graph)
    model = ModelKind(args.model)
    algorithms = [a for a in args.algorithm.split(",") if a]
    sa_variants: list[tuple[int, list[int]]] = []
    if args.seed_a_file:
        sa = sorted(_read_seed_file(args.seed_a_file))
        sa_variants.append((len(sa), sa))
    elif args.seed_a_auto:
        for j in args.seed_a_auto:
            sa_variants.append((j, _resolve_sa(args, graph, model, auto_j=j)))
    else:
        sa_variants.append((0, []))

    rows = []
    for algorithm in algorithms:
        for _, sa in sa_variants:
            for k in args.k:
                for epsilon in args.epsilon:
                    try:
                        rows.append(_grid_row(algorithm, model, graph, sa, k,
                                              epsilon, args.ell, args.seed,
                                              args.r, args.sims))
                    except Exception as exc:  # record the failure, keep going
                        rows.append({"algorithm": algorithm, "model": model.value,
                                     "k": k, "epsilon": epsilon, "ell": args.ell,
                                     "sa_size": len(sa), "seed": args.seed,
                                     "error": str(exc)})

    fmt = args.format or "csv"
    buf = io.StringIO()
    if fmt == "csv":
        writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in CSV_FIELDS})
    else:
        buf.write(json.dumps(rows, sort_keys=True, indent=2) + "\n")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


_COMMANDS = {"gen": cmd_gen, "select": cmd_select, "baseline": cmd_baseline,
             "grid": cmd_grid, "influence": cmd_influence}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ContractViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (OSError, EdgeListParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
