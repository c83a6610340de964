"""
Command-line surface of the route optimizer.

    python -m src.cli gen-topology --nodes 7 --seed 1234 --out topo.json
    python -m src.cli enumerate --nodes 5
    python -m src.cli brute-opf --topology topo.json
    python -m src.cli run --algo eqpo --topology topo.json --seed 1234 --stages
    python -m src.cli sweep --config config/sweep_default.json
    python -m src.cli case-study
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from src.case_study import N_NODES as CASE_STUDY_NODES, case_study_utilities
from src.harness import DEFAULT_MASTER_SEED, emit_results, ensure_writable, load_config, run_sweep
from src.net_model import RouteUtilities, generate_topology, load_topology, save_topology
from src.optimizers import ALGORITHMS, OptimizerReport, cdp_run, eqpo_run, run_algorithm
from src.pareto_core import brute_force_opf
from src.route_space import enumerate_routes, format_route, route_key


def _stage_table(report: OptimizerReport) -> pd.DataFrame:
    return pd.DataFrame(
        [(s.stage_index, *s.counts()) for s in report.stages],
        columns=["stage", "generated", "opf", "survivors"],
    )


def _routes(routes) -> str:
    return ",".join(format_route(r) for r in routes) or "{}"


# ============================================================================
# SUBCOMMANDS
# ============================================================================

def cmd_gen_topology(args) -> int:
    topo = generate_topology(args.nodes, args.seed)
    path = Path(args.out)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    save_topology(topo, path)
    print(f"✓ Wrote {args.nodes}-node topology (seed {args.seed}) to {path}")
    return 0


def cmd_enumerate(args) -> int:
    for route_id, route in enumerate(enumerate_routes(args.nodes)):
        print(f"{route_id} {format_route(route)}")
    return 0


def cmd_brute_opf(args) -> int:
    utilities = RouteUtilities.from_topology(load_topology(args.topology))
    routes = enumerate_routes(utilities.n_nodes)
    opf = brute_force_opf(((r, utilities.uv(r)) for r in routes), strong=args.strong)
    for route, uv in opf.members.items():
        print(f"{format_route(route)} ber={uv.ber:.6e} power={uv.power:.6e} delay={uv.delay:g}")
    print(f"✓ {len(opf)} of {len(routes)} routes are Pareto-optimal")
    return 0


def cmd_run(args) -> int:
    utilities = RouteUtilities.from_topology(load_topology(args.topology))
    report = run_algorithm(args.algo, utilities, np.random.default_rng(args.seed))
    report.seed = args.seed
    print(json.dumps(report.to_dict(), indent=2))
    if args.stages:
        print(_stage_table(report).to_csv(index=False), end="")
    return 0


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    if args.output_dir:
        config.output_dir = Path(args.output_dir)
    ensure_writable(config.output_dir)
    metrics = run_sweep(config, verbose=not args.quiet)
    written = emit_results(metrics, config.output_dir, config.budget_points)
    if not args.quiet:
        print("=" * 70)
        for path in written:
            print(f"✓ Wrote {path}")
    return 0


def cmd_case_study(args) -> int:
    utilities = case_study_utilities()

    print("=" * 70)
    print(f"[STEP 1] CDP trellis over the {CASE_STUDY_NODES}-node case study")
    print("=" * 70)
    cdp = cdp_run(utilities)
    for stage in cdp.stages:
        print(f"Stage {stage.stage_index}:")
        print(f"  S_gen  = {_routes(stage.s_gen)}")
        print(f"  S_OPF  = {_routes(sorted(stage.s_opf.keys(), key=route_key))}")
        print(f"  S_surv = {_routes(stage.s_surv)}")
    print(f"✓ CDP: {cdp.ledger.parallel_cfes:g} CFEs")

    print("=" * 70)
    print("[STEP 2] EQPO trellis (quantum search simulated)")
    print("=" * 70)
    eqpo = eqpo_run(utilities, rng=np.random.default_rng(args.seed))
    for stage in eqpo.stages:
        print(f"Stage {stage.stage_index}:")
        print(f"  S_gen  = {_routes(stage.s_gen)}")
        print(f"  S_OPF  = {_routes(sorted(stage.s_opf.keys(), key=route_key))}")
        print(f"  S_surv = {_routes(stage.s_surv)}")
    print(f"✓ EQPO: {eqpo.ledger.parallel_cfes:g} parallel / {eqpo.ledger.sequential_cfes:g} sequential CFEs")

    print("=" * 70)
    print(f"OPF = {_routes(cdp.opf_routes())}")
    if set(eqpo.opf.keys()) != set(cdp.opf.keys()):
        print(f"✗ EQPO front differs: {_routes(eqpo.opf_routes())}")
    return 0


# ============================================================================
# ENTRY POINT
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="python -m src.cli",
                                     description="Pareto-optimal routing in wireless multihop networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-topology", help="Generate and save a random topology")
    p.add_argument("--nodes", type=int, required=True, help="Total node count including SN and DN")
    p.add_argument("--seed", type=int, default=DEFAULT_MASTER_SEED)
    p.add_argument("--out", required=True, help="Output JSON file")
    p.set_defaults(func=cmd_gen_topology)

    p = sub.add_parser("enumerate", help="List every legitimate route in canonical order")
    p.add_argument("--nodes", type=int, required=True)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("brute-opf", help="Exact Pareto front of a saved topology")
    p.add_argument("--topology", required=True)
    p.add_argument("--strong", action="store_true", help="Strongly Pareto-optimal routes only")
    p.set_defaults(func=cmd_brute_opf)

    p = sub.add_parser("run", help="Run one optimizer on a saved topology")
    p.add_argument("--algo", choices=ALGORITHMS, required=True)
    p.add_argument("--topology", required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_MASTER_SEED)
    p.add_argument("--stages", action="store_true", help="Also print the per-stage set sizes")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="Monte-Carlo sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--output-dir", help="Override the config's output_dir")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("case-study", aliases=["table1-demo"], help="Trellis narrative of the 5-node case study")
    p.add_argument("--seed", type=int, default=DEFAULT_MASTER_SEED)
    p.set_defaults(func=cmd_case_study)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KeyError as e:
        # str() of a KeyError is the repr of its key
        print(f"✗ ERROR: {e.args[0] if e.args else e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"✗ ERROR: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        print(f"✗ ERROR: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
