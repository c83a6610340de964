"""
Experiment Harness
==================
Monte-Carlo sweeps over node counts and algorithms, metric aggregation and
result persistence.

Every run draws its own topology from a child seed derived from the master
seed, runs each selected algorithm on that same topology (paired design) and
scores the exported fronts against the brute-force truth.

Outputs (written by emit_results):
    results.csv                 one row per (node_count, algorithm, run)
    summary.json / summary.xlsx aggregates, mean and standard error
    plotdata/*.csv              complexity vs node count, accuracy vs CFE budget
"""

from __future__ import annotations

import json
import math
import tempfile
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import pandas as pd

from src.net_model import RadioConstants, RouteUtilities, generate_topology
from src.optimizers import ALGORITHMS, OptimizerReport, run_algorithm
from src.pareto_core import normalized_distance, pareto_completion, pareto_distances, suboptimality_threshold
from src.route_space import enumerate_routes, format_route


# ============================================================================
# CONFIGURATION
# ============================================================================

DEFAULT_MASTER_SEED = 1234
DEFAULT_RUNS_PER_POINT = 1000
DEFAULT_NODE_COUNTS = [5, 6, 7]
DEFAULT_ALGORITHMS = ["cdp", "eqpo", "ndqio"]
DEFAULT_BUDGET_POINTS = 25

# route counts explode beyond this; only complexity is reported there
ACCURACY_NODE_LIMIT = 10

# one dominance chain per route; only accepted below ACCURACY_NODE_LIMIT
SMALL_NETWORK_ALGORITHMS = ("ndqo",)

RUN_COLUMNS = [
    "node_count", "algorithm", "run_index", "seed",
    "parallel_cfes", "sequential_cfes",
    "pareto_distance", "normalized_distance", "suboptimal_fraction", "completion",
    "opf_size", "stages", "opf",
]
METRIC_COLUMNS = ["parallel_cfes", "sequential_cfes", "pareto_distance", "normalized_distance",
                  "suboptimal_fraction", "completion", "opf_size"]


@dataclass
class ExperimentConfig:
    node_counts: list[int] = field(default_factory=lambda: list(DEFAULT_NODE_COUNTS))
    runs_per_point: int = DEFAULT_RUNS_PER_POINT
    algorithms: list[str] = field(default_factory=lambda: list(DEFAULT_ALGORITHMS))
    master_seed: int = DEFAULT_MASTER_SEED
    radio: RadioConstants = field(default_factory=RadioConstants)
    output_dir: Path = Path("./results")
    budget_points: int = DEFAULT_BUDGET_POINTS

    def __post_init__(self):
        self.output_dir = Path(self.output_dir)
        if self.runs_per_point < 1:
            raise ValueError(f"runs_per_point must be at least 1, got {self.runs_per_point}")
        if not self.node_counts:
            raise ValueError("node_counts must not be empty")
        if any(n < 3 for n in self.node_counts):
            raise ValueError(f"node counts must all be >= 3, got {self.node_counts}")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown or not self.algorithms:
            raise ValueError(f"algorithms must be a non-empty subset of {ALGORITHMS}, got {self.algorithms}")
        too_large = [n for n in self.node_counts if n >= ACCURACY_NODE_LIMIT]
        restricted = [a for a in self.algorithms if a in SMALL_NETWORK_ALGORITHMS]
        if too_large and restricted:
            raise ValueError(f"{restricted} only run below {ACCURACY_NODE_LIMIT} nodes, got node counts {too_large}")
        if self.budget_points < 2:
            raise ValueError(f"budget_points must be at least 2, got {self.budget_points}")


def load_config(path) -> ExperimentConfig:
    """Read an ExperimentConfig from a JSON file mirroring its field names."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValueError(f"malformed config file {path}: {e}") from e
    if not isinstance(doc, dict):
        raise ValueError(f"config file {path} must hold a JSON object")

    known = {f.name for f in fields(ExperimentConfig)}
    unknown = sorted(set(doc) - known)
    if unknown:
        raise ValueError(f"unknown config fields in {path}: {unknown}")
    try:
        if "radio" in doc:
            doc["radio"] = RadioConstants(**doc["radio"])
        return ExperimentConfig(**doc)
    except TypeError as e:
        raise ValueError(f"invalid config file {path}: {e}") from e


def derive_seed(master_seed: int, node_count: int, run_index: int) -> int:
    """
    Child seed of one run: the first 64-bit word generated by
    numpy.random.SeedSequence([master_seed, node_count, run_index]).
    """
    state = np.random.SeedSequence([master_seed, node_count, run_index]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def algorithm_rng(child_seed: int, algorithm: str) -> np.random.Generator:
    return np.random.default_rng([child_seed, ALGORITHMS.index(algorithm)])


# ============================================================================
# RUN RECORDS AND AGGREGATES
# ============================================================================

@dataclass
class RunRecord:
    node_count: int
    algorithm: str
    run_index: int
    seed: int
    parallel_cfes: float
    sequential_cfes: float
    pareto_distance: float
    normalized_distance: float
    suboptimal_fraction: float
    completion: float
    opf_size: int
    stages: int
    opf: str
    # (parallel_cfes, sequential_cfes, pareto_distance, completion) per front change
    curve: list = field(default_factory=list, repr=False)

    def row(self) -> dict:
        return {c: getattr(self, c) for c in RUN_COLUMNS}


@dataclass
class AggregateMetrics:
    node_count: int
    algorithm: str
    runs: int
    mean_parallel_cfes: float
    stderr_parallel_cfes: float
    mean_sequential_cfes: float
    stderr_sequential_cfes: float
    mean_pareto_distance: float
    stderr_pareto_distance: float
    mean_normalized_distance: float
    stderr_normalized_distance: float
    mean_suboptimal_fraction: float
    stderr_suboptimal_fraction: float
    mean_completion: float
    stderr_completion: float
    mean_opf_size: float
    stderr_opf_size: float
    records: list[RunRecord] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("records")
        return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in d.items()}


def _front_metrics(front, distance_of: dict, truth: set) -> tuple[float, float, float, float]:
    """(mean distance, mean normalized distance, suboptimal fraction, completion) of a front."""
    if not front:
        return math.nan, math.nan, math.nan, 0.0
    distances = [distance_of[r] for r in front]
    threshold = suboptimality_threshold(len(distance_of))
    suboptimal = sum(1 for d in distances if d >= threshold) / len(distances)
    normalized = [normalized_distance(d, len(distance_of)) for d in distances]
    return float(np.mean(distances)), float(np.mean(normalized)), suboptimal, pareto_completion(front, truth)


def evaluate_run(node_count: int, run_index: int, config: ExperimentConfig) -> list[RunRecord]:
    """One topology, every configured algorithm, scored against the brute-force truth."""
    seed = derive_seed(config.master_seed, node_count, run_index)
    utilities = RouteUtilities.from_topology(generate_topology(node_count, seed, config.radio))

    distance_of: dict = {}
    truth: set = set()
    if node_count < ACCURACY_NODE_LIMIT:
        routes = enumerate_routes(node_count)
        distances = pareto_distances(utilities.matrix(routes))
        distance_of = dict(zip(routes, distances.tolist()))
        truth = {r for r, d in distance_of.items() if d == 0}

    records = []
    for algorithm in config.algorithms:
        report: OptimizerReport = run_algorithm(algorithm, utilities, algorithm_rng(seed, algorithm))
        report.seed = seed
        if distance_of:
            distance, normalized, suboptimal, completion = _front_metrics(report.opf.keys(), distance_of, truth)
            curve = [(s.parallel_cfes, s.sequential_cfes, *_front_metrics(s.front, distance_of, truth)[::3])
                     for s in report.trajectory]
        else:
            distance = normalized = suboptimal = completion = math.nan
            curve = []
        records.append(RunRecord(
            node_count=node_count,
            algorithm=algorithm,
            run_index=run_index,
            seed=seed,
            parallel_cfes=report.ledger.parallel_cfes,
            sequential_cfes=report.ledger.sequential_cfes,
            pareto_distance=distance,
            normalized_distance=normalized,
            suboptimal_fraction=suboptimal,
            completion=completion,
            opf_size=len(report.opf),
            stages=report.stages_processed,
            opf=";".join(format_route(r) for r in report.opf_routes()),
            curve=curve,
        ))
    return records


def runs_frame(records: list[RunRecord]) -> pd.DataFrame:
    df = pd.DataFrame([r.row() for r in records], columns=RUN_COLUMNS)
    order = {a: i for i, a in enumerate(ALGORITHMS)}
    return (
        df.assign(_algo=df["algorithm"].map(order))
          .sort_values(["node_count", "_algo", "run_index"])
          .drop(columns="_algo")
          .reset_index(drop=True)
    )


def aggregate_frame(runs: pd.DataFrame) -> pd.DataFrame:
    """Mean and standard error of every metric per (node_count, algorithm)."""
    grouped = runs.groupby(["node_count", "algorithm"], sort=False)[METRIC_COLUMNS]
    means = grouped.mean().add_prefix("mean_")
    stderrs = grouped.sem().fillna(0.0).add_prefix("stderr_")
    counts = grouped.size().rename("runs")
    return pd.concat([counts, means, stderrs], axis=1).reset_index()


def _aggregate(records: list[RunRecord]) -> dict[tuple[int, str], AggregateMetrics]:
    agg = aggregate_frame(runs_frame(records))
    by_key: dict[tuple[int, str], list[RunRecord]] = {}
    for r in records:
        by_key.setdefault((r.node_count, r.algorithm), []).append(r)

    metrics = {}
    for row in agg.to_dict(orient="records"):
        key = (int(row["node_count"]), row["algorithm"])
        metrics[key] = AggregateMetrics(
            node_count=key[0],
            algorithm=key[1],
            runs=int(row["runs"]),
            **{f"{p}_{c}": float(row[f"{p}_{c}"]) for c in METRIC_COLUMNS for p in ("mean", "stderr")},
            records=sorted(by_key[key], key=lambda r: r.run_index),
        )
    return metrics


# ============================================================================
# SWEEP
# ============================================================================

def ensure_writable(output_dir) -> Path:
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile(dir=output_dir):
        pass
    return output_dir


def run_sweep(config: ExperimentConfig, verbose: bool = True) -> dict[tuple[int, str], AggregateMetrics]:
    """
    Run every (node_count, run_index) of the configuration.

    Returns:
    --------
    dict
        AggregateMetrics keyed by (node_count, algorithm), per-run records attached
    """
    ensure_writable(config.output_dir)

    records: list[RunRecord] = []
    for node_count in config.node_counts:
        if verbose:
            print("=" * 70)
            print(f"[{node_count} nodes] {config.runs_per_point} runs, algorithms: {', '.join(config.algorithms)}")
            if node_count >= ACCURACY_NODE_LIMIT:
                print(f"  accuracy metrics skipped for {node_count} nodes, complexity only")
        for run_index in range(config.runs_per_point):
            records.extend(evaluate_run(node_count, run_index, config))

    metrics = _aggregate(records)
    if verbose:
        for (node_count, algorithm), m in metrics.items():
            print(f"  ✓ {node_count} nodes | {algorithm:5s} | parallel {m.mean_parallel_cfes:10.1f} CFEs | "
                  f"sequential {m.mean_sequential_cfes:10.1f} CFEs | completion {m.mean_completion:.4f}")
    return metrics


# ============================================================================
# PERSISTENCE
# ============================================================================

def budget_curves(metrics: dict[tuple[int, str], AggregateMetrics], domain: str,
                  budget_points: int = DEFAULT_BUDGET_POINTS) -> pd.DataFrame:
    """
    Mean Pareto distance and completion versus invested CFE budget.

    For each run the front in force at a budget is the last front recorded
    at or below that cost. Budgets are log-spaced from 1 to the largest cost
    observed at the node count.
    """
    column = {"parallel": 0, "sequential": 1}[domain]
    rows = []
    node_counts = sorted({k[0] for k in metrics})
    for node_count in node_counts:
        keyed = {k: m for k, m in metrics.items() if k[0] == node_count}
        costs = [pt[column] for m in keyed.values() for r in m.records for pt in r.curve]
        if not costs:
            continue
        budgets = np.geomspace(1.0, max(max(costs), 1.0), budget_points)
        for (_, algorithm), m in keyed.items():
            for budget in budgets:
                distances, completions = [], []
                for r in m.records:
                    in_force = [pt for pt in r.curve if pt[column] <= budget]
                    if not in_force:
                        completions.append(0.0)
                        continue
                    _, _, distance, completion = in_force[-1]
                    completions.append(completion)
                    if not math.isnan(distance):
                        distances.append(distance)
                rows.append({
                    "node_count": node_count,
                    "algorithm": algorithm,
                    "budget": float(budget),
                    "mean_pareto_distance": float(np.mean(distances)) if distances else math.nan,
                    "mean_completion": float(np.mean(completions)),
                })
    return pd.DataFrame(rows, columns=["node_count", "algorithm", "budget",
                                       "mean_pareto_distance", "mean_completion"])


def emit_results(metrics: dict[tuple[int, str], AggregateMetrics], output_dir,
                 budget_points: int = DEFAULT_BUDGET_POINTS) -> list[Path]:
    if not metrics:
        raise ValueError("no run records to emit")
    output_dir = Path(output_dir)
    plot_dir = output_dir / "plotdata"
    written: list[Path] = []
    try:
        plot_dir.mkdir(parents=True, exist_ok=True)

        records = [r for m in metrics.values() for r in m.records]
        runs = runs_frame(records)
        summary = aggregate_frame(runs)

        path = output_dir / "results.csv"
        runs.to_csv(path, index=False)
        written.append(path)

        path = output_dir / "summary.json"
        doc = {"aggregates": [m.to_dict() for _, m in sorted(
            metrics.items(), key=lambda kv: (kv[0][0], ALGORITHMS.index(kv[0][1])))]}
        path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
        written.append(path)

        path = output_dir / "summary.xlsx"
        with pd.ExcelWriter(path) as writer:
            runs.to_excel(writer, sheet_name="Runs", index=False)
            summary.to_excel(writer, sheet_name="Summary", index=False)
        written.append(path)

        # complexity versus node count
        for domain in ("parallel", "sequential"):
            path = plot_dir / f"complexity_{domain}.csv"
            summary[["node_count", "algorithm", f"mean_{domain}_cfes", f"stderr_{domain}_cfes"]] \
                .rename(columns={f"mean_{domain}_cfes": "mean_cfes", f"stderr_{domain}_cfes": "stderr_cfes"}) \
                .to_csv(path, index=False)
            written.append(path)

        # accuracy versus invested budget
        for domain in ("parallel", "sequential"):
            curves = budget_curves(metrics, domain, budget_points)
            for metric in ("pareto_distance", "completion"):
                path = plot_dir / f"{metric}_vs_{domain}_cfes.csv"
                curves[["node_count", "algorithm", "budget", f"mean_{metric}"]].to_csv(path, index=False)
                written.append(path)
    except OSError as e:
        raise OSError(f"failed writing results under {output_dir}: {e}") from e
    return written
