"""
Route Optimizers
================
- bf     : brute-force front over the entire route space
- cdp    : optimal classical dynamic-programming trellis
- eqpo   : relaxed trellis driven by the pre-initialised NDQIO front finder
- ndqio  : NDQIO-style full search (one flat P-NDQIO stage over every route)
- ndqo   : NDQO-style full search (a dominance chain from every route)

Every optimizer returns an OptimizerReport carrying the exported front, the
CFE ledger, per-stage set sizes and the anytime trajectory of its front.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from src.net_model import Route, RouteUtilities, Topology, UtilityVector
from src.pareto_core import Dominance, ParetoFront, compare, front_of, strong_dominates, strongly_dominated_mask
from src.qsearch_sim import K, CostLedger, backward_search, dominance_chain
from src.route_space import enumerate_routes, format_route, generate_stage, route_key


ALGORITHMS = ("bf", "cdp", "eqpo", "ndqo", "ndqio")
# relations of a pool route to a sub-route that prune the route
PRUNING_RULES = {
    "strong": {Dominance.STRONG_DOMINATES},
    "weak": {Dominance.STRONG_DOMINATES, Dominance.WEAK_DOMINATES},
}


# ============================================================================
# DOMAIN TYPES
# ============================================================================

@dataclass(frozen=True)
class Snapshot:
    parallel_cfes: float
    sequential_cfes: float
    front: frozenset


@dataclass
class TrellisState:
    stage_index: int
    s_gen: list[Route]
    s_opf: ParetoFront
    s_surv: list[Route]

    def counts(self) -> tuple[int, int, int]:
        return len(self.s_gen), len(self.s_opf), len(self.s_surv)


@dataclass
class OptimizerReport:
    algorithm: str
    n_nodes: int
    opf: ParetoFront
    ledger: CostLedger
    stages: list[TrellisState] = field(default_factory=list)
    trajectory: list[Snapshot] = field(default_factory=list)
    seed: Optional[int] = None

    @property
    def stages_processed(self) -> int:
        return len(self.stages)

    @property
    def per_stage_counts(self) -> list[tuple[int, int, int]]:
        return [s.counts() for s in self.stages]

    def opf_routes(self) -> list[Route]:
        return sorted(self.opf.keys(), key=route_key)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "n_nodes": self.n_nodes,
            "seed": self.seed,
            "opf": [format_route(r) for r in self.opf_routes()],
            "parallel_cfes": self.ledger.parallel_cfes,
            "sequential_cfes": self.ledger.sequential_cfes,
            "stages": self.stages_processed,
            "per_stage_counts": [list(c) for c in self.per_stage_counts],
        }


def as_utilities(source: Union[Topology, RouteUtilities]) -> RouteUtilities:
    if isinstance(source, RouteUtilities):
        return source
    if isinstance(source, Topology):
        return RouteUtilities.from_topology(source)
    raise ValueError(f"expected a Topology or RouteUtilities, got {type(source).__name__}")


def _merge(*groups) -> list[Route]:
    return sorted({r for g in groups for r in g}, key=route_key)


def _max_stages(n_nodes: int) -> int:
    # stage i generates routes of i + 1 hops; the longest route has n_nodes - 1
    return max(1, n_nodes - 2)


def _snapshot(ledger: CostLedger, front) -> Snapshot:
    return Snapshot(ledger.parallel_cfes, ledger.sequential_cfes, frozenset(front))


# ============================================================================
# BRUTE FORCE
# ============================================================================

def bf_run(source, rng=None) -> OptimizerReport:
    """Exhaustive all-pairs front; N (N - 1) comparisons, no parallelism."""
    utilities = as_utilities(source)
    routes = enumerate_routes(utilities.n_nodes)
    uvs = utilities.matrix(routes)
    dominated = strongly_dominated_mask(uvs)
    opf = ParetoFront({r: utilities.uv(r) for r, d in zip(routes, dominated) if not d})

    ledger = CostLedger()
    n = len(routes)
    ledger.charge(n * (n - 1), n * (n - 1))
    return OptimizerReport("bf", utilities.n_nodes, opf, ledger,
                           trajectory=[_snapshot(ledger, opf.keys())])


# ============================================================================
# CLASSICAL DYNAMIC PROGRAMMING
# ============================================================================

def cdp_run(source, n_nodes: Optional[int] = None, pruning: str = "strong") -> OptimizerReport:
    """
    Optimal trellis search.

    Stage 1 holds the direct route and every 2-hop route. Each stage
    (a) generates routes from the previous survivors by inserting one relay
        before the DN,
    (b) takes the front of the generated routes joined with the previous front,
    (c) keeps as survivors the generated routes whose sub-route is not
        dominated by any route of that pool.

    Parameters:
    -----------
    source : Topology or RouteUtilities
        Channel model or injected utility table
    n_nodes : int
        Optional consistency check against the source
    pruning : str
        "strong" prunes a route when some pool route strongly dominates its
        sub-route, "weak" when some pool route weakly dominates it. Both
        keep the exported front exact.
    """
    utilities = as_utilities(source)
    n = utilities.n_nodes
    if n_nodes is not None and n_nodes != n:
        raise ValueError(f"n_nodes {n_nodes} does not match the source's {n}")
    if pruning not in PRUNING_RULES:
        raise ValueError(f"pruning must be one of {tuple(PRUNING_RULES)}, got {pruning!r}")
    prunes = PRUNING_RULES[pruning]

    ledger = CostLedger()
    direct = (1, n)
    s_gen = [direct] + [(1, r, n) for r in range(2, n)]
    s_opf = ParetoFront()
    stages: list[TrellisState] = []
    trajectory = [_snapshot(ledger, ())]

    for i in range(1, _max_stages(n) + 1):
        pool = _merge(s_gen, s_opf.keys())
        pool_uvs = [utilities.uv(r) for r in pool]

        # every pool route is compared with every other one
        ledger.charge(len(pool) * (len(pool) - 1), len(pool) * (len(pool) - 1))
        s_opf = front_of(pool, utilities)
        trajectory.append(_snapshot(ledger, s_opf.keys()))

        s_surv: list[Route] = []
        if i < _max_stages(n):
            candidates = [r for r in s_gen if r != direct]
            ledger.charge(len(candidates) * len(pool), len(candidates) * len(pool))
            for r in candidates:
                sub = utilities.subroute_uv(r)
                if not any(compare(other, sub) in prunes for other in pool_uvs):
                    s_surv.append(r)

        stages.append(TrellisState(i, s_gen, s_opf, s_surv))
        if not s_surv:
            break
        s_gen = generate_stage(s_surv, n, relaxed=False)

    return OptimizerReport("cdp", n, s_opf, ledger, stages=stages, trajectory=trajectory)


# ============================================================================
# QUANTUM-ASSISTED FRONT FINDING
# ============================================================================

def pndqio_run(s_gen: Sequence[Route], prior_opf: ParetoFront, uv: Mapping[Route, UtilityVector],
               rng: np.random.Generator, ledger: CostLedger,
               trajectory: Optional[list[Snapshot]] = None) -> ParetoFront:
    """
    Pre-initialised NDQIO: front of s_gen joined with prior_opf.

    The front starts from prior_opf. A backward search looks for a route of
    s_gen that no front member dominates; a dominance chain descends from it
    to a non-dominated route, which evicts the front members it dominates
    and joins the front. Two consecutive empty backward searches end the
    process.
    """
    if len(s_gen) == 0:
        raise ValueError("P-NDQIO needs a non-empty generated route set")
    front = dict(prior_opf.members)
    failures = 0
    while failures < 2:
        outcome = backward_search(s_gen, ParetoFront(front), uv, rng, ledger)
        if outcome.found is None:
            failures += 1
            continue
        failures = 0
        best = dominance_chain(outcome.found, s_gen, uv, rng, ledger)

        # self-repair: the new route is compared with every front member
        ledger.charge(len(front) / K, len(front))
        best_uv = uv[best]
        front = {r: u for r, u in front.items() if not strong_dominates(best_uv, u)}
        front[best] = best_uv
        if trajectory is not None:
            trajectory.append(_snapshot(ledger, front))
    return ParetoFront(front)


def eqpo_run(source, n_nodes: Optional[int] = None,
             rng: Optional[np.random.Generator] = None) -> OptimizerReport:
    """
    Evolutionary quantum Pareto optimization.

    Starts from the direct route. Each stage generates routes from the
    survivors by inserting one unused relay into any hop, joins the previous
    front, runs P-NDQIO on the result and keeps as survivors only the routes
    that newly entered the front. Stops when no survivors are left or the
    longest routes have been generated.
    """
    utilities = as_utilities(source)
    n = utilities.n_nodes
    if n_nodes is not None and n_nodes != n:
        raise ValueError(f"n_nodes {n_nodes} does not match the source's {n}")
    rng = rng if rng is not None else np.random.default_rng()

    ledger = CostLedger()
    direct = (1, n)
    s_opf = ParetoFront({direct: utilities.uv(direct)})
    s_surv: list[Route] = [direct]
    stages: list[TrellisState] = []
    trajectory = [_snapshot(ledger, s_opf.keys())]

    for i in range(1, _max_stages(n) + 1):
        generated = generate_stage(s_surv, n, relaxed=True)
        s_gen = _merge(generated, s_opf.keys())
        new_opf = pndqio_run(s_gen, s_opf, utilities, rng, ledger, trajectory)
        s_surv = sorted(new_opf.keys() - s_opf.keys(), key=route_key)
        s_opf = new_opf
        stages.append(TrellisState(i, s_gen, s_opf, s_surv))
        if not s_surv:
            break

    return OptimizerReport("eqpo", n, s_opf, ledger, stages=stages, trajectory=trajectory)


# ============================================================================
# FULL-SEARCH BENCHMARKERS
# ============================================================================

def ndqio_benchmark(all_routes: Sequence[Route], uv: Mapping[Route, UtilityVector],
                    rng: np.random.Generator) -> OptimizerReport:
    """NDQIO: a single P-NDQIO stage over the entire route space, empty initial front."""
    all_routes = list(all_routes)
    ledger = CostLedger()
    trajectory = [_snapshot(ledger, ())]
    opf = pndqio_run(all_routes, ParetoFront(), uv, rng, ledger, trajectory)
    n = all_routes[0][-1] if all_routes else 0
    stage = TrellisState(1, all_routes, opf, [])
    return OptimizerReport("ndqio", n, opf, ledger, stages=[stage], trajectory=trajectory)


def ndqo_benchmark(all_routes: Sequence[Route], uv: Mapping[Route, UtilityVector],
                   rng: np.random.Generator) -> OptimizerReport:
    """
    NDQO: a dominance chain started from every route, without hardware
    parallelism (1 parallel = 1 sequential CFE per activation).

    A chain that ends on a dominated route (missed search) is repaired
    against the collected front like a P-NDQIO insertion.
    """
    all_routes = list(all_routes)
    ledger = CostLedger()
    trajectory = [_snapshot(ledger, ())]
    found: dict[Route, UtilityVector] = {}
    for start in all_routes:
        best = dominance_chain(start, all_routes, uv, rng, ledger, parallel_weight=1.0)
        if best in found:
            continue
        ledger.charge(len(found), len(found))
        best_uv = uv[best]
        if any(strong_dominates(u, best_uv) for u in found.values()):
            continue
        found = {r: u for r, u in found.items() if not strong_dominates(best_uv, u)}
        found[best] = best_uv
        trajectory.append(_snapshot(ledger, found))
    opf = ParetoFront(found)
    n = all_routes[0][-1] if all_routes else 0
    stage = TrellisState(1, all_routes, opf, [])
    return OptimizerReport("ndqo", n, opf, ledger, stages=[stage], trajectory=trajectory)


# ============================================================================
# DISPATCH
# ============================================================================

def run_algorithm(name: str, source, rng: Optional[np.random.Generator] = None) -> OptimizerReport:
    utilities = as_utilities(source)
    rng = rng if rng is not None else np.random.default_rng()
    runners: dict[str, Callable[[], OptimizerReport]] = {
        "bf": lambda: bf_run(utilities),
        "cdp": lambda: cdp_run(utilities),
        "eqpo": lambda: eqpo_run(utilities, rng=rng),
        "ndqio": lambda: ndqio_benchmark(enumerate_routes(utilities.n_nodes), utilities, rng),
        "ndqo": lambda: ndqo_benchmark(enumerate_routes(utilities.n_nodes), utilities, rng),
    }
    if name not in runners:
        raise ValueError(f"unknown algorithm {name!r}, expected one of {ALGORITHMS}")
    return runners[name]()
