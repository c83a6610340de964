"""
Quantum Search Simulator
========================
Classical Monte-Carlo rendition of the quantum search primitives the
optimizers are built on:

- Grover success probability after j iterations
- BBHT search for an unknown number of marked items
- backward non-dominance search against a Pareto front
- dominance chains (Durr-Hoyer style descents to a non-dominated item)

The simulator evaluates the marking predicate classically to obtain the
marked-set size for the probability model. That size never leaves this
module; callers only observe SearchOutcome.

Every oracle activation is charged to a CostLedger in cost-function
evaluations (CFEs): a parallel ledger (execution-time proxy, hardware
parallelism taken into account) and a sequential ledger (power proxy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Generic, Hashable, Mapping, Optional, Sequence, TypeVar

import numpy as np

from src.net_model import N_OBJECTIVES
from src.pareto_core import ParetoFront, strong_dominates


# ============================================================================
# CONFIGURATION
# ============================================================================

BBHT_GROWTH = 6 / 5          # lambda of the m-growth schedule
BBHT_BUDGET_FACTOR = 4.5     # give up after ceil(4.5 sqrt(n)) oracle calls
K = N_OBJECTIVES             # hardware parallelism: one comparator per utility


T = TypeVar("T", bound=Hashable)


# ============================================================================
# DOMAIN TYPES
# ============================================================================

@dataclass
class CostLedger:
    parallel_cfes: float = 0.0
    sequential_cfes: float = 0.0

    def charge(self, parallel: float, sequential: float):
        if parallel < 0 or sequential < parallel:
            raise ValueError(f"invalid CFE charge: parallel={parallel}, sequential={sequential}")
        self.parallel_cfes += parallel
        self.sequential_cfes += sequential

    def snapshot(self) -> tuple[float, float]:
        return self.parallel_cfes, self.sequential_cfes


@dataclass(frozen=True)
class Oracle(Generic[T]):
    """
    Marking function of a search.

    comparison_width is the number of dominance comparisons one activation
    embodies and is what an activation costs sequentially; parallel_weight
    is what it costs in the parallel domain.
    """
    predicate: Callable[[T], bool]
    comparison_width: int = 1
    parallel_weight: float = 1.0

    def __post_init__(self):
        if self.comparison_width < 1:
            raise ValueError(f"comparison_width must be at least 1, got {self.comparison_width}")
        if not 0 < self.parallel_weight <= self.comparison_width:
            raise ValueError(f"parallel_weight must lie in (0, comparison_width], got {self.parallel_weight}")

    def charge(self, ledger: CostLedger, activations: int):
        ledger.charge(activations * self.parallel_weight, activations * self.comparison_width)


@dataclass(frozen=True)
class SearchOutcome(Generic[T]):
    found: Optional[T]
    oracle_calls: int


# ============================================================================
# GROVER / BBHT
# ============================================================================

def grover_success_prob(j: int, s: int, n: int) -> float:
    """Probability of measuring a marked item after j Grover iterations, s of n marked."""
    if n < 1:
        raise ValueError(f"search space size must be at least 1, got {n}")
    if not 0 <= s <= n:
        raise ValueError(f"marked count {s} outside [0, {n}]")
    if j < 0:
        raise ValueError(f"iteration count must be non-negative, got {j}")
    if s == 0:
        return 0.0
    theta = math.asin(math.sqrt(s / n))
    return math.sin((2 * j + 1) * theta) ** 2


def bbht_budget(n: int) -> int:
    return math.ceil(BBHT_BUDGET_FACTOR * math.sqrt(n))


def _bbht_attempts(s: int, n: int, rng: np.random.Generator) -> tuple[bool, int]:
    """
    Run the BBHT attempt process for s marked items out of n.

    Each attempt costs j Grover iterations plus one verification call.
    Returns (success, oracle_calls).
    """
    budget = bbht_budget(n)
    m = 1.0
    calls = 0
    while True:
        j = int(rng.integers(0, math.ceil(m)))
        if calls + j + 1 > budget:
            return False, calls
        calls += j + 1
        if rng.random() < grover_success_prob(j, s, n):
            return True, calls
        m = min(BBHT_GROWTH * m, math.sqrt(n))


def bbht_search(space: Sequence[T], oracle: Oracle[T], rng: np.random.Generator,
                ledger: CostLedger) -> SearchOutcome[T]:
    """
    BBHT quantum search over `space`.

    Returns a uniformly random marked item on success, found=None once the
    ceil(4.5 sqrt(n)) oracle-call budget would be exceeded.
    """
    if len(space) == 0:
        raise ValueError("cannot search an empty space")
    marked = [x for x in space if oracle.predicate(x)]
    success, calls = _bbht_attempts(len(marked), len(space), rng)
    oracle.charge(ledger, calls)
    if not success:
        return SearchOutcome(None, calls)
    return SearchOutcome(marked[int(rng.integers(0, len(marked)))], calls)


def expected_bbht_calls(s: int, n: int) -> float:
    """
    Exact expected oracle-call count of the simulated BBHT search,
    budget truncation included.
    """
    budget = bbht_budget(n)
    # probability mass of "still searching" keyed by calls spent so far
    alive = {0: 1.0}
    expected = 0.0
    m = 1.0
    while alive:
        choices = math.ceil(m)
        following: dict[int, float] = {}
        for spent, mass in alive.items():
            for j in range(choices):
                p_branch = mass / choices
                cost = spent + j + 1
                if cost > budget:
                    expected += p_branch * spent
                    continue
                p_hit = grover_success_prob(j, s, n)
                expected += p_branch * p_hit * cost
                if p_hit < 1.0:
                    following[cost] = following.get(cost, 0.0) + p_branch * (1.0 - p_hit)
        alive = following
        m = min(BBHT_GROWTH * m, math.sqrt(n))
    return expected


# ============================================================================
# DOMINANCE SEARCHES
# ============================================================================

def backward_search(candidates: Sequence[T], opf: ParetoFront, uv: Mapping[T, Sequence[float]],
                    rng: np.random.Generator, ledger: CostLedger) -> SearchOutcome[T]:
    """
    Search the candidates for a route that no front member strongly dominates.

    Front members themselves are not marked. Each activation compares the
    candidate with the whole front in parallel: 1 parallel and |opf|
    sequential CFEs.
    """
    front_uvs = list(opf.members.values())

    def not_dominated(x):
        if x in opf:
            return False
        ux = uv[x]
        return not any(strong_dominates(f, ux) for f in front_uvs)

    oracle = Oracle(not_dominated, comparison_width=max(1, len(front_uvs)), parallel_weight=1.0)
    return bbht_search(candidates, oracle, rng, ledger)


def dominance_chain(start: T, pool: Sequence[T], uv: Mapping[T, Sequence[float]],
                    rng: np.random.Generator, ledger: CostLedger,
                    parallel_weight: float = 1.0 / K) -> T:
    """
    Descend from `start` to a route of `pool` with no strong dominator.

    Each step BBHT-searches for a strong dominator of the current reference;
    a step that times out is retried once, and the chain ends when both
    searches come back empty. Activations cost
    `parallel_weight` parallel CFEs (1/K with the utilities compared in
    parallel) and 1 sequential CFE.
    """
    if start not in pool:
        raise ValueError(f"chain start {start!r} is not in the pool")
    reference = start
    while True:
        ref_uv = uv[reference]
        oracle = Oracle(lambda x: strong_dominates(uv[x], ref_uv),
                        comparison_width=1, parallel_weight=parallel_weight)
        outcome = bbht_search(pool, oracle, rng, ledger)
        if outcome.found is None:
            outcome = bbht_search(pool, oracle, rng, ledger)
        if outcome.found is None:
            return reference
        reference = outcome.found
