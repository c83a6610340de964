"""
Pareto dominance algebra, the brute-force optimal Pareto front and the
accuracy metrics (Pareto distance, Pareto completion).

Utility vectors are minimised componentwise. "Pareto-optimal" means weakly
Pareto-optimal throughout: no other vector strongly dominates it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Hashable, Iterable, Mapping, Optional, Sequence

import numpy as np

from src.net_model import UtilityVector


DISTANCE_CHUNK_ROWS = 1024


class Dominance(Enum):
    STRONG_DOMINATES = "strong-dominates"
    WEAK_DOMINATES = "weak-dominates"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"
    WEAKLY_DOMINATED_BY = "weakly-dominated-by"
    STRONGLY_DOMINATED_BY = "strongly-dominated-by"


def _check_arity(a: Sequence[float], b: Sequence[float]):
    if len(a) != len(b):
        raise ValueError(f"utility vectors differ in arity: {len(a)} vs {len(b)}")


def strong_dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """True iff every component of a is strictly smaller than b's."""
    _check_arity(a, b)
    return all(x < y for x, y in zip(a, b))


def weak_dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """True iff a <= b componentwise with at least one strict inequality."""
    _check_arity(a, b)
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def compare(a: Sequence[float], b: Sequence[float]) -> Dominance:
    if strong_dominates(a, b):
        return Dominance.STRONG_DOMINATES
    if strong_dominates(b, a):
        return Dominance.STRONGLY_DOMINATED_BY
    if weak_dominates(a, b):
        return Dominance.WEAK_DOMINATES
    if weak_dominates(b, a):
        return Dominance.WEAKLY_DOMINATED_BY
    if tuple(a) == tuple(b):
        return Dominance.EQUAL
    return Dominance.INCOMPARABLE


def strong_dominance_matrix(uvs: np.ndarray, others: Optional[np.ndarray] = None) -> np.ndarray:
    """D[i, j] is True when row i of `uvs` strongly dominates row j of `others` (default `uvs`)."""
    uvs = np.asarray(uvs, dtype=float)
    others = uvs if others is None else np.asarray(others, dtype=float)
    return np.all(uvs[:, None, :] < others[None, :, :], axis=2)


def strongly_dominated_mask(uvs: np.ndarray) -> np.ndarray:
    """
    mask[j] is True when some row strongly dominates row j.

    Rows are swept by ascending first component; a row is dominated iff a
    front row collected before it strongly dominates it (strong dominance is
    transitive and strict in every component).
    """
    uvs = np.asarray(uvs, dtype=float)
    mask = np.zeros(uvs.shape[0], dtype=bool)
    if uvs.shape[0] == 0:
        return mask
    front = np.empty((0, uvs.shape[1]))
    for j in np.argsort(uvs[:, 0], kind="stable"):
        if np.all(front < uvs[j], axis=1).any():
            mask[j] = True
        else:
            front = np.vstack([front, uvs[j]])
    return mask


def weak_dominance_matrix(uvs: np.ndarray) -> np.ndarray:
    uvs = np.asarray(uvs, dtype=float)
    le = np.all(uvs[:, None, :] <= uvs[None, :, :], axis=2)
    lt = np.any(uvs[:, None, :] < uvs[None, :, :], axis=2)
    return le & lt


# ============================================================================
# PARETO FRONT
# ============================================================================

@dataclass(frozen=True)
class ParetoFront:
    members: Mapping[Hashable, UtilityVector] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "members", dict(self.members))

    def __len__(self):
        return len(self.members)

    def __contains__(self, key):
        return key in self.members

    def __iter__(self):
        return iter(self.members)

    def keys(self) -> set:
        return set(self.members)

    def is_consistent(self) -> bool:
        """No member strongly dominates another member."""
        uvs = list(self.members.values())
        return not any(strong_dominates(a, b) for a in uvs for b in uvs)


def brute_force_opf(routes: Iterable[tuple[Hashable, Sequence[float]]], strong: bool = False) -> ParetoFront:
    """
    Exact front by all-pairs comparison.

    With strong=False (default) a route is kept when no other route strongly
    dominates it; strong=True keeps only routes with no weak dominator.
    """
    routes = list(routes)
    if not routes:
        return ParetoFront()
    uvs = np.array([tuple(uv) for _, uv in routes], dtype=float)
    dominated = weak_dominance_matrix(uvs).any(axis=0) if strong else strongly_dominated_mask(uvs)
    return ParetoFront({key: uv for (key, uv), d in zip(routes, dominated) if not d})


def front_of(keys: Iterable[Hashable], uv: Mapping[Hashable, Sequence[float]]) -> ParetoFront:
    return brute_force_opf((k, uv[k]) for k in keys)


# ============================================================================
# ACCURACY METRICS
# ============================================================================

def pareto_distance(x: Sequence[float], population: Sequence[Sequence[float]]) -> float:
    """Fraction of the population that strongly dominates x (denominator N = |population|)."""
    if len(population) == 0:
        raise ValueError("pareto distance needs a non-empty route population")
    dominators = sum(1 for other in population if strong_dominates(other, x))
    return dominators / len(population)


def pareto_distances(uvs: np.ndarray) -> np.ndarray:
    """Pareto distance of every row of `uvs` within the same population."""
    uvs = np.asarray(uvs, dtype=float)
    if uvs.shape[0] == 0:
        raise ValueError("pareto distance needs a non-empty route population")
    dominators = np.zeros(uvs.shape[0], dtype=np.int64)
    for start in range(0, uvs.shape[0], DISTANCE_CHUNK_ROWS):
        dominators += strong_dominance_matrix(uvs[start:start + DISTANCE_CHUNK_ROWS], uvs).sum(axis=0)
    return dominators / uvs.shape[0]


def suboptimality_threshold(n_routes: int) -> float:
    """A route with Pareto distance >= 1/N has at least one dominator."""
    return 1.0 / n_routes


def normalized_distance(distance: float, n_routes: int) -> float:
    return distance / suboptimality_threshold(n_routes)


def pareto_completion(found: Iterable[Hashable], truth: Iterable[Hashable]) -> float:
    """Fraction of the true front recovered."""
    found, truth = set(found), set(truth)
    if not truth:
        raise ValueError("pareto completion needs a non-empty true front")
    return len(found & truth) / len(truth)
