"""
Route Space
===========
Legitimate loop-free routes SN -> relays -> DN, their canonical index
(RouteId) and the two route-generation rules used by the trellises.

Canonical listing: routes ordered by hop count first, then lexicographically
by relay sequence. A RouteId is the position of a route in that listing and
is computed with a mixed-radix (factoradic-style) Lehmer rank, never by
materialising the listing.
"""

from __future__ import annotations

import itertools
import math
import re
from typing import Iterable, Sequence

from src.net_model import Route


RouteId = int


# ============================================================================
# VALIDATION AND TEXT FORMAT
# ============================================================================

def validate_route(route: Sequence[int], n_nodes: int) -> Route:
    route = tuple(int(v) for v in route)
    if n_nodes < 2:
        raise ValueError(f"n_nodes must be at least 2, got {n_nodes}")
    if len(route) < 2:
        raise ValueError(f"route {route} needs at least a source and a destination")
    if route[0] != 1 or route[-1] != n_nodes:
        raise ValueError(f"route {route} must start at node 1 and end at node {n_nodes}")
    relays = route[1:-1]
    if any(not 2 <= r <= n_nodes - 1 for r in relays):
        raise ValueError(f"route {route} has relay ids outside [2, {n_nodes - 1}]")
    if len(set(relays)) != len(relays):
        raise ValueError(f"route {route} visits a relay more than once")
    return route


def route_key(route: Sequence[int]) -> tuple[int, Route]:
    """Sort key reproducing the canonical listing."""
    return len(route), tuple(route)


def format_route(route: Sequence[int]) -> str:
    return "{" + " ".join(str(v) for v in route) + "}"


def parse_route(text: str) -> Route:
    match = re.fullmatch(r"\s*\{\s*([\d\s]+?)\s*\}\s*", text)
    if match is None:
        raise ValueError(f"malformed route text {text!r}, expected e.g. '{{1 3 2 5}}'")
    return tuple(int(v) for v in match.group(1).split())


# ============================================================================
# COUNTING AND INDEXING
# ============================================================================

def count_routes(n_nodes: int) -> int:
    """Number of legitimate routes, sum over k of M!/(M-k)! with M = n_nodes - 2."""
    if n_nodes < 2:
        raise ValueError(f"n_nodes must be at least 2, got {n_nodes}")
    m = n_nodes - 2
    return sum(math.perm(m, k) for k in range(m + 1))


def _block_offset(m: int, k: int) -> int:
    # number of routes with fewer than k relays
    return sum(math.perm(m, j) for j in range(k))


def encode(route: Sequence[int], n_nodes: int) -> RouteId:
    route = validate_route(route, n_nodes)
    m = n_nodes - 2
    relays = [r - 2 for r in route[1:-1]]
    k = len(relays)

    rank = 0
    used = set()
    for i, r in enumerate(relays):
        smaller_unused = sum(1 for v in range(r) if v not in used)
        rank += smaller_unused * math.perm(m - i - 1, k - i - 1)
        used.add(r)
    return _block_offset(m, k) + rank


def decode(route_id: RouteId, n_nodes: int) -> Route:
    total = count_routes(n_nodes)
    if not 0 <= route_id < total:
        raise ValueError(f"route index {route_id} outside [0, {total}) for {n_nodes} nodes")
    m = n_nodes - 2

    k = 0
    while route_id >= _block_offset(m, k + 1):
        k += 1
    rank = route_id - _block_offset(m, k)

    available = list(range(m))
    relays = []
    for i in range(k):
        radix = math.perm(m - i - 1, k - i - 1)
        digit, rank = divmod(rank, radix)
        relays.append(available.pop(digit))
    return (1, *[r + 2 for r in relays], n_nodes)


def enumerate_routes(n_nodes: int) -> list[Route]:
    """All legitimate routes in RouteId order."""
    count_routes(n_nodes)
    relays = range(2, n_nodes)
    return [
        (1, *perm, n_nodes)
        for k in range(n_nodes - 1)
        for perm in itertools.permutations(relays, k)
    ]


# ============================================================================
# SUB-ROUTES AND ROUTE GENERATION
# ============================================================================

def subroute(route: Sequence[int]) -> Route:
    """Route prefix SN -> last relay (drops the DN)."""
    route = tuple(route)
    if len(route) < 3:
        raise ValueError(f"direct route {format_route(route)} has no sub-route")
    return route[:-1]


def unused_relays(route: Sequence[int], n_nodes: int) -> list[int]:
    used = set(route)
    return [r for r in range(2, n_nodes) if r not in used]


def generate_append(route: Sequence[int], n_nodes: int) -> list[Route]:
    """Insert each unused relay immediately before the DN."""
    route = validate_route(route, n_nodes)
    return [route[:-1] + (r, n_nodes) for r in unused_relays(route, n_nodes)]


def generate_insert_anywhere(route: Sequence[int], n_nodes: int) -> list[Route]:
    """Insert each unused relay into any of the route's hops (relaxed generation)."""
    route = validate_route(route, n_nodes)
    generated = {
        route[:slot] + (r,) + route[slot:]
        for slot in range(1, len(route))
        for r in unused_relays(route, n_nodes)
    }
    return sorted(generated, key=route_key)


def generate_stage(generators: Iterable[Sequence[int]], n_nodes: int, relaxed: bool) -> list[Route]:
    """Union of the routes generated by every generator, duplicates merged."""
    rule = generate_insert_anywhere if relaxed else generate_append
    generated = {child for g in generators for child in rule(g, n_nodes)}
    return sorted(generated, key=route_key)
