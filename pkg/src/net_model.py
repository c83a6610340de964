"""
WMHN Network Model
==================
Random wireless multihop network topologies and the utility functions that
score a route on them: end-to-end BER, path-loss power and hop delay.

Node ids are 1-based: node 1 is the source (SN), node n_nodes the
destination (DN), everything in between is a relay (RN).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np


# ============================================================================
# CONFIGURATION
# ============================================================================

PATHLOSS_EXPONENT = 3.0
CARRIER_WAVELENGTH_M = 0.125     # 2.4 GHz
TX_POWER_DBM = 20.0
INTERFERENCE_MEAN_DBM = -90.0
INTERFERENCE_STD_DB = 10.0

AREA_SIDE_M = 100.0
MIN_NODE_SEPARATION_M = 1e-6

N_OBJECTIVES = 3                 # [BER, power, delay]
FOLD_ROUNDING_ULPS = 8


Route = tuple[int, ...]


# ============================================================================
# DOMAIN TYPES
# ============================================================================

@dataclass(frozen=True)
class RadioConstants:
    pathloss_exponent: float = PATHLOSS_EXPONENT
    carrier_wavelength: float = CARRIER_WAVELENGTH_M
    tx_power: float = TX_POWER_DBM
    interference_mean: float = INTERFERENCE_MEAN_DBM
    interference_std: float = INTERFERENCE_STD_DB

    def __post_init__(self):
        if not self.pathloss_exponent > 0:
            raise ValueError(f"pathloss_exponent must be positive, got {self.pathloss_exponent}")
        if not self.carrier_wavelength > 0:
            raise ValueError(f"carrier_wavelength must be positive, got {self.carrier_wavelength}")
        if not self.interference_std >= 0:
            raise ValueError(f"interference_std must be non-negative, got {self.interference_std}")


@dataclass(frozen=True)
class Topology:
    n_nodes: int
    positions: tuple[tuple[float, float], ...]
    interference_dbm: tuple[float, ...]
    constants: RadioConstants = field(default_factory=RadioConstants)

    def __post_init__(self):
        if self.n_nodes < 2:
            raise ValueError(f"n_nodes must be at least 2, got {self.n_nodes}")
        if len(self.positions) != self.n_nodes or len(self.interference_dbm) != self.n_nodes:
            raise ValueError(
                f"expected {self.n_nodes} positions and interference levels, "
                f"got {len(self.positions)} and {len(self.interference_dbm)}"
            )

    def position(self, node: int) -> tuple[float, float]:
        self._check_node(node)
        return self.positions[node - 1]

    def distance(self, i: int, j: int) -> float:
        (xi, yi), (xj, yj) = self.position(i), self.position(j)
        return math.hypot(xi - xj, yi - yj)

    def _check_node(self, node: int):
        if not 1 <= node <= self.n_nodes:
            raise ValueError(f"node id {node} outside [1, {self.n_nodes}]")


class UtilityVector(NamedTuple):
    """Utility vector of a route, component order [BER, power, delay]."""
    ber: float
    power: float
    delay: float

    def validate(self) -> "UtilityVector":
        if not all(math.isfinite(c) and c >= 0 for c in self):
            raise ValueError(f"utility components must be finite and non-negative: {tuple(self)}")
        if self.ber > 0.5:
            raise ValueError(f"BER {self.ber} exceeds 0.5")
        return self


# ============================================================================
# TOPOLOGY GENERATION
# ============================================================================

def generate_topology(n_nodes: int, seed, constants: Optional[RadioConstants] = None) -> Topology:
    """
    Generate a random WMHN in the (100 x 100) m^2 block.

    Parameters:
    -----------
    n_nodes : int
        Total node count including SN and DN (>= 2)
    seed : int or numpy SeedSequence-compatible entropy
        Seed of the numpy Generator; identical seeds give identical topologies
    constants : RadioConstants
        Radio parameters, defaults to the case-study values

    Returns:
    --------
    Topology
        SN pinned at (0, 0), DN at (100, 100), relays uniform in the block
    """
    if n_nodes < 2:
        raise ValueError(f"n_nodes must be at least 2, got {n_nodes}")
    constants = constants or RadioConstants()
    rng = np.random.default_rng(seed)

    positions = [(0.0, 0.0), (AREA_SIDE_M, AREA_SIDE_M)]
    for _ in range(n_nodes - 2):
        # resample coincident relays, path loss is singular at d = 0
        while True:
            x, y = rng.uniform(0.0, AREA_SIDE_M, size=2)
            if all(math.hypot(x - px, y - py) >= MIN_NODE_SEPARATION_M for px, py in positions):
                break
        positions.insert(-1, (float(x), float(y)))

    interference = rng.normal(constants.interference_mean, constants.interference_std, size=n_nodes)

    return Topology(
        n_nodes=n_nodes,
        positions=tuple(positions),
        interference_dbm=tuple(float(v) for v in interference),
        constants=constants,
    )


# ============================================================================
# LINK-LEVEL UTILITIES
# ============================================================================

def dbm_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def path_loss_db(i: int, j: int, topo: Topology) -> float:
    """Path loss of the i -> j link, 10 alpha log10(4 pi d / lambda_c)."""
    if i == j:
        raise ValueError(f"path loss undefined for a node to itself (node {i})")
    d = topo.distance(i, j)
    c = topo.constants
    return 10.0 * c.pathloss_exponent * math.log10(4.0 * math.pi * d / c.carrier_wavelength)


def rayleigh_qpsk_ber(snr: float) -> float:
    """Average per-bit error probability of QPSK over Rayleigh fading at mean SNR `snr` (linear)."""
    if snr < 0:
        raise ValueError(f"SNR must be non-negative, got {snr}")
    if math.isinf(snr):
        return 0.0
    return 0.5 * (1.0 - math.sqrt(snr / (1.0 + snr)))


def link_snr(i: int, j: int, topo: Topology) -> float:
    # receiver-side interference acts as the noise floor
    snr_db = topo.constants.tx_power - path_loss_db(i, j, topo) - topo.interference_dbm[j - 1]
    return dbm_to_linear(snr_db)


def link_ber(i: int, j: int, topo: Topology) -> float:
    return rayleigh_qpsk_ber(link_snr(i, j, topo))


# ============================================================================
# ROUTE-LEVEL UTILITIES
# ============================================================================

def hops(route: Sequence[int]) -> list[tuple[int, int]]:
    return list(zip(route[:-1], route[1:]))


def bsc_combine(p1: float, p2: float) -> float:
    """Output BER of two cascaded binary symmetric channels."""
    return p1 + p2 - 2.0 * p1 * p2


def combine_ber(hop_bers: Iterable[float]) -> float:
    return reduce(bsc_combine, hop_bers, 0.0)


def sum_linear_losses(hop_losses_db: Iterable[float]) -> float:
    return sum(dbm_to_linear(loss) for loss in hop_losses_db)


def route_delay(route: Sequence[int]) -> int:
    """Hop count, i.e. the sum of (1 - kronecker(x_i, x_i+1)) over the hops."""
    return sum(1 - int(a == b) for a, b in hops(route))


def route_power(route: Sequence[int], topo: Topology) -> float:
    return sum_linear_losses(path_loss_db(a, b, topo) for a, b in hops(route))


def route_ber(route: Sequence[int], topo: Topology) -> float:
    return combine_ber(link_ber(a, b, topo) for a, b in hops(route))


def route_uv(route: Sequence[int], topo: Union[Topology, "RouteUtilities"]) -> UtilityVector:
    """
    Utility vector [route_ber, route_power, route_delay] of a route.

    When `topo` is an injected RouteUtilities table the stored vector is
    returned verbatim.
    """
    if isinstance(topo, RouteUtilities):
        return topo.uv(tuple(route))
    return UtilityVector(route_ber(route, topo), route_power(route, topo), route_delay(route)).validate()


def route_ber_additive(route: Sequence[int], topo: Topology) -> tuple[float, float]:
    """
    Additive approximation of the route BER and its error bound.

    Returns:
    --------
    (approx, error_bound)
        approx is the plain sum of hop BERs; error_bound is the sum of
        products over ordered pairs of distinct hops
    """
    bers = [link_ber(a, b, topo) for a, b in hops(route)]
    return additive_ber(bers)


def additive_ber(hop_bers: Sequence[float]) -> tuple[float, float]:
    approx = sum(hop_bers)
    bound = math.fsum(p * q for k, p in enumerate(hop_bers) for m, q in enumerate(hop_bers) if k != m)
    # the two-hop bound is tight; leave room for the rounding of the recursive fold
    bound += FOLD_ROUNDING_ULPS * max(0, len(hop_bers) - 1) * np.finfo(float).eps * approx
    return approx, bound


def subroute_uv(route: Sequence[int], topo: Topology) -> UtilityVector:
    """UV of the route without its final hop (SN -> last relay)."""
    if len(route) < 3:
        raise ValueError(f"route {tuple(route)} has a single hop and no sub-route")
    return route_uv(route[:-1], topo)


# ============================================================================
# ROUTE UTILITY TABLES
# ============================================================================

class RouteUtilities:
    """
    Route -> UtilityVector look-up used by the optimizers.

    Built either from a Topology (computed on demand, per-link values cached)
    or from an injected table of route and sub-route UVs, which bypasses the
    channel model entirely.
    """

    def __init__(self, n_nodes: int, topology: Optional[Topology] = None,
                 route_uvs: Optional[Mapping[Route, UtilityVector]] = None,
                 subroute_uvs: Optional[Mapping[Route, UtilityVector]] = None):
        if (topology is None) == (route_uvs is None):
            raise ValueError("provide exactly one of topology or route_uvs")
        self.n_nodes = n_nodes
        self.topology = topology
        self.injected = route_uvs is not None
        self._uvs: dict[Route, UtilityVector] = {}
        self._sub_uvs: dict[Route, Optional[UtilityVector]] = {}
        self._link_ber: dict[tuple[int, int], float] = {}
        self._link_loss: dict[tuple[int, int], float] = {}
        if route_uvs is not None:
            self._uvs = {tuple(r): UtilityVector(*uv).validate() for r, uv in route_uvs.items()}
            self._sub_uvs = {
                tuple(r): (None if uv is None else UtilityVector(*uv).validate())
                for r, uv in (subroute_uvs or {}).items()
            }

    @classmethod
    def from_topology(cls, topo: Topology) -> "RouteUtilities":
        return cls(topo.n_nodes, topology=topo)

    @classmethod
    def from_table(cls, n_nodes: int, route_uvs: Mapping[Route, Sequence[float]],
                   subroute_uvs: Optional[Mapping[Route, Optional[Sequence[float]]]] = None) -> "RouteUtilities":
        return cls(n_nodes, route_uvs=route_uvs, subroute_uvs=subroute_uvs)

    def __getitem__(self, route: Route) -> UtilityVector:
        return self.uv(route)

    def _link(self, a: int, b: int) -> tuple[float, float]:
        key = (a, b)
        if key not in self._link_ber:
            self._link_ber[key] = link_ber(a, b, self.topology)
            self._link_loss[key] = path_loss_db(a, b, self.topology)
        return self._link_ber[key], self._link_loss[key]

    def _evaluate(self, route: Route) -> UtilityVector:
        links = [self._link(a, b) for a, b in hops(route)]
        return UtilityVector(
            combine_ber(ber for ber, _ in links),
            sum_linear_losses(loss for _, loss in links),
            route_delay(route),
        ).validate()

    def uv(self, route: Route) -> UtilityVector:
        route = tuple(route)
        if route not in self._uvs:
            if self.injected:
                raise KeyError(f"no injected utility vector for route {route}")
            self._uvs[route] = self._evaluate(route)
        return self._uvs[route]

    def subroute_uv(self, route: Route) -> Optional[UtilityVector]:
        """Sub-route UV, None for the direct route (no sub-route exists)."""
        route = tuple(route)
        if len(route) < 3:
            return None
        if route not in self._sub_uvs:
            if self.injected:
                raise KeyError(f"no injected sub-route utility vector for route {route}")
            self._sub_uvs[route] = self._evaluate(route[:-1])
        return self._sub_uvs[route]

    def matrix(self, routes: Iterable[Route]) -> np.ndarray:
        return np.array([self.uv(r) for r in routes], dtype=float).reshape(-1, N_OBJECTIVES)


# ============================================================================
# SERIALIZATION
# ============================================================================

def _fmt(value: float) -> str:
    return format(float(value), ".16e")


def topology_to_json(topo: Topology) -> str:
    c = topo.constants
    positions = ", ".join(f"[{_fmt(x)}, {_fmt(y)}]" for x, y in topo.positions)
    interference = ", ".join(_fmt(v) for v in topo.interference_dbm)
    constants = ", ".join(
        f'"{name}": {_fmt(getattr(c, name))}'
        for name in ("pathloss_exponent", "carrier_wavelength", "tx_power",
                     "interference_mean", "interference_std")
    )
    return (
        "{\n"
        f'  "n_nodes": {topo.n_nodes},\n'
        f'  "positions": [{positions}],\n'
        f'  "interference_dbm": [{interference}],\n'
        f'  "constants": {{{constants}}}\n'
        "}\n"
    )


def topology_from_json(text: str) -> Topology:
    try:
        doc = json.loads(text)
        return Topology(
            n_nodes=int(doc["n_nodes"]),
            positions=tuple((float(x), float(y)) for x, y in doc["positions"]),
            interference_dbm=tuple(float(v) for v in doc["interference_dbm"]),
            constants=RadioConstants(**doc["constants"]),
        )
    except (KeyError, TypeError, json.JSONDecodeError) as e:
        raise ValueError(f"malformed topology document: {e}") from e


def save_topology(topo: Topology, path) -> Path:
    path = Path(path)
    path.write_text(topology_to_json(topo), encoding="utf-8")
    return path


def load_topology(path) -> Topology:
    return topology_from_json(Path(path).read_text(encoding="utf-8"))
