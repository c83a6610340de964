import math

import numpy as np
import pytest

from src.net_model import (
    AREA_SIDE_M,
    CARRIER_WAVELENGTH_M,
    RadioConstants,
    RouteUtilities,
    Topology,
    UtilityVector,
    additive_ber,
    bsc_combine,
    combine_ber,
    dbm_to_linear,
    generate_topology,
    link_ber,
    load_topology,
    path_loss_db,
    rayleigh_qpsk_ber,
    route_ber,
    route_ber_additive,
    route_delay,
    route_power,
    route_uv,
    save_topology,
    subroute_uv,
    topology_from_json,
    topology_to_json,
)
from src.pareto_core import strong_dominates
from src.route_space import enumerate_routes


def line_topology():
    # SN, one relay 10 m east of it, DN in the far corner
    return Topology(3, ((0.0, 0.0), (10.0, 0.0), (100.0, 100.0)), (-90.0, -95.0, -85.0))


# ============================================================================
# TOPOLOGY GENERATION
# ============================================================================

def test_two_node_topology_has_no_relays():
    topo = generate_topology(2, 1234)
    assert topo.positions == ((0.0, 0.0), (AREA_SIDE_M, AREA_SIDE_M))
    assert len(topo.interference_dbm) == 2


def test_relays_inside_the_block():
    topo = generate_topology(5, 1234)
    assert topo.position(1) == (0.0, 0.0)
    assert topo.position(5) == (100.0, 100.0)
    for node in (2, 3, 4):
        x, y = topo.position(node)
        assert 0.0 <= x <= 100.0
        assert 0.0 <= y <= 100.0


def test_same_seed_same_topology():
    assert generate_topology(5, 77) == generate_topology(5, 77)
    assert generate_topology(5, 77) != generate_topology(5, 78)


def test_generate_rejects_single_node():
    with pytest.raises(ValueError):
        generate_topology(1, 0)


def test_radio_constants_validated():
    with pytest.raises(ValueError):
        RadioConstants(pathloss_exponent=0.0)
    with pytest.raises(ValueError):
        RadioConstants(interference_std=-1.0)


def test_node_ids_checked():
    topo = line_topology()
    with pytest.raises(ValueError):
        topo.position(0)
    with pytest.raises(ValueError):
        topo.position(4)


# ============================================================================
# LINK LEVEL
# ============================================================================

def test_path_loss_unit_argument_is_zero_db():
    d = CARRIER_WAVELENGTH_M / (4 * math.pi)
    topo = Topology(2, ((0.0, 0.0), (d, 0.0)), (-90.0, -90.0))
    assert path_loss_db(1, 2, topo) == pytest.approx(0.0, abs=1e-9)


def test_path_loss_reference_values():
    topo = line_topology()
    assert path_loss_db(1, 2, topo) == pytest.approx(90.07, abs=0.01)
    assert path_loss_db(1, 3, topo) == pytest.approx(124.58, abs=0.01)


def test_path_loss_to_self_rejected():
    with pytest.raises(ValueError):
        path_loss_db(2, 2, line_topology())


def test_rayleigh_ber_limits():
    assert rayleigh_qpsk_ber(0.0) == 0.5
    assert rayleigh_qpsk_ber(math.inf) == 0.0
    assert rayleigh_qpsk_ber(10.0) == pytest.approx(0.02327, abs=1e-5)
    with pytest.raises(ValueError):
        rayleigh_qpsk_ber(-1.0)


def test_link_ber_uses_receiver_interference():
    topo = line_topology()
    snr_db = 20.0 - path_loss_db(1, 2, topo) - (-95.0)
    assert link_ber(1, 2, topo) == pytest.approx(rayleigh_qpsk_ber(dbm_to_linear(snr_db)))


# ============================================================================
# ROUTE LEVEL
# ============================================================================

def test_route_delay_counts_hops():
    assert route_delay((1, 5)) == 1
    assert route_delay((1, 2, 5)) == 2
    assert route_delay((1, 2, 3, 4, 5)) == 4


def test_route_delay_is_hop_count_for_every_route():
    for route in enumerate_routes(7):
        assert route_delay(route) == len(route) - 1


def test_bsc_fold():
    assert combine_ber([]) == 0.0
    assert combine_ber([0.0, 0.3]) == pytest.approx(0.3)
    assert combine_ber([0.5, 0.3]) == pytest.approx(0.5)
    assert combine_ber([0.1, 0.2]) == pytest.approx(0.26)
    assert bsc_combine(0.1, 0.2) == bsc_combine(0.2, 0.1)


def test_single_hop_power():
    topo = line_topology()
    assert route_power((1, 3), topo) == pytest.approx(10 ** (path_loss_db(1, 3, topo) / 10))


def test_power_is_sum_of_linear_hop_losses():
    topo = generate_topology(4, 99)
    route = (1, 3, 2, 4)
    expected = sum(10 ** (path_loss_db(a, b, topo) / 10) for a, b in [(1, 3), (3, 2), (2, 4)])
    assert route_power(route, topo) == pytest.approx(expected, rel=1e-12)
    assert route_power(route, topo) > route_power((1, 3, 2), topo)


def test_direct_route_uv():
    topo = line_topology()
    uv = route_uv((1, 3), topo)
    assert uv.ber == pytest.approx(link_ber(1, 3, topo))
    assert uv.power == pytest.approx(dbm_to_linear(path_loss_db(1, 3, topo)))
    assert uv.delay == 1


def test_route_uv_components_positive():
    topo = generate_topology(6, 2024)
    for route in enumerate_routes(6):
        uv = route_uv(route, topo)
        assert uv.ber > 0
        assert uv.ber <= 0.5
        assert uv.power > 0
        assert uv.delay >= 1


def test_additive_ber_reference_case():
    approx, bound = additive_ber([0.1, 0.2])
    assert approx == pytest.approx(0.3)
    exact = combine_ber([0.1, 0.2])
    assert approx - exact == pytest.approx(0.04)
    assert approx - exact <= bound + 1e-12


def test_additive_ber_single_hop_is_exact():
    topo = line_topology()
    approx, bound = route_ber_additive((1, 3), topo)
    assert approx == pytest.approx(route_ber((1, 3), topo))
    assert bound == 0.0


def test_additive_ber_gap_within_bound():
    hop_bers = [1e-4, 2e-4, 3e-4]
    approx, bound = additive_ber(hop_bers)
    gap = approx - combine_ber(hop_bers)
    assert 0 <= gap <= bound


def test_subroute_strictly_dominated_by_route():
    topo = generate_topology(6, 5)
    utilities = RouteUtilities.from_topology(topo)
    for route in enumerate_routes(6):
        if len(route) < 3:
            continue
        assert subroute_uv(route, topo) == pytest.approx(utilities.subroute_uv(route))
        assert strong_dominates(utilities.subroute_uv(route), utilities.uv(route))


def test_subroute_of_direct_route_rejected():
    with pytest.raises(ValueError):
        subroute_uv((1, 3), line_topology())


# ============================================================================
# ROUTE UTILITY TABLES
# ============================================================================

def test_utilities_match_direct_evaluation():
    topo = generate_topology(5, 31)
    utilities = RouteUtilities.from_topology(topo)
    for route in enumerate_routes(5):
        assert utilities[route] == pytest.approx(route_uv(route, topo))
    assert utilities.subroute_uv((1, 5)) is None
    assert utilities.matrix(enumerate_routes(5)).shape == (16, 3)


def test_injected_table_returned_verbatim():
    table = RouteUtilities.from_table(3, {(1, 3): (1e-3, 50.0, 1), (1, 2, 3): (2e-3, 60.0, 2)},
                                      {(1, 3): None, (1, 2, 3): (1e-3, 40.0, 1)})
    assert route_uv((1, 3), table) == UtilityVector(1e-3, 50.0, 1)
    assert table.subroute_uv((1, 2, 3)) == UtilityVector(1e-3, 40.0, 1)
    with pytest.raises(KeyError):
        table.uv((1, 2, 4))


def test_utilities_need_exactly_one_source():
    with pytest.raises(ValueError):
        RouteUtilities(3)
    with pytest.raises(ValueError):
        RouteUtilities(3, topology=line_topology(), route_uvs={})


def test_invalid_utility_vector_rejected():
    with pytest.raises(ValueError):
        UtilityVector(0.7, 1.0, 1).validate()
    with pytest.raises(ValueError):
        UtilityVector(0.1, -1.0, 1).validate()


# ============================================================================
# SERIALIZATION
# ============================================================================

def test_topology_file_reloads_exactly(tmp_path):
    topo = generate_topology(7, 1234)
    path = save_topology(topo, tmp_path / "topo.json")
    assert load_topology(path) == topo
    assert topology_from_json(topology_to_json(topo)) == topo


def test_malformed_topology_rejected():
    with pytest.raises(ValueError):
        topology_from_json("not json")
    with pytest.raises(ValueError):
        topology_from_json('{"n_nodes": 3}')


def test_additive_ber_tight_two_hop_bound():
    # the bound equals the true gap on two hops
    hop_bers = [0.00764, 0.45599]
    approx, bound = additive_ber(hop_bers)
    gap = approx - combine_ber(hop_bers)
    assert gap == pytest.approx(2 * 0.00764 * 0.45599)
    assert 0 <= gap <= bound


def test_additive_ber_gap_within_bound_on_random_routes():
    rng = np.random.default_rng(77)
    routes = enumerate_routes(7)
    for seed in range(1000):
        topo = generate_topology(7, seed)
        route = routes[int(rng.integers(0, len(routes)))]
        approx, bound = route_ber_additive(route, topo)
        gap = approx - route_ber(route, topo)
        assert 0 <= gap <= bound, (route, seed)
