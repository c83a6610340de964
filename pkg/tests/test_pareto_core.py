import numpy as np
import pytest

from src.case_study import CASE_STUDY_ROWS, case_study_optimal_routes, case_study_utilities
from src.net_model import RouteUtilities, generate_topology
from src.pareto_core import (
    Dominance,
    ParetoFront,
    brute_force_opf,
    compare,
    front_of,
    normalized_distance,
    pareto_completion,
    pareto_distance,
    pareto_distances,
    strong_dominance_matrix,
    strong_dominates,
    strongly_dominated_mask,
    suboptimality_threshold,
    weak_dominance_matrix,
    weak_dominates,
)
from src.route_space import enumerate_routes, parse_route


def case_study_population():
    utilities = case_study_utilities()
    routes = enumerate_routes(5)
    return routes, utilities


# ============================================================================
# DOMINANCE
# ============================================================================

def test_strong_dominance_case_study_values():
    assert strong_dominates([2.35e-4, 70.89, 2], [9.49e-4, 76.09, 3])
    # delay ties
    assert not strong_dominates([2.35e-4, 70.89, 2], [2.52e-4, 73.10, 2])
    assert weak_dominates([2.35e-4, 70.89, 2], [2.52e-4, 73.10, 2])


def test_dominance_is_irreflexive():
    a = [1e-3, 50.0, 2]
    assert not strong_dominates(a, a)
    assert not weak_dominates(a, a)
    assert compare(a, a) is Dominance.EQUAL


def test_dominance_arity_checked():
    with pytest.raises(ValueError):
        strong_dominates([1, 2, 3], [1, 2])
    with pytest.raises(ValueError):
        weak_dominates([1, 2], [1, 2, 3])


def test_compare_classifies_every_relation():
    assert compare([1, 1, 1], [2, 2, 2]) is Dominance.STRONG_DOMINATES
    assert compare([2, 2, 2], [1, 1, 1]) is Dominance.STRONGLY_DOMINATED_BY
    assert compare([1, 2, 2], [2, 2, 2]) is Dominance.WEAK_DOMINATES
    assert compare([2, 2, 2], [1, 2, 2]) is Dominance.WEAKLY_DOMINATED_BY
    assert compare([1, 3, 2], [2, 2, 2]) is Dominance.INCOMPARABLE


def test_dominance_properties_on_random_vectors():
    rng = np.random.default_rng(7)
    # integer grid so ties show up
    vectors = rng.integers(0, 4, size=(40, 3)).tolist()
    for a in vectors:
        for b in vectors:
            if strong_dominates(a, b):
                assert weak_dominates(a, b)
                assert not strong_dominates(b, a)
                for c in vectors:
                    if strong_dominates(b, c):
                        assert strong_dominates(a, c)


def test_dominance_matrices_match_pairwise_checks():
    rng = np.random.default_rng(3)
    uvs = rng.integers(0, 5, size=(25, 3)).astype(float)
    strong = strong_dominance_matrix(uvs)
    weak = weak_dominance_matrix(uvs)
    for i in range(len(uvs)):
        for j in range(len(uvs)):
            assert strong[i, j] == strong_dominates(uvs[i], uvs[j])
            assert weak[i, j] == weak_dominates(uvs[i], uvs[j])


@pytest.mark.parametrize("seed", range(5))
def test_sweep_mask_matches_dominance_matrix(seed):
    rng = np.random.default_rng(seed)
    # coarse grid for ties in the sweep key
    uvs = rng.integers(0, 6, size=(300, 3)).astype(float)
    assert (strongly_dominated_mask(uvs) == strong_dominance_matrix(uvs).any(axis=0)).all()


def test_sweep_mask_edge_cases():
    assert strongly_dominated_mask(np.empty((0, 3))).shape == (0,)
    assert list(strongly_dominated_mask([[1, 1, 1], [1, 1, 1]])) == [False, False]
    assert list(strongly_dominated_mask([[2, 2, 2], [1, 1, 1]])) == [True, False]


def test_pareto_distances_across_chunks():
    rng = np.random.default_rng(12)
    uvs = rng.integers(0, 10, size=(2500, 3)).astype(float)
    expected = strong_dominance_matrix(uvs).sum(axis=0) / len(uvs)
    assert np.array_equal(pareto_distances(uvs), expected)


# ============================================================================
# BRUTE-FORCE FRONT
# ============================================================================

def test_case_study_front():
    routes, utilities = case_study_population()
    opf = brute_force_opf((r, utilities.uv(r)) for r in routes)
    assert opf.keys() == case_study_optimal_routes()
    assert opf.keys() == {(1, 5), (1, 2, 5), (1, 3, 5), (1, 4, 5), (1, 3, 2, 5)}
    assert opf.is_consistent()


def test_single_route_front():
    opf = brute_force_opf([((1, 5), (1e-3, 10.0, 1))])
    assert opf.keys() == {(1, 5)}
    assert len(brute_force_opf([])) == 0


def test_strongly_optimal_front_is_a_subset():
    routes, utilities = case_study_population()
    weakly = brute_force_opf((r, utilities.uv(r)) for r in routes)
    strongly = brute_force_opf(((r, utilities.uv(r)) for r in routes), strong=True)
    assert strongly.keys() <= weakly.keys()
    # {1 2 5} is weakly dominated by {1 3 5}
    assert (1, 2, 5) not in strongly
    assert (1, 3, 5) in strongly


def test_front_matches_double_loop_on_random_topology():
    topo = generate_topology(6, 4321)
    utilities = RouteUtilities.from_topology(topo)
    routes = enumerate_routes(6)
    expected = set()
    for x in routes:
        dominated = False
        for y in routes:
            ux, uy = utilities.uv(x), utilities.uv(y)
            if uy[0] < ux[0] and uy[1] < ux[1] and uy[2] < ux[2]:
                dominated = True
                break
        if not dominated:
            expected.add(x)
    assert brute_force_opf((r, utilities.uv(r)) for r in routes).keys() == expected
    assert front_of(routes, utilities).keys() == expected


def test_adding_dominated_routes_keeps_the_front():
    routes, utilities = case_study_population()
    population = [(r, utilities.uv(r)) for r in routes]
    before = brute_force_opf(population)
    rng = np.random.default_rng(21)
    extra = []
    for k, (route, uv) in enumerate(population):
        if route in before:
            worse = tuple(c * (1.0 + rng.uniform(0.01, 1.0)) + 1e-9 for c in uv)
            extra.append((("extra", k), worse))
    after = brute_force_opf(population + extra)
    assert after.keys() == before.keys()


def test_pareto_front_container():
    front = ParetoFront({(1, 5): (1e-3, 10.0, 1)})
    assert (1, 5) in front
    assert list(front) == [(1, 5)]
    assert len(front) == 1


# ============================================================================
# ACCURACY METRICS
# ============================================================================

def test_pareto_distance_zero_on_the_front():
    routes, utilities = case_study_population()
    population = [utilities.uv(r) for r in routes]
    for r in case_study_optimal_routes():
        assert pareto_distance(utilities.uv(r), population) == 0.0


def test_pareto_distance_counts_strong_dominators():
    routes, utilities = case_study_population()
    population = [utilities.uv(r) for r in routes]
    # dominated by {1 5}, {1 2 5} and {1 3 5}
    assert pareto_distance(utilities.uv((1, 2, 3, 5)), population) == pytest.approx(3 / 16)


def test_pareto_distance_constructed_chain():
    population = [[1, 1, 1], [2, 2, 2], [3, 3, 3], [4, 4, 4]]
    assert pareto_distance([4, 4, 4], population) == pytest.approx(3 / 4)
    assert list(pareto_distances(np.array(population))) == pytest.approx([0, 1 / 4, 2 / 4, 3 / 4])


def test_suboptimal_routes_reach_the_threshold():
    routes, utilities = case_study_population()
    distances = pareto_distances(utilities.matrix(routes))
    threshold = suboptimality_threshold(len(routes))
    optimal = case_study_optimal_routes()
    for route, d in zip(routes, distances):
        assert (d >= threshold) == (route not in optimal)
        assert (normalized_distance(d, len(routes)) >= 1) == (route not in optimal)


def test_pareto_distance_needs_population():
    with pytest.raises(ValueError):
        pareto_distance([1, 1, 1], [])
    with pytest.raises(ValueError):
        pareto_distances(np.empty((0, 3)))


def test_pareto_completion():
    truth = case_study_optimal_routes()
    assert pareto_completion(truth, truth) == 1.0
    assert pareto_completion(set(), truth) == 0.0
    four = set(sorted(truth)[:4])
    assert pareto_completion(four, truth) == pytest.approx(0.8)
    assert pareto_completion(truth | {parse_route(CASE_STUDY_ROWS[-1][0])}, truth) == 1.0
    with pytest.raises(ValueError):
        pareto_completion(truth, set())
