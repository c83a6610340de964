import itertools

import pytest

from src.case_study import CASE_STUDY_ROWS
from src.route_space import (
    count_routes,
    decode,
    encode,
    enumerate_routes,
    format_route,
    generate_append,
    generate_insert_anywhere,
    generate_stage,
    parse_route,
    route_key,
    subroute,
    unused_relays,
    validate_route,
)


@pytest.mark.parametrize("n_nodes, expected", [(2, 1), (3, 2), (5, 16), (6, 65), (7, 326)])
def test_count_routes(n_nodes, expected):
    assert count_routes(n_nodes) == expected
    assert len(enumerate_routes(n_nodes)) == expected


def test_enumerate_five_nodes_is_the_case_study_route_set():
    assert set(enumerate_routes(5)) == {parse_route(r) for r, *_ in CASE_STUDY_ROWS}
    assert enumerate_routes(2) == [(1, 2)]


def test_enumeration_is_canonical():
    routes = enumerate_routes(6)
    assert routes == sorted(routes, key=route_key)
    assert routes[0] == (1, 6)


def test_enumeration_matches_independent_generator():
    def grow(prefix, remaining, n):
        yield prefix + (n,)
        for r in sorted(remaining):
            yield from grow(prefix + (r,), remaining - {r}, n)

    independent = set(grow((1,), set(range(2, 6)), 6))
    assert set(enumerate_routes(6)) == independent


@pytest.mark.parametrize("n_nodes", [2, 3, 4, 5, 6, 7])
def test_encode_decode_bijective(n_nodes):
    routes = enumerate_routes(n_nodes)
    for route_id, route in enumerate(routes):
        assert encode(route, n_nodes) == route_id
        assert decode(route_id, n_nodes) == route


def test_direct_route_is_index_zero():
    assert encode((1, 9), 9) == 0
    assert decode(0, 9) == (1, 9)


def test_encode_large_network_without_listing():
    # 12 nodes: 10 relays, ~9.8 million routes
    n = 12
    last = (1, *range(11, 1, -1), n)
    assert encode(last, n) == count_routes(n) - 1
    assert decode(count_routes(n) - 1, n) == last
    assert decode(encode((1, 7, 3, 11, 12), n), n) == (1, 7, 3, 11, 12)


def test_decode_rejects_out_of_range():
    with pytest.raises(ValueError):
        decode(16, 5)
    with pytest.raises(ValueError):
        decode(-1, 5)


@pytest.mark.parametrize("route", [(2, 5), (1, 4), (1, 3, 3, 5), (1, 6, 5), (1, 1, 5), (5,)])
def test_invalid_routes_rejected(route):
    with pytest.raises(ValueError):
        validate_route(route, 5)


def test_route_text_format():
    assert format_route((1, 3, 2, 5)) == "{1 3 2 5}"
    assert parse_route("{1 3 2 5}") == (1, 3, 2, 5)
    assert parse_route(" { 1 5 } ") == (1, 5)
    with pytest.raises(ValueError):
        parse_route("1 3 5")


def test_subroute_drops_destination():
    assert subroute((1, 3, 5)) == (1, 3)
    assert subroute((1, 3, 2, 5)) == (1, 3, 2)
    with pytest.raises(ValueError):
        subroute((1, 5))


def test_unused_relays():
    assert unused_relays((1, 3, 5), 5) == [2, 4]
    assert unused_relays((1, 2, 3, 4, 5), 5) == []


def test_generate_append():
    assert generate_append((1, 2, 5), 5) == [(1, 2, 3, 5), (1, 2, 4, 5)]
    assert generate_append((1, 2, 3, 4, 5), 5) == []
    assert generate_append((1, 5), 5) == [(1, 2, 5), (1, 3, 5), (1, 4, 5)]


def test_generate_insert_anywhere():
    assert generate_insert_anywhere((1, 2, 5), 5) == [(1, 2, 3, 5), (1, 2, 4, 5), (1, 3, 2, 5), (1, 4, 2, 5)]
    assert generate_insert_anywhere((1, 5), 5) == generate_append((1, 5), 5)


def test_insert_anywhere_contains_append():
    for route in enumerate_routes(6):
        assert set(generate_append(route, 6)) <= set(generate_insert_anywhere(route, 6))


def test_generated_routes_are_one_hop_longer():
    for route, relaxed in itertools.product(enumerate_routes(5), (False, True)):
        for child in generate_stage([route], 5, relaxed):
            validate_route(child, 5)
            assert len(child) == len(route) + 1


def test_generate_stage_merges_duplicates():
    stage = generate_stage([(1, 2, 5), (1, 3, 5)], 5, relaxed=True)
    assert len(stage) == len(set(stage))
    assert (1, 2, 3, 5) in stage
    assert (1, 3, 2, 5) in stage
    assert stage == sorted(stage, key=route_key)
