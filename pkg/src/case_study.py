"""
5-node golden scenario: utility vectors of all 16 legitimate routes and of
their sub-routes, injected directly (the node coordinates behind them are
not available). Power values are used verbatim as given.
"""

from src.net_model import RouteUtilities
from src.route_space import parse_route


N_NODES = 5

# route, route UV, sub-route UV (None: direct route), optimal route, optimal sub-route
CASE_STUDY_ROWS = [
    ("{1 5}",       (4.52e-4, 74.15, 1), None,                 True,  True),
    ("{1 2 5}",     (2.52e-4, 73.10, 2), (2.52e-4, 73.10, 1),  True,  True),
    ("{1 3 5}",     (2.35e-4, 70.89, 2), (3.13e-5, 57.30, 1),  True,  True),
    ("{1 4 5}",     (1.43e-2, 71.76, 2), (1.41e-2, 67.50, 1),  True,  True),
    ("{1 2 3 5}",   (9.49e-4, 76.09, 3), (7.45e-4, 74.61, 2),  False, False),
    ("{1 2 4 5}",   (1.91e-2, 75.72, 3), (1.89e-2, 74.46, 2),  False, False),
    ("{1 3 2 5}",   (1.36e-4, 69.55, 3), (1.36e-4, 69.54, 2),  True,  True),
    ("{1 3 4 5}",   (1.29e-2, 71.74, 3), (1.28e-2, 67.46, 2),  False, True),
    ("{1 4 2 5}",   (1.42e-2, 71.19, 3), (1.42e-2, 71.19, 2),  False, True),
    ("{1 4 3 5}",   (1.46e-2, 73.50, 3), (1.44e-2, 70.27, 2),  False, True),
    ("{1 2 3 4 5}", (1.36e-2, 76.36, 4), (1.34e-2, 75.30, 3),  False, False),
    ("{1 2 4 3 5}", (1.94e-2, 76.50, 4), (1.92e-2, 75.18, 3),  False, False),
    ("{1 3 2 4 5}", (1.90e-2, 74.13, 4), (1.88e-2, 72.18, 3),  False, False),
    ("{1 3 4 2 5}", (1.28e-2, 71.18, 4), (1.28e-2, 71.17, 3),  False, False),
    ("{1 4 2 3 5}", (1.49e-2, 75.23, 4), (1.47e-2, 73.35, 3),  False, False),
    ("{1 4 3 2 5}", (1.45e-2, 72.82, 4), (1.45e-2, 72.81, 3),  False, False),
]


def case_study_utilities() -> RouteUtilities:
    return RouteUtilities.from_table(
        N_NODES,
        {parse_route(r): uv for r, uv, _, _, _ in CASE_STUDY_ROWS},
        {parse_route(r): sub for r, _, sub, _, _ in CASE_STUDY_ROWS},
    )


def case_study_optimal_routes() -> set:
    return {parse_route(r) for r, _, _, optimal, _ in CASE_STUDY_ROWS if optimal}


def case_study_optimal_subroutes() -> set:
    return {parse_route(r) for r, _, _, _, optimal_sub in CASE_STUDY_ROWS if optimal_sub}
