"""Focused ant colony optimization for the symmetric Euclidean TSP."""

from .construction import (
    AntState,
    ConstructionResult,
    build_eta,
    calc_num_new_edges,
    construct_solution,
    select_next_node,
)
from .errors import (
    FacoError,
    InvalidTourError,
    ParameterError,
    ParseError,
    UnsupportedFormatError,
)
from .local_search import (
    Checklist,
    improve_initial,
    nearest_neighbor_tour,
    two_opt_checklist,
)
from .neighbors import NeighborLists, build_neighbor_lists, neighbor_distance
from .pheromone import PartialPheromone, TrailLimits, compute_limits
from .rng import Stream
from .route import EdgeView, Route, edge_in, parse_tour, write_tour
from .solver import (
    FacoParams,
    RunResult,
    RunStats,
    SolutionArchive,
    choose_source,
    default_ant_count,
    run,
)
from .tsplib import (
    TspInstance,
    distance,
    load_instance,
    parse_tsplib,
    read_best_known,
    tour_length,
    write_tsplib,
)

__version__ = "0.1.0"

__all__ = [
    "AntState",
    "Checklist",
    "ConstructionResult",
    "EdgeView",
    "FacoError",
    "FacoParams",
    "InvalidTourError",
    "NeighborLists",
    "ParameterError",
    "ParseError",
    "PartialPheromone",
    "Route",
    "RunResult",
    "RunStats",
    "SolutionArchive",
    "Stream",
    "TrailLimits",
    "TspInstance",
    "UnsupportedFormatError",
    "build_eta",
    "build_neighbor_lists",
    "calc_num_new_edges",
    "choose_source",
    "compute_limits",
    "construct_solution",
    "default_ant_count",
    "distance",
    "edge_in",
    "improve_initial",
    "load_instance",
    "nearest_neighbor_tour",
    "neighbor_distance",
    "parse_tour",
    "parse_tsplib",
    "read_best_known",
    "run",
    "select_next_node",
    "tour_length",
    "two_opt_checklist",
    "write_tour",
    "write_tsplib",
]
