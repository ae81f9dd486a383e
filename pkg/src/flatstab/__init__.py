"""Exact geometry for counting simplices stabbed by points and flats."""

from .errors import (
    ConstructionError,
    DegenerateInputError,
    InputError,
    ResourceLimitError,
    SolverError,
)
from .exact import (
    ExactPoint,
    PointSet,
    dump_point_set,
    general_position_check,
    load_point_set,
    orientation,
    point,
    point_type,
    simplex_contains,
    simplex_location,
)
from .counting import (
    Flat2Codim,
    MaxStabResult,
    StabCount,
    count_containing,
    count_containing_planar_fast,
    count_triangles_stabbed,
    max_stab_point,
    wendel_antisymmetric_count,
)

__all__ = [
    "ConstructionError",
    "DegenerateInputError",
    "InputError",
    "ResourceLimitError",
    "SolverError",
    "ExactPoint",
    "PointSet",
    "dump_point_set",
    "general_position_check",
    "load_point_set",
    "orientation",
    "point",
    "point_type",
    "simplex_contains",
    "simplex_location",
    "Flat2Codim",
    "MaxStabResult",
    "StabCount",
    "count_containing",
    "count_containing_planar_fast",
    "count_triangles_stabbed",
    "max_stab_point",
    "wendel_antisymmetric_count",
]

__version__ = "0.1.0"
