"""Proper efficiency of finite point clouds with checkable certificates."""

__version__ = "0.1.0"

from .cones import (  # noqa: E402
    DEFAULT_TOL,
    HalfspaceCone,
    UnionConeDK,
    contains_closed,
    contains_interior,
    dK_contains,
    make_cp,
    make_orthant,
)
from .efficiency import (  # noqa: E402
    Certificate,
    NotProperlyEfficient,
    PointCloud,
    VerificationError,
    benson_check,
    existence_check,
    existence_search,
    geoffrion_minimal_K,
    gmin_set,
    make_cloud,
    min_set,
    wmin_set,
)
from .gerstewitz import evaluate, make_form, make_sum_form  # noqa: E402
from .scalarize import build_proper_functional, unique_minimizer_certificate  # noqa: E402

__all__ = [
    "DEFAULT_TOL",
    "Certificate",
    "HalfspaceCone",
    "NotProperlyEfficient",
    "PointCloud",
    "UnionConeDK",
    "VerificationError",
    "benson_check",
    "build_proper_functional",
    "contains_closed",
    "contains_interior",
    "dK_contains",
    "evaluate",
    "existence_check",
    "existence_search",
    "geoffrion_minimal_K",
    "gmin_set",
    "make_cloud",
    "make_cp",
    "make_form",
    "make_orthant",
    "make_sum_form",
    "min_set",
    "unique_minimizer_certificate",
    "wmin_set",
]
