"""Expressions, the catalog format and validated homogeneous models."""
from .catalog import (
    CatalogEntry,
    Constraint,
    Expected,
    SpanSpec,
    builtin_catalog,
    find_entry,
    load_catalog,
    merge_catalogs,
    parse_assignment,
    parse_catalog,
    parse_constraint,
    select_entries,
)
from .expr import Expr, eval_expr, free_names, parse_expr, parse_scalar, to_text
from .homogeneous import (
    HomogeneousModel,
    build_model,
    instantiate,
    jacobi_violations,
    random_assignment,
    signature,
    structure_from_brackets,
    trial_assignments,
)

__all__ = [
    "Expr", "parse_expr", "to_text", "eval_expr", "free_names", "parse_scalar",
    "CatalogEntry", "Constraint", "Expected", "SpanSpec", "parse_catalog", "parse_constraint",
    "parse_assignment", "load_catalog", "builtin_catalog", "merge_catalogs", "find_entry",
    "select_entries", "HomogeneousModel", "build_model", "instantiate", "jacobi_violations",
    "structure_from_brackets", "signature", "random_assignment", "trial_assignments",
]
