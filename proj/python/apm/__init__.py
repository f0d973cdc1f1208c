"""Numerical laboratory for Riemannian almost product manifolds.

The heavy lifting lives in the compiled extension ``apm._core``; this
package re-exports its public surface.
"""

from apm._core import (
    Expr,
    ExprParseError,
    ManifoldSpec,
    NumericError,
    PointPackage,
    SpecError,
    __version__,
    at_point,
    check_catalog,
    classify,
    load_spec,
    parse_expr,
    parse_spec,
    run_suite,
    search,
    spec_to_json,
    validate,
    write_spec,
)

__all__ = [
    "Expr",
    "ExprParseError",
    "ManifoldSpec",
    "NumericError",
    "PointPackage",
    "SpecError",
    "__version__",
    "at_point",
    "check_catalog",
    "classify",
    "load_spec",
    "parse_expr",
    "parse_spec",
    "run_suite",
    "search",
    "spec_to_json",
    "validate",
    "write_spec",
]
