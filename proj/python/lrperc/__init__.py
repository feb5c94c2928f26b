"""Long-range percolation simulation and verification toolkit."""

from lrperc._core import (
    Box,
    BudgetError,
    BundleError,
    Configuration,
    Params,
    block_side,
    check_inequalities,
    chemical_distance,
    classify_block,
    connection_probability,
    empirical_p0,
    estimate_block_goodness,
    find_min_lnM,
    iterate_recursion,
    load_bundle,
    run_ratio_experiment,
    sample_configuration,
)
from lrperc._core import __version__

__all__ = [
    "Box",
    "BudgetError",
    "BundleError",
    "Configuration",
    "Params",
    "block_side",
    "check_inequalities",
    "chemical_distance",
    "classify_block",
    "connection_probability",
    "empirical_p0",
    "estimate_block_goodness",
    "find_min_lnM",
    "iterate_recursion",
    "load_bundle",
    "run_ratio_experiment",
    "sample_configuration",
    "__version__",
]
