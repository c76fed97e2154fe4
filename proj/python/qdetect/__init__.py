"""Reconstruct, audit and re-derive the three-property detection construction."""

from ._core import (
    DEFAULT_SEED,
    SPATIAL_DIM,
    SPIN_DIM,
    ContractError,
    InfeasibleError,
    audit,
    derive_property,
    detector,
    detector_masks,
    dump,
    enumerate_solutions,
    exact_distribution,
    literal_state,
    repaired_state,
    run_cli,
    sample,
    solve_triple,
    verify,
    which_slit,
)

__all__ = [
    "DEFAULT_SEED",
    "SPATIAL_DIM",
    "SPIN_DIM",
    "ContractError",
    "InfeasibleError",
    "audit",
    "derive_property",
    "detector",
    "detector_masks",
    "dump",
    "enumerate_solutions",
    "exact_distribution",
    "literal_state",
    "repaired_state",
    "run_cli",
    "sample",
    "solve_triple",
    "verify",
    "which_slit",
]
