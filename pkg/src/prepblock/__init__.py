"""Partially replicated block designs: construction, criteria, bounds and checks."""

from .construct import EGDSpec, Edit, egd_design, linked_block, modify, parse_edit_script, square_lattice
from .criteria import (
    a2_value,
    a_bound,
    a_eff,
    a_value,
    criteria_report,
    k0,
    k_thresholds,
    lemma1_check,
    mv_bound_a,
    mv_eff,
    mv_thresholds,
    mv_value,
)
from .linalg import eigen_sym, jacobi_eigh, pinv
from .model import (
    BlockDesign,
    DesignError,
    FullDesignSpec,
    dual,
    full_design,
    incidence,
    is_connected,
    parse_blocks,
    read_blocks,
    validate,
    write_blocks,
)

__version__ = "0.1.0"

__all__ = [
    "BlockDesign", "DesignError", "EGDSpec", "Edit", "FullDesignSpec",
    "a2_value", "a_bound", "a_eff", "a_value", "criteria_report", "dual",
    "egd_design", "eigen_sym", "full_design", "incidence", "is_connected",
    "jacobi_eigh", "k0", "k_thresholds", "lemma1_check", "linked_block",
    "modify", "mv_bound_a", "mv_eff", "mv_thresholds", "mv_value",
    "parse_blocks", "parse_edit_script", "pinv", "read_blocks",
    "square_lattice", "validate", "write_blocks",
]
