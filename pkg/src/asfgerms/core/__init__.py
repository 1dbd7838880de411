from .fields import Field, FieldElement, FieldError, check_characteristic, field_arith
from .laurent import AtLeast, PrecisionError, TruncatedLaurent, laurent_valuation
from .linalg import kernel, rank, rank_kernel, rref, solve

__all__ = [
    "AtLeast",
    "Field",
    "FieldElement",
    "FieldError",
    "PrecisionError",
    "TruncatedLaurent",
    "check_characteristic",
    "field_arith",
    "kernel",
    "laurent_valuation",
    "rank",
    "rank_kernel",
    "rref",
    "solve",
]
