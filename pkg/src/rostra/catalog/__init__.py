from .ids import ConstraintId, Kind, Stage, parse_cid
from .registry import (
    DISABLED,
    CatalogError,
    CompiledStage,
    SoftPenaltyBreakdown,
    ViolationRecord,
    catalog_listing,
    check_hard,
    compile_stage,
    evaluate_soft,
)

__all__ = [
    "ConstraintId",
    "Kind",
    "Stage",
    "parse_cid",
    "DISABLED",
    "CatalogError",
    "CompiledStage",
    "SoftPenaltyBreakdown",
    "ViolationRecord",
    "catalog_listing",
    "check_hard",
    "compile_stage",
    "evaluate_soft",
]
