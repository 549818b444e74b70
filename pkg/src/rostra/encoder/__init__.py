from .encode import encode_stage, fix_cells, roster_from_solution
from .instance import EncodingError, IpInstance, Row, VarDef
from .lp_format import (
    LP_TEXT,
    MPS_TEXT,
    FormatError,
    parse_instance_file,
    parse_lp,
    parse_mps,
    write_instance,
)

__all__ = [
    "encode_stage",
    "fix_cells",
    "roster_from_solution",
    "EncodingError",
    "IpInstance",
    "Row",
    "VarDef",
    "LP_TEXT",
    "MPS_TEXT",
    "FormatError",
    "parse_instance_file",
    "parse_lp",
    "parse_mps",
    "write_instance",
]
