from .errors import (
    BracketNotFound,
    DatasetError,
    DegenerateBasisError,
    IndexSetTooLargeError,
    InvalidArgumentError,
    MissingColumnError,
    MissingValueError,
    NoConvergence,
    NonConvergence,
    NonFiniteInputError,
    NonMonotoneAtPoint,
    NonNumericCellError,
    NumericalError,
    OtmapError,
    ProjectionError,
    SamplerError,
    SchemaError,
    StageFitError,
    StandardizationError,
    UnsupportedOperation,
    UnsupportedVersion,
)
from .format import class2dict, dict2list, dict2str, format_float
from .io import read_samples_csv, write_records_csv, write_samples_csv
from .logger import get_logger, set_log_level
from .types import FamilyType, InitType, MethodType, PUpdateType, ScheduleType, SourceType, StructureType

__all__ = (
    "BracketNotFound",
    "DatasetError",
    "DegenerateBasisError",
    "IndexSetTooLargeError",
    "InvalidArgumentError",
    "MissingColumnError",
    "MissingValueError",
    "NoConvergence",
    "NonConvergence",
    "NonFiniteInputError",
    "NonMonotoneAtPoint",
    "NonNumericCellError",
    "NumericalError",
    "OtmapError",
    "ProjectionError",
    "SamplerError",
    "SchemaError",
    "StageFitError",
    "StandardizationError",
    "UnsupportedOperation",
    "UnsupportedVersion",
    "class2dict",
    "dict2list",
    "dict2str",
    "format_float",
    "read_samples_csv",
    "write_records_csv",
    "write_samples_csv",
    "get_logger",
    "set_log_level",
    "FamilyType",
    "InitType",
    "MethodType",
    "PUpdateType",
    "ScheduleType",
    "SourceType",
    "StructureType",
)
