from .inverse import RootFinderConfig, invert, invert_batch
from .monotone import MonotonicityReport, MonotonicityViolation, check_monotonicity, project_monotone
from .sequential import SequentialMap, compose_forward, compose_inverse, push_with_log_det
from .serialize import SCHEMA_VERSION, deserialize, dumps, load_map, loads, save_map, serialize
from .transport import TransportMap

__all__ = (
    "RootFinderConfig",
    "invert",
    "invert_batch",
    "MonotonicityReport",
    "MonotonicityViolation",
    "check_monotonicity",
    "project_monotone",
    "SequentialMap",
    "compose_forward",
    "compose_inverse",
    "push_with_log_det",
    "SCHEMA_VERSION",
    "deserialize",
    "dumps",
    "load_map",
    "loads",
    "save_map",
    "serialize",
    "TransportMap",
)
