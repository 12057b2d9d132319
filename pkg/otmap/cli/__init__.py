from .config import FitDocument, LassoDocument, load_config, merge_overrides, validate_document
from .main import EXIT_ERROR, EXIT_NONCONVERGED, EXIT_OK, build_parser, main

__all__ = (
    "FitDocument",
    "LassoDocument",
    "load_config",
    "merge_overrides",
    "validate_document",
    "EXIT_ERROR",
    "EXIT_NONCONVERGED",
    "EXIT_OK",
    "build_parser",
    "main",
)
