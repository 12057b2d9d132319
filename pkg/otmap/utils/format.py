import dataclasses
import pprint
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np


def format_float(value: float) -> str:
    """Shortest decimal string that parses back to the same float64.

    Args:
        value (float): Value to format.

    Returns:
        str: Decimal representation, e.g. "0.1", "1e-08", "nan".
    """
    return repr(float(value))


def class2dict(obj: Any, abbreviation: Optional[int] = None) -> Any:
    """Convert dataclasses, Enums and numpy objects to plain python containers.

    Args:
        obj (Any): Object to convert.
        abbreviation (Optional[int]): If len(list_object) > abbreviation, abbreviate the result.
            Defaults to None.

    Returns:
        Any: dict, list or scalar made only of builtin types.
    """
    if isinstance(obj, dict):
        return {str(key): class2dict(item, abbreviation) for key, item in obj.items()}
    elif isinstance(obj, Enum):
        return obj.value
    elif dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            field.name: class2dict(getattr(obj, field.name), abbreviation)
            for field in dataclasses.fields(obj)
            if not field.name.startswith("_")
        }
    elif isinstance(obj, np.ndarray):
        return class2dict(obj.tolist(), abbreviation)
    elif isinstance(obj, np.generic):
        return obj.item()
    elif isinstance(obj, (list, tuple)):
        if abbreviation and len(obj) > abbreviation:
            return f" --- length of element {len(obj)} ---"
        return [class2dict(elem, abbreviation) for elem in obj]
    else:
        return obj


def dict2str(dict_obj: Dict[str, Any], format: bool = False) -> str:
    """Convert dict object to str.

    Args:
        dict_obj (Dict[str, Any])
        format (bool): Whether format converted str. Defaults to False.

    Returns:
        str_ (str)
    """
    str_: str = pprint.pformat(
        dict_obj,
        indent=1,
        width=120,
        depth=None,
        compact=True,
    )
    if format:
        return "\n" + str_ + "\n"
    return str_


def dict2list(dict_obj: Dict[str, Any], keys: Optional[List[str]] = None) -> List[str]:
    """Convert a flat record to a list of str, floats in shortest round-trip form.

    Args:
        dict_obj (Dict[str, Any])
        keys (Optional[List[str]]): Order of the output. Defaults to None (insertion order).

    Returns:
        List[str]:
    """
    if keys is None:
        keys = list(dict_obj.keys())
    return [_cell2str(dict_obj[k]) for k in keys]


def _cell2str(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)
