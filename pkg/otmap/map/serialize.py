"""Versioned JSON documents for maps and sequences.

A single map is stored as::

    {"version": 1, "kind": "map", "structure": "kr", "family": "hermite", "D": 2, "O": 2,
     "indices": [[0, 0], ...], "W": [[...], [...]], "shift": [...], "scale": [...],
     "metadata": {...}, "monotone_validated": false, "stages": []}

and a sequence as ``{"version": 1, "kind": "sequence", "D": 2, "stages": [<map body>, ...]}``.
Floats are written with the shortest repr that round-trips, so weights reload bit-for-bit.
"""
from __future__ import annotations

import json
import os.path as osp
from typing import Any, Dict, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from otmap.basis import build_multi_index_set
from otmap.utils import FamilyType, SchemaError, StructureType, UnsupportedVersion, get_logger

from .sequential import SequentialMap
from .transport import TransportMap

__all__ = ["SCHEMA_VERSION", "serialize", "deserialize", "save_map", "load_map", "dumps", "loads"]

logger = get_logger()

SCHEMA_VERSION: int = 1


class MapBody(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    structure: StructureType
    family: FamilyType = FamilyType.HERMITE
    dim: int = Field(alias="D", ge=1)
    order: int = Field(alias="O", ge=0)
    indices: List[List[int]]
    weights: List[List[float]] = Field(alias="W")
    shift: Optional[List[float]] = None
    scale: Optional[List[float]] = None
    metadata: Dict[str, Any] = Field(default_factory=dict)
    monotone_validated: bool = False


class MapDocument(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    version: int
    kind: Literal["map", "sequence"] = "map"
    structure: Optional[StructureType] = None
    family: Optional[FamilyType] = None
    dim: int = Field(alias="D", ge=1)
    order: Optional[int] = Field(default=None, alias="O", ge=0)
    indices: Optional[List[List[int]]] = None
    weights: Optional[List[List[float]]] = Field(default=None, alias="W")
    shift: Optional[List[float]] = None
    scale: Optional[List[float]] = None
    metadata: Dict[str, Any] = Field(default_factory=dict)
    monotone_validated: bool = False
    stages: List[MapBody] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_kind(self) -> MapDocument:
        if self.kind == "map":
            missing = [
                alias
                for alias, value in (
                    ("structure", self.structure),
                    ("O", self.order),
                    ("indices", self.indices),
                    ("W", self.weights),
                )
                if value is None
            ]
            if missing:
                raise ValueError(f"map document is missing {missing}")
            if self.stages:
                raise ValueError("map document must not carry stages")
        elif not self.stages:
            raise ValueError("sequence document needs at least one stage")
        return self

    def body(self) -> MapBody:
        return MapBody(
            structure=self.structure,
            family=self.family or FamilyType.HERMITE,
            D=self.dim,
            O=self.order,
            indices=self.indices,
            W=self.weights,
            shift=self.shift,
            scale=self.scale,
            metadata=self.metadata,
            monotone_validated=self.monotone_validated,
        )


def _to_json_value(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _to_json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_json_value(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


def _body(tmap: TransportMap) -> Dict[str, Any]:
    return {
        "structure": tmap.structure.value,
        "family": tmap.family.kind.value,
        "D": tmap.dim,
        "O": tmap.order,
        "indices": tmap.basis.indices.tolist(),
        "W": tmap.weights.tolist(),
        "shift": tmap.shift.tolist(),
        "scale": tmap.scale.tolist(),
        "metadata": _to_json_value(tmap.metadata),
        "monotone_validated": tmap.monotone_validated,
    }


def serialize(obj: Union[TransportMap, SequentialMap]) -> Dict[str, Any]:
    """Versioned document of a map or sequence as plain JSON-compatible values."""
    if isinstance(obj, TransportMap):
        return {"version": SCHEMA_VERSION, "kind": "map", **_body(obj), "stages": []}
    return {"version": SCHEMA_VERSION, "kind": "sequence", "D": obj.dim, "stages": [_body(s) for s in obj.stages]}


def _build(body: MapBody, prefix: str) -> TransportMap:
    basis = build_multi_index_set(body.structure, body.dim, body.order)
    indices = np.asarray(body.indices, dtype=np.int64)
    if indices.shape != basis.indices.shape or not np.array_equal(indices, basis.indices):
        raise SchemaError(
            f"indices do not match the canonical {body.structure.value} set with D={body.dim}, O={body.order}",
            f"{prefix}indices",
        )
    try:
        weights = np.asarray(body.weights, dtype=float)
    except ValueError as err:
        raise SchemaError(f"ragged weight matrix: {err}", f"{prefix}W") from err
    if weights.shape != (basis.dim, basis.size):
        raise SchemaError(f"expected shape {(basis.dim, basis.size)}, got {weights.shape}", f"{prefix}W")
    for d, k in np.argwhere((weights != 0.0) & ~basis.structural_mask()):
        raise SchemaError(f"structural zero violated for {body.structure.value} row {d}", f"{prefix}W.{d}.{k}")
    for name, value in (("shift", body.shift), ("scale", body.scale)):
        if value is not None and len(value) != body.dim:
            raise SchemaError(f"expected {body.dim} entries, got {len(value)}", f"{prefix}{name}")
    if body.scale is not None and min(body.scale) <= 0:
        raise SchemaError("scale must be positive", f"{prefix}scale")

    return TransportMap(
        basis,
        weights,
        body.family,
        shift=body.shift,
        scale=body.scale,
        metadata=body.metadata,
        monotone_validated=body.monotone_validated,
    )


def deserialize(document: Dict[str, Any]) -> Union[TransportMap, SequentialMap]:
    """Rebuild a map or sequence from its document.

    Raises:
        UnsupportedVersion: When `version` differs from SCHEMA_VERSION.
        SchemaError: On any other violation, with the path of the offending field.
    """
    if not isinstance(document, dict):
        raise SchemaError(f"document must be an object, got {type(document).__name__}")
    if "version" not in document:
        raise SchemaError("missing field", "version")
    if document["version"] != SCHEMA_VERSION:
        raise UnsupportedVersion(
            f"document version {document['version']!r} is not supported, expected {SCHEMA_VERSION}", "version"
        )
    try:
        parsed = MapDocument.model_validate(document)
    except ValidationError as err:
        first = err.errors()[0]
        raise SchemaError(first["msg"], ".".join(str(loc) for loc in first["loc"])) from err

    if parsed.kind == "map":
        return _build(parsed.body(), "")
    stages = []
    for t, body in enumerate(parsed.stages):
        if body.dim != parsed.dim:
            raise SchemaError(f"stage has D={body.dim} but the sequence has D={parsed.dim}", f"stages.{t}.D")
        stages.append(_build(body, f"stages.{t}."))
    return SequentialMap(stages)


def dumps(obj: Union[TransportMap, SequentialMap]) -> str:
    return json.dumps(serialize(obj), indent=2)


def loads(text: str) -> Union[TransportMap, SequentialMap]:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError(f"invalid JSON: {err}") from err
    return deserialize(document)


def save_map(obj: Union[TransportMap, SequentialMap], path: str) -> None:
    """Write a map document to `path`."""
    with open(path, "w") as f:
        f.write(dumps(obj))
        f.write("\n")
    logger.info(f"Saved {obj} to {path}")


def load_map(path: str) -> Union[TransportMap, SequentialMap]:
    """Read a map document from `path`.

    Raises:
        FileNotFoundError: When `path` does not exist.
    """
    if not osp.exists(path):
        raise FileNotFoundError(f"Cannot find {path}")
    with open(path, "r") as f:
        return loads(f.read())
