#!/usr/bin/env python3
"""
JSON codecs and file persistence for polyred inputs and reports

Rationals travel as strings "p/q" or "p". Every loader accepts either a path
to a JSON file or an already parsed object.
"""

import dataclasses
import json
from enum import Enum
from fractions import Fraction
from functools import singledispatch
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

import structlog
from pydantic import BaseModel

from core.algebra.exactlin import Matrix, Subspace, format_fraction, to_fraction
from core.algebra.polynomials import MultiPoly
from core.domain.errors import InputError
from core.domain.models import (ActionPointData, FormFamily, PolyKVector,
                                PolySection)
from core.domain.ports import StoragePort

logger = structlog.get_logger(__name__)

Source = Union[str, Path, Mapping[str, Any]]


@singledispatch
def to_jsonable(obj: Any) -> Any:
    """Convert domain values into plain JSON types"""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if obj is None or isinstance(obj, (bool, int, float)):
        return obj
    raise TypeError(f"cannot encode {type(obj).__name__} as JSON")


@to_jsonable.register
def _(obj: str) -> Any:
    return obj.value if isinstance(obj, Enum) else obj


@to_jsonable.register
def _(obj: Enum) -> Any:
    return obj.value


@to_jsonable.register
def _(obj: Fraction) -> str:
    return format_fraction(obj)


@to_jsonable.register(dict)
def _(obj: dict) -> Dict[str, Any]:
    return {str(to_jsonable(k)): to_jsonable(v) for k, v in obj.items()}


@to_jsonable.register(list)
@to_jsonable.register(tuple)
def _(obj) -> List[Any]:
    return [to_jsonable(x) for x in obj]


@to_jsonable.register
def _(obj: Matrix) -> List[List[str]]:
    return [[format_fraction(x) for x in row] for row in obj.row_list()]


@to_jsonable.register
def _(obj: Subspace) -> Dict[str, Any]:
    return {"ambient_dim": obj.ambient_dim, "dim": obj.dim, "generators": to_jsonable(obj.vectors())}


@to_jsonable.register
def _(obj: MultiPoly) -> Dict[str, Any]:
    return {
        "vars": list(obj.variables),
        "terms": [{"c": format_fraction(c), "e": list(e)} for c, e in obj.to_terms()],
        "text": str(obj),
    }


@to_jsonable.register
def _(obj: FormFamily) -> Dict[str, Any]:
    data: Dict[str, Any] = {"dim": obj.dim, "k": obj.k, "omega": [to_jsonable(w) for w in obj.omega]}
    if obj.has_eta:
        data["eta"] = to_jsonable(obj.eta)
    return data


@to_jsonable.register
def _(obj: ActionPointData) -> Dict[str, Any]:
    data = {"structure": to_jsonable(obj.forms), "gtilde": to_jsonable(obj.gtilde), "regular": obj.regular}
    if obj.g_dim is not None:
        data["g_dim"] = obj.g_dim
    return data


@to_jsonable.register
def _(obj: PolySection) -> Dict[str, Any]:
    return {"k": obj.k, "n": obj.n, "psi": to_jsonable(obj.psi), "momenta": to_jsonable(obj.momenta)}


@to_jsonable.register
def _(obj: PolyKVector) -> Dict[str, Any]:
    return {"vars": list(obj.variables), "legs": to_jsonable(obj.legs)}


@to_jsonable.register
def _(obj: BaseModel) -> Dict[str, Any]:
    return obj.model_dump(mode="json")


def _require(data: Mapping[str, Any], key: str, what: str) -> Any:
    if not isinstance(data, Mapping):
        raise InputError(f"{what} must be a JSON object")
    if key not in data:
        raise InputError(f"{what} is missing the field {key!r}")
    return data[key]


def _scalars(values: Sequence[Any], what: str) -> List[Fraction]:
    if not isinstance(values, list):
        raise InputError(f"{what} must be a list of rationals")
    return [to_fraction(v) for v in values]


def decode_structure(data: Mapping[str, Any]) -> FormFamily:
    dim = _require(data, "dim", "structure")
    k = _require(data, "k", "structure")
    omega = _require(data, "omega", "structure")
    if not isinstance(omega, list) or len(omega) != k:
        raise InputError(f"structure declares k={k} but lists {len(omega) if isinstance(omega, list) else 'no'} forms")
    mats = tuple(Matrix.from_rows([_scalars(row, "omega row") for row in w], dim) for w in omega)
    if any(m.rows != dim for m in mats):
        raise InputError(f"every omega must be {dim}x{dim}")
    eta = None
    if data.get("eta") is not None:
        eta = tuple(tuple(_scalars(e, "eta")) for e in data["eta"])
    return FormFamily(dim=dim, k=k, omega=mats, eta=eta)


def decode_subspace(data: Mapping[str, Any]) -> Subspace:
    ambient = _require(data, "ambient_dim", "subspace")
    gens = _require(data, "generators", "subspace")
    return Subspace.from_generators(ambient, [_scalars(g, "generator") for g in gens])


def decode_action(data: Mapping[str, Any]) -> ActionPointData:
    return ActionPointData(
        forms=decode_structure(_require(data, "structure", "action")),
        gtilde=decode_subspace(_require(data, "gtilde", "action")),
        regular=bool(data.get("regular", True)),
        g_dim=data.get("g_dim"),
    )


def decode_polynomial(data: Mapping[str, Any]) -> MultiPoly:
    variables = _require(data, "vars", "polynomial")
    if "expr" in data:
        return MultiPoly.from_expr(variables, data["expr"])
    terms = _require(data, "terms", "polynomial")
    return MultiPoly.from_terms(variables, [(_require(t, "c", "term"), _require(t, "e", "term")) for t in terms])


def decode_section(data: Mapping[str, Any]) -> PolySection:
    return PolySection(
        k=_require(data, "k", "section"),
        n=_require(data, "n", "section"),
        psi=tuple(decode_polynomial(p) for p in _require(data, "psi", "section")),
        momenta=tuple(tuple(decode_polynomial(p) for p in row) for row in _require(data, "momenta", "section")),
    )


def decode_kvector(data: Mapping[str, Any]) -> PolyKVector:
    variables = tuple(_require(data, "vars", "k-vector"))
    return PolyKVector(
        variables=variables,
        legs=tuple(tuple(decode_polynomial(p) for p in leg) for leg in _require(data, "legs", "k-vector")),
    )


class JsonStorageAdapter(StoragePort):
    """JSON file-based storage implementation"""

    def __init__(self, base_path: str = "./storage"):
        self.base_path = Path(base_path)
        self.reports_path = self.base_path / "reports"

    def read_json(self, source: Source) -> Any:
        if isinstance(source, Mapping):
            return source
        path = Path(source)
        try:
            with open(path, "r") as f:
                return json.load(f)
        except FileNotFoundError as e:
            raise InputError(f"no such file: {path}") from e
        except json.JSONDecodeError as e:
            raise InputError(f"malformed JSON in {path}: {e}") from e

    def load_structure(self, source: Source) -> FormFamily:
        return decode_structure(self.read_json(source))

    def load_subspace(self, source: Source) -> Subspace:
        return decode_subspace(self.read_json(source))

    def load_action(self, source: Source) -> ActionPointData:
        return decode_action(self.read_json(source))

    def load_polynomial(self, source: Source) -> MultiPoly:
        return decode_polynomial(self.read_json(source))

    def load_section(self, source: Source) -> PolySection:
        return decode_section(self.read_json(source))

    def load_kvector(self, source: Source) -> PolyKVector:
        return decode_kvector(self.read_json(source))

    async def save_report(self, name: str, report: Dict[str, Any]) -> Optional[str]:
        """Save a report under storage/reports/<name>.json"""
        try:
            self.reports_path.mkdir(parents=True, exist_ok=True)
            target = self.reports_path / f"{name}.json"
            with open(target, "w") as f:
                json.dump(to_jsonable(report), f, indent=2)
            return str(target)
        except OSError as e:
            logger.error("Failed to save report", name=name, error=str(e))
            return None

    async def export_to_file(self, data: Any, filepath: str) -> None:
        """Export data to JSON file"""
        try:
            target = Path(filepath)
            if target.parent != Path("."):
                target.parent.mkdir(parents=True, exist_ok=True)
            with open(target, "w") as f:
                json.dump(to_jsonable(data), f, indent=2)
        except OSError as e:
            logger.error("Failed to export data", filepath=filepath, error=str(e))
