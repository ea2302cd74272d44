from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Dict, List

from .displays import Display, SlopeVec
from .exceptions import BadSpec, WittDispError
from .groups import GroupSpec
from .matrices import MatW, PMat
from .rings import ring_from_json
from .rz import LatticeCoset, RZPoint
from .witt import WittRing, WittVec

SCHEMA = "v1"


def envelope(kind: str, body: Dict[str, Any]) -> Dict[str, Any]:
    out = {"schema": SCHEMA, "kind": kind}
    out.update(body)
    return out


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def error_to_json(exc: WittDispError) -> Dict[str, Any]:
    return {"schema": SCHEMA, "error": type(exc).__name__, "message": str(exc)}


def _check_schema(data: Dict[str, Any]) -> None:
    schema = data.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise BadSpec(f"unsupported schema {schema!r}")


def witt_ring_from_json(data: Dict[str, Any]) -> WittRing:
    return WittRing(ring_from_json(data["ring"]), int(data["p"]), int(data["n"]))


def vec_from_json(data: Dict[str, Any]) -> WittVec:
    parent = witt_ring_from_json(data)
    return parent.vec_from_json(data)


def matw_from_json(parent: WittRing, rows: List[List[Any]]) -> MatW:
    return MatW.from_rows(parent, [[parent.vec_from_json(c) for c in row] for row in rows])


def pmat_to_json(g: PMat) -> Dict[str, Any]:
    body = g.to_json()
    body["witt"] = g.mat.parent.to_json()
    return body


def pmat_from_json(data: Dict[str, Any], parent: WittRing = None) -> PMat:
    parent = parent or witt_ring_from_json(data["witt"])
    return PMat(matw_from_json(parent, data["mat"]), int(data.get("shift", 0)))


def display_to_json(D: Display) -> Dict[str, Any]:
    return envelope("display", D.to_json())


def display_from_json(data: Dict[str, Any]) -> Display:
    _check_schema(data)
    parent = witt_ring_from_json(data["witt"])
    return Display(GroupSpec.from_json(data["spec"]), matw_from_json(parent, data["U"]))


def slopes_to_json(s: SlopeVec) -> Dict[str, Any]:
    return envelope("slopes", s.to_json())


def slopes_from_json(data: Dict[str, Any]) -> SlopeVec:
    _check_schema(data)
    return SlopeVec(tuple((Fraction(v), int(m)) for v, m in data["slopes"]))


def coset_to_json(c: LatticeCoset) -> Dict[str, Any]:
    body = c.to_json()
    body["witt"] = c.M.parent.to_json()
    return body


def coset_from_json(data: Dict[str, Any]) -> LatticeCoset:
    parent = witt_ring_from_json(data["witt"])
    base = parent.base
    diag = tuple(int(a) for a in data["diag"])
    shift = int(data["shift"])
    h = len(diag)
    rows: List[List[Any]] = []
    for i in range(h):
        row: List[Any] = []
        for j in range(h):
            if j < i:
                digits = [base.element_from_json(c) for c in data["below"][i][j]]
                row.append(parent.vec(digits + [base.zero] * (parent.n - len(digits))))
            elif j == i:
                row.append(parent.p ** (diag[i] + shift))
            else:
                row.append(0)
        rows.append(row)
    return LatticeCoset(MatW.from_rows(parent, rows), diag, shift)


def rz_point_to_json(pt: RZPoint) -> Dict[str, Any]:
    return envelope("rz_point", {"display": pt.D.to_json(), "g": pmat_to_json(pt.g)})


def rz_point_from_json(data: Dict[str, Any]) -> RZPoint:
    _check_schema(data)
    return RZPoint(display_from_json(data["display"]), pmat_from_json(data["g"]))
