"""Swept-solid quantities.

Only ``IfcExtrudedAreaSolid`` bodies with rectangle, circle or polyline
profiles are handled, optionally behind an ``IfcMappedItem`` whose target is
a pure translation. Everything else (BReps, CSG, clipping) is reported as
:class:`NotComputable`; no geometry kernel is involved.
"""
from __future__ import annotations

import math
from typing import Sequence

from .graph import EntityGraph, EntityInstance
from .step import Ref, Typed


class NotComputable(ValueError):
    pass


def polygon_area(points: Sequence[Sequence[float]]) -> float:
    """Absolute shoelace area of a simple polygon given as (x, y) pairs.

    A repeated closing point is ignored.
    """
    pts = [(float(p[0]), float(p[1])) for p in points]
    if len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    if len(pts) < 3:
        return 0.0
    s = 0.0
    for (x1, y1), (x2, y2) in zip(pts, pts[1:] + pts[:1]):
        s += x1 * y2 - x2 * y1
    return abs(s) / 2.0


def _ent(g: EntityGraph, value) -> EntityInstance:
    if not isinstance(value, Ref) or value.id not in g.entities:
        raise NotComputable(f"missing geometry reference {value!r}")
    return g.entities[value.id]


def _num(value) -> float:
    if isinstance(value, Typed):
        value = value.value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise NotComputable(f"expected a number, found {value!r}")
    return float(value)


def _point(g: EntityGraph, ref) -> tuple[float, float]:
    p = _ent(g, ref)
    if p.ifc_type != "IFCCARTESIANPOINT":
        raise NotComputable(f"expected IFCCARTESIANPOINT, found {p.ifc_type}")
    coords = p.attributes[0]
    return _num(coords[0]), _num(coords[1])


def _curve_points(g: EntityGraph, ref) -> list[tuple[float, float]]:
    c = _ent(g, ref)
    if c.ifc_type == "IFCPOLYLINE":
        return [_point(g, r) for r in c.attributes[0]]
    if c.ifc_type == "IFCINDEXEDPOLYCURVE":
        plist = _ent(g, c.attributes[0])
        coords = [(_num(xy[0]), _num(xy[1])) for xy in plist.attributes[0]]
        segments = c.attributes[1] if len(c.attributes) > 1 else None
        if segments is None:
            return coords
        pts: list[tuple[float, float]] = []
        for seg in segments:
            if not isinstance(seg, Typed) or seg.type_tag != "IFCLINEINDEX":
                raise NotComputable("indexed poly curve with arc segments")
            for idx in seg.value:
                p = coords[int(idx) - 1]
                if not pts or pts[-1] != p:
                    pts.append(p)
        return pts
    raise NotComputable(f"unsupported curve {c.ifc_type}")


def profile_area(g: EntityGraph, ref) -> float:
    p = _ent(g, ref)
    a = p.attributes
    if p.ifc_type == "IFCRECTANGLEPROFILEDEF":
        return _num(a[3]) * _num(a[4])
    if p.ifc_type == "IFCCIRCLEPROFILEDEF":
        return math.pi * _num(a[3]) ** 2
    if p.ifc_type == "IFCARBITRARYCLOSEDPROFILEDEF":
        return polygon_area(_curve_points(g, a[2]))
    if p.ifc_type == "IFCARBITRARYPROFILEDEFWITHVOIDS":
        outer = polygon_area(_curve_points(g, a[2]))
        return outer - sum(polygon_area(_curve_points(g, r)) for r in a[3])
    raise NotComputable(f"unsupported profile {p.ifc_type}")


def _is_translation(g: EntityGraph, ref) -> bool:
    if ref is None:
        return True
    op = _ent(g, ref)
    a = op.attributes
    # Axis1, Axis2, LocalOrigin, Scale, Axis3 [, Scale2, Scale3]
    if not op.ifc_type.startswith("IFCCARTESIANTRANSFORMATIONOPERATOR"):
        return False
    for i in (3, 5, 6):
        if i < len(a) and a[i] is not None and abs(_num(a[i]) - 1.0) > 1e-12:
            return False
    standard = {0: (1.0, 0.0, 0.0), 1: (0.0, 1.0, 0.0), 4: (0.0, 0.0, 1.0)}
    for i, axis in standard.items():
        if i < len(a) and a[i] is not None:
            d = _ent(g, a[i]).attributes[0]
            v = [_num(x) for x in d] + [0.0] * (3 - len(d))
            n = math.sqrt(sum(x * x for x in v)) or 1.0
            if any(abs(x / n - y) > 1e-9 for x, y in zip(v, axis)):
                return False
    return True


def _extrusions(g: EntityGraph, items) -> list[EntityInstance]:
    out = []
    for ref in items:
        item = _ent(g, ref)
        if item.ifc_type == "IFCEXTRUDEDAREASOLID":
            out.append(item)
        elif item.ifc_type == "IFCMAPPEDITEM":
            if not _is_translation(g, item.attributes[1]):
                raise NotComputable("mapped item with a non-translation transform")
            rmap = _ent(g, item.attributes[0])
            rep = _ent(g, rmap.attributes[1])
            out.extend(_extrusions(g, rep.attributes[3]))
        else:
            raise NotComputable(f"body item of kind {item.ifc_type}")
    return out


def body_extrusions(g: EntityGraph, eid: int) -> list[EntityInstance]:
    ent = g[eid]
    rep_ref = ent.attributes[6] if len(ent.attributes) > 6 else None
    if not isinstance(rep_ref, Ref):
        raise NotComputable(f"#{eid} has no representation")
    shape = _ent(g, rep_ref)
    reps = [_ent(g, r) for r in shape.attributes[2]]
    body = [r for r in reps if r.attributes[1] == "Body"] or reps
    items = [i for r in body for i in r.attributes[3]]
    if not items:
        raise NotComputable(f"#{eid} has an empty body representation")
    return _extrusions(g, items)


def extruded_volume(g: EntityGraph, eid: int) -> float:
    """Sum of profile area x extrusion length over the body's extruded solids.

    For oblique extrusions the length is projected onto the profile normal.
    """
    total = 0.0
    for solid in body_extrusions(g, eid):
        area = profile_area(g, solid.attributes[0])
        depth = _num(solid.attributes[3])
        d = [_num(x) for x in _ent(g, solid.attributes[2]).attributes[0]]
        d += [0.0] * (3 - len(d))
        norm = math.sqrt(sum(x * x for x in d))
        if norm == 0.0:
            raise NotComputable("zero extrusion direction")
        total += area * depth * abs(d[2]) / norm
    return total


def footprint_area(g: EntityGraph, eid: int) -> float:
    """Sum of the extruded profile areas (the plan area for vertical extrusions)."""
    return sum(profile_area(g, s.attributes[0]) for s in body_extrusions(g, eid))
