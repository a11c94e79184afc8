"""Regenerate the toy IFC models under src/cobbie/data/models/.

Development helper only; the generated files are committed. Entity numbering
is deterministic so golden dumps stay stable.

    python scripts/build_fixtures.py
"""
from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from cobbie.ifc.step import encode_string  # noqa: E402

OUT = ROOT / "src" / "cobbie" / "data" / "models"


class R:
    def __init__(self, i):
        self.i = i


class E:
    def __init__(self, tok):
        self.tok = tok


class T:
    def __init__(self, tag, value):
        self.tag, self.value = tag, value


def fmt(v) -> str:
    if v is None:
        return "$"
    if v is True:
        return ".T."
    if v is False:
        return ".F."
    if isinstance(v, R):
        return f"#{v.i}"
    if isinstance(v, E):
        return f".{v.tok}."
    if isinstance(v, T):
        return f"{v.tag}({fmt(v.value)})"
    if isinstance(v, str):
        return "'" + encode_string(v) + "'"
    if isinstance(v, float):
        s = repr(v).upper()
        if "E" in s and "." not in s:
            s = s.replace("E", ".E")
        return s if "." in s else s + "."
    if isinstance(v, int):
        return str(v)
    if isinstance(v, (list, tuple)):
        return "(" + ",".join(fmt(x) for x in v) + ")"
    raise TypeError(v)


class Model:
    def __init__(self, schema: str, name: str):
        self.schema = schema
        self.name = name
        self.lines: list[str] = []
        self.n = 0
        self.guids = 0

    def add(self, etype: str, *args) -> R:
        self.n += 1
        self.lines.append(f"#{self.n}={etype}({','.join(fmt(a) for a in args)});")
        return R(self.n)

    def guid(self) -> str:
        self.guids += 1
        alphabet = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz_$"
        n = self.guids * 7919 + len(self.name) * 104729
        s = ""
        for _ in range(22):
            s = alphabet[n % 64] + s
            n //= 64
        return s

    def text(self, extra_header: str = "") -> str:
        head = (
            "ISO-10303-21;\nHEADER;\n"
            "FILE_DESCRIPTION(('ViewDefinition [CoordinationView]'),'2;1');\n"
            f"FILE_NAME('{self.name}','2026-01-01T00:00:00',('cobbie'),('cobbie'),'cobbie fixtures','cobbie','');\n"
            f"FILE_SCHEMA(('{self.schema}'));\nENDSEC;\n"
        )
        return head + extra_header + "DATA;\n" + "\n".join(self.lines) + "\nENDSEC;\nEND-ISO-10303-21;\n"


class Builder:
    """Convenience layer for the handful of IFC patterns the fixtures need."""

    def __init__(self, schema: str, name: str, project: str):
        self.m = Model(schema, name)
        m = self.m
        self.origin = m.add("IFCCARTESIANPOINT", (0.0, 0.0, 0.0))
        self.zdir = m.add("IFCDIRECTION", (0.0, 0.0, 1.0))
        self.xdir = m.add("IFCDIRECTION", (1.0, 0.0, 0.0))
        self.axis = m.add("IFCAXIS2PLACEMENT3D", self.origin, None, None)
        self.ctx = m.add("IFCGEOMETRICREPRESENTATIONCONTEXT", None, "Model", 3, 1.0e-05, self.axis, None)
        u1 = m.add("IFCSIUNIT", "*", E("LENGTHUNIT"), None, E("METRE"))
        u2 = m.add("IFCSIUNIT", "*", E("AREAUNIT"), None, E("SQUARE_METRE"))
        u3 = m.add("IFCSIUNIT", "*", E("VOLUMEUNIT"), None, E("CUBIC_METRE"))
        units = m.add("IFCUNITASSIGNMENT", (u1, u2, u3))
        self.project = m.add("IFCPROJECT", m.guid(), None, project, None, None, None, None, (self.ctx,), units)
        self.placement = m.add("IFCLOCALPLACEMENT", None, self.axis)
        self.is_ifc4 = schema.startswith("IFC4")

    def spatial(self, etype: str, name: str, *extra, long_name=None) -> R:
        m = self.m
        return m.add(etype, m.guid(), None, name, None, None, self.placement, None, long_name, E("ELEMENT"), *extra)

    def aggregate(self, parent: R, children: list[R]) -> R:
        return self.m.add("IFCRELAGGREGATES", self.m.guid(), None, None, None, parent, tuple(children))

    def contain(self, structure: R, elements: list[R]) -> R:
        return self.m.add("IFCRELCONTAINEDINSPATIALSTRUCTURE", self.m.guid(), None, None, None,
                          tuple(elements), structure)

    def shape(self, items: list[R], rtype: str = "SweptSolid", ident: str = "Body") -> R:
        rep = self.m.add("IFCSHAPEREPRESENTATION", self.ctx, ident, rtype, tuple(items))
        return self.m.add("IFCPRODUCTDEFINITIONSHAPE", None, None, (rep,))

    def extrude(self, profile: R, depth: float, direction=None) -> R:
        d = self.zdir if direction is None else self.m.add("IFCDIRECTION", direction)
        return self.m.add("IFCEXTRUDEDAREASOLID", profile, self.axis, d, depth)

    def rect(self, x: float, y: float) -> R:
        pos = self.m.add("IFCAXIS2PLACEMENT2D", self.m.add("IFCCARTESIANPOINT", (0.0, 0.0)), None)
        return self.m.add("IFCRECTANGLEPROFILEDEF", E("AREA"), None, pos, x, y)

    def polyline_profile(self, pts) -> R:
        ps = [self.m.add("IFCCARTESIANPOINT", (float(x), float(y))) for x, y in pts]
        poly = self.m.add("IFCPOLYLINE", tuple(ps + [ps[0]]))
        return self.m.add("IFCARBITRARYCLOSEDPROFILEDEF", E("AREA"), None, poly)

    def element(self, etype: str, name: str, shape: R | None = None, *extra, tag=None) -> R:
        m = self.m
        return m.add(etype, m.guid(), None, name, None, None, self.placement, shape, tag, *extra)

    def pset(self, owners: list[R], name: str, props: dict, via_type: bool = False) -> R:
        m = self.m
        ps = []
        for k, v in props.items():
            if isinstance(v, T):
                ps.append(m.add("IFCPROPERTYSINGLEVALUE", k, None, v, None))
            elif isinstance(v, bool):
                ps.append(m.add("IFCPROPERTYSINGLEVALUE", k, None, T("IFCBOOLEAN", v), None))
            elif isinstance(v, float):
                ps.append(m.add("IFCPROPERTYSINGLEVALUE", k, None, T("IFCREAL", v), None))
            elif isinstance(v, int):
                ps.append(m.add("IFCPROPERTYSINGLEVALUE", k, None, T("IFCINTEGER", v), None))
            else:
                ps.append(m.add("IFCPROPERTYSINGLEVALUE", k, None, T("IFCLABEL", v), None))
        pset = m.add("IFCPROPERTYSET", m.guid(), None, name, None, tuple(ps))
        if not via_type:
            m.add("IFCRELDEFINESBYPROPERTIES", m.guid(), None, None, None, tuple(owners), pset)
        return pset

    def qset(self, owners: list[R], name: str, quantities: dict) -> R:
        m = self.m
        qs = []
        for k, (kind, v) in quantities.items():
            qs.append(m.add(f"IFCQUANTITY{kind}", k, None, None, v) if not self.is_ifc4
                      else m.add(f"IFCQUANTITY{kind}", k, None, None, v, None))
        q = m.add("IFCELEMENTQUANTITY", m.guid(), None, name, None, None, tuple(qs))
        m.add("IFCRELDEFINESBYPROPERTIES", m.guid(), None, None, None, tuple(owners), q)
        return q

    def wall(self, name: str, x: float, y: float, depth: float) -> R:
        etype = "IFCWALL" if self.is_ifc4 else "IFCWALLSTANDARDCASE"
        shape = self.shape([self.extrude(self.rect(x, y), depth)])
        extra = (E("STANDARD"),) if self.is_ifc4 else ()
        return self.element(etype, name, shape, *extra)

    def door(self, name: str, height: float | None = None, width: float | None = None) -> R:
        extra = (E("DOOR"), E("SINGLE_SWING_LEFT"), None) if self.is_ifc4 else ()
        return self.element("IFCDOOR", name, None, height, width, *extra)


def build_office() -> str:
    """IFC4, Revit-flavoured office: two storeys, 4 walls, 2 doors, slab, spaces."""
    b = Builder("IFC4", "office.ifc", "Toy Office")
    m = b.m
    site = b.spatial("IFCSITE", "Default Site", None, None, None, None, None)
    bldg = b.spatial("IFCBUILDING", "Office A", None, None, None)
    eg = b.spatial("IFCBUILDINGSTOREY", "EG", 0.0)
    og2 = b.spatial("IFCBUILDINGSTOREY", "OK OG2", 3.0)
    b.aggregate(b.project, [site])
    b.aggregate(site, [bldg])
    b.aggregate(bldg, [eg, og2])

    w1 = b.wall("W-1", 4.0, 0.2, 3.0)
    w2 = b.wall("W-2", 5.0, 0.25, 3.0)
    l_shape = b.polyline_profile([(0, 0), (3, 0), (3, 0.2), (0.2, 0.2), (0.2, 2), (0, 2)])
    w3 = b.element("IFCWALL", "W-3", b.shape([b.extrude(l_shape, 3.0)]), E("STANDARD"))
    w4 = b.wall("W-4", 6.0, 0.3, 2.8)
    b.pset([w1, w4], "Pset_WallCommon", {"IsExternal": True, "FireRating": "REI90"})
    b.pset([w2, w3], "Pset_WallCommon", {"IsExternal": False, "FireRating": "REI30"})

    dtype_pset = b.pset([], "Pset_DoorCommon", {"FireRating": "EI30", "IsExternal": False}, via_type=True)
    dtype = m.add("IFCDOORTYPE", m.guid(), None, "Single Flush 900", None, None, (dtype_pset,), None, None,
                  None, E("DOOR"), E("SINGLE_SWING_LEFT"), None, None)
    d1 = b.door("D-101", 2.1, 0.9)
    d2 = b.door("D-201", 2.1, 1.0)
    m.add("IFCRELDEFINESBYTYPE", m.guid(), None, None, None, (d1, d2), dtype)
    b.pset([d2], "Pset_DoorCommon", {"FireRating": "EI60"})
    b.pset([d1], "Dimensions", {"Width": 0.9, "Height": 2.1})
    b.pset([d2], "Dimensions", {"Width": 1.0, "Height": 2.1})

    slab_profile = b.polyline_profile([(0, 0), (10, 0), (10, 8), (0, 8)])
    slab = b.element("IFCSLAB", "Floor EG", b.shape([b.extrude(slab_profile, 0.3)]), E("FLOOR"))

    sp1 = b.spatial("IFCSPACE", "1.01", E("INTERNAL"), None, long_name="Office 1")
    sp2 = b.spatial("IFCSPACE", "1.02", E("INTERNAL"), None, long_name="Meeting")
    b.aggregate(eg, [sp1, sp2])
    b.qset([sp1], "Qto_SpaceBaseQuantities", {"NetFloorArea": ("AREA", 20.0)})
    b.qset([sp2], "Qto_SpaceBaseQuantities", {"NetFloorArea": ("AREA", 15.5)})

    # a faceted BRep proxy: volume is not computable from swept solids
    pts = [m.add("IFCCARTESIANPOINT", p) for p in [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0)]]
    loop = m.add("IFCPOLYLOOP", tuple(pts))
    face = m.add("IFCFACE", (m.add("IFCFACEOUTERBOUND", loop, True),))
    brep = m.add("IFCFACETEDBREP", m.add("IFCCLOSEDSHELL", (face,)))
    proxy = b.element("IFCBUILDINGELEMENTPROXY", "Reception Desk", b.shape([brep], "Brep"), E("NOTDEFINED"))

    b.contain(eg, [w4, d1, slab, proxy])
    b.contain(og2, [w1, w2, w3, d2])
    return m.text()


def build_house_de() -> str:
    """IFC2X3, ArchiCAD-flavoured German house: property names in German."""
    b = Builder("IFC2X3", "house_de.ifc", "Einfamilienhaus")
    m = b.m
    site = b.spatial("IFCSITE", "Grundstück", None, None, None, None, None)
    bldg = b.spatial("IFCBUILDING", "Haus", None, None, None)
    eg = b.spatial("IFCBUILDINGSTOREY", "Erdgeschoss", 0.0)
    dg = b.spatial("IFCBUILDINGSTOREY", "Dachgeschoss", 2.75)
    b.aggregate(b.project, [site])
    b.aggregate(site, [bldg])
    b.aggregate(bldg, [eg, dg])

    walls = [
        ("Wand-001", 10.0, 0.365, 2.5, "Aussenwand"),
        ("Wand-002", 8.0, 0.365, 2.5, "Aussenwand"),
        ("Wand-003", 10.0, 0.365, 2.5, "Aussenwand"),
        ("Wand-004", 8.0, 0.365, 2.5, "Aussenwand"),
        ("Wand-005", 4.0, 0.115, 2.5, "Innenwand"),
    ]
    ids = []
    for name, x, y, h, typ in walls:
        w = b.wall(name, x, y, h)
        b.pset([w], "ArchiCADProperties", {"Typ": typ, "Geschoss": "Erdgeschoss"})
        ids.append(w)
    d1 = b.door("Tür - 001", 2.01, None)
    d2 = b.door("Tür - 002", 2.01, None)
    b.pset([d1], "ArchiCADProperties", {"Breite (B)": T("IFCLENGTHMEASURE", 0.885), "Höhe (H)": 2.01})
    b.pset([d2], "ArchiCADProperties", {"Breite (B)": T("IFCLENGTHMEASURE", 1.01), "Höhe (H)": 2.01})
    b.contain(eg, ids + [d1, d2])
    return m.text()


def build_hetero(kind: str) -> str:
    """One door whose width lives under a tool-specific property name."""
    schema = {"revit": "IFC2X3", "clinic": "IFC2X3", "archicad": "IFC4"}[kind]
    b = Builder(schema, f"hetero_{kind}.ifc", f"Hetero {kind}")
    site = b.spatial("IFCSITE", "Site", None, None, None, None, None)
    bldg = b.spatial("IFCBUILDING", "Building", None, None, None)
    st = b.spatial("IFCBUILDINGSTOREY", {"revit": "Level 1", "clinic": "Level 1", "archicad": "u.etg"}[kind], 0.0)
    b.aggregate(b.project, [site])
    b.aggregate(site, [bldg])
    b.aggregate(bldg, [st])
    if kind == "revit":
        d = b.door("Door 1", None, None)
        b.pset([d], "Dimensions", {"Width": T("IFCLENGTHMEASURE", 0.91), "Rough Width": T("IFCLENGTHMEASURE", 0.97)})
        other = b.door("Door 2", None, None)
        b.pset([other], "Dimensions", {"Width": T("IFCLENGTHMEASURE", 0.81)})
    elif kind == "clinic":
        d = b.door("D1", None, None)
        b.pset([d], "Pset_DoorCommon", {"NominalWidth": T("IFCPOSITIVELENGTHMEASURE", 0.95)})
        other = b.door("D2", None, None)
        b.pset([other], "Pset_DoorCommon", {"NominalWidth": T("IFCPOSITIVELENGTHMEASURE", 1.1)})
    else:
        d = b.door("Tür - 001", None, None)
        b.pset([d], "ArchiCADProperties", {"Breite (B)": T("IFCLENGTHMEASURE", 0.885)})
        other = b.door("Tür - 002", None, None)
        b.pset([other], "ArchiCADProperties", {"Breite (B)": T("IFCLENGTHMEASURE", 1.01)})
    b.contain(st, [d, other])
    return b.m.text()


def build_two_walls() -> str:
    b = Builder("IFC4", "two_walls.ifc", "Two Walls")
    site = b.spatial("IFCSITE", "Site", None, None, None, None, None)
    st = b.spatial("IFCBUILDINGSTOREY", "Level 0", 0.0)
    b.aggregate(b.project, [site])
    b.aggregate(site, [st])
    w1 = b.wall("Wall A", 1.0, 1.0, 2.0)
    w2 = b.wall("Wall B", 1.0, 1.0, 2.0)
    b.contain(st, [w1, w2])
    return b.m.text()


def build_geometry() -> str:
    """Geometry cases: rectangle, polyline, mapped (translated), oblique, circle, BRep-only."""
    b = Builder("IFC4", "geometry.ifc", "Geometry")
    m = b.m
    st = b.spatial("IFCBUILDINGSTOREY", "Level 0", 0.0)
    b.aggregate(b.project, [st])
    prism = b.element("IFCBUILDINGELEMENTPROXY", "unit prism", b.shape([b.extrude(b.rect(1.0, 1.0), 2.0)]), None)
    poly = b.element("IFCBUILDINGELEMENTPROXY", "polyline",
                     b.shape([b.extrude(b.polyline_profile([(0, 0), (4, 0), (4, 3), (0, 3)]), 0.5)]), None)
    # mapped item, pure translation
    inner = m.add("IFCSHAPEREPRESENTATION", b.ctx, "Body", "SweptSolid", (b.extrude(b.rect(2.0, 3.0), 1.5),))
    rmap = m.add("IFCREPRESENTATIONMAP", b.axis, inner)
    shift = m.add("IFCCARTESIANPOINT", (5.0, 0.0, 0.0))
    op = m.add("IFCCARTESIANTRANSFORMATIONOPERATOR3D", None, None, shift, None, None)
    mapped = b.element("IFCBUILDINGELEMENTPROXY", "mapped", b.shape([m.add("IFCMAPPEDITEM", rmap, op)], "MappedRepresentation"), None)
    # mapped item, scaled: refused
    op2 = m.add("IFCCARTESIANTRANSFORMATIONOPERATOR3D", None, None, shift, 2.0, None)
    scaled = b.element("IFCBUILDINGELEMENTPROXY", "scaled", b.shape([m.add("IFCMAPPEDITEM", rmap, op2)], "MappedRepresentation"), None)
    oblique = b.element("IFCBUILDINGELEMENTPROXY", "oblique",
                        b.shape([b.extrude(b.rect(1.0, 1.0), 2.0, (0.0, 0.6, 0.8))]), None)
    circ_pos = m.add("IFCAXIS2PLACEMENT2D", m.add("IFCCARTESIANPOINT", (0.0, 0.0)), None)
    circle = b.element("IFCCOLUMN", "round column",
                       b.shape([b.extrude(m.add("IFCCIRCLEPROFILEDEF", E("AREA"), None, circ_pos, 0.5), 3.0)]), None)
    pts = [m.add("IFCCARTESIANPOINT", p) for p in [(0.0, 0.0, 0.0), (1.0, 0.0, 0.0), (0.0, 1.0, 0.0)]]
    face = m.add("IFCFACE", (m.add("IFCFACEOUTERBOUND", m.add("IFCPOLYLOOP", tuple(pts)), True),))
    brep = b.element("IFCBUILDINGELEMENTPROXY", "brep only",
                     b.shape([m.add("IFCFACETEDBREP", m.add("IFCCLOSEDSHELL", (face,)))], "Brep"), None)
    bare = b.element("IFCBUILDINGELEMENTPROXY", "no representation", None, None)
    b.contain(st, [prism, poly, mapped, scaled, oblique, circle, brep, bare])
    return m.text()


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    models = {
        "office.ifc": build_office(),
        "house_de.ifc": build_house_de(),
        "hetero_revit.ifc": build_hetero("revit"),
        "hetero_clinic.ifc": build_hetero("clinic"),
        "hetero_archicad.ifc": build_hetero("archicad"),
        "two_walls.ifc": build_two_walls(),
        "geometry.ifc": build_geometry(),
    }
    for name, text in models.items():
        (OUT / name).write_text(text, encoding="ascii")
        print(f"{name}: {text.count(chr(10))} lines")


if __name__ == "__main__":
    main()
