"""The builtin catalogue: the only capabilities a BQL program has.

No builtin touches files, the network, the environment or the clock.
"""
from __future__ import annotations

from typing import TYPE_CHECKING, Callable

from ..ifc import geometry, graph as g_ops, schema
from ..ifc.step import DERIVED, UNKNOWN, Binary, EnumValue, Ref, Typed
from .interp import BQLRuntimeError
from .values import Builtin, EntityRef, Function, type_name

if TYPE_CHECKING:
    from .interp import ExecEnvironment

CATALOGUE = (
    "types", "by_type", "attrs", "attr", "name_of", "guid", "typeof", "psets", "pset", "pset_value",
    "quantities", "quantity", "container", "contained", "parent", "children", "extruded_volume",
    "footprint_area", "polygon_area", "count", "sum", "min", "max", "unique", "filter", "map", "lower",
    "str_contains", "keys", "print", "source",
)


def make_builtins(env: "ExecEnvironment", docs: Callable[[str], str] | None = None) -> dict[str, Builtin]:
    graph = env.graph
    ctx = env.ctx

    def ent(v, fname: str) -> int:
        if not isinstance(v, EntityRef):
            raise BQLRuntimeError(f"type mismatch: {fname} expects an entity, got {type_name(v)}")
        return v.id

    def text(v, fname: str) -> str:
        if not isinstance(v, str):
            raise BQLRuntimeError(f"type mismatch: {fname} expects a str, got {type_name(v)}")
        return v

    def seq(v, fname: str) -> list:
        if not isinstance(v, list):
            raise BQLRuntimeError(f"type mismatch: {fname} expects a list, got {type_name(v)}")
        ctx.charge(len(v))
        return v

    def conv(v):
        """IFC attribute value -> BQL value."""
        if v is None or v is DERIVED or v is UNKNOWN:
            return None
        if isinstance(v, (bool, int, float, str)):
            return v
        if isinstance(v, Ref):
            return EntityRef(v.id) if v.id in graph.entities else None
        if isinstance(v, EnumValue):
            return v.token
        if isinstance(v, Typed):
            return conv(v.value)
        if isinstance(v, Binary):
            return v.hex
        if isinstance(v, tuple):
            ctx.charge(len(v))
            return [conv(x) for x in v]
        return None

    def refs(ids) -> list:
        ctx.charge(len(ids))
        return [EntityRef(i) for i in ids]

    def attr_names(eid: int) -> list[str]:
        e = graph.entities[eid]
        names = schema.attribute_names(e.ifc_type, graph.schema_id)
        n = len(e.attributes)
        if names is None:
            return [f"attr_{i}" for i in range(n)]
        return [names[i] if i < len(names) else f"attr_{i}" for i in range(n)]

    def is_rooted(eid: int) -> bool:
        a = graph.entities[eid].attributes
        return bool(a) and isinstance(a[0], str) and len(a[0]) == 22

    # -- model exploration -------------------------------------------------
    def b_types():
        out = {schema.canonical_name(t): len(ids) for t, ids in graph.type_index.items()}
        ctx.charge(len(out))
        return dict(sorted(out.items()))

    def b_by_type(name, subtypes=False):
        text(name, "by_type")
        if type(subtypes) is not bool:
            raise BQLRuntimeError("type mismatch: by_type subtypes flag must be bool")
        if not name:
            return []
        return refs(g_ops.by_type(graph, name, subtypes))

    def b_attrs(e):
        eid = ent(e, "attrs")
        values = graph.entities[eid].attributes
        return {k: conv(v) for k, v in zip(attr_names(eid), values)}

    def b_attr(e, name):
        eid = ent(e, "attr")
        values = graph.entities[eid].attributes
        if type(name) is int:
            if not 0 <= name < len(values):
                raise BQLRuntimeError(f"attribute index {name} out of range for {env.type_of(eid)}")
            return conv(values[name])
        text(name, "attr")
        names = attr_names(eid)
        if name not in names:
            raise BQLRuntimeError(f"{env.type_of(eid)} has no attribute {name!r}; available: {', '.join(names)}")
        return conv(values[names.index(name)])

    def b_name_of(e):
        eid = ent(e, "name_of")
        names = attr_names(eid)
        values = graph.entities[eid].attributes
        if "Name" in names:
            return conv(values[names.index("Name")])
        if is_rooted(eid) and len(values) > 2:
            return conv(values[2])
        return None

    def b_guid(e):
        eid = ent(e, "guid")
        return graph.entities[eid].attributes[0] if is_rooted(eid) else None

    def b_typeof(e):
        return env.type_of(ent(e, "typeof"))

    def pset_map(views):
        ctx.charge(sum(len(v.props) for v in views))
        return {v.pset_name: {k: conv(x) for k, x in v.props.items()} for v in views}

    def b_psets(e):
        return pset_map(g_ops.psets_of(graph, ent(e, "psets")))

    def b_pset(e, name):
        text(name, "pset")
        return b_psets(e).get(name)

    def b_pset_value(e, pset, prop):
        text(prop, "pset_value")
        p = b_pset(e, pset)
        return None if p is None else p.get(prop)

    def b_quantities(e):
        return pset_map(g_ops.quantities_of(graph, ent(e, "quantities")))

    def b_quantity(e, qset, q):
        text(qset, "quantity")
        text(q, "quantity")
        s = b_quantities(e).get(qset)
        return None if s is None else s.get(q)

    def one(eid):
        return None if eid is None else EntityRef(eid)

    def b_container(e):
        return one(g_ops.spatial_container(graph, ent(e, "container")))

    def b_contained(e):
        return refs(g_ops.contained_elements(graph, ent(e, "contained")))

    def b_parent(e):
        return one(g_ops.parent_of(graph, ent(e, "parent")))

    def b_children(e):
        return refs(g_ops.children_of(graph, ent(e, "children")))

    def b_extruded_volume(e):
        try:
            return geometry.extruded_volume(graph, ent(e, "extruded_volume"))
        except (geometry.NotComputable, IndexError, TypeError):
            return None

    def b_footprint_area(e):
        try:
            return geometry.footprint_area(graph, ent(e, "footprint_area"))
        except (geometry.NotComputable, IndexError, TypeError):
            return None

    def b_polygon_area(pts):
        seq(pts, "polygon_area")
        clean = []
        for p in pts:
            if not (isinstance(p, list) and len(p) >= 2 and all(_num(x) for x in p[:2])):
                raise BQLRuntimeError("type mismatch: polygon_area expects a list of [x, y] pairs")
            clean.append((p[0], p[1]))
        return geometry.polygon_area(clean)

    # -- collections -------------------------------------------------------
    def b_count(v):
        if isinstance(v, (list, dict, str)):
            return len(v)
        raise BQLRuntimeError(f"type mismatch: count expects a list, map or str, got {type_name(v)}")

    def numbers(v, fname):
        out = []
        for x in seq(v, fname):
            if x is None:
                continue
            if not _num(x):
                raise BQLRuntimeError(f"type mismatch: {fname} expects numbers, found {type_name(x)}")
            out.append(x)
        return out

    def b_sum(v):
        return sum(numbers(v, "sum"))

    def extreme(v, fname, pick):
        items = [x for x in seq(v, fname) if x is not None]
        if not items:
            return None
        if all(_num(x) for x in items) or all(isinstance(x, str) for x in items):
            return pick(items)
        raise BQLRuntimeError(f"type mismatch: {fname} expects all numbers or all strings")

    def b_unique(v):
        out, seen = [], set()
        for x in seq(v, "unique"):
            key = (type_name(x), repr(x))
            if key not in seen:
                seen.add(key)
                out.append(x)
        return out

    def callable_(f, fname):
        if not isinstance(f, (Function, Builtin)):
            raise BQLRuntimeError(f"type mismatch: {fname} expects a function, got {type_name(f)}")
        return f

    def b_filter(v, f):
        callable_(f, "filter")
        out = []
        for x in seq(v, "filter"):
            keep = env.call(f, [x])
            if type(keep) is not bool:
                raise BQLRuntimeError(f"type mismatch: filter predicate returned {type_name(keep)}, expected bool")
            if keep:
                out.append(x)
        return out

    def b_map(v, f):
        callable_(f, "map")
        return [env.call(f, [x]) for x in seq(v, "map")]

    def b_lower(s):
        return text(s, "lower").lower()

    def b_str_contains(s, sub):
        return text(sub, "str_contains") in text(s, "str_contains")

    def b_keys(m):
        if not isinstance(m, dict):
            raise BQLRuntimeError(f"type mismatch: keys expects a map, got {type_name(m)}")
        ctx.charge(len(m))
        return list(m.keys())

    def b_print(*values):
        line = " ".join(env.format(v) for v in values)
        ctx.charge(len(line) // 64)
        ctx.write(line + "\n")
        return None

    def b_source(name):
        if isinstance(name, Function) and name.is_tool:
            name = name.name
        text(name, "source")
        if name not in env.tool_sources:
            raise BQLRuntimeError(f"no tool named {name!r}")
        return env.tool_sources[name]

    table = {
        "types": (b_types, 0, 0),
        "by_type": (b_by_type, 1, 2),
        "attrs": (b_attrs, 1, 1),
        "attr": (b_attr, 2, 2),
        "name_of": (b_name_of, 1, 1),
        "guid": (b_guid, 1, 1),
        "typeof": (b_typeof, 1, 1),
        "psets": (b_psets, 1, 1),
        "pset": (b_pset, 2, 2),
        "pset_value": (b_pset_value, 3, 3),
        "quantities": (b_quantities, 1, 1),
        "quantity": (b_quantity, 3, 3),
        "container": (b_container, 1, 1),
        "contained": (b_contained, 1, 1),
        "parent": (b_parent, 1, 1),
        "children": (b_children, 1, 1),
        "extruded_volume": (b_extruded_volume, 1, 1),
        "footprint_area": (b_footprint_area, 1, 1),
        "polygon_area": (b_polygon_area, 1, 1),
        "count": (b_count, 1, 1),
        "sum": (b_sum, 1, 1),
        "min": (lambda v: extreme(v, "min", min), 1, 1),
        "max": (lambda v: extreme(v, "max", max), 1, 1),
        "unique": (b_unique, 1, 1),
        "filter": (b_filter, 2, 2),
        "map": (b_map, 2, 2),
        "lower": (b_lower, 1, 1),
        "str_contains": (b_str_contains, 2, 2),
        "keys": (b_keys, 1, 1),
        "print": (b_print, 1, 16),
        "source": (b_source, 1, 1),
    }
    if docs is not None:
        table["docs"] = (lambda q: docs(text(q, "docs")), 1, 1)
    return {name: Builtin(name, fn, lo, hi) for name, (fn, lo, hi) in table.items()}


def _num(x) -> bool:
    return type(x) is int or type(x) is float
