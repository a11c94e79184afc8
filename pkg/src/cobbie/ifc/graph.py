"""In-memory entity graph built from a parsed STEP file."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterator, Mapping

from . import schema
from .step import Ref, StepFile, Typed, parse_bytes, parse_text


class UnknownEntity(KeyError):
    pass


@dataclass(frozen=True)
class EntityInstance:
    id: int
    ifc_type: str
    attributes: tuple


@dataclass(frozen=True)
class PsetView:
    owner: int
    pset_name: str
    props: Mapping[str, object]
    source: int = 0  # id of the IfcPropertySet / IfcElementQuantity


@dataclass
class EntityGraph:
    schema_id: str
    entities: Mapping[int, EntityInstance]
    type_index: Mapping[str, tuple[int, ...]]
    inverse_index: Mapping[int, tuple[tuple[int, int], ...]]
    diagnostics: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entities)

    def __contains__(self, eid: int) -> bool:
        return eid in self.entities

    def __getitem__(self, eid: int) -> EntityInstance:
        try:
            return self.entities[eid]
        except KeyError:
            raise UnknownEntity(eid) from None

    def get(self, eid: int) -> EntityInstance | None:
        return self.entities.get(eid)

    def deref(self, value):
        """Follow a :class:`Ref` to its instance; other values pass through."""
        if isinstance(value, Ref):
            return self.entities.get(value.id)
        return value

    def attr(self, eid: int, name: str):
        ent = self[eid]
        names = schema.attribute_names(ent.ifc_type, self.schema_id)
        if names is None or name not in names:
            raise KeyError(name)
        i = names.index(name)
        return ent.attributes[i] if i < len(ent.attributes) else None

    def attr_at(self, eid: int, index: int):
        attrs = self[eid].attributes
        return attrs[index] if 0 <= index < len(attrs) else None


def _iter_refs(value, path: int) -> Iterator[tuple[int, int]]:
    if isinstance(value, Ref):
        yield value.id, path
    elif isinstance(value, tuple):
        for v in value:
            yield from _iter_refs(v, path)
    elif isinstance(value, Typed):
        yield from _iter_refs(value.value, path)


def forward_refs(ent: EntityInstance) -> Iterator[tuple[int, int]]:
    """(target id, attribute index) for every reference an entity holds."""
    for i, value in enumerate(ent.attributes):
        yield from _iter_refs(value, i)


def build_graph(sf: StepFile) -> EntityGraph:
    entities: dict[int, EntityInstance] = {}
    types: dict[str, list[int]] = {}
    for raw in sf.entities:
        entities[raw.id] = EntityInstance(raw.id, raw.type, raw.attributes)
        types.setdefault(raw.type, []).append(raw.id)

    diagnostics = [f"duplicate instance #{d} ignored" for d in sf.duplicates]
    inverse: dict[int, list[tuple[int, int]]] = {}
    for eid in sorted(entities):
        for target, role in forward_refs(entities[eid]):
            if target not in entities:
                diagnostics.append(f"#{eid} attribute {role}: dangling reference #{target}")
                continue
            inverse.setdefault(target, []).append((eid, role))

    return EntityGraph(
        schema_id=sf.schema_id,
        entities=MappingProxyType(entities),
        type_index=MappingProxyType({t: tuple(sorted(ids)) for t, ids in types.items()}),
        inverse_index=MappingProxyType({k: tuple(v) for k, v in inverse.items()}),
        diagnostics=diagnostics,
    )


def parse_step(data: bytes | str) -> EntityGraph:
    """Parse STEP bytes (or text) into an :class:`EntityGraph`.

    Raises :class:`cobbie.ifc.step.ParseError` on malformed input.
    """
    if isinstance(data, str):
        return build_graph(parse_text(data))
    return build_graph(parse_bytes(data))


def load_model(path: str | Path) -> EntityGraph:
    return parse_step(Path(path).read_bytes())


# -- queries ----------------------------------------------------------------

def by_type(g: EntityGraph, type_name: str, include_subtypes: bool = False) -> list[int]:
    if not type_name:
        raise ValueError("type_name must be non-empty")
    if include_subtypes:
        names = schema.subtypes_of(type_name)
    else:
        names = {type_name.upper(), schema.normalize(type_name)}
    out: list[int] = []
    for n in names:
        out.extend(g.type_index.get(n, ()))
    return sorted(set(out))


def _require(g: EntityGraph, eid: int) -> EntityInstance:
    return g[eid]


def _referrers(g: EntityGraph, eid: int, rel_type: str, role: int) -> list[EntityInstance]:
    out = []
    for rid, r in g.inverse_index.get(eid, ()):
        if r != role:
            continue
        rel = g.entities[rid]
        if rel.ifc_type == rel_type:
            out.append(rel)
    return out


def _ref_id(value) -> int | None:
    return value.id if isinstance(value, Ref) else None


def _ref_ids(value) -> list[int]:
    if isinstance(value, tuple):
        return [v.id for v in value if isinstance(v, Ref)]
    rid = _ref_id(value)
    return [rid] if rid is not None else []


def _scalar(value):
    """Unwrap typed measures so property values compare as plain numbers/text."""
    if isinstance(value, Typed):
        return _scalar(value.value)
    return value


def _collect_props(g: EntityGraph, prop_ids, prefix: str, out: dict) -> None:
    for pid in prop_ids:
        prop = g.get(pid)
        if prop is None:
            continue
        a = prop.attributes
        name = a[0] if a and isinstance(a[0], str) else f"#{pid}"
        key = f"{prefix}{name}"
        if prop.ifc_type == "IFCPROPERTYSINGLEVALUE":
            out[key] = _scalar(a[2]) if len(a) > 2 else None
        elif prop.ifc_type == "IFCPROPERTYENUMERATEDVALUE":
            vals = a[2] if len(a) > 2 and isinstance(a[2], tuple) else ()
            if len(vals) == 1:
                out[key] = _scalar(vals[0])
        elif prop.ifc_type == "IFCCOMPLEXPROPERTY":
            if len(a) > 3:
                _collect_props(g, _ref_ids(a[3]), key + ".", out)


def _quantity_props(g: EntityGraph, qty_ids) -> dict:
    out = {}
    for qid in qty_ids:
        q = g.get(qid)
        if q is None or not q.ifc_type.startswith("IFCQUANTITY"):
            continue
        a = q.attributes
        if a and isinstance(a[0], str) and len(a) > 3:
            out[a[0]] = _scalar(a[3])
    return out


def _definitions(g: EntityGraph, eid: int) -> list[int]:
    """Property-definition ids attached to ``eid``: type-level first, then instance-level."""
    type_level: list[int] = []
    for rel in _referrers(g, eid, "IFCRELDEFINESBYTYPE", 4):
        tid = _ref_id(rel.attributes[5]) if len(rel.attributes) > 5 else None
        if tid is None or tid not in g.entities:
            continue
        t = g.entities[tid]
        if len(t.attributes) > 5:
            type_level.extend(_ref_ids(t.attributes[5]))
    inst_level: list[int] = []
    for rel in _referrers(g, eid, "IFCRELDEFINESBYPROPERTIES", 4):
        if len(rel.attributes) > 5:
            inst_level.extend(_ref_ids(rel.attributes[5]))
    # IFC4 allows a type object to own psets directly through HasPropertySets
    own = g[eid]
    if own.ifc_type.endswith(("TYPE", "STYLE")) and len(own.attributes) > 5:
        type_level.extend(_ref_ids(own.attributes[5]))
    return type_level + inst_level


def _views(g: EntityGraph, eid: int, set_type: str) -> list[PsetView]:
    _require(g, eid)
    merged: dict[str, dict] = {}
    sources: dict[str, int] = {}
    for did in _definitions(g, eid):
        d = g.get(did)
        if d is None or d.ifc_type != set_type:
            continue
        name = d.attributes[2] if len(d.attributes) > 2 and isinstance(d.attributes[2], str) else f"#{did}"
        if set_type == "IFCPROPERTYSET":
            props: dict = {}
            if len(d.attributes) > 4:
                _collect_props(g, _ref_ids(d.attributes[4]), "", props)
        else:
            props = _quantity_props(g, _ref_ids(d.attributes[5]) if len(d.attributes) > 5 else [])
        # later (instance-level) definitions override type-level values
        merged.setdefault(name, {}).update(props)
        sources[name] = did
    return [PsetView(eid, n, MappingProxyType(p), sources[n]) for n, p in merged.items()]


def psets_of(g: EntityGraph, eid: int) -> list[PsetView]:
    return _views(g, eid, "IFCPROPERTYSET")


def quantities_of(g: EntityGraph, eid: int) -> list[PsetView]:
    return _views(g, eid, "IFCELEMENTQUANTITY")


def spatial_container(g: EntityGraph, eid: int) -> int | None:
    _require(g, eid)
    for rel in _referrers(g, eid, "IFCRELCONTAINEDINSPATIALSTRUCTURE", 4):
        if len(rel.attributes) > 5:
            sid = _ref_id(rel.attributes[5])
            if sid in g.entities:
                return sid
    return None


def contained_elements(g: EntityGraph, eid: int) -> list[int]:
    _require(g, eid)
    out: set[int] = set()
    for rel in _referrers(g, eid, "IFCRELCONTAINEDINSPATIALSTRUCTURE", 5):
        out.update(i for i in _ref_ids(rel.attributes[4]) if i in g.entities)
    return sorted(out)


def parent_of(g: EntityGraph, eid: int) -> int | None:
    _require(g, eid)
    for rel in _referrers(g, eid, "IFCRELAGGREGATES", 5):
        pid = _ref_id(rel.attributes[4])
        if pid in g.entities:
            return pid
    return None


def children_of(g: EntityGraph, eid: int) -> list[int]:
    _require(g, eid)
    out: set[int] = set()
    for rel in _referrers(g, eid, "IFCRELAGGREGATES", 4):
        if len(rel.attributes) > 5:
            out.update(i for i in _ref_ids(rel.attributes[5]) if i in g.entities)
    return sorted(out)


def dump(g: EntityGraph) -> str:
    """Line-oriented ``id<TAB>type<TAB>attr-count`` listing."""
    lines = [f"{eid}\t{g.entities[eid].ifc_type}\t{len(g.entities[eid].attributes)}" for eid in sorted(g.entities)]
    return "\n".join(lines) + ("\n" if lines else "")
