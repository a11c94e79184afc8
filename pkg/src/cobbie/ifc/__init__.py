from .geometry import NotComputable, extruded_volume, footprint_area, polygon_area, profile_area
from .graph import (
    EntityGraph,
    EntityInstance,
    PsetView,
    UnknownEntity,
    build_graph,
    by_type,
    children_of,
    contained_elements,
    dump,
    load_model,
    parent_of,
    parse_step,
    psets_of,
    quantities_of,
    spatial_container,
)
from .step import DERIVED, UNKNOWN, Binary, EnumValue, ParseError, Ref, Typed, decode_string, encode_string

__all__ = [
    "DERIVED", "UNKNOWN", "Binary", "EntityGraph", "EntityInstance", "EnumValue", "NotComputable",
    "ParseError", "PsetView", "Ref", "Typed", "UnknownEntity", "build_graph", "by_type", "children_of",
    "contained_elements", "decode_string", "dump", "encode_string", "extruded_volume", "footprint_area",
    "load_model", "parent_of", "parse_step", "polygon_area", "profile_area", "psets_of", "quantities_of",
    "spatial_container",
]
