from collections import Counter

import pytest

from cobbie.ifc import (
    UnknownEntity,
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
from oracles import brute_force_model
from conftest import MODELS, golden
from test_step import wrap

FIXTURES = ["office", "house_de", "hetero_revit", "hetero_clinic", "hetero_archicad", "two_walls", "geometry"]


def named(g, type_name, name):
    return next(e for e in by_type(g, type_name, True) if g[e].attributes[2] == name)


@pytest.mark.parametrize("name", FIXTURES)
def test_graph_matches_brute_force(name):
    path = MODELS / f"{name}.ifc"
    g = load_model(path)
    ref = brute_force_model(path)
    assert {i: e.ifc_type for i, e in g.entities.items()} == ref["entities"]
    assert {t: len(ids) for t, ids in g.type_index.items()} == ref["types"]
    inv = Counter((t, src, i) for t, pairs in g.inverse_index.items() for src, i in pairs)
    assert inv == ref["inverse"]
    assert g.diagnostics == []


def test_unknown_entity(office):
    with pytest.raises(UnknownEntity):
        office[999999]
    assert office.get(999999) is None


def test_dangling_reference_diagnostic():
    g = parse_step(wrap("#1=IFCA(#2,(#1,#7));"))
    assert g.diagnostics == ["#1 attribute 0: dangling reference #2", "#1 attribute 1: dangling reference #7"]
    assert g.inverse_index[1] == ((1, 1),)


def test_by_type_subtypes(house):
    assert by_type(house, "IfcWall") == []
    walls = by_type(house, "IfcWall", include_subtypes=True)
    assert len(walls) == 5
    assert walls == by_type(house, "IFCWALLSTANDARDCASE")
    with pytest.raises(ValueError):
        by_type(house, "")


def test_ifc4_builtelement_alias(office):
    assert by_type(office, "IfcBuiltElement", True) == by_type(office, "IfcBuildingElement", True)


def test_psets_instance_overrides_type(office):
    d201 = named(office, "IfcDoor", "D-201")
    d101 = named(office, "IfcDoor", "D-101")
    p201 = {v.pset_name: dict(v.props) for v in psets_of(office, d201)}
    p101 = {v.pset_name: dict(v.props) for v in psets_of(office, d101)}
    assert p201["Pset_DoorCommon"]["FireRating"] == "EI60"
    assert p101["Pset_DoorCommon"]["FireRating"] == "EI30"
    assert p201["Dimensions"]["Width"] == 1.0


def test_umlaut_property_names(house):
    d = named(house, "IfcDoor", "Tür - 001")
    props = {v.pset_name: dict(v.props) for v in psets_of(house, d)}
    assert props["ArchiCADProperties"]["Breite (B)"] == 0.885


def test_quantities(office):
    meeting = named(office, "IfcSpace", "1.02")
    q = {v.pset_name: dict(v.props) for v in quantities_of(office, meeting)}
    assert q == {"Qto_SpaceBaseQuantities": {"NetFloorArea": 15.5}}


def test_spatial_structure(office):
    og2 = named(office, "IfcBuildingStorey", "OK OG2")
    eg = named(office, "IfcBuildingStorey", "EG")
    walls = {office[e].attributes[2] for e in contained_elements(office, og2) if office[e].ifc_type == "IFCWALL"}
    assert walls == {"W-1", "W-2", "W-3"}
    assert spatial_container(office, named(office, "IfcWall", "W-4")) == eg
    building = parent_of(office, eg)
    assert office[building].ifc_type == "IFCBUILDING"
    assert og2 in children_of(office, building)
    spaces = {office[s].attributes[2] for s in children_of(office, eg)}
    assert spaces == {"1.01", "1.02"}


def test_dump_golden():
    text = dump(load_model(MODELS / "two_walls.ifc"))
    assert text == golden("two_walls.dump", text)
