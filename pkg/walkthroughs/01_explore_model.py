"""Open a building model and look around: storeys, walls, property sets, geometry."""
from _paths import MODELS

from cobbie.ifc import NotComputable, by_type, contained_elements, extruded_volume, load_model, psets_of

g = load_model(MODELS / "office.ifc")

print("Storeys and what they contain:")
for s in by_type(g, "IfcBuildingStorey"):
    ent = g.entities[s]
    print(f"  #{s} {ent.attributes[2]!r}: {len(contained_elements(g, s))} elements")

door = by_type(g, "IfcDoor")[0]
print(f"\nProperty sets on door #{door}:")
for view in psets_of(g, door):
    print(f"  {view.pset_name}: {dict(view.props)}")

geo = load_model(MODELS / "geometry.ifc")
print("\nExtruded volumes in geometry.ifc:")
for e in by_type(geo, "IfcBuildingElementProxy") + by_type(geo, "IfcColumn"):
    try:
        print(f"  #{e} {geo.entities[e].ifc_type}: {extruded_volume(geo, e):.4f}")
    except NotComputable as exc:
        print(f"  #{e} {geo.entities[e].ifc_type}: not computable ({exc})")
