"""Minimal hand-written IFC schema knowledge.

Only what the navigation helpers and the action language need: a supertype
table for ``by_type(..., include_subtypes=True)`` and attribute names for the
entity types agents commonly inspect. Anything not listed is still parsed and
stored; its attributes are simply addressed by position.
"""
from __future__ import annotations

from functools import lru_cache

# child -> parent (canonical casing)
_SUPERTYPES: dict[str, str | None] = {
    "IfcRoot": None,
    "IfcObjectDefinition": "IfcRoot",
    "IfcObject": "IfcObjectDefinition",
    "IfcContext": "IfcObject",
    "IfcProject": "IfcContext",
    "IfcProduct": "IfcObject",
    "IfcSpatialElement": "IfcProduct",
    "IfcSpatialStructureElement": "IfcSpatialElement",
    "IfcSite": "IfcSpatialStructureElement",
    "IfcBuilding": "IfcSpatialStructureElement",
    "IfcBuildingStorey": "IfcSpatialStructureElement",
    "IfcSpace": "IfcSpatialStructureElement",
    "IfcZone": "IfcObject",
    "IfcElement": "IfcProduct",
    "IfcBuildingElement": "IfcElement",
    "IfcWall": "IfcBuildingElement",
    "IfcWallStandardCase": "IfcWall",
    "IfcCurtainWall": "IfcBuildingElement",
    "IfcDoor": "IfcBuildingElement",
    "IfcWindow": "IfcBuildingElement",
    "IfcSlab": "IfcBuildingElement",
    "IfcRoof": "IfcBuildingElement",
    "IfcBeam": "IfcBuildingElement",
    "IfcColumn": "IfcBuildingElement",
    "IfcMember": "IfcBuildingElement",
    "IfcPlate": "IfcBuildingElement",
    "IfcStair": "IfcBuildingElement",
    "IfcStairFlight": "IfcBuildingElement",
    "IfcRamp": "IfcBuildingElement",
    "IfcRailing": "IfcBuildingElement",
    "IfcCovering": "IfcBuildingElement",
    "IfcFooting": "IfcBuildingElement",
    "IfcPile": "IfcBuildingElement",
    "IfcBuildingElementProxy": "IfcBuildingElement",
    "IfcFurnishingElement": "IfcElement",
    "IfcDistributionElement": "IfcElement",
    "IfcFlowTerminal": "IfcDistributionElement",
    "IfcFeatureElement": "IfcElement",
    "IfcOpeningElement": "IfcFeatureElement",
    "IfcRelationship": "IfcRoot",
    "IfcRelDefines": "IfcRelationship",
    "IfcRelDefinesByProperties": "IfcRelDefines",
    "IfcRelDefinesByType": "IfcRelDefines",
    "IfcRelDecomposes": "IfcRelationship",
    "IfcRelAggregates": "IfcRelDecomposes",
    "IfcRelNests": "IfcRelDecomposes",
    "IfcRelConnects": "IfcRelationship",
    "IfcRelContainedInSpatialStructure": "IfcRelConnects",
    "IfcRelVoidsElement": "IfcRelConnects",
    "IfcRelFillsElement": "IfcRelConnects",
    "IfcRelSpaceBoundary": "IfcRelConnects",
    "IfcRelAssociates": "IfcRelationship",
    "IfcRelAssociatesMaterial": "IfcRelAssociates",
    "IfcPropertyDefinition": "IfcRoot",
    "IfcPropertySetDefinition": "IfcPropertyDefinition",
    "IfcPropertySet": "IfcPropertySetDefinition",
    "IfcElementQuantity": "IfcPropertySetDefinition",
    "IfcTypeObject": "IfcObjectDefinition",
    "IfcTypeProduct": "IfcTypeObject",
    "IfcElementType": "IfcTypeProduct",
    "IfcDoorStyle": "IfcTypeProduct",
    "IfcWindowStyle": "IfcTypeProduct",
    "IfcDoorType": "IfcElementType",
    "IfcWindowType": "IfcElementType",
    "IfcWallType": "IfcElementType",
    "IfcSlabType": "IfcElementType",
    "IfcProperty": None,
    "IfcSimpleProperty": "IfcProperty",
    "IfcPropertySingleValue": "IfcSimpleProperty",
    "IfcPropertyEnumeratedValue": "IfcSimpleProperty",
    "IfcPropertyListValue": "IfcSimpleProperty",
    "IfcComplexProperty": "IfcProperty",
    "IfcPhysicalQuantity": None,
    "IfcPhysicalSimpleQuantity": "IfcPhysicalQuantity",
    "IfcQuantityLength": "IfcPhysicalSimpleQuantity",
    "IfcQuantityArea": "IfcPhysicalSimpleQuantity",
    "IfcQuantityVolume": "IfcPhysicalSimpleQuantity",
    "IfcQuantityCount": "IfcPhysicalSimpleQuantity",
    "IfcQuantityWeight": "IfcPhysicalSimpleQuantity",
    "IfcQuantityTime": "IfcPhysicalSimpleQuantity",
}

# IFC4 renamed a few abstract supertypes; both spellings are accepted.
ALIASES = {
    "IFCBUILTELEMENT": "IFCBUILDINGELEMENT",
}

# Resource types without a modelled supertype, listed only for display casing.
_RESOURCE_NAMES = (
    "IfcOwnerHistory", "IfcPerson", "IfcOrganization", "IfcPersonAndOrganization", "IfcApplication",
    "IfcSIUnit", "IfcUnitAssignment", "IfcDimensionalExponents", "IfcConversionBasedUnit", "IfcMeasureWithUnit",
    "IfcCartesianPoint", "IfcDirection", "IfcAxis2Placement2D", "IfcAxis2Placement3D", "IfcLocalPlacement",
    "IfcGeometricRepresentationContext", "IfcGeometricRepresentationSubContext", "IfcProductDefinitionShape",
    "IfcShapeRepresentation", "IfcExtrudedAreaSolid", "IfcRectangleProfileDef", "IfcCircleProfileDef",
    "IfcArbitraryClosedProfileDef", "IfcArbitraryProfileDefWithVoids", "IfcPolyline", "IfcIndexedPolyCurve",
    "IfcCartesianPointList2D", "IfcMappedItem", "IfcRepresentationMap", "IfcCartesianTransformationOperator3D",
    "IfcFacetedBrep", "IfcClosedShell", "IfcFace", "IfcFaceOuterBound", "IfcPolyLoop", "IfcMaterial",
    "IfcMaterialLayer", "IfcMaterialLayerSet", "IfcMaterialLayerSetUsage", "IfcPostalAddress",
)
CANONICAL: dict[str, str] = {name.upper(): name for name in (*_SUPERTYPES, *_RESOURCE_NAMES)}

_ROOT = ("GlobalId", "OwnerHistory", "Name", "Description")
_OBJECT = _ROOT + ("ObjectType",)
_PRODUCT = _OBJECT + ("ObjectPlacement", "Representation")
_ELEMENT = _PRODUCT + ("Tag",)
_SPATIAL = _PRODUCT + ("LongName", "CompositionType")
_TYPE = _ROOT + ("ApplicableOccurrence", "HasPropertySets")
_ELEMENT_TYPE = _TYPE + ("RepresentationMaps", "Tag", "ElementType")
_REL = _ROOT

_ATTRS: dict[str, tuple[str, ...]] = {
    "IfcProject": _OBJECT + ("LongName", "Phase", "RepresentationContexts", "UnitsInContext"),
    "IfcSite": _SPATIAL + ("RefLatitude", "RefLongitude", "RefElevation", "LandTitleNumber", "SiteAddress"),
    "IfcBuilding": _SPATIAL + ("ElevationOfRefHeight", "ElevationOfTerrain", "BuildingAddress"),
    "IfcBuildingStorey": _SPATIAL + ("Elevation",),
    "IfcSpace": _SPATIAL + ("InteriorOrExteriorSpace", "ElevationWithFlooring"),
    "IfcDoor": _ELEMENT + ("OverallHeight", "OverallWidth"),
    "IfcWindow": _ELEMENT + ("OverallHeight", "OverallWidth"),
    "IfcRelDefinesByProperties": _REL + ("RelatedObjects", "RelatingPropertyDefinition"),
    "IfcRelDefinesByType": _REL + ("RelatedObjects", "RelatingType"),
    "IfcRelContainedInSpatialStructure": _REL + ("RelatedElements", "RelatingStructure"),
    "IfcRelAggregates": _REL + ("RelatingObject", "RelatedObjects"),
    "IfcRelNests": _REL + ("RelatingObject", "RelatedObjects"),
    "IfcRelVoidsElement": _REL + ("RelatingBuildingElement", "RelatedOpeningElement"),
    "IfcRelFillsElement": _REL + ("RelatingOpeningElement", "RelatedBuildingElement"),
    "IfcRelAssociatesMaterial": _REL + ("RelatedObjects", "RelatingMaterial"),
    "IfcPropertySet": _ROOT + ("HasProperties",),
    "IfcElementQuantity": _ROOT + ("MethodOfMeasurement", "Quantities"),
    "IfcPropertySingleValue": ("Name", "Description", "NominalValue", "Unit"),
    "IfcPropertyEnumeratedValue": ("Name", "Description", "EnumerationValues", "EnumerationReference"),
    "IfcPropertyListValue": ("Name", "Description", "ListValues", "Unit"),
    "IfcComplexProperty": ("Name", "Description", "UsageName", "HasProperties"),
    "IfcQuantityLength": ("Name", "Description", "Unit", "LengthValue", "Formula"),
    "IfcQuantityArea": ("Name", "Description", "Unit", "AreaValue", "Formula"),
    "IfcQuantityVolume": ("Name", "Description", "Unit", "VolumeValue", "Formula"),
    "IfcQuantityCount": ("Name", "Description", "Unit", "CountValue", "Formula"),
    "IfcQuantityWeight": ("Name", "Description", "Unit", "WeightValue", "Formula"),
    "IfcQuantityTime": ("Name", "Description", "Unit", "TimeValue", "Formula"),
    "IfcDoorStyle": _TYPE + ("RepresentationMaps", "Tag", "OperationType", "ConstructionType",
                             "ParameterTakesPrecedence", "Sizeable"),
    "IfcWindowStyle": _TYPE + ("RepresentationMaps", "Tag", "ConstructionType", "OperationType",
                               "ParameterTakesPrecedence", "Sizeable"),
    "IfcProductDefinitionShape": ("Name", "Description", "Representations"),
    "IfcShapeRepresentation": ("ContextOfItems", "RepresentationIdentifier", "RepresentationType", "Items"),
    "IfcExtrudedAreaSolid": ("SweptArea", "Position", "ExtrudedDirection", "Depth"),
    "IfcRectangleProfileDef": ("ProfileType", "ProfileName", "Position", "XDim", "YDim"),
    "IfcCircleProfileDef": ("ProfileType", "ProfileName", "Position", "Radius"),
    "IfcArbitraryClosedProfileDef": ("ProfileType", "ProfileName", "OuterCurve"),
    "IfcArbitraryProfileDefWithVoids": ("ProfileType", "ProfileName", "OuterCurve", "InnerCurves"),
    "IfcPolyline": ("Points",),
    "IfcCartesianPoint": ("Coordinates",),
    "IfcDirection": ("DirectionRatios",),
    "IfcMappedItem": ("MappingSource", "MappingTarget"),
    "IfcRepresentationMap": ("MappingOrigin", "MappedRepresentation"),
    "IfcMaterial": ("Name", "Description", "Category"),
}
for _name, _parent in _SUPERTYPES.items():
    if _name in _ATTRS:
        continue
    if _name.startswith("IfcRel"):
        continue
    # inherit the element layout for plain building elements and friends
    _p = _parent
    while _p is not None and _p not in ("IfcElement", "IfcElementType"):
        _p = _SUPERTYPES.get(_p)
    if _p == "IfcElement":
        _ATTRS[_name] = _ELEMENT
    elif _p == "IfcElementType":
        _ATTRS[_name] = _ELEMENT_TYPE

# IFC4 layouts that differ from IFC2X3
_ATTRS_IFC4: dict[str, tuple[str, ...]] = {
    "IfcDoor": _ELEMENT + ("OverallHeight", "OverallWidth", "PredefinedType", "OperationType",
                           "UserDefinedOperationType"),
    "IfcWindow": _ELEMENT + ("OverallHeight", "OverallWidth", "PredefinedType", "PartitioningType",
                             "UserDefinedPartitioningType"),
    "IfcSpace": _SPATIAL + ("PredefinedType", "ElevationWithFlooring"),
    "IfcWall": _ELEMENT + ("PredefinedType",),
    "IfcWallStandardCase": _ELEMENT + ("PredefinedType",),
    "IfcSlab": _ELEMENT + ("PredefinedType",),
    "IfcBuildingElementProxy": _ELEMENT + ("PredefinedType",),
    "IfcCovering": _ELEMENT + ("PredefinedType",),
    "IfcBeam": _ELEMENT + ("PredefinedType",),
    "IfcColumn": _ELEMENT + ("PredefinedType",),
}


def canonical_name(type_name: str) -> str:
    """``IFCWALL`` -> ``IfcWall`` where the type is known, else unchanged."""
    return CANONICAL.get(type_name.upper(), type_name.upper())


def normalize(type_name: str) -> str:
    up = type_name.upper()
    return ALIASES.get(up, up)


def attribute_names(type_name: str, schema_id: str = "") -> tuple[str, ...] | None:
    name = canonical_name(type_name)
    if schema_id.upper().startswith("IFC4") and name in _ATTRS_IFC4:
        return _ATTRS_IFC4[name]
    return _ATTRS.get(name)


def supertype(type_name: str) -> str | None:
    parent = _SUPERTYPES.get(canonical_name(type_name))
    return parent.upper() if parent else None


@lru_cache(maxsize=None)
def subtypes_of(type_name: str) -> frozenset[str]:
    """All known uppercase type names that are ``type_name`` or inherit from it."""
    target = normalize(type_name)
    out = set()
    for name in _SUPERTYPES:
        t = name.upper()
        while t is not None:
            if t == target:
                out.add(name.upper())
                break
            t = supertype(t)
    out.add(target)
    return frozenset(out)


def is_subtype(type_name: str, ancestor: str) -> bool:
    return normalize(type_name) in subtypes_of(ancestor)


def known_types() -> list[str]:
    return sorted(_SUPERTYPES)
