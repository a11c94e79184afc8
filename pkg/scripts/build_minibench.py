"""Dev-only generator for the bundled mini-benchmark and its replay scripts.

Every scripted program is executed against the fixture models and the run
aborts if an output does not contain what the scripted answer relies on.
Re-run after changing fixtures: python3 scripts/build_minibench.py
"""
from __future__ import annotations

import json
from pathlib import Path

from cobbie.agent import format_action, format_final
from cobbie.bql import ExecEnvironment
from cobbie.ifc import load_model

DATA = Path(__file__).resolve().parents[1] / "src" / "cobbie" / "data"
MODELS = DATA / "models"
OUT = DATA / "minibench"
NOT_FOUND = "Information not found in BIM model"


def code(reasoning, src, expect=None):
    return ("code", reasoning, src, expect)


def final(answer):
    return ("final", answer)


STOREY = 'let s = filter(by_type("IfcBuildingStorey"), fn(x) { return name_of(x) == "OK OG2" })[0]'

TASKS = [
    dict(
        id="T01", cat=1, model="office", project="office",
        q="What is the fire rating of door D-201?", gt="EI60",
        adaptive=[
            code("Find the door by name and list its property sets.",
                 'let d = filter(by_type("IfcDoor"), fn(x) { return name_of(x) == "D-201" })[0]\nprint(psets(d))',
                 '"FireRating": "EI60"'),
            final("Door D-201 has fire rating EI60 (Pset_DoorCommon.FireRating, instance value overriding the "
                  "type value EI30)."),
        ],
        static=('let d = filter(by_type("IfcDoor"), fn(x) { return name_of(x) == "D-201" })[0]\n'
                'print(pset_value(d, "Pset_DoorCommon", "FireRating"))', "EI60"),
        static_final="The fire rating of door D-201 is EI60, read from Pset_DoorCommon.FireRating.",
    ),
    dict(
        id="T02", cat=1, model="office", project="office",
        q="What is the elevation of level OK OG2?", gt="3.0",
        adaptive=[
            code("List storeys with their elevations.",
                 'for s in by_type("IfcBuildingStorey") { print(name_of(s), attr(s, "Elevation")) }', "OK OG2 3"),
            final("Level OK OG2 is at elevation 3.0 (IfcBuildingStorey.Elevation)."),
        ],
        static=('for s in by_type("IfcBuildingStorey") { print(name_of(s), attr(s, "Elevation")) }', "OK OG2 3"),
        static_final="Level OK OG2 has elevation 3.0 according to its Elevation attribute.",
    ),
    dict(
        id="T03", cat=1, model="house_de", project="house",
        q="What is the width of door Tür - 001?", gt="0.885",
        adaptive=[
            code("Check the standard door property first.",
                 'let d = filter(by_type("IfcDoor"), fn(x) { return name_of(x) == "Tür - 001" })[0]\n'
                 'print(pset_value(d, "Pset_DoorCommon", "NominalWidth"))', "null"),
            code("Not in Pset_DoorCommon; inspect all property sets of the door.", "print(psets(d))",
                 '"Breite (B)": 0.885'),
            final("Door Tür - 001 is 0.885 wide, from ArchiCADProperties.\"Breite (B)\" (German for width)."),
        ],
        static=('let d = filter(by_type("IfcDoor"), fn(x) { return name_of(x) == "Tür - 001" })[0]\n'
                'print(pset_value(d, "Pset_DoorCommon", "NominalWidth"))', "null"),
        static_final=NOT_FOUND,
    ),
    dict(
        id="T04", cat=2, model="office", project="office",
        q="How many walls are on level 2?", gt="3",
        adaptive=[
            code("Look for a storey called Level 2.",
                 'print(filter(by_type("IfcBuildingStorey"), fn(x) { return name_of(x) == "Level 2" }))', "[]"),
            code("No such name; list storey names and elevations.",
                 'for s in by_type("IfcBuildingStorey") { print(name_of(s), attr(s, "Elevation")) }', "OK OG2"),
            code("OK OG2 (Obergeschoss 2) is level 2. Count its walls.",
                 STOREY + '\nlet ws = filter(contained(s), fn(e) { return str_contains(typeof(e), "Wall") })\n'
                 'print(count(ws), map(ws, fn(w) { return name_of(w) }))', '3 ["W-1", "W-2", "W-3"]'),
            final("Level 2 is named \"OK OG2\" in this model; it contains 3 walls: W-1, W-2 and W-3."),
        ],
        static=('let s = filter(by_type("IfcBuildingStorey"), fn(x) { return str_contains(lower(name_of(x)), "2") })\n'
                'let ws = filter(contained(s[0]), fn(e) { return typeof(e) == "IfcWall" })\nprint(count(ws))', "3"),
        static_final="There are 3 walls on level 2 (storey OK OG2).",
    ),
    dict(
        id="T05", cat=2, model="office", project="office",
        q="How many doors are in the model?", gt="2",
        adaptive=[
            code("Count doors.", 'print(count(by_type("IfcDoor", true)))', "2"),
            final("The model contains 2 doors (IfcDoor)."),
        ],
        static=('print(count(by_type("IfcDoor", true)))', "2"),
        static_final="The model contains 2 doors.",
    ),
    dict(
        id="T06", cat=2, model="house_de", project="house",
        q="How many external walls does the house have?", gt="4",
        adaptive=[
            code("Check Pset_WallCommon.IsExternal on all walls.",
                 'let ws = by_type("IfcWall", true)\n'
                 'print(count(ws), map(ws, fn(w) { return pset_value(w, "Pset_WallCommon", "IsExternal") }))',
                 "[null, null, null, null, null]"),
            code("No IsExternal flags; inspect the property sets that exist.", "print(psets(ws[0]))",
                 '"Typ": "Aussenwand"'),
            code("Walls are typed Aussenwand (external) or Innenwand (internal). Count Aussenwand.",
                 'print(count(filter(ws, fn(w) { return pset_value(w, "ArchiCADProperties", "Typ") == "Aussenwand" })))',
                 "4"),
            final("The house has 4 external walls: walls typed \"Aussenwand\" in ArchiCADProperties.Typ; the fifth "
                  "wall is an Innenwand."),
        ],
        static=('print(count(by_type("IfcWall", true)))', "5"),
        static_final="The house has 5 external walls.",
    ),
    dict(
        id="T07", cat=3, model="office", project="office",
        q="What is the total wall volume on level OK OG2?", gt="9.03",
        adaptive=[
            code("Check stored wall quantities.",
                 STOREY + '\nlet ws = filter(contained(s), fn(e) { return str_contains(typeof(e), "Wall") })\n'
                 'print(map(ws, fn(w) { return quantities(w) }))', "[{}, {}, {}]"),
            code("No quantities stored; compute volumes from the extruded geometry.",
                 'let vs = map(ws, fn(w) { return extruded_volume(w) })\nprint(vs, sum(vs))', "[2.4, 3.75, 2.88] 9.03"),
            final("The walls on OK OG2 total 9.03 m³ (W-1 2.4, W-2 3.75, W-3 2.88), computed from their extruded "
                  "body geometry because no volume quantities are stored."),
        ],
        static=(STOREY + '\nlet ws = filter(contained(s), fn(e) { return typeof(e) == "IfcWall" })\n'
                'print(sum(map(ws, fn(w) { return quantity(w, "Qto_WallBaseQuantities", "NetVolume") })))', "0"),
        static_final=NOT_FOUND,
    ),
    dict(
        id="T08", cat=3, model="office", project="office",
        q="What is the floor area of the ground floor slab?", gt="80",
        adaptive=[
            code("Find slabs and their quantities.",
                 'for s in by_type("IfcSlab") { print(name_of(s), quantities(s)) }', "Floor EG {}"),
            code("No stored area; compute the footprint of the slab profile.",
                 'print(footprint_area(by_type("IfcSlab")[0]))', "80"),
            final("The ground floor slab \"Floor EG\" has a floor area of 80 m², computed as the area of its "
                  "extruded profile (10 m by 8 m)."),
        ],
        static=('let s = by_type("IfcSlab")[0]\nprint(quantity(s, "Qto_SlabBaseQuantities", "GrossArea"))', "null"),
        static_final=NOT_FOUND,
    ),
    dict(
        id="T09", cat=3, model="house_de", project="house",
        q="What is the total volume of the external walls?", gt="32.85",
        adaptive=[
            code("Find external walls via the standard property.",
                 'let ws = by_type("IfcWall", true)\n'
                 'print(filter(ws, fn(w) { return pset_value(w, "Pset_WallCommon", "IsExternal") == true }))', "[]"),
            code("Not set; list property sets.", "print(psets(ws[0]))", '"Typ": "Aussenwand"'),
            code("Use Typ == Aussenwand and compute extruded volumes.",
                 'let ext = filter(ws, fn(w) { return pset_value(w, "ArchiCADProperties", "Typ") == "Aussenwand" })\n'
                 'let vs = map(ext, fn(w) { return extruded_volume(w) })\nprint(count(ext), vs, sum(vs))',
                 "4 [9.125, 7.3, 9.125, 7.3] 32.85"),
            final("The 4 external walls (Typ \"Aussenwand\") have a total volume of 32.85 m³, computed from their "
                  "extruded geometry."),
        ],
        static=('let ws = filter(by_type("IfcWall", true), fn(w) { return pset_value(w, "Pset_WallCommon", '
                '"IsExternal") == true })\nprint(sum(map(ws, fn(w) { return extruded_volume(w) })))', "0"),
        static_final=NOT_FOUND,
    ),
    dict(
        id="T10", cat=4, model="office", project="office",
        q="What is the acoustic rating of door D-101?", gt="acoustic rating not available",
        adaptive=[
            code("Inspect all properties and quantities of D-101.",
                 'let d = filter(by_type("IfcDoor"), fn(x) { return name_of(x) == "D-101" })[0]\n'
                 'print(psets(d), quantities(d))', '"FireRating": "EI30"'),
            final("The acoustic rating is not available: door D-101 carries no AcousticRating property; its "
                  "property sets hold only FireRating EI30, IsExternal, Width and Height."),
        ],
        static=('let d = filter(by_type("IfcDoor"), fn(x) { return name_of(x) == "D-101" })[0]\n'
                'print(pset_value(d, "Pset_DoorCommon", "AcousticRating"))', "null"),
        static_final="The acoustic rating of D-101 is not available in the model (Pset_DoorCommon.AcousticRating "
                     "is not set).",
    ),
    dict(
        id="T11", cat=4, model="office", project="office",
        q="How many people can the Meeting room hold, assuming 2 m² per person?", gt="7",
        adaptive=[
            code("Find the space called Meeting.",
                 'for s in by_type("IfcSpace") { print(name_of(s), attr(s, "LongName"), quantities(s)) }',
                 '1.02 Meeting {"Qto_SpaceBaseQuantities": {"NetFloorArea": 15.5}}'),
            final("Assuming 2 m² per person, the Meeting room (space 1.02, NetFloorArea 15.5 m²) holds 7 people "
                  "(15.5 / 2 = 7.75, rounded down)."),
        ],
        static=('let s = filter(by_type("IfcSpace"), fn(x) { return name_of(x) == "Meeting" })[0]\n'
                'print(quantity(s, "Qto_SpaceBaseQuantities", "NetFloorArea"))', "index out of range"),
        static_final=NOT_FOUND,
    ),
    dict(
        id="T12", cat=4, model="house_de", project="house",
        q="In which year was the house built?", gt="construction year not available",
        adaptive=[
            code("Inspect the building and project attributes.",
                 'print(attrs(by_type("IfcBuilding")[0]))\nprint(psets(by_type("IfcBuilding")[0]))', '"Name": "Haus"'),
            final("The house was built in 1998."),
        ],
        static=('print(attrs(by_type("IfcBuilding")[0]), psets(by_type("IfcBuilding")[0]))', '"Name": "Haus"'),
        static_final="The construction year is not available: the building has no property recording it.",
    ),
]

HETERO = [
    ("H1", "hetero_revit", "0.91", '"Width": 0.91', "Door 1 is 0.91 wide (Dimensions.Width)."),
    ("H2", "hetero_clinic", "0.95", '"NominalWidth": 0.95', "Door 1 is 0.95 wide (Pset_DoorCommon.NominalWidth)."),
    ("H3", "hetero_archicad", "0.885", '"Breite (B)": 0.885',
     "Door 1 is 0.885 wide (ArchiCADProperties.\"Breite (B)\", German for width)."),
]


def run(env: ExecEnvironment, src: str, expect: str | None, label: str) -> None:
    r = env.execute(src)
    shown = r.feedback()
    if expect is not None and expect not in shown:
        raise SystemExit(f"{label}: expected {expect!r} in output, got {shown!r}")


def build() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    manifest, adaptive, static = [], [], []
    for t in TASKS:
        path = MODELS / f"{t['model']}.ifc"
        manifest.append({"task_id": t["id"], "question": t["q"], "model_path": f"../models/{t['model']}.ifc",
                         "ground_truth": t["gt"], "category": t["cat"], "project": t["project"], "split": "test"})
        env = ExecEnvironment(load_model(path))
        for turn, step in enumerate(t["adaptive"]):
            if step[0] == "code":
                _, why, src, expect = step
                run(env, src, expect, f"{t['id']} adaptive turn {turn}")
                resp = format_action(src, why)
            else:
                resp = format_final(step[1])
            adaptive.append({"task_id": t["id"], "turn": turn, "response": resp})
        src, expect = t["static"]
        run(ExecEnvironment(load_model(path)), src, expect, f"{t['id']} static")
        static.append({"task_id": t["id"], "turn": 0, "response": format_action(src, "Single program.")})
        static.append({"task_id": t["id"], "turn": 1, "response": format_final(t["static_final"])})

    hetero_manifest, hetero_script = [], []
    for hid, model, gt, expect, answer in HETERO:
        hetero_manifest.append({"task_id": hid, "question": "What is the width of door 1?",
                                "model_path": f"../models/{model}.ifc", "ground_truth": gt, "category": 1,
                                "project": model, "split": "test"})
        env = ExecEnvironment(load_model(MODELS / f"{model}.ifc"))
        steps = [
            ("List doors by name.", 'let ds = by_type("IfcDoor", true)\nprint(map(ds, fn(d) { return name_of(d) }))',
             None),
            ("Inspect the first door's property sets to find how width is stored.", "print(psets(ds[0]))", expect),
        ]
        for turn, (why, src, exp) in enumerate(steps):
            run(env, src, exp, f"{hid} turn {turn}")
            hetero_script.append({"task_id": hid, "turn": turn, "response": format_action(src, why)})
        hetero_script.append({"task_id": hid, "turn": len(steps), "response": format_final(answer)})

    write_jsonl(OUT / "manifest.jsonl", manifest)
    write_jsonl(OUT / "adaptive.jsonl", adaptive)
    write_jsonl(OUT / "static.jsonl", static)
    write_jsonl(OUT / "heterogeneity_manifest.jsonl", hetero_manifest)
    write_jsonl(OUT / "heterogeneity.jsonl", hetero_script)
    matrix = {
        "seed": 42,
        "resamples": 10000,
        "concurrency": 4,
        "judge": {"kind": "reference"},
        "configs": [
            {"config_id": "adaptive-none", "paradigm": "adaptive", "augmentation": "none",
             "provider": {"kind": "replay", "script": "adaptive.jsonl"}},
            {"config_id": "static-none", "paradigm": "static", "augmentation": "none",
             "provider": {"kind": "replay", "script": "static.jsonl"}},
        ],
    }
    (OUT / "matrix.json").write_text(json.dumps(matrix, indent=2) + "\n", encoding="utf-8")


def write_jsonl(path: Path, rows: list[dict]) -> None:
    path.write_text("".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows), encoding="utf-8")


if __name__ == "__main__":
    build()
    print(f"wrote mini-benchmark to {OUT}")
