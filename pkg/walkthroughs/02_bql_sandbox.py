"""Run query-language programs in the sandbox, including ones that fail on purpose."""
from _paths import MODELS

from cobbie.bql import ExecEnvironment
from cobbie.ifc import load_model

env = ExecEnvironment(load_model(MODELS / "office.ifc"))

programs = [
    'print(count(by_type("IfcWall")))',
    'for s in by_type("IfcBuildingStorey") { print(name_of(s), attr(s, "Elevation")) }',
    'print(1 / 0)',
    'print(missing)',
    'fn f(n){ if n > 60 { return 0 } f(n+1) + f(n+1) }\nf(0)',
]
for code in programs:
    r = env.execute(code)
    print(f">>> {code.splitlines()[0]}")
    print(r.feedback(), f"[{r.steps_used} steps]\n")
