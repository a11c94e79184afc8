"""Train a reusable tool from one solved task, then watch its usage statistics."""
from _paths import MODELS

from cobbie.agent import ProviderError
from cobbie.bql import ExecEnvironment
from cobbie.forge import ToolRepository, TrainingTask, run_training
from cobbie.ifc import load_model

TWO_WALLS = str(MODELS / "two_walls.ifc")


class Roles:
    def __init__(self, script):
        self.script = {k: list(v) for k, v in script.items()}

    def complete(self, system, messages, session_id):
        if not self.script.get(session_id):
            raise ProviderError(f"no reply for {session_id}")
        return self.script[session_id].pop(0)


def solved(code):
    return [f"```action\n{code}\n```", "FINAL: 2"]


script = {
    "K1": solved('print(count(by_type("IfcWall")))'),
    "K1:verify": ['{"verdict": "correct"}'],
    "K1:identify": ['{"create": true, "name": "wall_count", "description": "Number of walls."}'],
    "K1:create": ['```tool\nfn wall_count() { count(by_type("IfcWall")) }\n```'],
    "K1:test": solved("print(wall_count())"),
    "K1:assess": ['{"accept": true}'],
    "K2": solved("print(wall_count())"),
    "K2:verify": ['{"verdict": "correct"}'],
    "K2:identify": ['{"create": false}'],
}

repo = ToolRepository()
tasks = [TrainingTask(t, "How many walls are there?", "2", TWO_WALLS) for t in ("K1", "K2")]
report = run_training(tasks, repo, Roles(script), lambda p: ExecEnvironment(load_model(p)))

print("created:", ", ".join(report.created))
for tid, phase in report.outcomes:
    print(f"{tid} ended in {phase}")
for t in repo.active:
    print(f"\n{t.name}{t.signature}: calls={t.calls} available={t.available_count} "
          f"successes={t.success_contributions}")
