import subprocess
import sys
from pathlib import Path

import pytest

WALKTHROUGHS = sorted((Path(__file__).resolve().parents[1] / "walkthroughs").glob("[0-9]*.py"))


@pytest.mark.parametrize("script", WALKTHROUGHS, ids=lambda p: p.stem)
def test_walkthrough_runs(script):
    r = subprocess.run([sys.executable, script.name], cwd=script.parent, capture_output=True, text=True, timeout=120)
    assert r.returncode == 0, r.stderr
    assert r.stdout.strip()
