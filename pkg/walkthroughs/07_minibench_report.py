"""Run the bundled evaluation matrix end to end and print the report."""
import sys
import tempfile
from pathlib import Path

from _paths import MINIBENCH

from cobbie.cli import main

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "run"
    code = main(["bench", str(MINIBENCH / "manifest.jsonl"), "--matrix", str(MINIBENCH / "matrix.json"),
                 "--out", str(out)])
    print((out / "report" / "report.md").read_text())
    sys.exit(code)
