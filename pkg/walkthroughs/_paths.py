from pathlib import Path

DATA = Path(__file__).resolve().parents[1] / "src" / "cobbie" / "data"
MODELS = DATA / "models"
MINIBENCH = DATA / "minibench"
