import re

_SPLIT_RE = re.compile(r"[^0-9a-z]+")


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumerics, drop tokens shorter than 2 characters."""
    return [t for t in _SPLIT_RE.split(text.lower()) if len(t) >= 2]
