"""Bundled canonical case documents."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def bundled_case_path(name: str) -> Path:
    """Filesystem path of a bundled case (name without the .json suffix)."""
    path = resources.files(__package__) / f"{name}.json"
    if not path.is_file():
        raise FileNotFoundError(f"no bundled case named {name!r}; have {bundled_cases()}")
    return Path(str(path))


def bundled_cases() -> list[str]:
    root = resources.files(__package__)
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))
