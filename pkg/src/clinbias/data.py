"""Accessors for the packaged reference data files."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

_DATA_FILES = {
    "lexicon": "lexicon.csv",
    "gender_pairs": "gender_pairs.csv",
    "templates": "templates.txt",
    "prevalence": "prevalence.csv",
    "icd9_chapters": "icd9_chapters.csv",
}


def packaged_path(name: str) -> Path:
    """Filesystem path of a packaged data file ('lexicon', 'gender_pairs', ...)."""
    if name not in _DATA_FILES:
        raise KeyError(f"unknown data file {name!r}; known: {sorted(_DATA_FILES)}")
    path = resources.files("clinbias").joinpath("data", _DATA_FILES[name])
    return Path(str(path))
