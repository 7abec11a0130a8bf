"""Locations of the bundled default resources.

All pipeline stages are driven by data files (trigger patterns,
collocation rules, tagging lexicon, transformation rules).  The package
ships working defaults plus a small fully annotated desk corpus; the
``MOP_RESOURCES`` environment variable redirects the whole resource root,
and individual CLI flags override single files.
"""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path


def resource_root() -> Path:
    env = os.environ.get("MOP_RESOURCES")
    if env:
        root = Path(env)
        if not root.is_dir():
            raise FileNotFoundError(f"MOP_RESOURCES does not exist: {root}")
        return root
    return Path(str(resources.files("mop").joinpath("resources")))


def patterns_path() -> Path:
    return resource_root() / "patterns.txt"


def collocations_path() -> Path:
    return resource_root() / "collocations.tsv"


def lexicon_path() -> Path:
    return resource_root() / "lexicon.tsv"


def tagger_rules_path() -> Path:
    return resource_root() / "tag_rules.txt"


def abbreviations_path() -> Path:
    return resource_root() / "abbreviations.txt"


def desk_corpus_dir() -> Path:
    return resource_root() / "desk_corpus"


def desk_gold_path() -> Path:
    return desk_corpus_dir() / "gold.jsonl"


def desk_gold_mid_path() -> Path:
    return desk_corpus_dir() / "gold_mid.jsonl"


def desk_gold_tags_path() -> Path:
    return desk_corpus_dir() / "gold_tags.tsv"


def default_abbreviations() -> list[str]:
    lines = abbreviations_path().read_text(encoding="utf-8").splitlines()
    return [ln.strip() for ln in lines if ln.strip() and not ln.startswith("#")]
