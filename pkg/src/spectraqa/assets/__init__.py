"""Editable text/JSON assets bundled with the package, and their loaders."""
from __future__ import annotations

import json
from importlib import resources
from typing import Any


def load_text(name: str) -> str:
    return resources.files(__name__).joinpath(name).read_text(encoding="utf-8")


def load_json(name: str) -> Any:
    return json.loads(load_text(name))
