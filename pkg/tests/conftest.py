from __future__ import annotations

import json
import sys
from functools import lru_cache
from pathlib import Path

import pytest

HERE = Path(__file__).resolve().parent
ROOT = HERE.parent
FIXTURES = ROOT / "fixtures"
sys.path.insert(0, str(HERE))

from dimer.model import DimerModel, load  # noqa: E402


@lru_cache(maxsize=None)
def manifest() -> dict:
    """Manifest entries keyed by model name."""
    data = json.loads((FIXTURES / "manifest.json").read_text())
    return {**data, "models": {e["name"]: e for e in data["models"]}}


@lru_cache(maxsize=None)
def fixture(name: str) -> DimerModel:
    return load(FIXTURES / manifest()["models"][name]["file"])


def fixture_names(pred=None) -> list[str]:
    entries = manifest()["models"]
    return sorted(n for n, e in entries.items() if pred is None or pred(e))


def is_strongly_consistent(entry: dict) -> bool:
    return (entry["surface"] != "sphere" and entry["strand_consistent"] == "yes"
            and entry["path_consistent_up_to_L"] == "consistent_up_to"
            and entry["nondegenerate"] == "yes")


@pytest.fixture(scope="session")
def all_fixtures() -> dict[str, DimerModel]:
    return {n: fixture(n) for n in fixture_names()}


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = [v for k, v in sorted(getattr(mod, "RESULTS", {}).items()) if isinstance(k, int)]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
