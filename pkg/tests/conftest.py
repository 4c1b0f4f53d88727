"""Shared fixtures: the bundled demo courses, written once per session."""

import json
from pathlib import Path

import pytest

from corridor_mpcc.demo import write_demo
from corridor_mpcc.sim import Scenario, load_scenario


@pytest.fixture(scope="session")
def demo_dir(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("demo")
    write_demo(out)
    return out


@pytest.fixture(scope="session")
def demo_scenario(demo_dir):
    """Loader for a bundled scenario by name (e.g. ``straight_nominal``)."""

    def _load(name: str) -> Scenario:
        return load_scenario(demo_dir / f"{name}.json")

    return _load


@pytest.fixture(scope="session")
def demo_docs(demo_dir):
    """Loader for a bundled JSON document as a plain dict."""

    def _load(name: str) -> dict:
        return json.loads((demo_dir / f"{name}.json").read_text())

    return _load
