from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import synthetic  # noqa: E402


@pytest.fixture
def serve_project(tmp_path) -> Path:
    """A fresh fixture project with the two serve events and ground truth."""
    return synthetic.build_project(tmp_path / "project")


@pytest.fixture
def serve_project_fp(tmp_path) -> Path:
    """Fixture project with one injected false-positive serve pattern."""
    return synthetic.build_project(tmp_path / "project_fp", inject_false_positive=True)
