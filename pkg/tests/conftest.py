"""Shared fixtures: corpus locations and scratch project copies."""
from __future__ import annotations

import shutil
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parent.parent
CORPUS = REPO / "corpus"
GOLDEN = REPO / "tests" / "golden"
VARIANTS = CORPUS / "variants"


@pytest.fixture
def lift_dir() -> Path:
    return CORPUS / "lift"


@pytest.fixture
def aman_dir() -> Path:
    return CORPUS / "aman"


@pytest.fixture
def copy_project(tmp_path):
    """Copy a corpus project into a scratch directory, optionally swapping
    machine files in from corpus/variants."""

    def _copy(name: str, replace: dict[str, str] | None = None, drop: tuple[str, ...] = ()) -> Path:
        dst = tmp_path / name
        shutil.copytree(CORPUS / name, dst)
        for target, variant in (replace or {}).items():
            shutil.copy(VARIANTS / variant, dst / "machines" / target)
        for target in drop:
            (dst / target).unlink()
        return dst

    return _copy


def strip_req5(project_dir: Path) -> None:
    """Remove the REQ5 obligation (used with variants that drop machine M1)."""
    vo = project_dir / "vos" / "aman.vo"
    lines = [l for l in vo.read_text().splitlines(keepends=True) if "REQ5" not in l]
    vo.write_text("".join(lines))
