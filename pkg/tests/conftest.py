import pathlib

import pytest

ROOT = pathlib.Path(__file__).resolve().parent.parent


@pytest.fixture(autouse=True)
def _repo_root_cwd(monkeypatch):
    # shipped variety files and golden outputs are addressed repo-relative
    monkeypatch.chdir(ROOT)
