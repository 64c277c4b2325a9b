from __future__ import annotations

from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def chain10_path() -> Path:
    return FIXTURES / "chain10.snl"


@pytest.fixture
def chain10_patterns_path() -> Path:
    return FIXTURES / "chain10.pat"
