from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from app.history import derive_history
from app.trace_parser import parse_trace

TRACES = Path(__file__).resolve().parent.parent / "traces"

settings.register_profile(
    "ci",
    max_examples=200,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


def load_trace(name: str):
    return parse_trace((TRACES / name).read_text(encoding="utf-8"))


@pytest.fixture
def traces_dir() -> Path:
    return TRACES


@pytest.fixture
def samples():
    """(a)..(e) referans history'leri"""
    return {
        label: derive_history(load_trace(f"sample_{label}.trace"))
        for label in ("a", "b", "c", "d", "e")
    }
