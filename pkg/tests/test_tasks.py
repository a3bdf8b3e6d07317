from app.config import settings
from app.export import fuzz_report_text
from app.schemas import CaseResult, Protocol, SimConfig
from app.simulation.fuzz import fuzz
from app.tasks import celery_app, fuzz_case


def test_celery_runs_eagerly_by_default():
    assert celery_app.conf.task_always_eager


def test_fuzz_case_task():
    config = SimConfig(sites=2, variables=1, ops=12, seed=3)
    payload = fuzz_case.delay(config.model_dump(mode="json")).get()
    result = CaseResult.model_validate(payload)
    assert result.seed == 3
    assert result.ops == 12
    assert result.protocol is Protocol.CORRECT


def test_celery_fuzz_matches_local(monkeypatch):
    template = SimConfig(sites=3, variables=2, ops=20, protocol=Protocol.STALE_READ)
    local = fuzz(template, runs=4)
    monkeypatch.setattr(settings, "FUZZ_USE_CELERY", True)
    distributed = fuzz(template, runs=4)
    assert fuzz_report_text(distributed) == fuzz_report_text(local)
    assert distributed.violations == local.violations
