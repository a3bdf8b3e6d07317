"""
Celery background tasks
Fuzz koşularını worker'lara dağıtmak için görevler
"""

import logging

from celery import Celery

from app.config import settings
from app.schemas import SimConfig

logger = logging.getLogger(__name__)

# Celery app oluştur
celery_app = Celery(
    "causalcheck",
    broker=settings.CELERY_BROKER_URL,
    backend=settings.CELERY_RESULT_BACKEND,
)

celery_app.conf.update(
    task_serializer="json",
    accept_content=["json"],
    result_serializer="json",
    timezone="UTC",
    enable_utc=True,
    task_always_eager=settings.CELERY_TASK_ALWAYS_EAGER,
)


@celery_app.task(bind=True)
def fuzz_case(self, config: dict) -> dict:
    """
    Tek bir fuzz koşusu: simülasyon + kontrol

    Args:
        config: SimConfig alanları (JSON)

    Returns:
        CaseResult (JSON)
    """
    from app.simulation.fuzz import run_case

    result = run_case(SimConfig.model_validate(config))
    logger.debug(f"Görev {self.request.id}: seed={result.seed} tamamlandı")
    return result.model_dump(mode="json")
