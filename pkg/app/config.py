import logging
import sys
from typing import Optional

from pydantic_settings import BaseSettings

APP_VERSION = "1.0.0"


class Settings(BaseSettings):
    # Loglama
    LOG_LEVEL: str = "WARNING"

    # Oracle (kaba kuvvet arama) için maksimum operasyon sayısı
    ORACLE_MAX_OPS: int = 10

    # Gözlemci (register automaton) konfigürasyon sınırı
    MONITOR_MAX_FRONTIER: int = 200000

    # Teşhis modu: HB_o her operasyon için ayrı hesaplanır
    HB_PER_OPERATION: bool = False

    # Fuzz koşularını Celery ile dağıt
    FUZZ_USE_CELERY: bool = False
    CELERY_BROKER_URL: str = "memory://"
    CELERY_RESULT_BACKEND: str = "cache+memory://"
    CELERY_TASK_ALWAYS_EAGER: bool = True

    # Simülasyon politikası (protokol değil)
    SIM_OP_GAP: int = 10
    SIM_DELAY_STEP: int = 4
    SIM_DELAY_SUCCESS_PERMILLE: int = 300
    SIM_MAX_DELAY: int = 400
    SIM_HEARTBEAT_INTERVAL: int = 15
    SIM_STALE_READ_PERMILLE: int = 50

    class Config:
        env_file = ".env"
        case_sensitive = False
        extra = "ignore"  # .env dosyasındaki ekstra alanları yok say


settings = Settings()

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: Optional[str] = None) -> None:
    """Uygulama loglarını stderr'e yönlendir"""
    level_name = (level or settings.LOG_LEVEL).upper()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))

    root = logging.getLogger("app")
    root.handlers.clear()
    root.addHandler(handler)
    root.setLevel(getattr(logging, level_name, logging.WARNING))
    root.propagate = False
