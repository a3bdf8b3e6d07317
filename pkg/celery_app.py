"""
Celery worker giriş noktası (FUZZ_USE_CELERY=true ile dağıtık fuzz)
Kullanım: celery -A celery_app worker --loglevel=info
"""
from app.tasks import celery_app, fuzz_case  # noqa: F401

if __name__ == "__main__":
    celery_app.start()
