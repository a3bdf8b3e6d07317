"""
Prometheus monitoring metrics
"""

from prometheus_client import (
    CollectorRegistry,
    Counter,
    Histogram,
    generate_latest,
    write_to_textfile,
)

REGISTRY = CollectorRegistry()

# Kontrol metrikleri
histories_checked_total = Counter(
    "histories_checked_total",
    "Total histories checked",
    ["mode"],
    registry=REGISTRY,
)

violations_detected_total = Counter(
    "violations_detected_total",
    "Total consistency violations detected",
    ["criterion", "pattern"],
    registry=REGISTRY,
)

check_duration = Histogram(
    "check_duration_seconds",
    "Consistency check duration in seconds",
    ["criterion"],
    registry=REGISTRY,
)

# Gözlemci ve simülasyon metrikleri
monitor_events_total = Counter(
    "monitor_events_total", "Total events fed to the online observer", registry=REGISTRY
)

simulated_runs_total = Counter(
    "simulated_runs_total",
    "Total simulated store runs",
    ["protocol"],
    registry=REGISTRY,
)


def get_metrics() -> bytes:
    """Prometheus metin formatında metrikler"""
    return generate_latest(REGISTRY)


def write_metrics(path: str) -> None:
    """Metrikleri node-exporter textfile formatında dosyaya yaz"""
    write_to_textfile(path, REGISTRY)
