"""
Komut satırı arayüzü: check, monitor, simulate, fuzz, encode-sat

Standart çıktı makine tarafından okunabilir sonuçlara ayrılmıştır;
tüm teşhis mesajları standart hataya gider.
"""

import argparse
import logging
import sys
from enum import IntEnum
from typing import Iterable, List, Optional

from pydantic import ValidationError

from app import monitoring
from app.analyzer import CheckMode, ConsistencyAnalyzer
from app.config import APP_VERSION, configure_logging, settings
from app.export import export_verdicts_to_json, verdict_lines, write_fuzz_report
from app.history import NotDifferentiatedError, derive_history, linearize
from app.observer import MonitorOverflow, MonitorState, build_mcc, feed
from app.oracle.sat import CnfError, encode_sat, parse_dimacs
from app.oracle.search import OracleCapExceeded
from app.pattern_detection import validate_pattern
from app.schemas import Criterion, Protocol, SimConfig
from app.simulation.fuzz import fuzz
from app.simulation.simulator import run_sim
from app.trace_parser import TraceFormatError, TraceParser, parse_trace, serialize_trace

logger = logging.getLogger(__name__)

STDIN = "-"


class ExitStatus(IntEnum):
    OK = 0
    VIOLATION = 1
    ERROR = 2


class CliError(Exception):
    """Kullanıcıya tek satırlık mesajla bildirilen hata"""


def _read_text(path: str) -> str:
    if path == STDIN:
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as f:
        return f.read()


def _write_text(path: Optional[str], text: str) -> None:
    if path is None or path == STDIN:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)


def cmd_check(args: argparse.Namespace) -> ExitStatus:
    history = derive_history(parse_trace(_read_text(args.trace)))
    criteria = list(Criterion) if args.criterion == "all" else [Criterion(args.criterion)]

    analyzer = ConsistencyAnalyzer(oracle_max_ops=args.oracle_max_ops)
    verdicts = analyzer.check_many(history, criteria, CheckMode(args.mode))

    for verdict in verdicts.values():
        if verdict.evidence is not None and not validate_pattern(history, verdict.evidence):
            raise CliError(f"{verdict.evidence.describe()} tanığı yeniden doğrulanamadı")

    for line in verdict_lines(verdicts):
        print(line)
    if args.json:
        _write_text(args.json, export_verdicts_to_json(verdicts))

    logger.info(f"{len(history)} operasyon, {len(criteria)} kriter kontrol edildi")
    if all(verdict.consistent for verdict in verdicts.values()):
        return ExitStatus.OK
    return ExitStatus.VIOLATION


def _stream_lines(path: str) -> Iterable[str]:
    if path == STDIN:
        yield from sys.stdin
        return
    with open(path, "r", encoding="utf-8") as f:
        yield from f


def cmd_monitor(args: argparse.Namespace) -> ExitStatus:
    automaton = build_mcc()
    state = MonitorState.initial(automaton)
    written = set()

    for event in TraceParser().iter_events(_stream_lines(args.trace)):
        if event.is_write:
            key = (event.variable, event.value)
            if event.value == 0 or key in written:
                raise NotDifferentiatedError(
                    f"{event} ile akış differentiated olmaktan çıktı"
                )
            written.add(key)
        state = feed(state, automaton, event, settings.MONITOR_MAX_FRONTIER)
        if state.accepted:
            print(f"VIOLATION {state.branch.value}")
            sys.stdout.flush()
            return ExitStatus.VIOLATION

    logger.info(f"{state.events} olay gözlendi, ihlal yok")
    return ExitStatus.OK


def _sim_config(args: argparse.Namespace, seed: int) -> SimConfig:
    return SimConfig(
        sites=args.sites,
        variables=args.variables,
        ops=args.ops,
        seed=seed,
        protocol=Protocol(args.protocol),
        write_ratio=args.write_ratio,
    )


def cmd_simulate(args: argparse.Namespace) -> ExitStatus:
    execution = run_sim(_sim_config(args, args.seed))
    _write_text(args.emit, serialize_trace(execution))
    return ExitStatus.OK


def cmd_fuzz(args: argparse.Namespace) -> ExitStatus:
    if args.runs < 1:
        raise CliError("--runs en az 1 olmalı")
    report = fuzz(_sim_config(args, args.first_seed), args.runs, args.first_seed)
    print(report.summary_line())
    if args.report:
        write_fuzz_report(report, args.report)
    return ExitStatus.VIOLATION if report.any_violation else ExitStatus.OK


def cmd_encode_sat(args: argparse.Namespace) -> ExitStatus:
    cnf = parse_dimacs(_read_text(args.dimacs))
    history = encode_sat(cnf)
    _write_text(args.out, serialize_trace(linearize(history)))
    return ExitStatus.OK


def _add_sim_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--sites", type=int, default=3, help="Site sayısı")
    parser.add_argument("--variables", type=int, default=2, help="Değişken sayısı")
    parser.add_argument("--ops", type=int, default=60, help="Toplam istemci operasyonu")
    parser.add_argument(
        "--protocol",
        choices=[protocol.value for protocol in Protocol],
        default=Protocol.CORRECT.value,
    )
    parser.add_argument("--write-ratio", type=float, default=0.5, help="Yazma oranı [0,1]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalcheck",
        description="Causal consistency (CC, CM, CCv) checking toolkit",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {APP_VERSION}")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR")
    parser.add_argument("--metrics-file", default=None, help="Prometheus metrik dosyası")
    parser.add_argument(
        "--oracle-max-ops",
        type=int,
        default=None,
        help=f"Oracle operasyon sınırı (varsayılan {settings.ORACLE_MAX_OPS})",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    check = subparsers.add_parser("check", help="History'yi kontrol et")
    check.add_argument("--criterion", choices=["cc", "cm", "ccv", "all"], default="all")
    check.add_argument("--mode", choices=[mode.value for mode in CheckMode], default="auto")
    check.add_argument("--json", default=None, help="Kararları JSON olarak bu dosyaya yaz")
    check.add_argument("trace", help="Trace dosyası (- = stdin)")
    check.set_defaults(handler=cmd_check)

    monitor = subparsers.add_parser("monitor", help="Akışı çevrimiçi gözlemle")
    monitor.add_argument("trace", nargs="?", default=STDIN, help="Trace dosyası (- = stdin)")
    monitor.set_defaults(handler=cmd_monitor)

    simulate = subparsers.add_parser("simulate", help="Depo simülasyonu çalıştır")
    _add_sim_arguments(simulate)
    simulate.add_argument("--seed", type=int, default=1)
    simulate.add_argument("--emit", default=None, help="Trace çıktı dosyası (yoksa stdout)")
    simulate.set_defaults(handler=cmd_simulate)

    fuzz_parser = subparsers.add_parser("fuzz", help="Tohumlar üzerinde simüle et ve kontrol et")
    _add_sim_arguments(fuzz_parser)
    fuzz_parser.add_argument("--runs", type=int, default=100)
    fuzz_parser.add_argument("--first-seed", type=int, default=1)
    fuzz_parser.add_argument("--report", default=None, help="Fuzz rapor dosyası")
    fuzz_parser.set_defaults(handler=cmd_fuzz)

    encode = subparsers.add_parser("encode-sat", help="DIMACS CNF'yi history'ye kodla")
    encode.add_argument("dimacs", help="DIMACS dosyası (- = stdin)")
    encode.add_argument("--out", default=None, help="Trace çıktı dosyası (yoksa stdout)")
    encode.set_defaults(handler=cmd_encode_sat)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    configure_logging(args.log_level)
    try:
        return int(args.handler(args))
    except (
        CliError,
        TraceFormatError,
        NotDifferentiatedError,
        OracleCapExceeded,
        CnfError,
        MonitorOverflow,
        ValidationError,
        OSError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return int(ExitStatus.ERROR)
    finally:
        if args.metrics_file:
            monitoring.write_metrics(args.metrics_file)


if __name__ == "__main__":
    sys.exit(main())
