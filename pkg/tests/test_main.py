import json

import pytest

from app.config import APP_VERSION
from app.main import ExitStatus, main
from app.monitoring import REGISTRY, get_metrics
from app.trace_parser import parse_trace


def run(capsys, *argv):
    status = main(list(argv))
    captured = capsys.readouterr()
    return status, captured.out, captured.err


def test_check_all_criteria(capsys, traces_dir):
    status, out, _ = run(capsys, "check", str(traces_dir / "sample_a.trace"))
    assert status == ExitStatus.VIOLATION
    assert out.splitlines() == ["cc ok", "cm ok", "ccv violation CyclicCF 0.0 1.0"]


def test_check_single_criterion(capsys, traces_dir):
    status, out, _ = run(capsys, "check", "--criterion", "cc", str(traces_dir / "sample_c.trace"))
    assert status == ExitStatus.OK
    assert out == "cc ok\n"


def test_check_empty_trace(capsys, tmp_path):
    trace = tmp_path / "empty.trace"
    trace.write_text("")
    status, out, _ = run(capsys, "check", str(trace))
    assert status == ExitStatus.OK
    assert out.splitlines() == ["cc ok", "cm ok", "ccv ok"]


def test_check_oracle_mode(capsys, traces_dir):
    status, out, _ = run(
        capsys, "check", "--mode", "oracle", "--criterion", "cm", str(traces_dir / "sample_c.trace")
    )
    assert status == ExitStatus.VIOLATION
    assert out.startswith("cm violation ")


def test_check_json_report(capsys, traces_dir, tmp_path):
    report = tmp_path / "verdicts.json"
    status, _, _ = run(capsys, "check", "--json", str(report), str(traces_dir / "sample_e.trace"))
    assert status == ExitStatus.VIOLATION
    data = json.loads(report.read_text())
    cc = data["verdicts"][0]
    assert cc["criterion"] == "cc"
    assert cc["patterns"][0]["kind"] == "WriteCORead"
    assert cc["patterns"][0]["witness"] == {"w1": "0.0", "w2": "1.1", "r1": "2.1"}


def test_check_fast_mode_non_differentiated(capsys, tmp_path):
    trace = tmp_path / "dup.trace"
    trace.write_text("0 wr x 1\n1 wr x 1\n")
    status, out, err = run(capsys, "check", "--mode", "fast", str(trace))
    assert status == ExitStatus.ERROR
    assert out == ""
    assert err.startswith("error: ")


def test_monitor_reports_violation(capsys, traces_dir):
    status, out, _ = run(capsys, "monitor", str(traces_dir / "sample_e.trace"))
    assert status == ExitStatus.VIOLATION
    assert out == "VIOLATION WriteCORead\n"


def test_monitor_consistent_stream(capsys, traces_dir):
    status, out, _ = run(capsys, "monitor", str(traces_dir / "sample_d.trace"))
    assert status == ExitStatus.OK
    assert out == ""


def test_monitor_rejects_repeated_write(capsys, tmp_path):
    trace = tmp_path / "dup.trace"
    trace.write_text("0 wr x 1\n1 wr x 1\n")
    status, _, err = run(capsys, "monitor", str(trace))
    assert status == ExitStatus.ERROR
    assert "error:" in err


def test_simulate_then_check(capsys, tmp_path):
    trace = tmp_path / "sim.trace"
    status, _, _ = run(capsys, "simulate", "--sites", "3", "--ops", "40", "--seed", "4", "--emit", str(trace))
    assert status == ExitStatus.OK
    assert len(trace.read_text().splitlines()) == 40
    status, _, _ = run(capsys, "check", str(trace))
    assert status == ExitStatus.OK


def test_simulate_to_stdout(capsys):
    status, out, _ = run(capsys, "simulate", "--ops", "5", "--seed", "2")
    assert status == ExitStatus.OK
    assert len(out.splitlines()) == 5


def test_encode_sat_unsat(capsys, traces_dir, tmp_path):
    trace = tmp_path / "unsat.trace"
    status, _, _ = run(capsys, "encode-sat", str(traces_dir / "unsat.cnf"), "--out", str(trace))
    assert status == ExitStatus.OK
    status, out, _ = run(
        capsys, "--oracle-max-ops", "20", "check", "--mode", "oracle", "--criterion", "cc", str(trace)
    )
    assert status == ExitStatus.VIOLATION
    assert out == "cc violation\n"


def test_encode_sat_sat(capsys, traces_dir, tmp_path):
    trace = tmp_path / "sat.trace"
    run(capsys, "encode-sat", str(traces_dir / "sat.cnf"), "--out", str(trace))
    status, out, _ = run(capsys, "--oracle-max-ops", "20", "check", "--criterion", "cc", str(trace))
    assert status == ExitStatus.OK
    assert out == "cc ok\n"


def test_oracle_cap_exceeded(capsys, traces_dir, tmp_path):
    trace = tmp_path / "sat.trace"
    run(capsys, "encode-sat", str(traces_dir / "sat.cnf"), "--out", str(trace))
    status, _, err = run(capsys, "--oracle-max-ops", "3", "check", str(trace))
    assert status == ExitStatus.ERROR
    assert "error:" in err


def test_fuzz_mutant(capsys, tmp_path):
    report = tmp_path / "fuzz.txt"
    status, out, _ = run(
        capsys,
        "fuzz",
        "--protocol",
        "mutant-stale-read",
        "--runs",
        "20",
        "--report",
        str(report),
    )
    assert status == ExitStatus.VIOLATION
    assert out.startswith("summary mutant-stale-read runs=20 ")
    assert len(report.read_text().splitlines()) == 21


def test_fuzz_correct(capsys):
    status, out, _ = run(capsys, "fuzz", "--runs", "5", "--ops", "30")
    assert status == ExitStatus.OK
    assert "cc_violations=0 cm_violations=0 ccv_violations=0" in out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["check"],
        ["check", "--criterion", "xx", "t.trace"],
        ["fuzz", "--runs", "0"],
        ["simulate", "--sites", "0"],
        ["nope"],
    ],
)
def test_bad_arguments(capsys, argv):
    status, _, _ = run(capsys, *argv)
    assert status == ExitStatus.ERROR


def test_missing_file(capsys, tmp_path):
    status, _, err = run(capsys, "check", str(tmp_path / "missing.trace"))
    assert status == ExitStatus.ERROR
    assert err.startswith("error: ")


def test_malformed_trace(capsys, tmp_path):
    trace = tmp_path / "bad.trace"
    trace.write_text("0 wr x 1\n0 zz x 1\n")
    status, _, err = run(capsys, "check", str(trace))
    assert status == ExitStatus.ERROR
    assert "satır 2" in err


def test_version(capsys):
    status, out, _ = run(capsys, "--version")
    assert status == ExitStatus.OK
    assert APP_VERSION in out


def test_metrics_file(capsys, traces_dir, tmp_path):
    metrics = tmp_path / "metrics.prom"
    run(capsys, "--metrics-file", str(metrics), "check", str(traces_dir / "sample_d.trace"))
    assert "histories_checked_total" in metrics.read_text()


def test_monitor_events_counted_in_exposition(capsys, traces_dir):
    trace = traces_dir / "sample_d.trace"
    before = REGISTRY.get_sample_value("monitor_events_total")
    run(capsys, "monitor", str(trace))
    after = REGISTRY.get_sample_value("monitor_events_total")
    assert after - before == len(parse_trace(trace.read_text()))
    assert b"monitor_events_total" in get_metrics()
