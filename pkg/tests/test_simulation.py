import pytest

from app.export import fuzz_report_text
from app.history import derive_history, is_differentiated
from app.pattern_detection import validate_pattern
from app.schemas import Criterion, PatternKind, Protocol, SimConfig
from app.simulation.fuzz import fuzz, run_case
from app.simulation.prng import SplitMix64
from app.simulation.simulator import Simulator, run_sim

MUTANTS = [
    Protocol.NO_CAUSAL_DELIVERY,
    Protocol.DROP_READ_DEPS,
    Protocol.STALE_READ,
    Protocol.REORDER_LOCAL,
]


class TestSplitMix64:
    def test_reference_sequence(self):
        rng = SplitMix64(0)
        assert rng.next() == 0xE220A8397B1DCDAF
        assert rng.next() == 0x6E789E6AA1B965F4

    def test_below_range(self):
        rng = SplitMix64(42)
        assert all(0 <= rng.below(7) < 7 for _ in range(200))

    def test_below_rejects_non_positive(self):
        with pytest.raises(ValueError):
            SplitMix64(1).below(0)


def test_deterministic_for_seed():
    config = SimConfig(sites=3, variables=2, ops=40, seed=17)
    assert run_sim(config) == run_sim(config)
    assert run_sim(config) != run_sim(config.model_copy(update={"seed": 18}))


def test_zero_ops_gives_empty_execution():
    assert len(run_sim(SimConfig(ops=0))) == 0


def test_op_count_and_differentiation():
    execution = run_sim(SimConfig(sites=4, variables=3, ops=50, seed=3))
    assert len(execution) == 50
    history = derive_history(execution)
    assert is_differentiated(history)
    assert [len(history.site_ops(s)) for s in range(4)] == [13, 13, 12, 12]


def test_single_site_is_consistent():
    result = run_case(SimConfig(sites=1, variables=2, ops=30, seed=9))
    assert all(result.verdicts.values())


@pytest.mark.slow
@pytest.mark.parametrize("sites, variables, ops", [(2, 1, 40), (3, 2, 60), (4, 3, 80)])
def test_correct_protocol_has_no_violations(sites, variables, ops):
    template = SimConfig(sites=sites, variables=variables, ops=ops, protocol=Protocol.CORRECT)
    report = fuzz(template, runs=170)
    assert not report.any_violation, report.first_witnesses


def test_no_causal_delivery_applies_in_arrival_order():
    simulator = Simulator(SimConfig(sites=3, protocol=Protocol.NO_CAUSAL_DELIVERY))
    writer = simulator.replicas[0]
    older = writer.new_write("x0", 1)
    newer = writer.new_write("x0", 2)
    first = writer.outgoing(older.tag[0], older)
    second = writer.outgoing(newer.tag[0], newer)

    simulator._deliver(2, second, now=0)
    assert simulator.replicas[2].read("x0") == 2
    simulator._deliver(2, first, now=0)
    assert simulator.replicas[2].read("x0") == 1
    assert simulator.replicas[2].lamport == 0


def test_correct_protocol_applies_in_send_order():
    simulator = Simulator(SimConfig(sites=2))
    writer = simulator.replicas[0]
    older = writer.new_write("x0", 1)
    newer = writer.new_write("x0", 2)
    first = writer.outgoing(older.tag[0], older)
    second = writer.outgoing(newer.tag[0], newer)

    simulator._deliver(1, second, now=0)
    assert simulator.replicas[1].read("x0") == 0
    simulator._deliver(1, first, now=0)
    assert simulator.replicas[1].read("x0") == 2


def test_no_causal_delivery_is_caught():
    template = SimConfig(sites=3, variables=2, ops=60, protocol=Protocol.NO_CAUSAL_DELIVERY)
    report = fuzz(template, runs=200)
    assert report.violations[Criterion.CC] >= 1


@pytest.mark.slow
@pytest.mark.parametrize("protocol", MUTANTS)
def test_mutant_is_caught(protocol):
    template = SimConfig(sites=3, variables=2, ops=60, protocol=protocol)
    report = fuzz(template, runs=200)
    assert report.violations[Criterion.CC] >= 1

    witness = report.first_witnesses[Criterion.CC]
    failing = next(result for result in report.runs if not result.verdicts[Criterion.CC])
    history = derive_history(run_sim(template.model_copy(update={"seed": failing.seed})))
    assert validate_pattern(history, witness)


@pytest.mark.slow
def test_stale_read_produces_thin_air():
    report = fuzz(SimConfig(sites=3, variables=2, ops=60, protocol=Protocol.STALE_READ), runs=50)
    assert any(PatternKind.THIN_AIR_READ in result.pattern_kinds for result in report.runs)


def test_fuzz_report_lines():
    report = fuzz(SimConfig(sites=2, variables=1, ops=10), runs=3, first_seed=5)
    lines = fuzz_report_text(report).splitlines()
    assert [line.split()[0] for line in lines[:3]] == ["5", "6", "7"]
    assert all(line.split()[1] == "correct" for line in lines[:3])
    assert lines[-1].startswith("summary correct runs=3 ")


def test_fuzz_rejects_zero_runs():
    with pytest.raises(ValueError):
        fuzz(SimConfig(), runs=0)
