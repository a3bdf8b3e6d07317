import pytest
from hypothesis import given

from app.history import derive_history
from app.models import Method
from app.trace_parser import TraceFormatError, TraceParser, parse_trace, serialize_trace
from tests.generators import executions

TWO_SITES = "0 wr x 1\n0 rd x 2\n1 wr x 2\n1 rd x 1"


class TestTraceParser:
    def setup_method(self):
        self.parser = TraceParser()

    def test_parse_line(self):
        op = self.parser.parse_line("3 rd y_2 7", 1)
        assert op.site == 3
        assert op.method is Method.READ
        assert op.variable == "y_2"
        assert op.value == 7
        assert op.seq == 0

    def test_comment_and_blank_lines_are_skipped(self):
        assert self.parser.parse_line("# yorum", 1) is None
        assert self.parser.parse_line("   ", 2) is None

    def test_seq_assigned_per_site_in_file_order(self):
        events = list(self.parser.iter_events(["0 wr x 1", "1 wr x 2", "0 rd x 2"]))
        assert [op.id for op in events] == [(0, 0), (1, 0), (0, 1)]

    def test_explicit_seq(self):
        execution = parse_trace("@0 0 wr x 1\n@0 1 rd x 1\n@1 0 rd x 0\n")
        assert [op.id for op in execution.events] == [(0, 0), (1, 0), (0, 1)]


def test_parse_two_site_history():
    execution = parse_trace(TWO_SITES)
    assert len(execution) == 4
    assert {op.site for op in execution.events} == {0, 1}
    assert execution.events[1].label() == "rd(x,2)"


def test_parse_empty():
    assert len(parse_trace("")) == 0
    assert len(parse_trace(b"")) == 0


def test_parse_initial_value_read():
    (op,) = parse_trace("0 rd x 0").events
    assert op.is_read and op.value == 0


def test_parse_bytes():
    assert parse_trace(TWO_SITES.encode("utf-8")) == parse_trace(TWO_SITES)


@pytest.mark.parametrize(
    "text, line_no",
    [
        ("0 wr x 1\n0 xx x 1\n", 2),
        ("0 wr x -1\n", 1),
        ("0 wr x\n", 1),
        ("# yorum\n\n0 wr x- 1\n", 3),
        ("@0 0 wr x 1\n@0 0 rd x 1\n", 2),
        ("@1 0 wr x 1\n", 1),
    ],
)
def test_malformed_lines_report_line_number(text, line_no):
    with pytest.raises(TraceFormatError) as exc_info:
        parse_trace(text)
    assert exc_info.value.line_no == line_no


def test_serialize_format():
    execution = parse_trace("# yorum\n0 wr x 1\n\n1 rd x 1\n")
    assert serialize_trace(execution) == "0 wr x 1\n1 rd x 1\n"
    assert serialize_trace(parse_trace("")) == ""


@given(executions())
def test_serialize_then_parse_is_identity(execution):
    assert parse_trace(serialize_trace(execution)) == execution


def test_derive_history_groups_by_site():
    history = derive_history(parse_trace(TWO_SITES))
    assert [op.label() for op in history.site_ops(0)] == ["wr(x,1)", "rd(x,2)"]
    assert [op.label() for op in history.site_ops(1)] == ["wr(x,2)", "rd(x,1)"]
