import pytest

from app.models import Method, Operation
from app.oracle.spec import (
    Label,
    LabeledPoset,
    SpecSequence,
    hide_return_values,
    poset_refines,
    spec_member,
)

O1 = Operation(site=0, method=Method.WRITE, variable="x", value=1, seq=0)
O2 = Operation(site=1, method=Method.WRITE, variable="y", value=2, seq=0)
O3 = Operation(site=2, method=Method.READ, variable="x", value=1, seq=0)


@pytest.mark.parametrize(
    "labels, expected",
    [
        ([Label.write("x", 1), Label.read("x", 1)], True),
        ([Label.write("x", 1), Label.read("x", 0)], False),
        ([Label.read("x", 0), Label.write("x", 2), Label.read("x", 2)], True),
        ([Label.write("x", 1), Label.write("x", 2), Label.read("x", 1)], False),
        ([Label.write("y", 1), Label.read("x", 0)], True),
        ([Label.write("x", 1), Label.read("x")], True),
        ([], True),
    ],
)
def test_spec_member(labels, expected):
    assert spec_member(SpecSequence.of_labels(*labels)) is expected


def rho_a():
    """o1, o2 → o3; o3'ün dönüşü gizli"""
    poset = LabeledPoset.of([O1, O2, O3], [(O1.id, O3.id), (O2.id, O3.id)])
    return hide_return_values(poset, {O1.id, O2.id})


def test_refines_total_order():
    rho_b = SpecSequence.of_ops([O1, O2, O3])
    assert poset_refines(rho_a(), rho_b)


def test_does_not_refine_unordered_poset():
    rho_c = LabeledPoset.of([O1, O2, O3], [])
    assert not poset_refines(rho_a(), rho_c)


def test_fully_hidden_empty_order_refines_any_sequence():
    hidden = hide_return_values(LabeledPoset.of([O3, O1], []), set())
    assert poset_refines(hidden, SpecSequence.of_ops([O3, O1]))
    assert poset_refines(hidden, SpecSequence.of_ops([O1, O3]))


def test_visible_label_must_match():
    poset = LabeledPoset.of([O1, O3], [(O1.id, O3.id)])
    wrong = SpecSequence.of_ops([O1, O3], values={O3.id: 0})
    assert not poset_refines(poset, wrong)
    assert poset_refines(hide_return_values(poset, {O1.id}), wrong)


def test_operation_set_mismatch():
    with pytest.raises(ValueError):
        poset_refines(LabeledPoset.of([O1], []), SpecSequence.of_ops([O1, O2]))


def test_hide_return_values():
    poset = LabeledPoset.of([O1, O3], [(O1.id, O3.id)])
    assert hide_return_values(poset, {O1.id, O3.id}) == poset
    hidden = hide_return_values(poset, set())
    assert hidden.labels[O3.id].hidden
    assert hidden.labels[O1.id] == poset.labels[O1.id]
    assert hidden.order == poset.order


def test_label_str():
    assert str(Label.read("x")) == "rd(x,?)"
    assert str(Label.write("x", 3)) == "wr(x,3)"
