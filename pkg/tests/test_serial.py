"""Instance files: canonical text, roundtrips and error reporting."""

from __future__ import annotations

import json

import pytest

from conftest import INSTANCES
from quantale_kit.corpus import enumerate_glocales, find_groupoid, groupoid_corpus
from quantale_kit.groupoid import EquivariantMap, identity_equivariant, self_action, terminal_glocale
from quantale_kit.qmodule import module_of_glocale
from quantale_kit.quantale import opens_quantale
from quantale_kit.serial import InputError, InvalidInstance, dumps, load, loads, save

VALID = [
    "z2.groupoid", "pair2.groupoid", "empty.groupoid", "point.groupoid", "z2-indiscrete.groupoid",
    "z2-swap.glocale", "point-sierpinski.glocale", "z2-swap.qlocale", "z2-self.qlocale",
    "z2-swap-to-self.hom",
]


def roundtrip(kind, value):
    text = dumps(kind, value)
    again = dumps(kind, loads(text).value)
    return text, again


@pytest.mark.parametrize("name", VALID)
def test_instance_files_load_and_roundtrip(name):
    inst = load(INSTANCES / name)
    assert inst.kind == name.rsplit(".", 1)[1]
    text, again = roundtrip(inst.kind, inst.value)
    assert text == again


def test_canonical_text_is_stable_under_reordering():
    doc = json.loads((INSTANCES / "z2.groupoid").read_text())
    doc["payload"]["m"].reverse()
    doc["payload"]["arrows"]["opens"].reverse()
    a = dumps("groupoid", loads(json.dumps(doc)).value)
    b = dumps("groupoid", load(INSTANCES / "z2.groupoid").value)
    assert a == b


def test_corpus_roundtrips_for_every_kind():
    count = 0
    for G in groupoid_corpus(3, 2):
        if not G.objects.points:
            continue
        Q = opens_quantale(G)
        assert roundtrip("groupoid", G)[0] == roundtrip("groupoid", G)[1]
        for A in enumerate_glocales(G, 2):
            for kind, value in (
                ("glocale", A),
                ("qlocale", module_of_glocale(G, A, Q)),
                ("hom", identity_equivariant(A)),
            ):
                text, again = roundtrip(kind, value)
                assert text == again, (G.name, A.name, kind)
                count += 1
    assert count > 50


def test_hom_to_terminal_roundtrips(pair2):
    S, T = self_action(pair2), terminal_glocale(pair2)
    f = EquivariantMap(S, T, pair2.d.as_dict())
    text, again = roundtrip("hom", f)
    assert text == again


def test_save_then_load(tmp_path, z2_swap_module):
    path = tmp_path / "swap.qlocale"
    save(path, "qlocale", z2_swap_module)
    assert load(path).value == z2_swap_module


def test_json_syntax_error_reports_position():
    with pytest.raises(InputError) as exc:
        loads('{"kind": "groupoid",\n  "payload": }')
    assert "line 2" in str(exc.value)


def test_missing_field():
    with pytest.raises(InputError) as exc:
        loads('{"kind": "groupoid", "payload": {"objects": {"points": [], "opens": [[]]}}}')
    assert "arrows" in str(exc.value)


def test_unknown_kind():
    with pytest.raises(InputError):
        loads('{"kind": "sheaf", "payload": {}}')


def test_missing_file():
    with pytest.raises(InputError):
        load(INSTANCES / "nope.groupoid")


def test_invalid_instance_is_refused_unless_allowed():
    with pytest.raises(InvalidInstance) as exc:
        load(INSTANCES / "pair2-corrupt.groupoid")
    assert exc.value.verdict.law == "d-compatibility"
    inst = load(INSTANCES / "pair2-corrupt.groupoid", allow_invalid=True)
    assert inst.kind == "groupoid"


def test_groupoid_reference_is_resolved(z2):
    inst = load(INSTANCES / "z2-swap.glocale")
    assert inst.groupoid.comp == z2.comp


def test_self_qlocale_file_is_the_self_module(z2, z2q):
    inst = load(INSTANCES / "z2-self.qlocale")
    assert dumps("qlocale", inst.value) == dumps("qlocale", module_of_glocale(z2, self_action(z2), z2q))


def test_find_named_groupoid_serializes():
    text = dumps("groupoid", find_groupoid("reflection-z2"))
    assert loads(text).value.comp == find_groupoid("reflection-z2").comp
