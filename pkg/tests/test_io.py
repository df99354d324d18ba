import json
from fractions import Fraction

import numpy as np
import pytest

from qclone import povm as pv
from qclone.io import (
    BUILTIN_POVMS,
    PovmFileError,
    complex_list,
    dumps_report,
    load_povm,
    number,
    parse_complex_list,
    povm_from_dict,
    povm_to_dict,
    save_povm,
)
from qclone.states import P_SYM


def test_complex_list_round_trip():
    m = np.array([[1, 2j], [-3 + 0.5j, 0]])
    flat = complex_list(m)
    assert flat[1] == [0.0, 2.0]
    assert np.allclose(parse_complex_list(flat, (2, 2)), m)
    nested = [[[1, 0], [0, 2]], [[-3, 0.5], [0, 0]]]
    assert np.allclose(parse_complex_list(nested, (2, 2)), m)
    with pytest.raises(PovmFileError):
        parse_complex_list([[1, 0]], (2, 2))


def test_number_renders_fractions():
    assert number(Fraction(1, 3)) == {"exact": "1/3", "decimal": 1 / 3}
    assert number(np.float64(0.5)) == 0.5 and type(number(np.float64(0.5))) is float
    assert number("x") == "x"


def test_povm_file_round_trip(tmp_path):
    out, _ = pv.six_state_povm()
    path = tmp_path / "six.json"
    save_povm(out, path)
    back = load_povm(path)
    assert back.labels == out.labels and back.support == "symmetric"
    for a, b in zip(back.elements, out.elements):
        assert np.array_equal(a.matrix, b.matrix)
    assert json.loads(path.read_text())["dim"] == 4


@pytest.mark.parametrize("name", BUILTIN_POVMS)
def test_builtin_files_load(name):
    p = load_povm(f"builtin:{name}")
    assert pv.validate_povm(p).ok


def test_builtin_files_match_constructors():
    six = load_povm("builtin:six-state")
    assert np.allclose(six.total(), P_SYM, atol=1e-12)
    tet = load_povm("builtin:tetrahedron")
    assert np.allclose(tet.total(), pv.tetrahedron_povm()[0].total(), atol=1e-12)


@pytest.mark.parametrize("doc,msg", [
    ({"selector": "clone1", "elements": [[[1, 0], [0, 0], [0, 0], [1, 0]]]}, "missing"),
    ({"dim": 4, "selector": "clone1", "elements": [[[1, 0], [0, 0], [0, 0], [1, 0]]]}, "does not match"),
    ({"dim": 2, "selector": "clone1", "support": "odd", "elements": [[[1, 0], [0, 0], [0, 0], [1, 0]]]}, "support"),
    ({"dim": 2, "selector": "clone1", "elements": []}, "non-empty"),
    ({"dim": 2, "selector": "clone1", "elements": [[[1, 0]]]}, "pairs"),
    ({"dim": 2, "selector": "nowhere", "elements": [[[1, 0]]]}, "selector"),
    ({"dim": 2, "selector": "clone1", "labels": ["a", "b"], "elements": [[[1, 0], [0, 0], [0, 0], [1, 0]]]}, "labels"),
])
def test_malformed_documents(doc, msg):
    with pytest.raises(PovmFileError, match=msg):
        povm_from_dict(doc)


def test_load_errors(tmp_path):
    with pytest.raises(PovmFileError):
        load_povm(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(PovmFileError):
        load_povm(bad)
    with pytest.raises(PovmFileError):
        load_povm("builtin:nope")
    assert issubclass(PovmFileError, ValueError)


def test_povm_to_dict_field_order():
    assert list(povm_to_dict(pv.identity_povm())) == ["dim", "selector", "support", "labels", "elements"]


def test_dumps_report_handles_numpy_scalars():
    text = dumps_report({"ok": np.bool_(True), "x": np.float64(0.25), "f": Fraction(1, 2)})
    assert json.loads(text) == {"ok": True, "x": 0.25, "f": {"exact": "1/2", "decimal": 0.5}}
    with pytest.raises(TypeError):
        dumps_report({"bad": object()})
