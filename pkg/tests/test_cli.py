import json

import numpy as np
import pytest

from boundarystab import SCHEMA_VERSION
from boundarystab.cli import main
from boundarystab.fixtures import FixtureSpec, generate
from boundarystab.sl2 import build_identity
from boundarystab.tensor import Format, group_to_json, random_group_element, tensor_to_json


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def dump(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return p


@pytest.fixture
def identity_file(tmp_path, capsys):
    code, obj = run(capsys, "make", "identity", "--k", "3,1,2")
    assert code == 0
    return dump(tmp_path, "id.json", obj)


def test_make_identity(capsys):
    code, obj = run(capsys, "make", "identity", "--k", "3,1,2")
    assert code == 0
    assert obj["dims"] == [4, 2, 3]
    assert obj["entries"].count("1/1") == 6 and obj["entries"].count("0/1") == 18
    assert obj["expected"]["class"]["value"] == "SL2"


def test_classify_identity(capsys, identity_file):
    code, obj = run(capsys, "classify", identity_file)
    assert code == 0 and obj["dim"] == 3 and obj["class"] == "SL2"


def test_nondegenerate_zero_slice_exact(capsys, tmp_path):
    A = generate(FixtureSpec("zero_slice", Format((2, 1, 1)))).tensor
    code, obj = run(capsys, "nondegenerate", dump(tmp_path, "z.json", tensor_to_json(A)), "--method", "exact")
    assert code == 0 and obj["status"] == "DegenerateExact" and obj["det"] == "0/1"


def test_classify_degenerate_is_precondition(capsys, tmp_path):
    A = generate(FixtureSpec("zero_slice", Format((3, 1, 2)))).tensor
    code, _ = run(capsys, "classify", dump(tmp_path, "z.json", tensor_to_json(A)))
    assert code == 3


def test_malformed_inputs(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["classify", str(bad)]) == 2
    assert main(["classify", str(tmp_path / "missing.json")]) == 2
    wrong = dump(tmp_path, "w.json", {"dims": [3, 3, 2], "field": "rational", "entries": ["1/1"] * 18})
    assert main(["classify", str(wrong)]) == 2  # k0 = 2 != 2 + 1
    short = dump(tmp_path, "s.json", {"dims": [3, 2, 2], "entries": ["1"]})
    assert main(["classify", str(short)]) == 2
    assert main(["make", "identity", "--k", "3,x"]) == 2
    capsys.readouterr()


def test_jumping_strong_and_weak(capsys, identity_file):
    code, obj = run(capsys, "jumping", identity_file, "--mode", "strong", "--restarts", 32)
    assert code == 0 and obj["identity_flag"] and obj["count_distinct"] >= 6
    assert len(obj["direction_loci"]) == 2
    code, obj = run(capsys, "jumping", identity_file, "--mode", "weak", "--slot", 1, "--restarts", 16)
    assert code == 0 and obj["mode"] == "Weak(1)"
    assert main(["jumping", str(identity_file), "--mode", "weak"]) == 2
    capsys.readouterr()


def test_transform(capsys, identity_file):
    code, obj = run(capsys, "transform", identity_file, "--xi", "1,1,1,1", "--slot", 2)
    assert code == 0 and obj["dims"] == [3, 2, 2] and obj["format"] == "(2;1,1)"
    code, _ = run(capsys, "transform", identity_file, "--xi", "1,0,0,1", "--slot", 2)
    assert code == 3
    code, _ = run(capsys, "transform", identity_file, "--xi", "1,1", "--slot", 2)
    assert code == 2


def test_transform_to_reduced_round_trips(capsys, identity_file, tmp_path):
    code, obj = run(capsys, "transform", identity_file, "--xi", "1,1,1,1", "--slot", 1)
    assert code == 0 and obj["reduced"] is True and obj["dims"] == [3, 1, 3]
    code, obj2 = run(capsys, "nondegenerate", dump(tmp_path, "r.json", obj))
    assert code == 0


def test_act_preserves_class(capsys, identity_file, tmp_path):
    g = random_group_element(np.random.default_rng(0), (4, 2, 3))
    gfile = dump(tmp_path, "g.json", group_to_json(g))
    code, obj = run(capsys, "act", identity_file, "--group", gfile)
    assert code == 0
    code, cls = run(capsys, "classify", dump(tmp_path, "ga.json", obj))
    assert code == 0 and cls["class"] == "SL2"
    g2 = random_group_element(np.random.default_rng(0), (3, 2, 2))
    assert main(["act", str(identity_file), "--group", str(dump(tmp_path, "g2.json", group_to_json(g2)))]) == 2
    capsys.readouterr()


def test_report_consistent_and_deterministic(capsys, tmp_path):
    f = dump(tmp_path, "v.json", tensor_to_json(build_identity(Format((2, 1, 1)))))
    code, a = run(capsys, "report", f, "--restarts", 32)
    _, b = run(capsys, "report", f, "--restarts", 32)
    assert code == 0
    assert a["schema_version"] == SCHEMA_VERSION
    assert a["consistency"]["identity_flag_vs_sl2"] == "consistent"
    assert a["digest"].startswith("sha256:")
    a.pop("timings"), b.pop("timings")
    assert a == b
    assert json.loads(json.dumps(a)) == a


def test_report_degenerate_not_applicable(capsys, tmp_path):
    A = generate(FixtureSpec("zero_slice", Format((2, 1, 1)))).tensor
    code, obj = run(capsys, "report", dump(tmp_path, "z.json", tensor_to_json(A)), "--restarts", 16)
    assert code == 0 and obj["consistency"]["identity_flag_vs_sl2"] == "not-applicable"


def test_tensor_json_round_trip(capsys, identity_file, tmp_path):
    obj = json.loads(identity_file.read_text())
    code, out = run(capsys, "act", identity_file, "--group",
                    dump(tmp_path, "e.json", group_to_json(random_group_element(np.random.default_rng(1), (4, 2, 3)))))
    p = dump(tmp_path, "o.json", out)
    code, out2 = run(capsys, "act", p, "--group",
                     dump(tmp_path, "id.json", {"dims": [4, 2, 3], "matrices": [
                         [str(int(i == j)) for i in range(d) for j in range(d)] for d in (4, 2, 3)]}))
    assert out2 == out
    assert set(obj) >= {"dims", "field", "entries"}
