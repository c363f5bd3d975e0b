import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lipsel import io as lio
from lipsel.cli import BAD_INPUT, CAPPED, COMMANDS, EMPTY_RESULT, OK, run
from lipsel.lab import counterexample_m1, quasimetric_grid, random_instance, restriction_scan
from lipsel.metric import MetricError

seeds = st.integers(0, 10**6)


def call(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out=out, err=err)
    text = out.getvalue()
    return code, (json.loads(text) if text else None), err.getvalue()


@pytest.fixture
def m1_file(tmp_path):
    p = tmp_path / "m1.json"
    p.write_text(lio.serialize_instance(counterexample_m1(2)))
    return str(p)


def write(tmp_path, doc, name="doc.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def base_doc():
    return {
        "dimension": 2,
        "m": 1,
        "norm": {"kind": "linf"},
        "points": ["a", "b"],
        "metric": {"matrix": [["0", "1"], ["1", "0"]]},
        "sets": {"a": [["0", "0"], ["1", "0"]], "b": [["2", "0"]]},
    }


# ---------------------------------------------------------------------------
# documents


@given(seeds, st.sampled_from(["points", "tree"]), st.sampled_from(["linf", "l1"]))
def test_serialization_idempotent(seed, metric, norm):
    inst = random_instance(seed, 4, 2, 1, metric=metric, norm=norm)
    text = lio.serialize_instance(inst)
    again = lio.parse_instance(text.encode())
    assert again == inst
    assert lio.serialize_instance(again) == text


def test_dissimilarity_round_trip():
    inst = quasimetric_grid(3, 4)
    text = lio.serialize_instance(inst)
    assert '"dissimilarity"' in text
    assert lio.serialize_instance(lio.parse_instance(text)) == text


def test_tree_payload_and_ball_norm():
    doc = base_doc()
    doc["points"] = ["a", "b", "c"]
    doc["metric"] = {"tree": [["a", "b", "1/2"], ["b", "c", "3"]]}
    doc["sets"]["c"] = [["0", "1"]]
    doc["norm"] = {"kind": "ball_vrep", "vertices": [["1", "1"], ["-1", "-1"], ["1", "-1"], ["-1", "1"]]}
    inst = lio.instance_from_doc(doc)
    assert inst.space.d("a", "c") == Fraction(7, 2)
    assert inst.norm.gauge((3, -1)) == 3


def test_emitted_counterexample_scans_like_in_memory():
    inst = counterexample_m1(2)
    parsed = lio.parse_instance(lio.serialize_instance(inst).encode())
    assert restriction_scan(parsed, 3) == restriction_scan(inst, 3)


@pytest.mark.parametrize(
    "mutate, path",
    [
        (lambda d: d["metric"]["matrix"][0].__setitem__(1, "1/0"), "$.metric.matrix[0][1]"),
        (lambda d: d["sets"].pop("b"), "$.sets.b"),
        (lambda d: d["sets"]["a"][0].__setitem__(0, "inf"), "$.sets.a[0][0]"),
        (lambda d: d.pop("norm"), "$.norm"),
        (lambda d: d["norm"].__setitem__("kind", "l2"), "$.norm.kind"),
        (lambda d: d["sets"]["a"].__setitem__(0, ["1"]), "$.sets.a[0]"),
    ],
)
def test_schema_errors_carry_paths(mutate, path):
    doc = base_doc()
    mutate(doc)
    with pytest.raises(lio.SchemaError) as exc:
        lio.instance_from_doc(doc)
    assert exc.value.path == path


def test_inf_allowed_in_matrix():
    doc = base_doc()
    doc["metric"]["matrix"] = [["0", "inf"], ["inf", "0"]]
    assert lio.instance_from_doc(doc).space.d("a", "b") is lio.INF


def test_float_literals_rejected():
    with pytest.raises(lio.SchemaError):
        lio.parse_instance(b'{"dimension": 2.0}')


def test_metric_errors_forwarded():
    doc = base_doc()
    doc["points"] = ["a", "b", "c"]
    doc["metric"]["matrix"] = [["0", "1", "3"], ["1", "0", "1"], ["3", "1", "0"]]
    doc["sets"]["c"] = [["0", "0"]]
    with pytest.raises(MetricError):
        lio.instance_from_doc(doc)


# ---------------------------------------------------------------------------
# command line


def test_every_subcommand_is_registered():
    assert set(COMMANDS) == {
        "validate", "solve", "scan", "gamma", "orbit", "tree", "cover",
        "whitney", "patch-demo", "counterexample", "selector",
    }


def test_solve_and_scan(m1_file):
    code, doc, _ = call(["solve", m1_file])
    assert code == OK and Fraction(doc["lambda_star"]) >= 2
    code, doc, _ = call(["scan", m1_file, "--N", "3"])
    assert code == OK and Fraction(doc["local"]) <= 1
    code, doc, _ = call(["solve", m1_file, "--lambda", "1"])
    assert code == EMPTY_RESULT and doc["feasible"] is False


def test_validate(m1_file, tmp_path):
    code, doc, _ = call(["validate", m1_file])
    assert code == OK and doc["valid"] and doc["points"] == 4
    bad = base_doc()
    bad["points"] = ["a", "b", "c"]
    bad["metric"]["matrix"] = [["0", "1", "3"], ["1", "0", "1"], ["3", "1", "0"]]
    bad["sets"]["c"] = [["0", "0"]]
    code, doc, err = call(["validate", write(tmp_path, bad)])
    assert code == BAD_INPUT and doc["kind"] == "triangle" and err


def test_gamma_orbit(m1_file):
    code, doc, _ = call(["gamma", m1_file, "--lambda", "1", "--point", "u2", "--subset", "u1"])
    assert code == OK and doc["affine_dim"] == 1
    code, doc, _ = call(["gamma", m1_file, "--lambda", "1", "--point", "u2", "--ell", "1"])
    assert code == EMPTY_RESULT and doc["empty"]
    code, doc, _ = call(["orbit", m1_file, "--lambda", "2", "--point", "u2"])
    assert code == OK and doc["vertices"] == [["2", "1/2"]]


def test_caps(m1_file):
    code, doc, _ = call(["scan", m1_file, "--N", "2", "--cap", "2"])
    assert code == CAPPED and doc["required"] == 6


def test_tree_cover_whitney(m1_file):
    code, doc, _ = call(["tree", m1_file])
    assert code == OK and Fraction(doc["distortion"]) <= doc["theta"]
    code, doc, _ = call(["cover", "--seed", "3", "--nodes", "10", "--scale", "2"])
    assert code == OK and doc["verified"] and doc["construction"] == "tree"
    code, doc, _ = call(["whitney", "--seed", "1", "--nodes", "6"])
    assert code == OK and doc["sums_to_one"]


def test_patch_demo_and_counterexample():
    code, doc, _ = call(["patch-demo", "--seed", "2"])
    assert code == OK and doc["inside"]
    code, doc, _ = call(["counterexample", "--kind", "m2", "--lambda", "1"])
    assert code == OK and len(doc["points"]) == 8
    code, doc, _ = call(["counterexample", "--kind", "quasimetric", "--N", "3", "--n", "4"])
    assert code == OK and "dissimilarity" in doc["metric"]


def test_selector(tmp_path):
    f = write(tmp_path, {"dimension": 2, "vertices": [["0", "0"], ["2", "0"], ["0", "2"]]})
    code, doc, _ = call(["selector", f, "--kind", "rect"])
    assert doc["point"] == ["1", "1"] and doc["inside"]
    code, doc, _ = call(["selector", f, "--kind", "centroid"])
    assert code == OK and doc["inside"]
    code, doc, _ = call(["selector", f, "--kind", "regularity"])
    assert code == OK and Fraction(doc["value"]) >= 1
    code, doc, _ = call(["selector", f, "--kind", "steiner"])
    assert code == OK and len(doc["point"]) == 2


def test_usage_errors(m1_file):
    code, doc, err = call(["frobnicate"])
    assert code == BAD_INPUT and "usage" in err
    code, doc, err = call(["solve", m1_file, "--bogus"])
    assert code == BAD_INPUT and "usage" in err
    code, doc, err = call(["gamma", m1_file, "--point", "u1"])
    assert code == BAD_INPUT


def test_deterministic_output(m1_file):
    first = call(["scan", m1_file, "--N", "3"])
    assert call(["scan", m1_file, "--N", "3"]) == first


def test_module_entry_point(m1_file):
    proc = subprocess.run([sys.executable, "-m", "lipsel", "solve", m1_file], capture_output=True, text=True)
    assert proc.returncode == 0 and '"lambda_star"' in proc.stdout
