import json
import subprocess
import sys
from fractions import Fraction

import pytest

from weylcurv.cli import main
from weylcurv.curvature import CurvatureModel, classify, sigma
from weylcurv.serialization import doc_to_jet, doc_to_model, dumps, model_to_doc, parse_sparse
from weylcurv.tensor_core import InnerProduct, zeros


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write(path, doc):
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return path


def zero_model(n=3):
    return {"format_version": "1", "dim": n, "signature": [n, 0], "A": []}


def sigma_model(n=3):
    h = InnerProduct.from_signature(n - 1, 1)
    psi = zeros((n, n))
    psi[0, 1], psi[1, 0] = 2, -2
    return model_to_doc(CurvatureModel(h, sigma(psi, h)))


class TestClassify:
    def test_zero(self, capsys, tmp_path):
        code, out, _ = run(capsys, "classify", write(tmp_path / "m.json", zero_model()))
        doc = json.loads(out)
        assert code == 0 and doc["in_A"] and doc["class"] == "A"
        assert doc["residuals"]["eq_1b"] == "0"

    def test_sigma(self, capsys, tmp_path):
        code, out, _ = run(capsys, "classify", write(tmp_path / "m.json", sigma_model()))
        doc = json.loads(out)
        assert code == 0 and doc["in_W"] and not doc["in_A"] and doc["class"] == "W"
        assert doc["residuals"]["eq_1e"] != "0"

    def test_not_generalized(self, capsys, tmp_path):
        doc = {**zero_model(2), "A": [[1, 1, 2, 2, "1"]]}
        code, out, _ = run(capsys, "classify", write(tmp_path / "m.json", doc))
        report = json.loads(out)
        assert code == 1 and report["violated"] == "1.b" and report["residuals"]["eq_1b"] == "2"
        assert report["violated_at"] == [1, 1, 2, 2]

    def test_bad_rational(self, capsys, tmp_path):
        doc = {**zero_model(2), "A": [[1, 2, 1, 2, "1/0"]]}
        code, _, err = run(capsys, "classify", write(tmp_path / "m.json", doc))
        assert code == 2 and "A[0]" in err

    def test_bad_json(self, capsys, tmp_path):
        code, _, err = run(capsys, "classify", write(tmp_path / "m.json", '{"dim": 2,,}'))
        assert code == 2 and "line 1" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, _ = run(capsys, "classify", tmp_path / "nope.json")
        assert code == 2

    def test_degenerate(self, capsys, tmp_path):
        doc = {"format_version": "1", "dim": 2, "h": [["1", "2"], ["2", "4"]], "A": []}
        code, _, err = run(capsys, "classify", write(tmp_path / "m.json", doc))
        assert code == 3 and "degenerate" in err

    def test_out_file(self, capsys, tmp_path):
        out = tmp_path / "r.json"
        code, stdout, _ = run(capsys, "classify", write(tmp_path / "m.json", zero_model()), "--out", out)
        assert code == 0 and stdout == "" and json.loads(out.read_text())["in_A"]


class TestDecompose:
    def test_algebraic(self, capsys, tmp_path):
        run(capsys, "gen", "--class", "A", "--dim", 3, "--seed", 1, "--out", tmp_path / "m.json")
        code, out, _ = run(capsys, "decompose", tmp_path / "m.json")
        doc = json.loads(out)
        assert code == 0 and doc["psi"] == [] and doc["A1"]

    def test_sigma(self, capsys, tmp_path):
        code, out, _ = run(capsys, "decompose", write(tmp_path / "m.json", sigma_model()))
        doc = json.loads(out)
        assert code == 0 and doc["A1"] == [] and doc["psi"] == [[1, 2, "2"], [2, 1, "-2"]]

    def test_round_trip(self, capsys, tmp_path):
        run(capsys, "gen", "--class", "W", "--signature", "2,1", "--seed", 4, "--out", tmp_path / "m.json")
        model = doc_to_model(json.loads((tmp_path / "m.json").read_text()))
        code, out, _ = run(capsys, "decompose", tmp_path / "m.json")
        doc = json.loads(out)
        A1 = parse_sparse(doc["A1"], 3, 4, "A1")
        psi = parse_sparse(doc["psi"], 3, 2, "psi")
        assert code == 0 and (A1 + sigma(psi, model.h) == model.A).all()

    def test_not_weyl(self, capsys, tmp_path):
        doc = {**zero_model(2), "A": [[1, 2, 1, 1, "1"], [2, 1, 1, 1, "-1"]]}
        code, out, _ = run(capsys, "decompose", write(tmp_path / "m.json", doc))
        assert code == 1 and json.loads(out)["violated"] in ("1.c", "1.d")


class TestRealizeVerify:
    def test_algebraic_to_weyl_has_empty_phi(self, capsys, tmp_path):
        run(capsys, "gen", "--class", "A", "--dim", 3, "--seed", 2, "--out", tmp_path / "m.json")
        code, out, _ = run(capsys, "realize", tmp_path / "m.json", "--target", "weyl")
        assert code == 0 and json.loads(out)["phi"] == []

    @pytest.mark.parametrize("target", ["weyl", "riemann", "affine"])
    def test_realize_then_verify(self, capsys, tmp_path, target):
        cls = {"weyl": "W", "riemann": "A", "affine": "R"}[target]
        run(capsys, "gen", "--class", cls, "--signature", "3,1", "--seed", 5, "--out", tmp_path / "m.json")
        code, _, _ = run(capsys, "realize", tmp_path / "m.json", "--target", target, "--out", tmp_path / "j.json")
        assert code == 0
        code, out, _ = run(capsys, "verify", "--jet", tmp_path / "j.json")
        report = json.loads(out)
        assert code == 0 and report["success"] and report["violated"] is None

    def test_affine_rejects_non_bianchi(self, capsys, tmp_path):
        doc = {**zero_model(3), "A": [[1, 2, 3, 1, "1"], [2, 1, 3, 1, "-1"]]}
        code, out, err = run(capsys, "realize", write(tmp_path / "m.json", doc), "--target", "affine")
        assert code == 1 and json.loads(out)["required_class"] == "R" and "class R" in err

    def test_riemann_rejects_sigma(self, capsys, tmp_path):
        code, out, _ = run(capsys, "realize", write(tmp_path / "m.json", sigma_model()), "--target", "riemann")
        assert code == 1 and json.loads(out)["violated"] == "1.e"

    def test_tampered_connection(self, capsys, tmp_path):
        run(capsys, "gen", "--class", "W", "--dim", 3, "--seed", 6, "--out", tmp_path / "m.json")
        run(capsys, "realize", tmp_path / "m.json", "--out", tmp_path / "j.json")
        jet = json.loads((tmp_path / "j.json").read_text())
        # an entry with distinct derivative and first slot moves the curvature
        row = next(r for r in jet["connection"] if r[0] != r[1])
        row[-1] = str(Fraction(row[-1]) + 1)
        code, out, _ = run(capsys, "verify", "--jet", write(tmp_path / "bad.json", jet))
        report = json.loads(out)
        assert code == 1 and not report["success"] and report["max_abs_difference"] != "0"

    def test_empty_jet_zero_model(self, capsys, tmp_path):
        jet = {"format_version": "1", "dim": 2, "signature": [1, 1], "model": zero_model(2) | {"signature": [1, 1]}}
        code, out, _ = run(capsys, "verify", "--jet", write(tmp_path / "j.json", jet))
        assert code == 0 and json.loads(out)["success"]

    def test_jet_without_model(self, capsys, tmp_path):
        jet = {"format_version": "1", "dim": 2, "signature": [2, 0]}
        code, _, _ = run(capsys, "verify", "--jet", write(tmp_path / "j.json", jet))
        assert code == 2

    def test_verify_parse_error(self, capsys, tmp_path):
        code, _, _ = run(capsys, "verify", "--jet", write(tmp_path / "j.json", "{"))
        assert code == 2


class TestGen:
    @pytest.mark.parametrize("cls, attr", [("A", "in_A"), ("W", "in_W"), ("R", "in_R")])
    def test_class(self, capsys, cls, attr):
        code, out, _ = run(capsys, "gen", "--class", cls, "--dim", 4, "--signature", "3,1", "--seed", 7)
        model = doc_to_model(json.loads(out))
        assert code == 0 and getattr(classify(model.A, model.h), attr)

    @pytest.mark.parametrize("sig", ["3,1", "x", "1,0", "-1,3"])
    def test_invalid_signature(self, capsys, sig):
        code, _, _ = run(capsys, "gen", "--class", "A", "--dim", 3, "--signature", sig)
        assert code == 2

    def test_deterministic(self, capsys):
        a = run(capsys, "gen", "--class", "W", "--dim", 4, "--seed", 11)[1]
        b = run(capsys, "gen", "--class", "W", "--dim", 4, "--seed", 11)[1]
        c = run(capsys, "gen", "--class", "W", "--dim", 4, "--seed", 12)[1]
        assert a == b != c

    def test_usage(self, capsys):
        assert run(capsys, "gen", "--class", "Q", "--dim", 3)[0] == 2


class TestGauge:
    def realized(self, capsys, tmp_path):
        run(capsys, "gen", "--class", "W", "--signature", "2,1", "--seed", 3, "--out", tmp_path / "m.json")
        run(capsys, "realize", tmp_path / "m.json", "--out", tmp_path / "j.json")
        return tmp_path / "j.json"

    def test_identity(self, capsys, tmp_path):
        jet = self.realized(capsys, tmp_path)
        code, out, _ = run(capsys, "gauge", "--jet", jet, "--f", '{"dim": 3}')
        assert code == 0 and out == jet.read_text()

    def test_random_f(self, capsys, tmp_path):
        jet = self.realized(capsys, tmp_path)
        f = write(tmp_path / "f.json", {"dim": 3, "linear": [[1, "1/2"], [3, "-1"]],
                                        "quad": [[1, 2, "1"], [2, 1, "1"], [3, 3, "2/3"]]})
        code, _, _ = run(capsys, "gauge", "--jet", jet, "--f", f, "--out", tmp_path / "g.json")
        assert code == 0
        before = json.loads(jet.read_text())
        after = json.loads((tmp_path / "g.json").read_text())
        assert after["connection"] == before["connection"] and "phi_const" in after
        code, out, _ = run(capsys, "verify", "--jet", tmp_path / "g.json")
        assert code == 0 and json.loads(out)["compatibility_max"] == "0"

    def test_dimension_mismatch(self, capsys, tmp_path):
        jet = self.realized(capsys, tmp_path)
        code, _, err = run(capsys, "gauge", "--jet", jet, "--f", '{"dim": 2}')
        assert code == 2 and "dimension" in err

    def test_asymmetric_quad(self, capsys, tmp_path):
        jet = self.realized(capsys, tmp_path)
        code, _, _ = run(capsys, "gauge", "--jet", jet, "--f", '{"dim": 3, "quad": [[1, 2, "1"]]}')
        assert code == 2


def test_pipeline_is_deterministic(capsys, tmp_path):
    outputs = []
    for trial in range(2):
        d = tmp_path / str(trial)
        d.mkdir()
        run(capsys, "gen", "--class", "W", "--dim", 3, "--seed", 9, "--out", d / "m.json")
        run(capsys, "realize", d / "m.json", "--out", d / "j.json")
        outputs.append([(d / name).read_bytes() for name in ("m.json", "j.json")])
    assert outputs[0] == outputs[1]
    jet = doc_to_jet(json.loads(outputs[0][1]))
    assert dumps(json.loads(outputs[0][1])).encode() == outputs[0][1] and jet.dim == 3


def test_module_entry_point_reads_stdin():
    proc = subprocess.run(
        [sys.executable, "-m", "weylcurv", "classify", "-"],
        input=json.dumps(zero_model(2)), capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["in_A"]
