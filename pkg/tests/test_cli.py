import json
import shutil
import subprocess
import sys

import pytest

from qtrace.cli import data_path, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestExpand:
    def test_eisenstein_coefficient_count(self, capsys):
        code, out, _ = run(capsys, "expand", "eisenstein", "--k", "1", "--order", "3")
        doc = json.loads(out)
        assert code == 0 and len(doc["coefficients"]) == 4

    def test_eisenstein_csv(self, capsys):
        code, out, _ = run(capsys, "expand", "eisenstein", "--k", "2", "--order", "2", "--csv")
        assert code == 0 and len(out.strip().splitlines()) == 4

    def test_wp(self, capsys):
        code, out, _ = run(capsys, "expand", "wp", "--m", "2", "--zorder", "4", "--qorder", "2")
        doc = json.loads(out)
        assert code == 0 and doc["params"]["weight"] == 2 and doc["series"]["terms"]


class TestVerify:
    def test_recursion(self, capsys):
        code, out, _ = run(capsys, "verify", "elliptic", "--suite", "recursion", "--m", "3")
        assert code == 0 and json.loads(out)["passed"]

    def test_relation(self, capsys):
        assert run(capsys, "verify", "elliptic", "--suite", "relation")[0] == 0

    def test_modular_suite_with_samples(self, capsys):
        code, _, _ = run(capsys, "verify", "elliptic", "--suite", "modular", "--samples",
                         data_path("samples_elliptic.json"))
        assert code == 0

    @pytest.mark.parametrize("suite", ["group", "covariance", "invariance"])
    def test_modular_action(self, capsys, suite):
        code, out, _ = run(capsys, "verify", "modular-action", "--suite", suite, "--system",
                           data_path("system_first_order_n1.json"))
        assert code == 0, out

    def test_falsified_system_fails(self, capsys):
        code, out, _ = run(capsys, "verify", "modular-action", "--suite", "invariance", "--system",
                           data_path("system_falsified_weight.json"))
        assert code == 1 and not json.loads(out)["passed"]

    def test_checks_sorted_by_id(self, capsys):
        _, out, _ = run(capsys, "verify", "elliptic", "--suite", "recursion")
        names = [c["name"] for c in json.loads(out)["checks"]]
        assert names == sorted(names)


class TestPseudotrace:
    def args(self, op):
        return ("pseudotrace", "--algebra", data_path("algebra_dual_numbers.json"),
                "--module", data_path("module_dual_regular.json"),
                "--phi", data_path("phi_dual_eps.json"), "--op", data_path(op))

    def test_value(self, capsys):
        code, out, _ = run(capsys, *self.args("op_dual_3_plus_5eps.json"))
        assert code == 0 and json.loads(out)["value"] == "5"

    def test_non_equivariant_names_basis_element(self, capsys):
        code, _, err = run(capsys, *self.args("op_dual_not_equivariant.json"))
        assert code == 2 and "e_1" in err

    def test_qtrace(self, capsys):
        code, out, _ = run(capsys, "qtrace", "--space", data_path("space_dual_log.json"),
                           "--phi", data_path("phi_dual_eps.json"))
        terms = json.loads(out)["series"]["terms"]
        assert code == 0 and [(t["exp"], t["log"]) for t in terms] == [("3/2", 1)]


class TestErrors:
    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "qtrace", "--space", str(tmp_path / "nope.json"),
                           "--phi", data_path("phi_dual_eps.json"))
        assert code == 2 and err

    def test_malformed_json(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, _ = run(capsys, "verify", "modular-action", "--suite", "invariance", "--system", str(bad))
        assert code == 2

    def test_unknown_subcommand(self, capsys):
        assert run(capsys, "frobnicate")[0] == 2


class TestManifests:
    @pytest.mark.parametrize("argv", [
        ("expand", "wp", "--m", "3", "--zorder", "5", "--qorder", "3"),
        ("verify", "elliptic", "--suite", "relation", "--m", "2"),
        ("pseudotrace", "--algebra", data_path("algebra_dual_numbers.json"),
         "--module", data_path("module_dual_regular.json"), "--phi", data_path("phi_dual_eps.json"),
         "--op", data_path("op_dual_3_plus_5eps.json")),
    ])
    def test_rerun_is_byte_identical(self, capsys, tmp_path, argv):
        out, man = tmp_path / "out.json", tmp_path / "run.json"
        assert run(capsys, *argv, "--out", str(out), "--manifest", str(man))[0] == 0
        manifest = json.loads(man.read_text())
        assert "--out" not in manifest["argv"] and manifest["output_sha256"]
        code, text, _ = run(capsys, "rerun", str(man), "--check")
        assert code == 0 and json.loads(text)["reproduced"]
        code, text, _ = run(capsys, "rerun", str(man))
        assert text == out.read_text()

    def test_manifest_inlines_inputs(self, capsys, tmp_path):
        man = tmp_path / "run.json"
        run(capsys, "qtrace", "--space", data_path("space_dual_log.json"),
            "--phi", data_path("phi_dual_eps.json"), "--manifest", str(man))
        inputs = json.loads(man.read_text())["inputs"]
        assert set(inputs) == {"space", "phi"}

    def test_tampered_manifest_not_reproduced(self, capsys, tmp_path):
        man = tmp_path / "run.json"
        run(capsys, "expand", "eisenstein", "--k", "1", "--order", "2", "--manifest", str(man))
        doc = json.loads(man.read_text())
        doc["output_sha256"] = "0" * 64
        man.write_text(json.dumps(doc))
        assert run(capsys, "rerun", str(man), "--check")[0] == 1


@pytest.mark.skipif(shutil.which("qtrace") is None, reason="console script not installed")
def test_console_script():
    r = subprocess.run(["qtrace", "expand", "eisenstein", "--k", "1", "--order", "1"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["coefficients"]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "qtrace.cli", "expand", "eisenstein", "--k", "0",
                        "--order", "1"], capture_output=True, text=True)
    assert r.returncode == 0
