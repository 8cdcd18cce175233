import io
import json
import subprocess
import sys

import numpy as np
import pytest
from conftest import ISO, XX

from hamsim.cli import main
from hamsim.numerics import random_hermitian
from hamsim.protocol import synthesize, verify_average
from hamsim.serialize import (
    ParseError,
    dumps,
    hamiltonian_from_json,
    hamiltonian_to_json,
    protocol_from_json,
    protocol_to_json,
)


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        p = tmp_path / name
        p.write_text(json.dumps(doc))
        return str(p)

    return {
        "xx": write("xx.json", {"diag": [1, 0, 0]}),
        "iso": write("iso.json", {"pauli": {"M": (np.eye(3) / 3).tolist()}}),
        "local": write("local.json", {"pauli": {"a": [0, 0, 1]}}),
        "rand": write("rand.json", hamiltonian_to_json(random_hermitian(4, 0))),
        "rand2": write("rand2.json", hamiltonian_to_json(random_hermitian(4, 1))),
        "qutrit": write("q.json", hamiltonian_to_json(random_hermitian(9, 2))),
        "qutrit2": write("q2.json", hamiltonian_to_json(random_hermitian(9, 3))),
        "bad": write("bad.json", hamiltonian_to_json(np.triu(np.ones((4, 4))))),
        "two": write("two.json", {"diag": [1, 0, 0], "pauli": {}}),
        "dir": str(tmp_path),
    }


def run(argv, capsys, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


class TestSpecParsing:
    def test_forms_agree(self):
        a, _ = hamiltonian_from_json({"diag": [1, 0, 0]})
        b, _ = hamiltonian_from_json({"pauli": {"M": [[1, 0, 0], [0, 0, 0], [0, 0, 0]]}})
        c, dims = hamiltonian_from_json(hamiltonian_to_json(XX))
        assert np.allclose(a, XX) and np.allclose(b, XX) and np.allclose(c, XX) and dims == (2, 2)

    def test_exactly_one_form(self):
        with pytest.raises(ParseError):
            hamiltonian_from_json({"diag": [1, 0, 0], "pauli": {}})
        with pytest.raises(ParseError):
            hamiltonian_from_json({})

    def test_dims(self):
        _, dims = hamiltonian_from_json({**hamiltonian_to_json(np.eye(6)), "dims": [2, 3]})
        assert dims == (2, 3)


class TestRoundTrip:
    def test_protocol_json(self):
        for seed in range(20):
            prot = synthesize(random_hermitian(4, seed), random_hermitian(4, seed + 50))
            doc = json.loads(dumps(protocol_to_json(prot)))
            back = protocol_from_json(doc)
            assert abs(verify_average(back) - verify_average(prot)) <= 1e-12
            assert [list(st.label) for st in back.steps] == prot.meta["vertices"]

    def test_schema_fields(self):
        doc = protocol_to_json(synthesize(XX, ISO))
        assert set(doc) == {"factor", "steps", "final_local", "meta"}
        assert doc["meta"]["case"] == 1 and len(doc["meta"]["vertices"]) == 3
        assert set(doc["steps"][0]) >= {"p", "U", "V"}
        assert np.asarray(doc["steps"][0]["U"]).shape == (2, 2, 2)


class TestCommands:
    def test_factor(self, files, capsys):
        code, out, _ = run(["factor", "--source", files["xx"], "--target", files["iso"]], capsys)
        assert code == 0 and out.startswith("s = 1.000000, case 1")
        code, out, _ = run(["factor", "--source", files["iso"], "--target", files["xx"]], capsys)
        assert code == 0 and out.startswith("s = 0.333333, case 3")

    def test_factor_json(self, files, capsys):
        _, out, _ = run(["factor", "--source", files["xx"], "--target", files["iso"], "--json"], capsys)
        assert json.loads(out)["factor"] == pytest.approx(1)

    def test_synthesize_then_verify(self, files, capsys, monkeypatch):
        _, proto, _ = run(["synthesize", "--source", files["xx"], "--target", files["iso"]], capsys)
        code, out, _ = run(["verify", "--source", files["xx"]], capsys, proto, monkeypatch)
        assert code == 0 and out.strip().endswith("<= 1e-08: PASS")

    def test_verify_fail_exit(self, files, capsys, monkeypatch):
        _, proto, _ = run(["synthesize", "--source", files["xx"], "--target", files["iso"]], capsys)
        code, out, _ = run(["verify", "--target", files["xx"]], capsys, proto, monkeypatch)
        assert code == 1 and "FAIL" in out

    def test_deterministic_output(self, files, capsys):
        argv = ["synthesize", "--source", files["rand"], "--target", files["rand2"]]
        assert run(argv, capsys)[1] == run(argv, capsys)[1]

    def test_strobe(self, files, capsys):
        argv = ["strobe", "--source", files["xx"], "--target", files["iso"], "--time", "0.1", "--cycles", "100"]
        code, out, _ = run(argv, capsys)
        assert code == 0 and "PASS" in out

    def test_decompose_stdin(self, capsys, monkeypatch):
        code, out, _ = run(["decompose", "--json"], capsys, json.dumps({"diag": [1, 2, 3]}), monkeypatch)
        assert code == 0 and np.allclose(json.loads(out)["M"], np.diag([1, 2, 3]))

    def test_normal_form(self, files, capsys):
        code, out, _ = run(["normal-form", files["rand"], "--json"], capsys)
        assert code == 0 and len(json.loads(out)["h"]) == 3

    def test_check(self, files, capsys):
        assert "yes" in run(["check", "--source", files["xx"], "--target", files["iso"]], capsys)[1]
        assert "no" in run(["check", "--source", files["iso"], "--target", files["xx"]], capsys)[1]

    def test_invert(self, files, capsys):
        code, out, _ = run(["invert", "--source", files["iso"]], capsys)
        assert code == 0 and out.startswith("s = 0.333333") and "PASS" in out
        code, out, _ = run(["invert", "--universal", "--source", files["rand"]], capsys)
        assert code == 0 and "PASS" in out

    def test_decouple(self, files, capsys):
        code, out, _ = run(["decouple", files["rand"]], capsys)
        assert code == 0 and out.startswith("16 steps") and "PASS" in out
        code, out, _ = run(["decouple", files["qutrit"], "--side", "A"], capsys)
        assert code == 0 and out.startswith("9 steps") and "PASS" in out

    def test_baseline(self, files, capsys):
        code, out, _ = run(["baseline", "--source", files["rand"], "--target", files["rand2"]], capsys)
        assert code == 0 and "s_base" in out and "PASS" in out

    def test_generic_ddim(self, files, capsys):
        argv = ["generic-ddim", "--source", files["qutrit"], "--target", files["qutrit2"], "--d", "3", "--seed", "1"]
        code, out, _ = run(argv, capsys)
        assert code == 0 and "PASS" in out

    def test_output_file(self, files, capsys, tmp_path):
        target = tmp_path / "p.json"
        run(["synthesize", "--source", files["xx"], "--target", files["iso"], "-o", str(target)], capsys)
        assert protocol_from_json(json.loads(target.read_text())).s == pytest.approx(1)


class TestExitCodes:
    def test_parse_error(self, capsys, monkeypatch):
        code, _, err = run(["decompose"], capsys, "{not json", monkeypatch)
        assert code == 2 and "invalid JSON" in err

    def test_two_forms(self, files, capsys):
        code, _, err = run(["decompose", files["two"]], capsys)
        assert code == 2 and "exactly one" in err

    def test_missing_option(self, files, capsys):
        assert run(["factor", "--source", files["xx"]], capsys)[0] == 2

    def test_non_hermitian(self, files, capsys):
        code, _, err = run(["decompose", files["bad"]], capsys)
        assert code == 3 and "Hermitian" in err

    def test_local_source(self, files, capsys):
        code, _, err = run(["synthesize", "--source", files["local"], "--target", files["xx"]], capsys)
        assert code == 4 and "local" in err

    def test_missing_file(self, files, capsys):
        assert run(["decompose", files["dir"] + "/nope.json"], capsys)[0] == 2


def test_console_script(files):
    res = subprocess.run(
        [sys.executable, "-m", "hamsim.cli", "factor", "--source", files["xx"], "--target", files["iso"]],
        capture_output=True,
        text=True,
        check=False,
    )
    assert res.returncode == 0 and res.stdout.startswith("s = 1.000000, case 1")
