import json

import numpy as np
import pytest

from narain_lab.__main__ import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from narain_lab.lattice_core import build_lattice
from narain_lab.parabolic_group import ParabolicElement, identity, random_element


@pytest.fixture
def cli(tmp_path, capsys):
    config = str(tmp_path / "config.json")

    def run(*argv):
        code = main([*argv, "--config", config])
        out = capsys.readouterr()
        return code, out.out, out.err
    return run


def _write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_lattice_classify(cli):
    code, out, _ = cli("lattice", "classify", "lo_gamma16")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["even"] and data["unimodular"]
    assert data["signature"] == [2, 18]


def test_lattice_count(cli):
    code, out, _ = cli("lattice", "count", "e8", "--max-norm", "4")
    assert code == EXIT_OK
    assert json.loads(out)["counts"] == {"2": 240, "4": 2160}


def test_theta_qexp(cli):
    code, out, _ = cli("theta", "qexp", "--order", "2", "--lattice", "gamma16")
    assert code == EXIT_OK
    assert out.strip() == "1,480,61920"


def test_character_qexp_with_exponents(cli):
    code, out, _ = cli("theta", "qexp", "--order", "1", "--kind", "character", "--exponents")
    assert code == EXIT_OK
    assert out.splitlines() == ["exponent,coefficient", "-2/3,1", "1/3,496"]


def test_theta_qexp_over_budget(cli):
    code, _, err = cli("theta", "qexp", "--order", "6", "--lattice", "gamma16")
    assert code == EXIT_USAGE
    assert "narain-lab: error" in err


def test_theta_eval(cli):
    code, out, _ = cli("theta", "eval", "--tau", "0.1,1.2", "--lattice", "e8")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["lattice"] == "e8"
    assert len(data["theta"]) == 2


def test_theta_eval_rejects_lower_half_plane(cli):
    code, _, err = cli("theta", "eval", "--tau", "0.1,-1")
    assert code == EXIT_USAGE
    assert "--tau" in err


def test_group_mul(cli, tmp_path):
    lattice = build_lattice("e8e8")
    g = random_element(np.random.default_rng(7), lattice)
    first = _write(tmp_path, "g.json", g.to_dict())
    one = _write(tmp_path, "one.json", identity(lattice).to_dict())
    code, out, _ = cli("group", "mul", first, one)
    assert code == EXIT_OK
    assert ParabolicElement.from_dict(json.loads(out)) == g


def test_group_factor(cli, tmp_path):
    g = random_element(np.random.default_rng(8), build_lattice("gamma16"))
    path = _write(tmp_path, "g.json", g.to_dict())
    code, out, _ = cli("group", "factor", path)
    assert code == EXIT_OK
    assert set(json.loads(out)) == {"t", "w", "s"}


def test_malformed_json(cli, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"m": [[1, 0], [0, 1]],')
    code, _, err = cli("group", "inv", str(path))
    assert code == EXIT_USAGE
    assert str(path) in err


def test_element_missing_keys(cli, tmp_path):
    path = _write(tmp_path, "g.json", {"m": [[1, 0], [0, 1]]})
    code, _, err = cli("group", "alpha", path)
    assert code == EXIT_USAGE
    assert "missing key" in err


def test_narain_gram(cli, tmp_path):
    rng = np.random.default_rng(3)
    wilson = _write(tmp_path, "wilson.json",
                    {"z1": (0.2 * rng.normal(size=16)).tolist(), "z2": (0.2 * rng.normal(size=16)).tolist()})
    code, out, _ = cli("narain", "gram", "--metric", "2,0.3,1.5", "--b", "0.4", "--wilson", wilson)
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["gram_check"]["pass"] and data["period_line"]["pass"]
    assert len(data["gram"]) == 20


def test_narain_bad_metric(cli):
    code, _, _ = cli("narain", "gram", "--metric", "1,0")
    assert code == EXIT_USAGE


@pytest.mark.parametrize("category", ["a", "b"])
def test_family_construct_then_verify(cli, tmp_path, category):
    rng = np.random.default_rng(11)
    psi = _write(tmp_path, "psi.json", {"psi": [[float(x), float(y)] for x, y in rng.random((16, 2))]})
    code, out, _ = cli("family", "construct", "--category", category, "--tau", "0.2,1.1", "--psi", psi,
                       "--branch", "1,2")
    assert code == EXIT_OK
    fam = _write(tmp_path, "family.json", json.loads(out))
    code, out, _ = cli("family", "verify", fam)
    assert code == EXIT_OK
    assert json.loads(out)["pass"]


def test_family_from_wilson_vector(cli, tmp_path):
    z = [[0.1 * k, -0.05 * k] for k in range(16)]
    psi = _write(tmp_path, "z.json", {"z": z})
    code, _, _ = cli("family", "construct", "--category", "b", "--tau", "0,1", "--psi", psi)
    assert code == EXIT_OK


def test_family_verify_detects_broken_family(cli, tmp_path):
    psi = _write(tmp_path, "psi.json", [[0.0, 0.0]] * 16)
    _, out, _ = cli("family", "construct", "--category", "a", "--tau", "0,1", "--psi", psi)
    data = json.loads(out)
    data["points"][3][0] += 0.1
    fam = _write(tmp_path, "family.json", data)
    code, out, _ = cli("family", "verify", fam)
    assert code == EXIT_FAIL
    assert not json.loads(out)["pass"]


def test_verify_all_single_suite(cli):
    code, out, _ = cli("verify-all", "--suite", "eta_anchor")
    assert code == EXIT_OK
    data = json.loads(out)
    assert [s["name"] for s in data["suites"]] == ["eta_anchor"]
    assert data["pass"]


def test_verify_all_small_sweep(cli):
    code, out, _ = cli("verify-all", "--suite", "group_algebra", "--suite", "special_families",
                       "--samples", "4", "--seed", "5", "--lattice", "gamma16")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["config"]["samples"] == 4
    assert data["config"]["lattice"] == "gamma16"
    assert data["lattices"] == ["gamma16"]
    assert [(s["name"], s.get("lattice")) for s in data["suites"]] == [
        ("group_algebra", "gamma16"), ("special_families", None)]


def test_verify_all_sweeps_both_lattices(cli):
    code, out, _ = cli("verify-all", "--suite", "sections", "--samples", "3")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["lattices"] == ["e8e8", "gamma16"]
    assert [s["lattice"] for s in data["suites"]] == ["e8e8", "gamma16"]
    assert all(s["samples"] == 3 for s in data["suites"])


def test_config_init_and_show(cli, tmp_path):
    code, out, _ = cli("config", "init")
    assert code == EXIT_OK
    assert (tmp_path / "config.json").exists()
    code, out, _ = cli("config", "show", "--samples", "9")
    assert json.loads(out)["samples"] == 9
    assert json.loads((tmp_path / "config.json").read_text())["samples"] == 1000


def test_bad_override(cli):
    code, _, _ = cli("config", "show", "--samples", "0")
    assert code == EXIT_USAGE


def test_wrongly_typed_config_is_a_usage_error(tmp_path, capsys):
    config = _write(tmp_path, "config.json", {"samples": "x"})
    code = main(["verify-all", "--suite", "eta_anchor", "--config", config])
    assert code == EXIT_USAGE
    assert "samples" in capsys.readouterr().err
