import json

import pytest

from crprolong.cli import RunConfig
from crprolong.errors import InputError


def test_check_structure_standard(cli_run):
    code, out, _ = cli_run(["check-structure", "std2.json"])
    assert code == 0
    assert "involution: ExactZero" in out


def test_check_structure_star_constraints(cli_run):
    code, out, _ = cli_run(["check-structure", "star-valid.json"])
    assert code == 0
    for name in ("J1[1]", "J2[1]", "J3", "J4"):
        assert f"{name}: ExactZero" in out


def test_check_structure_failure_lists_witnesses(cli_run):
    code, out, _ = cli_run(["check-structure", "perturbed.json"])
    assert code == 1
    assert "involution: NonZero" in out
    assert "FAILED" in out and "NonZero at (" in out


def test_witness_cap(cli_run):
    code, out, _ = cli_run(["--format", "json", "verify-map", "conjugation.json", "std2.json", "std2.json"])
    data = json.loads(out)
    assert code == 1 and not data["ok"]
    assert 0 < len(data["witnesses"]) <= 10


def test_frame_and_brackets(cli_run):
    code, out, _ = cli_run(["frame", "model3.json"])
    assert code == 0 and out.count("JX - iX: ExactZero") == 2
    code, out, _ = cli_run(["brackets", "std3.json"])
    assert code == 0
    assert "gamma[1,1b] = -2*i" in out and "gamma[2,2b] = -2*i" in out


def test_brackets_flags_vanishing_gamma(cli_run):
    code, out, _ = cli_run(["brackets", "model-degenerate.json"])
    assert code == 0
    assert "diagonal gamma nonzero: no (gamma[1,1b])" in out


def test_brackets_needs_model(cli_run):
    code, _, err = cli_run(["brackets", "star-valid.json"])
    assert code == 2 and "model" in err


def test_levi(cli_run):
    code, out, _ = cli_run(["--format", "json", "levi", "std2.json", "--field", "1"])
    assert code == 0
    assert json.loads(out)["result"]["value"] > 0
    code, _, err = cli_run(["levi", "std2.json", "--field", "2"])
    assert code == 2
    code, _, _ = cli_run(["levi", "std2.json", "--point", "0.1,bad"])
    assert code == 2


def test_levi_off_surface_is_failure(cli_run):
    code, _, err = cli_run(["levi", "std2.json", "--point", "0,1"])
    assert code == 1 and "NotOnSurface" in err


def test_defect_star_example(cli_run):
    code, out, _ = cli_run(["defect", "star-example.json", "--j", "1", "--k", "2"])
    assert code == 0
    assert "defect direction NON-CONSTANT" in out


def test_defect_index_range(cli_run):
    code, _, _ = cli_run(["defect", "star-example.json", "--j", "1", "--k", "3"])
    assert code == 2


def test_identities(cli_run):
    code, out, _ = cli_run(["identities", "--n", "2"])
    assert code == 0
    assert out.count("PASS  ") >= 14
    assert "fails as expected" in out


def test_identities_bound(cli_run):
    code, out, _ = cli_run(["identities", "--bind", "model3.json"])
    assert code == 0 and "(bound)" in out


def test_prolong_report(cli_run):
    code, out, _ = cli_run(["prolong-report"])
    assert code == 0
    assert "axiom used: analytic inversion" in out
    assert "axiom used: first prolongation" in out


def test_prolong_report_degenerate_binding(cli_run):
    code, out, _ = cli_run(["prolong-report", "--bind", "model-degenerate.json"])
    assert code == 1 and "bound to 0" in out


@pytest.mark.parametrize("map_file,code", [("lambda-quarter.json", 0), ("conjugation.json", 1),
                                           ("non-preserving.json", 1)])
def test_verify_map(cli_run, map_file, code):
    got, _, _ = cli_run(["verify-map", map_file, "std2.json", "std2.json"])
    assert got == code


def test_verify_map_dimension_mismatch(cli_run):
    code, _, _ = cli_run(["verify-map", "lambda-quarter.json", "std3.json", "std2.json"])
    assert code == 2


# -- input errors -------------------------------------------------------------

def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


def test_unknown_keys_rejected(cli_run, tmp_path):
    path = _write(tmp_path, "s.json", json.dumps({"n": 2, "kind": "standard", "extra": 1}))
    code, _, err = cli_run(["check-structure", path])
    assert code == 2 and "unknown keys" in err
    path = _write(tmp_path, "m.json", json.dumps({"n": 2, "components": ["z1", "z2"], "bogus": 0}))
    code, _, err = cli_run(["verify-map", path, "std2.json", "std2.json"])
    assert code == 2 and "unknown keys" in err


def test_malformed_json_reports_position(cli_run, tmp_path):
    path = _write(tmp_path, "bad.json", '{"n": 2,\n "kind": }')
    code, _, err = cli_run(["check-structure", path])
    assert code == 2 and "line 2" in err


def test_bad_expression_reports_position(cli_run, tmp_path):
    path = _write(tmp_path, "e.json", json.dumps({"n": 2, "kind": "raw", "entries": {"1,1": "i + * z1"}}))
    code, _, err = cli_run(["check-structure", path])
    assert code == 2 and "[1,1]" in err


@pytest.mark.parametrize("doc", [
    {"n": 1, "kind": "standard"},
    {"n": 2, "kind": "weird"},
    {"n": 2, "kind": "model", "entries": {"Lt4,2": "z1"}},
    {"n": 2, "kind": "model", "entries": {"Lt4,1": "z1*z1"}},
    {"n": 2, "kind": "star", "entries": {"Lt4,1": "z1"}},
    {"n": 2, "kind": "raw", "entries": {"9,1": "z1"}},
    {"n": 2, "kind": "raw", "entries": {"1,1": "z3"}},
])
def test_invalid_structures(cli_run, tmp_path, doc):
    path = _write(tmp_path, "x.json", json.dumps(doc))
    code, _, _ = cli_run(["check-structure", path])
    assert code == 2


def test_missing_file(cli_run):
    code, _, err = cli_run(["check-structure", "/nonexistent/file.json"])
    assert code == 2


def test_argparse_errors_exit_2(cli_run):
    assert cli_run([])[0] == 2
    assert cli_run(["no-such-command"])[0] == 2
    assert cli_run(["defect", "std2.json"])[0] == 2


@pytest.mark.parametrize("flags", [["--tol", "0"], ["--trials", "0"]])
def test_config_validation(cli_run, flags):
    code, _, _ = cli_run(flags + ["check-structure", "std2.json"])
    assert code == 2


def test_run_config_invariants():
    with pytest.raises(InputError):
        RunConfig("x", tol=-1)
    assert RunConfig("x").zero_kw == {"trials": 20, "tol": 1e-9, "seed": 0}


# -- seeds -------------------------------------------------------------------------

def test_env_seed_overrides_flag(cli_run, monkeypatch):
    monkeypatch.setenv("CRPROLONG_SEED", "17")
    code, out, _ = cli_run(["--format", "json", "--seed", "3", "check-structure", "std2.json"])
    assert code == 0 and json.loads(out)["seed"] == 17


def test_env_seed_must_be_integer(cli_run, monkeypatch):
    monkeypatch.setenv("CRPROLONG_SEED", "abc")
    code, _, err = cli_run(["check-structure", "std2.json"])
    assert code == 2 and "CRPROLONG_SEED" in err


def test_seed_changes_witness(cli_run, monkeypatch):
    a = cli_run(["--format", "json", "--seed", "1", "check-structure", "perturbed.json"])[1]
    b = cli_run(["--format", "json", "--seed", "2", "check-structure", "perturbed.json"])[1]
    assert json.loads(a)["witnesses"] != json.loads(b)["witnesses"]
    monkeypatch.setenv("CRPROLONG_SEED", "1")
    c = cli_run(["--format", "json", "--seed", "2", "check-structure", "perturbed.json"])[1]
    assert c == a
