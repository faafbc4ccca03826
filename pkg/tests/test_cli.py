from __future__ import annotations

import json

import pytest

from involcode.atlas import dump_triangulation, sphere_suspension
from involcode.cli import main
from involcode.equivariant import Involution


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_atlas_entry(capsys):
    code, out, _ = run(capsys, "validate", "sphere_suspension")
    assert code == 0
    assert "verdict           ok" in out
    assert "subdivisions      1" in out


def test_validate_reports_precondition_failures(capsys, tmp_path):
    c, _ = sphere_suspension()
    path = dump_triangulation(c, Involution(tuple(range(8))), tmp_path / "identity.json")
    code, out, _ = run(capsys, "validate", str(path), "--json")
    assert code == 2
    report = json.loads(out)
    assert report["ok"] is False
    assert report["diagnostics"][0].startswith("fixed-point set not isolated")


def test_validate_rejects_broken_files(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"format": ', encoding="utf-8")
    code, _, err = run(capsys, "validate", str(path))
    assert code == 1
    assert "invalid JSON" in err


def test_unknown_input(capsys):
    code, _, err = run(capsys, "extract", "lens_space")
    assert code == 1
    assert "no such file or atlas entry" in err


def test_extract_sphere_json(capsys):
    code, out, _ = run(capsys, "extract", "sphere_suspension", "--json")
    assert code == 0
    report = json.loads(out)
    assert report["schema"] == "involcode-report/1"
    assert report["k"] == 2
    assert report["fixed_vertices"] == [6, 7]
    assert report["code"]["generator"] == ["11"]
    assert report["code"]["weight_enumerator"] == [1, 0, 1]
    assert report["maximality"] == {"maximal": True, "k": 2, "total_dimension": 2, "rank": 1, "b1_w": 1}
    assert report["matched"]["name"] == "repetition2"
    assert "timings" not in report


@pytest.mark.parametrize("entry", ["sphere_suspension", "torus_conjugation"])
def test_extract_is_deterministic(capsys, entry):
    first = run(capsys, "extract", entry, "--json")
    second = run(capsys, "extract", entry, "--json")
    assert first[0] == second[0] == 0
    assert first[1] == second[1]


def test_extract_table_and_timings(capsys):
    code, out, _ = run(capsys, "extract", "sphere_suspension", "--timings")
    assert code == 0
    assert "generator         11" in out
    assert "time regularize" in out


def test_extract_budget_failure(capsys):
    code, _, err = run(capsys, "extract", "sphere_suspension", "--max-subdiv", "0")
    assert code == 2
    assert "regularization failed" in err


def test_negative_extra_subdivisions(capsys):
    code, _, _ = run(capsys, "extract", "sphere_suspension", "--extra-subdiv", "-1")
    assert code == 1


def test_code_enumerator(capsys):
    code, out, _ = run(capsys, "code", "enumerator", "extended_hamming8")
    assert code == 0
    assert out.strip() == "1 + 14z^4 + z^8"


def test_code_equivalence(capsys):
    code, out, _ = run(capsys, "code", "equiv", "1100,0011", "1010,0101")
    assert code == 0
    assert out.startswith("equivalent [")
    _, out, _ = run(capsys, "code", "equiv", "extended_hamming8", "i2^4")
    assert out.strip() == "not equivalent"


def test_code_dual(capsys):
    _, out, _ = run(capsys, "code", "dual", "zero:4")
    assert out.split() == ["1000", "0100", "0010", "0001"]
    _, out, _ = run(capsys, "code", "dual", "full:3")
    assert out.strip() == "(zero code of length 3)"


def test_code_predicates(capsys):
    assert run(capsys, "code", "self-dual", "repetition2")[1].strip() == "self-dual: yes"
    assert run(capsys, "code", "doubly-even", "repetition2")[1].strip() == "doubly-even: no"
    code, out, _ = run(capsys, "code", "self-dual", "i2^2", "--json")
    assert json.loads(out)["verdict"] is True


def test_code_rejects_malformed_generators(capsys):
    code, _, err = run(capsys, "code", "self-dual", "10x")
    assert code == 1
    assert "unknown code name" in err


def test_code_enumerate(capsys):
    code, out, _ = run(capsys, "code", "enumerate", "8", "--json")
    assert code == 0
    report = json.loads(out)
    assert len(report["codes"]) == 2
    assert sum(c["doubly_even"] for c in report["codes"]) == 1
    code, _, _ = run(capsys, "code", "enumerate", "7")
    assert code == 1


def test_atlas_list(capsys):
    code, out, _ = run(capsys, "atlas", "list")
    assert code == 0
    assert "sphere_suspension" in out
    assert "torus_conjugation" in out
    report = json.loads(run(capsys, "atlas", "list", "--json")[1])
    assert [e["name"] for e in report["entries"]] == ["sphere_suspension", "torus_conjugation"]


def test_atlas_emit_then_validate(capsys, tmp_path):
    target = tmp_path / "sphere.json"
    code, out, _ = run(capsys, "atlas", "emit", "sphere_suspension", str(target))
    assert code == 0
    assert out.strip() == str(target)
    assert run(capsys, "validate", str(target))[0] == 0


def test_atlas_emit_failures(capsys, tmp_path):
    assert run(capsys, "atlas", "emit", "sphere_suspension", str(tmp_path / "no" / "x.json"))[0] == 1
    assert run(capsys, "atlas", "emit", "lens_space", str(tmp_path / "x.json"))[0] == 1


@pytest.mark.parametrize("argv", [[], ["code"], ["extract"], ["validate", "x", "--max-subdiv", "many"]])
def test_usage_errors_exit_with_input_code(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 1


def test_audit_log_records_the_command(capsys, tmp_path):
    audit = tmp_path / "audit.jsonl"
    run(capsys, "code", "dual", "repetition2", "--audit-log", str(audit))
    events = [json.loads(line) for line in audit.read_text(encoding="utf-8").splitlines()]
    done = [e for e in events if e["event"] == "command_done"]
    assert done and done[-1]["command"] == "code"
    assert done[-1]["exit_code"] == 0


def test_audit_log_records_failures(capsys, tmp_path):
    audit = tmp_path / "audit.jsonl"
    run(capsys, "extract", "lens_space", "--audit-log", str(audit))
    events = [json.loads(line) for line in audit.read_text(encoding="utf-8").splitlines()]
    failed = [e for e in events if e["event"] == "command_failed"]
    assert failed[-1]["exit_code"] == 1
    assert failed[-1]["kind"] == "InputError"


def test_extract_torus_json(capsys):
    code, out, _ = run(capsys, "extract", "torus_conjugation", "--json")
    assert code == 0
    report = json.loads(out)
    assert report["k"] == 8
    assert report["code"]["doubly_even"] is True
    assert report["code"]["self_dual"] is True
    assert report["matched"]["name"] == "extended_hamming8"
    assert report["maximality"]["maximal"] is True
