import json

import pytest

from mpshmm import serialize
from mpshmm.cli import main


def test_catalog_list(capsys):
    assert main(["catalog", "list"]) == 0
    out = capsys.readouterr().out
    assert "cluster" in out and "theta" in out


def test_verify_ghz_passes(capsys):
    assert main(["verify", "theorem1", "--name", "ghz", "--N", "3", "--n", "3,4,5"]) == 0
    out = capsys.readouterr().out
    assert out.count("ok") == 3


def test_verify_failure_exit_code(capsys):
    # a negative tolerance can never be met, exercising the failure path
    assert main(["verify", "theorem1", "--name", "ghz", "--N", "2", "--n", "2", "--tol", "-1"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_decompose_aklt_infeasible(capsys):
    assert main(["decompose", "--name", "aklt"]) == 1
    out = capsys.readouterr().out
    assert "infeasible, site 1, hidden index 1" in out


def test_decompose_cluster_feasible(capsys):
    assert main(["decompose", "--name", "cluster"]) == 0
    assert "reconstruction error" in capsys.readouterr().out


def test_extract_aklt_values(capsys):
    assert main(["extract", "--name", "aklt"]) == 0
    out = capsys.readouterr().out
    assert "0.333333333333" in out and "0.666666666667" in out


def test_entropy_ghz(capsys):
    assert main(["entropy", "--name", "ghz", "--N", "3"]) == 0
    out = capsys.readouterr().out
    assert "0.69314718056" in out
    assert "holds" in out


def test_entropy_json_format(capsys):
    assert main(["entropy", "--name", "ghz", "--N", "2", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "bound_report"
    assert doc["holds"] is True


def test_export_import_round_trip(tmp_path, capsys):
    assert main(["catalog", "export", "cluster", "--dir", str(tmp_path)]) == 0
    capsys.readouterr()
    tensor_file = tmp_path / "cluster.tensors.json"
    model_file = tmp_path / "cluster.model.json"
    assert tensor_file.exists() and model_file.exists()
    original = tensor_file.read_text()
    loaded = serialize.load_tensors(tensor_file)
    assert serialize.dump_json(serialize.tensors_to_dict(loaded)) + "\n" == original
    assert main(["build-mps", "--tensors", str(tensor_file), "--sites", "3"]) == 0
    out = capsys.readouterr().out
    assert "norm: 1" in out


def test_build_mps_writes_state(tmp_path, capsys):
    out_file = tmp_path / "state.json"
    code = main(["build-mps", "--name", "ghz", "--sites", "4", "--out", str(out_file)])
    assert code == 0
    capsys.readouterr()
    doc = json.loads(out_file.read_text())
    assert doc["kind"] == "tensor_vector"
    assert doc["factor_dims"] == [2, 2, 2, 2]


def test_build_ehmm_state_observation(capsys):
    assert main(["build-ehmm-state", "--name", "ghz", "--n", "2", "--which", "on"]) == 0
    out = capsys.readouterr().out
    assert "|00> : 0.5" in out and "|11> : 0.5" in out


def test_theta_entry_through_cli(capsys):
    code = main(
        ["verify", "theorem1", "--name", "theta", "--theta", "1.0471975511965976",
         "--N", "2", "--n", "2,3,4"]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "not unitary" in out  # informational note for this family


def test_unknown_catalog_name_is_usage_error(capsys):
    assert main(["extract", "--name", "w-state"]) == 2
    assert "error:" in capsys.readouterr().err


def test_missing_source_is_usage_error(capsys):
    assert main(["extract"]) == 2
    assert "provide" in capsys.readouterr().err


def test_io_failure_is_usage_error(capsys):
    assert main(["extract", "--tensors", "/no/such/file.json"]) == 2
    assert "error" in capsys.readouterr().err


def test_unknown_command_exits_two():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_size_cap_environment_variable(monkeypatch, capsys):
    monkeypatch.setenv("MPSHMM_SIZE_CAP", "4")
    assert main(["build-mps", "--name", "ghz", "--sites", "3"]) == 2
    assert "size cap" in capsys.readouterr().err


def test_selftest_command(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS criterion") == 9
