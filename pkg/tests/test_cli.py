from pathlib import Path

import pytest

from fermlap.cli import coo_text, main, parse_range
from fermlap.config import ConfigError, ProblemSpec, parse_config
from fermlap.pauli import loads

GOLDEN = Path(__file__).parent / "golden"


def check_golden(produced: Path, name: str, regen: bool):
    golden = GOLDEN / name
    if regen:
        golden.parent.mkdir(parents=True, exist_ok=True)
        golden.write_text(produced.read_text())
        pytest.skip(f"regenerated {name}")
    assert produced.read_text() == golden.read_text()


@pytest.mark.parametrize(
    "args, tag",
    [
        (["--A", "2", "--n", "2", "--D", "1", "--mode", "inline"], "inline_2_2_1"),
        (["--A", "1", "--n", "3", "--D", "1"], "single_3"),
        (["--A", "2", "--n", "2", "--D", "1", "--mode", "gadget"], "gadget_2_2_1"),
        (["--A", "3", "--n", "2", "--D", "1"], "inline_3_2_1"),
    ],
)
@pytest.mark.parametrize("artifact", ["terms.txt", "manifest.txt", "layout.txt", "gadgets.txt"])
def test_synth_golden(tmp_path, regen_golden, args, tag, artifact):
    assert main(["synth", *args, "--out-dir", str(tmp_path)]) == 0
    check_golden(tmp_path / artifact, f"{tag}/{artifact}", regen_golden)


def test_single_particle_terms_unroll_gray_recursion(tmp_path):
    assert main(["synth", "--A", "1", "--n", "3", "--out-dir", str(tmp_path)]) == 0
    op = loads((tmp_path / "terms.txt").read_text())
    assert sorted(t.label() for t in op.terms()) == ["X0", "X1", "X2", "Z0 X1", "Z0 X2"]


def test_synth_is_byte_deterministic(tmp_path):
    for run in ("a", "b"):
        assert main(["synth", "--A", "3", "--n", "2", "--D", "1", "--potential", "harmonic:strength=0.5",
                     "--out-dir", str(tmp_path / run)]) == 0
    for name in ("terms.txt", "manifest.txt", "layout.txt", "gadgets.txt"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_manifest_contents(tmp_path):
    main(["synth", "--A", "2", "--n", "2", "--mode", "gadget", "--out-dir", str(tmp_path)])
    manifest = dict(line.split("=", 1) for line in (tmp_path / "manifest.txt").read_text().splitlines())
    assert manifest["mode"] == "gadget"
    assert manifest["hermitian"] == "true"
    assert int(manifest["max_weight"]) <= 4
    assert int(manifest["num_qubits"]) > int(manifest["base_qubits"])
    assert sum(int(v) for k, v in manifest.items() if k.startswith("terms_weight_")) == int(manifest["terms"])


def test_verify_default_passes(tmp_path):
    assert main(["verify", "--out-dir", str(tmp_path)]) == 0
    kv = dict(line.split("=", 1) for line in (tmp_path / "report.kv").read_text().splitlines())
    assert kv["pass"] == "true"
    assert float(kv["subspace_max_error"]) <= 1e-12
    assert (tmp_path / "reference.coo").read_text() == (tmp_path / "synthesized.coo").read_text()
    assert not (tmp_path / "discrepancies.txt").exists()


def test_verify_with_weak_well_writes_gap_table(tmp_path):
    code = main(["verify", "--potential", "well:depth=0.2,site=0", "--out-dir", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "gap_flow.txt").read_text().startswith("s gap splitting")


def test_verify_fault_injection_fails_with_listing(tmp_path, capsys):
    code = main(["verify", "--inject-fault", "wrap-sign", "--out-dir", str(tmp_path)])
    assert code == 1
    listing = (tmp_path / "discrepancies.txt").read_text().splitlines()
    assert listing and all(line.startswith("row=") for line in listing)
    assert "FAIL" in capsys.readouterr().out


def test_verify_sweep_writes_scaling_table(tmp_path):
    assert main(["verify", "--sweep", "n=2..4", "--out-dir", str(tmp_path)]) == 0
    rows = (tmp_path / "scaling.csv").read_text().splitlines()
    assert rows[0] == "A,n,D,terms,max_weight,ancillas"
    assert [r.split(",")[1] for r in rows[1:]] == ["2", "3", "4"]


def test_audit_golden(tmp_path, regen_golden):
    assert main(["audit", "--A", "1..3", "--n", "2..4", "--D", "1", "--out-dir", str(tmp_path)]) == 0
    check_golden(tmp_path / "scaling.csv", "audit_D1.csv", regen_golden)


def test_config_file_with_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# two fermions\nA = 3\nn = 2\nD = 1\nQ = 500\nmode = inline\n")
    assert main(["synth", "--config", str(cfg), "--A", "2", "--out-dir", str(tmp_path / "o")]) == 0
    manifest = (tmp_path / "o" / "manifest.txt").read_text()
    assert "A=2\n" in manifest and "Q=500.0\n" in manifest


@pytest.mark.parametrize(
    "argv",
    [
        ["synth", "--potential", "file:/definitely/missing.txt"],
        ["synth", "--A", "5", "--n", "1", "--D", "2"],
        ["synth", "--D", "4"],
        ["synth", "--mode", "gadget", "--code", "brgc-direct"],
        ["synth", "--A", "2..3"],
        ["synth", "--Q", "-1"],
        ["verify", "--mode", "gadget"],
    ],
)
def test_config_errors_exit_2(tmp_path, argv, capsys):
    assert main([*argv, "--out-dir", str(tmp_path)]) == 2
    assert "error" in capsys.readouterr().err


def test_missing_config_file_exit_2(tmp_path):
    assert main(["synth", "--config", str(tmp_path / "nope.cfg")]) == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--A", "4", "--n", "3", "--D", "2"],
        ["verify", "--A", "2", "--n", "3", "--D", "2", "--cap-qubits", "8"],
        ["synth", "--A", "3", "--n", "2", "--D", "3"],
    ],
)
def test_resource_caps_exit_3(tmp_path, argv):
    assert main([*argv, "--out-dir", str(tmp_path)]) == 3


@pytest.mark.parametrize("text, values", [("3", [3]), ("2..5", [2, 3, 4, 5]), ("1,4", [1, 4])])
def test_parse_range(text, values):
    assert parse_range(text) == values


def test_parse_range_rejects_garbage():
    with pytest.raises(ConfigError):
        parse_range("two")


def test_parse_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        parse_config("colour = blue\n")
    with pytest.raises(ConfigError):
        parse_config("A = many\n")


def test_problem_spec_defaults():
    assert ProblemSpec().code == "brgc-direct"
    assert ProblemSpec(mode="gadget").code == "binary+gray"


def test_coo_text():
    import numpy as np
    assert coo_text(np.array([[0, 1.5], [-2, 0]])) == "0 1 1.5\n1 0 -2.0\n"
