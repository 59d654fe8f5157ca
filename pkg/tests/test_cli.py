import json

import pytest

from ghl.cli import RunConfig, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gamma_check(capsys):
    code, out, _ = run(capsys, "gamma", "check", "theta")
    assert code == 0 and "status: admissible" in out and "valences: [3, 3]" in out
    code, out, _ = run(capsys, "gamma", "check", "banana4")
    assert "inadmissible: even valence" in out


def test_missing_orient_line(capsys, tmp_path):
    p = tmp_path / "g.gamma"
    p.write_text("gamma t\nvertices 2\nedge a 0 1\nedge b 0 1\nedge c 0 1\norient 0 a.0,b.0,c.0\n")
    code, _, err = run(capsys, "gamma", "check", str(p))
    assert code == 2 and "vertex 1" in err


def test_cycle_build_and_verify(capsys, tmp_path):
    out_file = tmp_path / "z.chain"
    code, out, _ = run(capsys, "cycle", "build", "theta", "--out", str(out_file), "--verify")
    assert code == 0 and "CYCLE-CERTIFIED" in out and "bigrade: [-2, 6]" in out
    code, out, _ = run(capsys, "cycle", "verify", str(out_file))
    assert code == 0 and "CYCLE-CERTIFIED" in out
    code, out, _ = run(capsys, "chain", "diff", str(out_file), str(out_file))
    assert code == 0 and "EQUAL" in out


def test_cycle_even_valence_warns(capsys):
    code, out, _ = run(capsys, "cycle", "build", "banana4")
    assert code == 0 and "terms: 0" in out and "warning" in out


def test_basepointed_variant(capsys):
    code, out, _ = run(capsys, "cycle", "build", "theta", "--basepointed", "--format", "json")
    assert code == 0 and json.loads(out)["variant"] == "aut"


def test_stab_verify(capsys, tmp_path):
    code, out, _ = run(capsys, "stab", "verify", "theta", "--out", str(tmp_path / "s"))
    assert code == 0 and "BOUNDARY-CERTIFIED" in out
    assert (tmp_path / "s" / "W.chain").exists() and (tmp_path / "s" / "Zplus.chain").exists()
    code, out, _ = run(capsys, "stab", "verify", "theta", "--perturb")
    assert code == 1 and "difference" in out


def test_homology_betti(capsys):
    code, out, _ = run(capsys, "homology", "betti", "--rank", "2")
    assert code == 0
    rows = [line.split(" | ") for line in out.splitlines()[1:]]
    assert [r[-1] for r in rows] == ["1", "0"]
    code, _, err = run(capsys, "homology", "betti")
    assert code == 2


def test_is_boundary_rejects_non_cycle(capsys, tmp_path):
    p = tmp_path / "c.chain"
    p.write_text("chain v1 rank=2 variant=out dim=1\n1/1 q=2;b=-;E=0-1,0-1,0-1;F=0\n")
    code, _, err = run(capsys, "chain", "is-boundary", str(p))
    assert code == 2 and "input is not a cycle" in err


def test_chain_boundary(capsys, tmp_path):
    p = tmp_path / "c.chain"
    p.write_text("chain v1 rank=2 variant=out dim=1\n1/1 q=2;b=-;E=0-1,0-1,0-1;F=0\n")
    code, out, _ = run(capsys, "chain", "boundary", str(p))
    assert code == 0 and out.startswith("chain v1 rank=2 variant=out dim=0")


def test_bad_chain_file(capsys, tmp_path):
    p = tmp_path / "c.chain"
    p.write_text("nonsense\n")
    code, _, err = run(capsys, "chain", "boundary", str(p))
    assert code == 2 and "line 1" in err


def test_pairing(capsys):
    code, out, _ = run(capsys, "pairing", "verify", "theta")
    assert code == 0 and "constant: 432/1" in out and "RESULT: PASS" in out


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(workers=0)
    with pytest.raises(ValueError):
        RunConfig(output_format="xml")


def test_output_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.chain", tmp_path / "b.chain"
    run(capsys, "cycle", "build", "theta", "--basepointed", "--out", str(a))
    run(capsys, "cycle", "build", "theta", "--basepointed", "--out", str(b), "--workers", "2")
    assert a.read_bytes() == b.read_bytes()
