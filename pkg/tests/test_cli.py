"""The command-line front end: exit codes, schemas, determinism."""

import json

import pytest

from sawlab.cli import main
from sawlab.fixtures import corridor_polygon
from sawlab.lattice import serialize_walk


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_closing_json(capsys):
    code, out, _ = run(capsys, "closing", "--n", "7", "--d", "2", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["closing"] == {"num": "28", "den": "543"}
    assert payload["c_n"] == "2172" and payload["p_n1"] == "7"


def test_guardrail_exit_code(capsys):
    code, _, err = run(capsys, "count", "--n", "100", "--d", "2")
    assert code == 3
    assert "node budget" in err


def test_invalid_arguments_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["count"])  # --n missing
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2


def test_count_constraint_flag(capsys):
    code, out, _ = run(capsys, "count", "--n", "4", "--constraint", "first-part")
    assert code == 0
    # 34 possible first parts of length four (matches the oracle-backed
    # walk-set equality test in test_counting)
    assert json.loads(out)["count"] == "34"


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "--walk", "d=2;origin=0,0;steps=EN")
    assert code == 0
    payload = json.loads(out)
    assert payload["meeting"] == [1, 1]
    assert payload["second"] == "d=2;origin=1,1;steps=WS" or payload["first"]


def test_patterns_walk(capsys):
    from sawlab.fixtures import straight_splice_walk

    record = serialize_walk(straight_splice_walk("II"))
    code, out, _ = run(capsys, "patterns", "--walk", record)
    assert code == 0
    payload = json.loads(out)
    assert payload["counts"]["T_II"] == 1
    assert payload["counts"]["l_empty"] == payload["counts"]["T_II"] * -2 + len(
        straight_splice_walk("II")
    )


def test_patterns_polygon(capsys):
    p = corridor_polygon(("I", "II"), ("II",))
    record = serialize_walk(p.canonical_path)
    code, out, _ = run(capsys, "patterns", "--polygon", record, "--phi", "0")
    assert code == 0
    payload = json.loads(out)
    assert payload["counts"]["N_I1"] == 1 and payload["counts"]["N_II1"] == 1
    assert payload["good_shell"] is True
    segs = [s["segment"] for s in payload["slots"]]
    assert segs.count("S1") == 2 and segs.count("S2") == 1


def test_resample_deterministic(capsys):
    p = corridor_polygon(("I", "II"), ("II", "I"))
    record = serialize_walk(p.canonical_path)
    code, out1, _ = run(capsys, "resample", "--polygon", record, "--seed", "9")
    assert code == 0
    _, out2, _ = run(capsys, "resample", "--polygon", record, "--seed", "9")
    assert out1 == out2  # bit-identical
    payload = json.loads(out1)
    assert payload["n_one_s1_before"] in (0, 1, 2)


def test_snake_constants(capsys):
    code, out, _ = run(
        capsys, "snake", "--mode", "constants", "--alpha", "3/10", "--beta", "1/2",
        "--eta", "0",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["K"] == 540 and payload["delta"] == "1/5"


def test_snake_profile_csv(capsys):
    code, out, _ = run(
        capsys, "snake", "--mode", "profile", "--walk", "d=2;origin=0,0;steps=WWS",
        "--n", "7", "--ell", "3", "--alpha", "2/5", "--beta", "1", "--format", "csv",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "k,q_num,q_den,charming"
    assert lines[1] == "1,1,10,0"
    assert lines[2] == "3,3,17,0"


def test_snake_select_ell(capsys):
    code, out, _ = run(
        capsys, "snake", "--mode", "select-ell", "--n", "7",
        "--alpha-prime", "8/5", "--delta-prime", "1/2",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["premise_holds"] is True and payload["ell"] == 2


def test_report_first_parts_csv(capsys):
    code, out, _ = run(
        capsys, "report", "--kind", "first-parts", "--n", "5", "--ell", "2",
        "--alpha", "1/2", "--format", "csv",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "ell,n,walk,completions,closing,q_num,q_den,in_hphi"
    assert any("steps=WW" in line and ",14,2,1,7,0" in line for line in lines[1:])


def test_report_histogram_csv(capsys):
    code, out, _ = run(capsys, "report", "--kind", "histogram", "--n", "5")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "j,count"
    assert [line.split(",")[1] for line in lines[1:]] == ["4"] * 6


def test_report_midpoint_csv(capsys):
    code, out, _ = run(capsys, "report", "--kind", "midpoint", "--n", "2")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "x,y,num,den"
    assert len(lines) == 5  # four equally likely midpoints


def test_verify_suite(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "lattice", "--nmax", "4")
    assert code == 0
    assert "checks passed" in out


def test_output_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, _, _ = run(capsys, "closing", "--n", "3", "--out", str(target))
    assert code == 0
    assert json.loads(target.read_text())["closing"] == {"num": "2", "den": "9"}
