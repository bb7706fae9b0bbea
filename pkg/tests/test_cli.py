import json

import pytest

from polarpunct.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_dcm_example(capsys):
    code, out, _ = run_cli(capsys, "analyze", "--n", "2", "--pattern", "1010", "--model", "dcm")
    assert code == 0
    payload = json.loads(out)
    assert payload["forced_frozen"] == [1, 3]
    assert payload["reciprocal"] is True
    assert payload["zeros"] == [1, 3]
    assert payload["transmitted"] == 2


def test_analyze_unpunctured_ucm(capsys):
    code, out, _ = run_cli(capsys, "analyze", "--n", "2", "--pattern", "1111", "--model", "ucm")
    assert code == 0
    payload = json.loads(out)
    assert payload["forced_frozen"] == []
    assert payload["reciprocal"] is True


def test_analyze_zeros_list_and_verbose(capsys):
    code, out, _ = run_cli(
        capsys, "analyze", "--n", "2", "--pattern", "1,3", "--model", "ucm", "--verbose"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["pattern"] == "1010"
    assert payload["z_values"] == [0, 1, 0, 1]


def test_analyze_info_set_verdict(capsys):
    code, out, _ = run_cli(
        capsys, "analyze", "--n", "2", "--pattern", "1010", "--info-set", "2,3"
    )
    payload = json.loads(out)
    assert payload["catastrophic"] is True
    code, out, _ = run_cli(
        capsys, "analyze", "--n", "2", "--pattern", "1010",
        "--info-set", "2,3", "--all-dead",
    )
    assert json.loads(out)["catastrophic"] is False


def test_analyze_malformed_pattern(capsys):
    code, _, err = run_cli(capsys, "analyze", "--n", "2", "--pattern", "10")
    assert code == 2
    assert "error" in err


def test_catastrophic_weights_golden(capsys):
    code, out, _ = run_cli(
        capsys, "catastrophic", "--n", "2", "--channel", "2", "--weights"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["coeffs"] == [[2, 2], [3, 4], [4, 1]]
    assert payload["min_zeros"] == 2


def test_catastrophic_enumerate_base(capsys):
    code, out, _ = run_cli(
        capsys, "catastrophic", "--n", "1", "--channel", "0", "--enumerate"
    )
    assert json.loads(out)["patterns"] == ["00", "01", "10"]


def test_catastrophic_channel_range(capsys):
    code, _, err = run_cli(capsys, "catastrophic", "--n", "2", "--channel", "9")
    assert code == 2


def test_catastrophic_cap_needs_force(capsys):
    code, _, err = run_cli(
        capsys, "catastrophic", "--n", "5", "--channel", "31", "--enumerate"
    )
    assert code == 1
    code, out, _ = run_cli(
        capsys, "catastrophic", "--n", "5", "--channel", "31", "--enumerate", "--force"
    )
    assert code == 0
    assert json.loads(out)["patterns"] == ["0" * 32]


def test_construct_reciprocal_writes_family(tmp_path, capsys):
    out_path = tmp_path / "fam.json"
    code, out, _ = run_cli(
        capsys, "construct", "--n", "3", "--k", "2", "--method", "reciprocal",
        "--model", "ucm", "--np", "6,4", "--output", str(out_path),
    )
    assert code == 0
    blob = json.loads(out_path.read_text())
    assert blob["method"] == "reciprocal"
    assert blob["K"] == 2
    zero_sets = [entry["zeros"] for entry in blob["patterns"]]
    assert zero_sets[0] == [0, 1, 2, 4]
    assert zero_sets[1] == [0, 1]
    assert "non-catastrophic=True" in out


def test_construct_greedy_single_rate(tmp_path, capsys):
    out_path = tmp_path / "fam.json"
    code, out, _ = run_cli(
        capsys, "construct", "--n", "3", "--k", "4", "--method", "greedy",
        "--np", "4", "--seed", "3", "--output", str(out_path),
    )
    if code == 0:
        blob = json.loads(out_path.read_text())
        assert len(blob["patterns"]) == 1
        assert blob["patterns"][0]["np"] == 4
    else:
        # the greedy base needed more than K positions for this seed
        _, err = capsys.readouterr().out, capsys.readouterr().err


def test_construct_np_out_of_range(capsys):
    code, _, err = run_cli(
        capsys, "construct", "--n", "3", "--k", "2", "--method", "greedy", "--np", "200"
    )
    assert code == 2


def test_simulate_roundtrip(tmp_path, capsys):
    fam_path = tmp_path / "fam.json"
    code, *_ = run_cli(
        capsys, "construct", "--n", "4", "--k", "6", "--method", "reciprocal",
        "--np", "12,14", "--output", str(fam_path),
    )
    assert code == 0
    csv_a = tmp_path / "a.csv"
    csv_b = tmp_path / "b.csv"
    plot = tmp_path / "fer.png"
    dat = tmp_path / "fer.dat"
    base_args = [
        "simulate", "--family", str(fam_path), "--snr", "2:4:2",
        "--max-trials", "400", "--target-errors", "40", "--list", "2",
        "--seed", "11", "--threads", "2",
    ]
    code, *_ = run_cli(
        capsys, *base_args, "--output", str(csv_a), "--plot", str(plot), "--gnuplot", str(dat)
    )
    assert code == 0
    code, *_ = run_cli(capsys, *base_args, "--output", str(csv_b))
    assert code == 0
    assert csv_a.read_bytes() == csv_b.read_bytes()
    lines = csv_a.read_text().strip().split("\n")
    assert len(lines) == 1 + 2 * 2
    assert lines[0].startswith("n,np,k,model")
    assert plot.stat().st_size > 0
    assert dat.read_text().startswith("# ebn0_db fer ber")


def test_simulate_single_point_per_pattern(tmp_path, capsys):
    fam_path = tmp_path / "fam.json"
    run_cli(
        capsys, "construct", "--n", "3", "--k", "2", "--method", "reciprocal",
        "--np", "6,4", "--output", str(fam_path),
    )
    code, out, _ = run_cli(
        capsys, "simulate", "--family", str(fam_path), "--snr", "4:4:1",
        "--max-trials", "200", "--target-errors", "20", "--threads", "1",
    )
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) == 3  # header + one row per pattern


def test_simulate_missing_family(capsys):
    code, _, err = run_cli(
        capsys, "simulate", "--family", "/nonexistent/fam.json", "--snr", "1"
    )
    assert code == 1
    assert "error" in err


def test_catastrophic_family_member_reports_fer_one(tmp_path, capsys):
    fam = {
        "n": 2,
        "K": 2,
        "info_set": [2, 3],
        "model": "ucm",
        "method": "greedy",
        "seed": 0,
        "patterns": [{"np": 2, "zeros": [1, 3]}],
    }
    fam_path = tmp_path / "bad.json"
    fam_path.write_text(json.dumps(fam))
    code, out, err = run_cli(
        capsys, "simulate", "--family", str(fam_path), "--snr", "20",
        "--max-trials", "200", "--target-errors", "200", "--threads", "1",
    )
    assert code == 0
    assert "catastrophic" in err
    row = out.strip().split("\n")[1].split(",")
    assert row[-3] == "1.0"  # fer column


def test_help_lists_subcommands(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    for name in ("analyze", "catastrophic", "construct", "simulate"):
        assert name in out
