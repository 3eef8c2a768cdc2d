"""Command-line interface, exercised in-process plus one console-script run."""

import json
import shutil
import subprocess

import pytest

from coinwalk import (
    circuit_from_json,
    coin_field_to_json,
    config_to_json,
    from_qasm,
    predicted_depth,
    random_field,
    WalkConfig,
)
from coinwalk.cli import main


def write_json(path, payload):
    path.write_text(json.dumps(payload))
    return str(path)


@pytest.fixture()
def coin_spec(tmp_path):
    path = tmp_path / "coin.json"
    path.write_text(coin_field_to_json(random_field(2, seed=0)))
    return str(path)


def test_build_writes_circuit_json(tmp_path, coin_spec, capsys):
    out = tmp_path / "naive.json"
    rc = main(["build", "--construction", "naive", "--coin", coin_spec, "--out", str(out)])
    assert rc == 0
    assert "wrote" in capsys.readouterr().out
    circ = circuit_from_json(out.read_text())
    assert circ.metadata["builder"] == "naive"
    assert circ.registers.n == 2


def test_build_emits_compiled_qasm(tmp_path, coin_spec):
    out, qasm_path = tmp_path / "walsh.json", tmp_path / "walsh.qasm"
    rc = main(
        [
            "build",
            "--construction",
            "walsh",
            "--coin",
            coin_spec,
            "--out",
            str(out),
            "--qasm",
            str(qasm_path),
        ]
    )
    assert rc == 0
    text = qasm_path.read_text()
    assert text.startswith("OPENQASM 2.0;")
    assert from_qasm(text).registers.n == 2


def test_analyze_reports_counts_and_predictions(tmp_path, coin_spec, capsys):
    out = tmp_path / "linear.json"
    main(["build", "--construction", "linear", "--coin", coin_spec, "--out", str(out)])
    capsys.readouterr()
    rc = main(["analyze", "--circuit", str(out), "--compile"])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["builder"] == "linear"
    assert report["layout"] == "linear-ancilla"
    assert report["predicted_depth"] == predicted_depth(2)
    assert report["depth"] <= report["predicted_depth"]
    assert report["compiled"]["gates"] >= report["gates"]
    assert sum(report["gate_counts"].values()) == report["gates"]


@pytest.mark.parametrize("construction", ["naive", "linear", "walsh"])
def test_verify_passes_for_each_construction(construction, capsys):
    rc = main(["verify", "--construction", construction, "--n", "2", "--seed", "3"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "max deviation" in out


def test_walk_reports_oracle_distance(tmp_path, capsys):
    config = WalkConfig(
        2,
        3,
        random_field(2, seed=4),
        coin_builder="walsh",
        initial={"position": 1},
        shots=64,
        seed=9,
    )
    cfg = write_json(tmp_path / "config.json", config_to_json(config))
    out = tmp_path / "result.json"
    extra = tmp_path / "extra.csv"
    rc = main(["walk", "--config", cfg, "--out", str(out), "--csv", str(extra)])
    assert rc == 0
    assert "tvd vs oracle" in capsys.readouterr().out
    payload = json.loads(out.read_text())
    assert payload["tvd_vs_oracle"] <= 1e-10
    assert sum(payload["counts"]) == 64
    assert extra.read_text().startswith("k,p_k,count")


def test_walk_csv_extension_switches_format(tmp_path):
    config = WalkConfig(2, 1, random_field(2, seed=4))
    cfg = write_json(tmp_path / "config.json", config_to_json(config))
    out = tmp_path / "result.csv"
    assert main(["walk", "--config", cfg, "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "k,p_k,count"
    assert len(lines) == 5


def test_scaling_table(tmp_path):
    out = tmp_path / "linear.csv"
    rc = main(
        ["scaling", "--construction", "linear", "--n-range", "1..3", "--out", str(out)]
    )
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "n,gates,depth,gates_compiled,depth_compiled,predicted"
    assert len(lines) == 4
    for line, n in zip(lines[1:], (1, 2, 3)):
        cells = line.split(",")
        assert int(cells[0]) == n
        assert int(cells[4]) >= int(cells[2])  # compiled depth counts basis gates
        assert int(cells[5]) == predicted_depth(n)

    naive_out = tmp_path / "naive.csv"
    main(["scaling", "--construction", "naive", "--n-range", "1..2", "--out", str(naive_out)])
    assert all(line.endswith(",") for line in naive_out.read_text().strip().splitlines()[1:])


def test_shift_report_and_verification(capsys):
    rc = main(["shift", "--scheme", "qft", "--n", "3"])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["predicted_cost"] == {"size": 22, "depth": 9}
    assert report["gates_compiled"] >= report["gates"]

    rc = main(["shift", "--scheme", "id", "--n", "2", "--verify"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "max deviation vs permutation oracle" in out


def test_missing_file_is_a_usage_error(tmp_path, capsys):
    rc = main(["analyze", "--circuit", str(tmp_path / "absent.json")])
    assert rc == 2
    assert "error" in capsys.readouterr().err


def test_broken_coin_spec_maps_to_toolkit_error(tmp_path, capsys):
    spec = json.loads(coin_field_to_json(random_field(1, seed=0)))
    spec["coins"][0][0] = [9.0, 0.0]  # breaks unitarity
    path = write_json(tmp_path / "bad.json", spec)
    rc = main(["build", "--construction", "naive", "--coin", path, "--out", str(tmp_path / "x.json")])
    assert rc == 1
    assert "error [not-unitary]" in capsys.readouterr().err


def test_unknown_choice_exits_via_argparse():
    with pytest.raises(SystemExit) as exc:
        main(["build", "--construction", "magic", "--coin", "x", "--out", "y"])
    assert exc.value.code == 2


def test_console_script_entry_point(tmp_path):
    exe = shutil.which("coinwalk")
    assert exe, "console script not installed"
    proc = subprocess.run(
        [exe, "shift", "--scheme", "qft", "--n", "2"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["scheme"] == "qft"
