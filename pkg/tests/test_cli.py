import csv
import json

from qeclab.cli import main


def run(args):
    return main(args)


def read_json(path):
    return json.loads(path.read_text())


def test_influence_writes_profile(tmp_path):
    out = tmp_path / "influence.json"
    assert run(["influence", "--n", "4", "--w", "2", "--out", str(out)]) == 0
    doc = read_json(out)
    assert doc["balanced"] is True
    assert doc["flips_to_balance"] == 1
    assert doc["s"] == 0.5
    assert doc["manifest"]["command"] == "influence"


def test_influence_dictator_width_one(tmp_path):
    out = tmp_path / "one.json"
    assert run(["influence", "--n", "1", "--out", str(out)]) == 0
    doc = read_json(out)
    assert doc["s"] == 1.0 and doc["balanced"] is True


def test_influence_table_round_trip(tmp_path):
    table = tmp_path / "table.json"
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    assert run(["influence", "--n", "6", "--out", str(out1), "--save-table", str(table)]) == 0
    assert run(["influence", "--n", "6", "--table", str(table), "--out", str(out2)]) == 0
    assert read_json(out1)["s"] == read_json(out2)["s"]


def test_gram_pass_and_negative_control(tmp_path):
    ok = tmp_path / "gram.json"
    assert run(["gram", "--n", "8", "--B", "2", "--out", str(ok)]) == 0
    doc = read_json(ok)
    assert doc["diag_expected"] == 16.0
    assert doc["offdiag_max"] <= 1e-9
    bad = tmp_path / "gram_bad.json"
    assert run(["gram", "--n", "12", "--B", "2", "--unbalanced", "--out", str(bad)]) == 1
    assert read_json(bad)["pass"] is False


def test_immunity_exit_codes_and_csv(tmp_path):
    out = tmp_path / "imm.csv"
    code = run(
        [
            "immunity",
            "--n", "16", "--B", "2",
            "--samples", "5", "--error-samples", "10",
            "--format", "csv", "--out", str(out),
        ]
    )
    assert code == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert rows[0]["kind"] == "immunity"
    assert float(rows[0]["epsilon_measured"]) <= float(rows[0]["epsilon_bound"]) + 1e-9


def test_immunity_divisibility_usage_error(capsys):
    assert run(["immunity", "--n", "16", "--B", "3"]) == 2
    assert "divide" in capsys.readouterr().err


def test_witness_command_finds_violation(tmp_path):
    out = tmp_path / "witness.json"
    assert run(["witness", "--n", "8", "--B", "1", "--out", str(out)]) == 1
    doc = read_json(out)
    assert doc["found"] is True
    assert doc["witness"]["residual"] > 1e-3
    assert doc["witness"]["error"]["type"] == "bitflip"
    assert doc["witness"]["error"]["controls"]["kind"] == "singleton"


def test_attack_full_grid_violates_and_renders_figure(tmp_path):
    out = tmp_path / "attack.json"
    assert run(["attack", "--n", "8", "--k", "2", "--grid", "full", "--out", str(out)]) == 1
    doc = read_json(out)
    assert doc["attack_value"] > 0.1
    assert doc["attack_value"] >= doc["bound"] - 1e-9
    assert doc["overlap_after"] >= 0.5 - 1e-9
    assert (tmp_path / "attack_residuals.png").exists()


def test_attack_paper_grid_reports_without_assertion(tmp_path):
    out = tmp_path / "attack_paper.json"
    assert run(["attack", "--n", "8", "--k", "2", "--grid", "paper", "--out", str(out)]) == 0
    doc = read_json(out)
    assert doc["pass"] is None
    assert doc["realizable_as_pair"] is True
    assert doc["realization_residual"] <= 1e-12


def test_attack_on_code_pair(tmp_path):
    out = tmp_path / "attack_code.json"
    assert run(["attack", "--n", "8", "--B", "1", "--k", "2", "--out", str(out)]) == 1
    doc = read_json(out)
    assert doc["target"] == "code-pair"
    assert doc["attack_value"] > 0.1


def test_separation_claim_violated(tmp_path):
    out = tmp_path / "sep.json"
    code = run(
        [
            "separation",
            "--n", "8", "--B", "1",
            "--samples", "3", "--error-samples", "20",
            "--alpha-claim", "0.1", "--out", str(out),
        ]
    )
    assert code == 1
    doc = read_json(out)
    assert doc["alpha_measured"] > 0.1


def test_trend_writes_csv_and_figure(tmp_path):
    out = tmp_path / "trend.csv"
    code = run(
        [
            "trend",
            "--n-list", "8,16",
            "--B", "2",
            "--samples", "4", "--error-samples", "6",
            "--out", str(out),
        ]
    )
    assert code == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert [row["n"] for row in rows] == ["8", "16"]
    for row in rows:
        assert float(row["epsilon_measured"]) <= float(row["epsilon_bound"]) + 1e-9
    assert (tmp_path / "trend.png").exists()


def test_immunity_structured_flag(tmp_path):
    out = tmp_path / "imm32.json"
    code = run(
        [
            "immunity",
            "--n", "32", "--B", "2", "--structured",
            "--samples", "5", "--error-samples", "10",
            "--out", str(out),
        ]
    )
    assert code == 0
    doc = read_json(out)
    assert doc["structured"] is True and doc["pass"] is True


def test_immunity_consumes_error_spec_file(tmp_path):
    spec_path = tmp_path / "flip.json"
    spec_path.write_text(
        json.dumps({"type": "bitflip", "i": 3, "controls": {"kind": "all"}})
    )
    out = tmp_path / "imm.json"
    code = run(
        [
            "immunity",
            "--n", "8", "--B", "2",
            "--samples", "2", "--error-samples", "2",
            "--error", str(spec_path), "--out", str(out),
        ]
    )
    assert code == 0


def test_witness_saves_pair_and_attack_consumes_it(tmp_path):
    prefix = str(tmp_path / "pair")
    assert run(
        ["witness", "--n", "8", "--B", "1", "--save-pair", prefix]
    ) == 1
    out = tmp_path / "attack.json"
    code = run(
        [
            "attack",
            "--n", "8", "--k", "2",
            "--pair", f"{prefix}_phi.json", f"{prefix}_psi.json",
            "--table", f"{prefix}_table.json",
            "--out", str(out),
        ]
    )
    assert code == 1
    doc = read_json(out)
    assert doc["target"] == "stored-pair"
    assert doc["attack_value"] > 0.1


def test_attack_pair_requires_table(capsys):
    assert run(["attack", "--n", "8", "--pair", "a.json", "b.json"]) == 2
    assert "--table" in capsys.readouterr().err


def test_json_reports_reproducible_modulo_runtime(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["immunity", "--n", "8", "--B", "2", "--samples", "3", "--error-samples", "4"]
    assert run(args + ["--out", str(a)]) == 0
    assert run(args + ["--out", str(b)]) == 0
    da, db = read_json(a), read_json(b)
    da.pop("runtime_ms"), db.pop("runtime_ms")
    da["manifest"]["config"].pop("out"), db["manifest"]["config"].pop("out")
    da["manifest"].pop("outputs"), db["manifest"].pop("outputs")
    assert da == db


def test_stdout_when_no_out(capsys):
    assert run(["gram", "--n", "8", "--B", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["pass"] is True
