import csv
import io
import json
from pathlib import Path

import pytest

from mmnoma.cli import COLUMNS, main
from mmnoma.config import ConfigError, ScenarioConfig, dump_config, load_config, parse_overrides

DATA = Path(__file__).parent / "data"
SMALL = DATA / "small.ini"
HEADER = ("fingerprint,axis,axis_value,population,scheme,policy,allocator,clustering,"
          "metric,mean,std,ci_lo,ci_hi,trials,seed")


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_header_is_fixed():
    assert ",".join(COLUMNS) == HEADER


def test_missing_file(capsys, tmp_path):
    code, _, err = run_cli(capsys, "run", "--config", str(tmp_path / "nope.ini"))
    assert code != 0
    assert "not found" in err


def test_run_writes_csv(capsys):
    code, out, _ = run_cli(capsys, "run", "--config", str(SMALL))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == HEADER
    rows = list(csv.DictReader(io.StringIO(out)))
    # 3 policies x 3 metrics per population
    assert len(rows) == 18
    assert {r["trials"] for r in rows} <= {"0", "1", "2", "3", "4"}


def test_rerun_is_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["run", "--config", str(SMALL), "--out", str(a)]) == 0
    assert main(["run", "--config", str(SMALL), "--out", str(b), "--threads", "3"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_golden_file(tmp_path):
    out = tmp_path / "run.csv"
    assert main(["run", "--config", str(SMALL), "--out", str(out)]) == 0
    assert out.read_text() == (DATA / "golden_small.csv").read_text()


def test_jsonl_output(capsys):
    code, out, _ = run_cli(capsys, "run", "--config", str(SMALL), "--format", "jsonl",
                           "--trials", "2")
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert len(rows) == 18
    assert tuple(rows[0]) == COLUMNS


def test_seed_override_changes_fingerprint(capsys):
    _, a, _ = run_cli(capsys, "run", "--config", str(SMALL), "--trials", "1")
    _, b, _ = run_cli(capsys, "run", "--config", str(SMALL), "--trials", "1", "--seed", "8")
    fa = next(csv.DictReader(io.StringIO(a)))
    fb = next(csv.DictReader(io.StringIO(b)))
    assert fa["fingerprint"] != fb["fingerprint"]
    assert fb["seed"] == "8"


def test_fingerprint_revalidates(capsys):
    _, out, _ = run_cli(capsys, "run", "--config", str(SMALL), "--trials", "1")
    cfg = load_config(SMALL, trials=1)
    for row in csv.DictReader(io.StringIO(out)):
        assert row["fingerprint"] == cfg.fingerprint()


def test_unknown_key_listed(capsys, tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[scenario]\nn_users = 4\nbogus = 1\n[extra]\nx = 2\n")
    code, _, err = run_cli(capsys, "run", "--config", str(bad))
    assert code == 2
    assert "scenario.bogus" in err and "[extra]" in err


def test_invalid_value_names_constraint(capsys, tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[power]\ntotal_power = -3\n")
    code, _, err = run_cli(capsys, "run", "--config", str(bad))
    assert code == 2
    assert "total_power" in err


def test_sweep_rows(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--config", str(SMALL), "--trials", "1",
                           "--axis", "n_users", "--values", "8,4,6")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 3 * 18
    values = [r["axis_value"] for r in rows]
    assert values == sorted(values, key=float)
    assert {r["axis"] for r in rows} == {"n_users"}


def test_compare_identical_variants(capsys):
    code, out, _ = run_cli(capsys, "compare", "--config", str(SMALL),
                           "--variant", "clustering_on=true", "--variant", "clustering_on=true")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    deltas = [r for r in rows if r["metric"].endswith("_delta") and r["trials"] != "0"]
    assert deltas
    for r in deltas:
        assert float(r["mean"]) == 0.0
        assert float(r["ci_lo"]) <= 0.0 <= float(r["ci_hi"])


def test_compare_clustering_pair_signed_deltas(capsys):
    code, out, _ = run_cli(capsys, "compare", "--config", str(SMALL), "--variant",
                           "clustering_on=false", "--variant", "clustering_on=true")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    deltas = [r for r in rows if r["axis_value"] == "1-0"]
    assert len(deltas) == 18
    assert {r["clustering"] for r in deltas} == {"on"}


def test_compare_needs_two_variants(capsys):
    code, _, err = run_cli(capsys, "compare", "--config", str(SMALL), "--variant", "scheme=noma")
    assert code == 2
    assert "two" in err


def test_dump_config_round_trip(tmp_path):
    cfg = ScenarioConfig(n_users=9, scheme="noma", near_norm="unit", cluster_k=3,
                         policy_near="dynamic")
    path = tmp_path / "c.ini"
    path.write_text(dump_config(cfg))
    assert load_config(path) == cfg


def test_parse_overrides():
    assert parse_overrides(["n_users=5", "epsilon=0.5", "clustering_on=off"]) == {
        "n_users": 5, "epsilon": 0.5, "clustering_on": False,
    }
    with pytest.raises(ConfigError):
        parse_overrides(["n_users"])
    with pytest.raises(ConfigError):
        parse_overrides(["nope=1"])
    with pytest.raises(ConfigError):
        parse_overrides(["n_users=abc"])


def test_inline_comments_allowed(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("[beamforming]\nscheme = noma   ; noma | cognitive | random\n")
    assert load_config(path).scheme == "noma"
