"""Command-line front end: round trips, exit codes, determinism, reports."""

import json

import pytest

from tiso.cli import (EXIT_INTERNAL, EXIT_OK, EXIT_USAGE, ExperimentConfig,
                      main, run_experiment, trial_seed, wilson_interval)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_solve_verify_round_trip(tmp_path, capsys):
    inst = tmp_path / "inst.json"
    wit = tmp_path / "wit.json"
    code, _, _ = run(capsys, "gen", "--problem", "algiso", "--n", "8",
                     "--p", "5", "--mode", "planted", "--seed", "11",
                     "--out", str(inst), "--witness-out", str(wit))
    assert code == EXIT_OK
    code, _, _ = run(capsys, "verify", str(inst), str(wit))
    assert code == EXIT_OK
    code, out, _ = run(capsys, "solve", str(inst), "--seed", "3")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["verdict"] in ("Isomorphic", "NotIsomorphic", "Failure")
    assert "wall_ms" in doc and isinstance(doc["stages"], list)


def test_solve_unrelated_never_isomorphic(tmp_path, capsys):
    inst = tmp_path / "u.json"
    run(capsys, "gen", "--problem", "mcc", "--n", "8", "--p", "5",
        "--mode", "unrelated", "--seed", "4", "--out", str(inst))
    code, out, _ = run(capsys, "solve", str(inst))
    assert code == EXIT_OK
    assert json.loads(out)["verdict"] != "Isomorphic"


def test_verify_rejects_mismatched_witness(tmp_path, capsys):
    inst1 = tmp_path / "i1.json"
    inst2 = tmp_path / "i2.json"
    wit2 = tmp_path / "w2.json"
    run(capsys, "gen", "--problem", "algiso", "--n", "6", "--p", "5",
        "--seed", "1", "--out", str(inst1))
    run(capsys, "gen", "--problem", "algiso", "--n", "6", "--p", "5",
        "--seed", "2", "--out", str(inst2), "--witness-out", str(wit2))
    code, _, _ = run(capsys, "verify", str(inst1), str(wit2))
    assert code == EXIT_INTERNAL


def test_bad_field_spec_is_usage_error(tmp_path, capsys):
    out = tmp_path / "never.json"
    code, _, err = run(capsys, "gen", "--problem", "algiso", "--n", "6",
                       "--p", "999999999999", "--out", str(out))
    assert code == EXIT_USAGE
    assert not out.exists()  # no partial output


def test_malformed_instance_is_usage_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "solve", str(bad))
    assert code == EXIT_USAGE


def test_trial_seed_is_pure_and_wide():
    assert trial_seed(0, 0) == trial_seed(0, 0)
    assert trial_seed(0, 0) != trial_seed(0, 1)
    assert trial_seed(0, 1) != trial_seed(1, 0)
    assert trial_seed(7, 3) < 1 << 128


def test_wilson_interval_sane():
    lo, hi = wilson_interval(50, 100)
    assert 0.4 < lo < 0.5 < hi < 0.6
    lo0, hi0 = wilson_interval(0, 100)
    assert lo0 == 0.0 and hi0 < 0.05


def test_experiment_parallelism_independent():
    cfg1 = ExperimentConfig(problem="algiso", n=8, p=5, trials=24,
                            master_seed=9, mode="planted", jobs=1)
    cfg2 = ExperimentConfig(problem="algiso", n=8, p=5, trials=24,
                            master_seed=9, mode="planted", jobs=3)
    r1 = run_experiment(cfg1)
    r2 = run_experiment(cfg2)
    assert json.dumps(r1["results"], sort_keys=True) == \
        json.dumps(r2["results"], sort_keys=True)
    total = sum(r1["results"]["verdicts"].values())
    assert total == 24


def test_experiment_csv_format(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code, _, _ = run(capsys, "experiment", "--problem", "algiso", "--n", "6",
                     "--p", "5", "--trials", "10", "--seed", "1",
                     "--format", "csv", "--out", str(out))
    assert code == EXIT_OK
    text = out.read_text()
    assert text.startswith("key,value")
    assert "non_failure.fraction" in text


def test_rmt_exact_alpha(capsys):
    code, out, _ = run(capsys, "rmt", "exact", "alpha", "--n", "3", "--q", "2")
    assert code == EXIT_OK
    assert json.loads(out)["exact"] == "7/32"


def test_rmt_census_sigma(capsys):
    code, out, _ = run(capsys, "rmt", "census", "sigma", "--n", "2", "--q", "3")
    assert code == EXIT_OK
    doc = json.loads(out)
    num, den = map(int, doc["census"].split("/"))
    assert abs(num / den - 1 / 3) <= doc["bound"]


def test_rmt_limits(capsys):
    code, out, _ = run(capsys, "rmt", "limits", "--q", "5")
    assert code == EXIT_OK
    doc = json.loads(out)
    for key in ("alpha_inf", "alpha_star_inf", "beta_inf", "gamma_inf"):
        assert doc[key]["limit"] > 0 and doc[key]["bound"] < 1e-9


def test_rmt_mc_reproducible(capsys):
    _, out1, _ = run(capsys, "rmt", "mc", "selfdual", "--n", "4", "--q", "2",
                     "--trials", "200", "--seed", "3")
    _, out2, _ = run(capsys, "rmt", "mc", "selfdual", "--n", "4", "--q", "2",
                     "--trials", "200", "--seed", "3")
    assert json.loads(out1) == json.loads(out2)


def test_rmt_missing_quantity_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["rmt", "exact", "--q", "2"])
    assert exc.value.code == EXIT_USAGE
    capsys.readouterr()


def test_selftest(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == EXIT_OK
    assert "checks passed" in out
