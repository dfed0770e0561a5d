import csv
import json
from datetime import datetime

import pytest

import main
from src.analysis import analytic_optimum
from src.cli import (
    ExperimentConfig,
    ResultArchive,
    build_parser,
    check_agreement,
    cmd_chimera,
    cmd_evaluate,
    cmd_optimize,
    cmd_reproduce,
    cmd_runs,
)
from src.cli.commands import parse_since
from src.cli.reproduce import BoundedTarget, star_degeneracy_formula
from src.exceptions import (
    NumericalTripwireError,
    RuntimeGateRefused,
    SpinThermoError,
    SpinThermoValidationError,
)
from src.optimizer import OptimizerConfig, UniformInit
from src.thermo import Spectrum, ThermalStats, c_opt


# ===================== EVALUATE =====================

def test_evaluate_star_is_between_ideal_models(models_dir):
    result = cmd_evaluate(models_dir / "star_n7.json")
    assert result["method"] == "analytic"
    assert result["cross_checked"] is True
    assert c_opt(2 ** 6) <= result["heat_capacity"] <= c_opt(2 ** 7)


def test_evaluate_zero_model_has_no_heat_capacity(models_dir):
    result = cmd_evaluate(models_dir / "zero_n5.json")
    assert result["method"] == "enumerate"
    assert result["heat_capacity"] == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("name", [
    "star_n7", "star_n12", "star_chain_n8", "ising_n10", "all_to_all_n8", "all_to_all_n4_generic",
])
def test_shipped_models_pass_cross_check(models_dir, name):
    analytic = cmd_evaluate(models_dir / f"{name}.json", method="auto")
    enumerated = cmd_evaluate(models_dir / f"{name}.json", method="enumerate")
    assert analytic["heat_capacity"] == pytest.approx(enumerated["heat_capacity"], rel=1e-8)


def test_evaluate_writes_spectrum(models_dir, tmp_path):
    result = cmd_evaluate(models_dir / "star_chain_n8.json", spectrum_path=tmp_path / "spectrum.json")
    spectrum = Spectrum.from_json((tmp_path / "spectrum.json").read_text())
    assert spectrum.total_dim == 2 ** 8
    assert spectrum.ground_energy == 0.0
    assert result["spectrum"].endswith("spectrum.json")


def test_evaluate_rejects_analytic_for_generic(models_dir):
    with pytest.raises(SpinThermoValidationError, match="замкнутой формулы"):
        cmd_evaluate(models_dir / "zero_n5.json", method="analytic")


def test_tripwire_on_disagreement():
    good = ThermalStats(1.0, 2.0, 0.5, 0.25, 0.25)
    check_agreement(good, ThermalStats(1.0, 2.0 + 1e-12, 0.5, 0.25, 0.25), "ok")
    with pytest.raises(NumericalTripwireError, match="heat_capacity"):
        check_agreement(good, ThermalStats(1.0, 2.0, 0.5, 0.26, 0.26), "bad")


# ===================== АРХИВ =====================

def test_archive_refuses_overwrite(archive_root):
    with ResultArchive(archive_root, "demo", "optimize") as archive:
        archive.write_result({"best_c": 1.0})
        with pytest.raises(SpinThermoError, match="неизменяемы"):
            archive.write_result({"best_c": 2.0})
    assert (archive.path / "log.txt").exists()
    assert json.loads((archive.path / "result.json").read_text()) == {"best_c": 1.0}


def test_archive_names_never_collide(archive_root):
    moment = datetime(2024, 5, 1, 12, 0, 0)
    first = ResultArchive(archive_root, "demo", "optimize", now=moment)
    second = ResultArchive(archive_root, "demo", "optimize", now=moment)
    assert first.name == "20240501T120000-demo"
    assert second.name == "20240501T120000-demo-1"


def test_archive_index_and_runs_listing(archive_root, db_url):
    archive = ResultArchive(archive_root, "indexed", "optimize", now=datetime(2024, 5, 2, 9, 30))
    assert archive.index(n_spins=7, best_c=3.5, verdict="star", seed=1)
    rows = cmd_runs(since="May 1 2024")
    assert [r["name"] for r in rows] == [archive.name]
    assert rows[0]["verdict"] == "star"
    assert cmd_runs(since="2024-06-01") == []


def test_parse_since():
    assert parse_since("2024-05-01") == datetime(2024, 5, 1)
    assert parse_since(None) is None
    with pytest.raises(SpinThermoValidationError):
        parse_since("не дата")


# ===================== OPTIMIZE =====================

def test_shipped_experiment_configs_parse(experiments_dir):
    for path in sorted(experiments_dir.glob("*.json")):
        cfg = ExperimentConfig.load(path)
        assert ExperimentConfig.from_dict(cfg.to_dict()).to_dict() == cfg.to_dict()


@pytest.mark.parametrize("payload, field", [
    ({"name": "x", "space": "direct", "n_spins": 4}, "schema_version"),
    ({"schema_version": 1, "name": "x", "space": "direct", "n_spins": 4, "extra": 1}, "config"),
    ({"schema_version": 1, "name": "x", "space": "anneal", "n_spins": 4}, "space"),
    ({"schema_version": 1, "name": "x", "space": "tied", "n_spins": 4, "model": "potts"}, "model"),
    ({"schema_version": 1, "name": "x", "space": "bounded", "n_spins": 4}, "optimizer.bound_c"),
    ({"schema_version": 1, "name": "x", "space": "direct", "n_spins": 31}, "n_spins"),
])
def test_experiment_config_validation(payload, field):
    with pytest.raises(SpinThermoValidationError) as info:
        ExperimentConfig.from_dict(payload)
    assert info.value.field == field


def test_optimize_with_zero_steps_archives_everything(experiments_dir, archive_root):
    result = cmd_optimize(experiments_dir / "star_chain_n24.json", archive_root, steps=0)
    run = result["run"]
    assert run["best_step"] == 0
    assert run["best_theta"] == [6.0, 2.4, -2.9]
    archive = archive_root / result["archive"].split("/")[-1]
    for name in ("config.json", "result.json", "log.txt", "curves/trajectory.csv"):
        assert (archive / name).exists()
    config = json.loads((archive / "config.json").read_text())
    assert config["optimizer"]["steps"] == 0
    assert result["structure"]["verdict"] == "star-chain m=3 embedding"


def test_repeated_optimize_writes_identical_results(experiments_dir, archive_root):
    paths = []
    for _ in range(2):
        result = cmd_optimize(experiments_dir / "emergence_n4.json", archive_root, steps=30)
        paths.append(archive_root / result["archive"].split("/")[-1])
    first, second = paths
    assert first != second
    assert (first / "result.json").read_bytes() == (second / "result.json").read_bytes()
    assert "wall_time" not in (first / "result.json").read_text()

    meta = json.loads((first / "result.json.provenance.json").read_text())
    assert meta["wall_time"] >= 0.0
    assert meta["method"] == "adam/direct"
    assert "timestamp" in meta
    trajectory_meta = json.loads((first / "curves" / "trajectory.csv.provenance.json").read_text())
    assert trajectory_meta["seed"] == 0


def test_optimize_tied_records_spectrum_and_noise(experiments_dir, archive_root):
    result = cmd_optimize(experiments_dir / "star_n7_asymmetry.json", archive_root, steps=200)
    assert result["noise"]["kind"] == "coupling_asymmetry"
    assert "ratio" in result["noise"]
    assert result["spectrum"]["enumerated_c"] == pytest.approx(result["best_c"], rel=1e-8)


def test_optimize_missing_config(tmp_path, archive_root):
    with pytest.raises(SpinThermoValidationError, match="не удалось прочитать"):
        cmd_optimize(tmp_path / "missing.json", archive_root)


# ===================== CHIMERA =====================

def test_three_unit_chimera_needs_long_flag(archive_root):
    with pytest.raises(RuntimeGateRefused) as info:
        cmd_chimera(3, archive_root, threads=1)
    assert info.value.estimate_hours > 1.0
    assert not archive_root.exists()


def test_chimera_units_validated(archive_root):
    with pytest.raises(SpinThermoValidationError):
        cmd_chimera(4, archive_root)


@pytest.mark.slow
def test_single_unit_chimera_reaches_embedded_chain(archive_root):
    result = cmd_chimera(1, archive_root, seed=0)
    embedded, _ = analytic_optimum("star_chain", 8, open_chain=True, starts=[(1.964, 1.101, -1.191)])
    assert result["best_c"] >= 0.99 * embedded
    assert len(result["privileged_per_unit"]) == 1


@pytest.mark.slow
def test_two_unit_chimera_finds_star_chain_embedding(archive_root):
    result = cmd_chimera(2, archive_root, seed=0)
    assert result["structure"]["verdict"] == "star-chain m=3 embedding"
    assert [len(unit) for unit in result["privileged_per_unit"]] == [2, 2]
    embedded, _ = analytic_optimum("star_chain", 16, open_chain=True, starts=[(4.968, 2.026, -2.038)])
    assert result["best_c"] >= 0.99 * embedded


# ===================== REPRODUCE =====================

def read_rows(path):
    with path.open(newline="") as f:
        return list(csv.DictReader(f))


def test_model_table_desk(archive_root):
    results = cmd_reproduce(["table1"], archive_root)
    archive = archive_root / results["table1"]["archive"].split("/")[-1]
    rows = read_rows(archive / "curves" / "table1.csv")
    assert len(rows) == 15
    for row in rows:
        if row["model"] == "star":
            assert int(row["found_degeneracy"]) == star_degeneracy_formula(int(row["n"]))
    assert (archive / "curves" / "table1.csv.provenance.json").exists()
    assert results["table1"]["files"] == ["table1"]


def test_reproduce_unknown_target(archive_root):
    with pytest.raises(SpinThermoValidationError, match="неизвестные цели"):
        cmd_reproduce(["table9"], archive_root)


def test_bounded_target_respects_bound(archive_root, monkeypatch):
    monkeypatch.setitem(BoundedTarget.SIZES, "desk", range(3, 5))
    monkeypatch.setitem(BoundedTarget.CONFIGS, "desk", OptimizerConfig(
        steps=50, init=UniformInit(-1.5, 1.5), restarts=2, restart_learning_rates=(0.01, 0.03),
    ))
    results = cmd_reproduce(["fig9"], archive_root, seed=4)
    archive = archive_root / results["fig9"]["archive"].split("/")[-1]
    rows = read_rows(archive / "curves" / "fig9_c_1.csv")
    assert [int(r["n"]) for r in rows] == [3, 4]
    assert all(float(r["value"]) <= c_opt(2 ** int(r["n"])) for r in rows)


@pytest.mark.slow
def test_parameter_table_desk_rows(archive_root):
    results = cmd_reproduce(["table2"], archive_root)
    curves = archive_root / results["table2"]["archive"].split("/")[-1] / "curves"
    unconstrained = {int(r["n"]): r for r in read_rows(curves / "table2_unconstrained.csv")}
    assert float(unconstrained[7]["b"]) == pytest.approx(1.267, abs=0.005)
    assert float(unconstrained[20]["a"]) == pytest.approx(57.243, abs=0.005)
    assert unconstrained[7]["source"] == "adam+lbfgs"
    constrained = {int(r["n"]): r for r in read_rows(curves / "table2_constrained.csv")}
    assert float(constrained[20]["b"]) == pytest.approx(2.328, abs=0.01)
    chain = {int(r["n"]): r for r in read_rows(curves / "table2_star_chain.csv")}
    assert float(chain[12]["j"]) == pytest.approx(-1.612, abs=0.005)
    assert float(chain[12]["b"]) == pytest.approx(1.559, abs=0.005)


# ===================== ТОЧКА ВХОДА =====================

def test_parser_rejects_unknown_target():
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(["reproduce", "table9"])
    assert info.value.code == 2


def test_parser_common_flags(tmp_path):
    args = build_parser().parse_args(["chimera", "2", "--long", "--beta", "0.5", "--out", str(tmp_path)])
    assert (args.units, args.long, args.beta, args.out) == (2, True, 0.5, tmp_path)


@pytest.mark.parametrize("error, code", [
    (SpinThermoValidationError("x", "y"), 2),
    (NumericalTripwireError("z"), 3),
    (RuntimeGateRefused("long", 5.0), 4),
    (SpinThermoError("other"), 1),
])
def test_exit_codes(error, code):
    assert main.exit_code(error) == code


def test_main_returns_exit_code(tmp_path, archive_root, models_dir, capsys):
    assert main.main(["evaluate", str(tmp_path / "absent.json")]) == 2
    assert main.main(["chimera", "3", "--out", str(archive_root)]) == 4
    assert main.main(["evaluate", str(models_dir / "star_n7.json")]) == 0
    assert "C      =" in capsys.readouterr().out


def test_main_rejects_model_outside_domain(tmp_path):
    path = tmp_path / "tiny_star.json"
    path.write_text(json.dumps({"schema_version": 1, "model": "star", "n_spins": 1, "a": 1.0, "b": 1.0}))
    with pytest.raises(SpinThermoValidationError, match="N >= 2"):
        cmd_evaluate(path)
    assert main.main(["evaluate", str(path)]) == 2
