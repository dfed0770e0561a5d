"""
Команды CLI: evaluate, optimize, chimera, reproduce, runs
"""

import asyncio
import logging
import math
from dataclasses import replace
from datetime import datetime
from pathlib import Path
from typing import List, Optional, Sequence

from dateutil import parser as date_parser

from src.analysis import (
    DEFAULT_TRIALS,
    bandwidth_perturbation_study,
    coupling_asymmetry_study,
    provenance,
    uniform_shift_variance,
)
from src.cli.archive import ResultArchive
from src.cli.config import ExperimentConfig
from src.database import dispose_engines, get_recent_runs, get_runs_since, init_db
from src.enumeration import configure_threads, enumerate_spectrum, enumerate_stats
from src.exceptions import (
    NumericalTripwireError,
    RuntimeGateRefused,
    SpinThermoValidationError,
)
from src.models import (
    MAX_SPINS,
    StarParams,
    analytic_spectrum,
    analytic_stats,
    chimera_topology,
    load_model,
    parse_topology,
    render_model,
)
from src.models.chimera import UNIT_SIZE
from src.optimizer import (
    BoundedSpace,
    DirectSpace,
    OptimizationRun,
    OptimizerConfig,
    ParameterSpace,
    TiedSpace,
    UniformInit,
    detect_structure,
    multi_restart,
    privileged_per_unit,
)
from src.thermo import ThermalStats

logger = logging.getLogger(__name__)

METHODS = ("auto", "enumerate", "analytic")
CROSS_CHECK_SPINS = 14
RECHECK_SPINS = 20
TRIPWIRE_RTOL = 1e-8
TRIPWIRE_ATOL = 1e-12

CHIMERA_UNITS = (1, 2, 3)
CHIMERA_PROTOCOL = OptimizerConfig(
    steps=20000,
    init=UniformInit(-1.5, 1.5),
    restarts=3,
    restart_learning_rates=(0.01, 0.03, 0.03),
)
# Грубая оценка: наносекунда на конфигурацию и параметр в одном потоке
SECONDS_PER_STATE_PARAM = 1e-9


# ===================== EVALUATE =====================

def _mismatch(x: float, y: float) -> bool:
    diff = abs(x - y)
    return diff > TRIPWIRE_ATOL and diff > TRIPWIRE_RTOL * max(abs(x), abs(y))


def check_agreement(analytic: ThermalStats, enumerated: ThermalStats, label: str):
    """Расхождение ln Z или C аналитики и перебора - ошибка, а не предупреждение"""
    for name in ("log_partition", "heat_capacity"):
        a, e = getattr(analytic, name), getattr(enumerated, name)
        if _mismatch(a, e):
            raise NumericalTripwireError(
                f"{label}: {name} аналитически {a!r}, перебором {e!r} (отн. расхождение {abs(a - e) / max(abs(a), abs(e)):.3e})"
            )


def cmd_evaluate(
    model_path: Path,
    beta: float = 1.0,
    method: str = "auto",
    spectrum_path: Optional[Path] = None,
    threads: Optional[int] = None,
) -> dict:
    """ln Z, <E>, Var(E), C модели из файла; при auto - сверка двух путей для N <= 14"""
    if method not in METHODS:
        raise SpinThermoValidationError("method", f"ожидалось одно из {METHODS}")
    configure_threads(threads)
    model = load_model(model_path)
    n_spins = model.n_spins
    analytic = analytic_stats(model, beta) if method != "enumerate" else None

    if method == "analytic" and analytic is None:
        raise SpinThermoValidationError("method", "для произвольного гамильтониана нет замкнутой формулы")
    need_enumeration = method == "enumerate" or analytic is None or n_spins <= CROSS_CHECK_SPINS
    if need_enumeration and method != "analytic":
        if n_spins > MAX_SPINS:
            raise SpinThermoValidationError("n_spins", f"перебор ограничен {MAX_SPINS} спинами")
        enumerated = enumerate_stats(render_model(model), beta, threads)
    else:
        enumerated = None

    if analytic is not None and enumerated is not None:
        check_agreement(analytic, enumerated, str(model_path))
        logger.info(f"{model_path}: аналитика и перебор совпали")
    stats = analytic if analytic is not None else enumerated
    used = "analytic" if analytic is not None else "enumerate"

    result = {"model": str(model_path), "n_spins": n_spins, "method": used,
              "cross_checked": analytic is not None and enumerated is not None, **stats.to_dict()}
    if spectrum_path is not None:
        spectrum = analytic_spectrum(model) if method != "enumerate" else None
        if spectrum is None:
            spectrum = enumerate_spectrum(render_model(model), threads)
        spectrum_path = Path(spectrum_path)
        spectrum_path.parent.mkdir(parents=True, exist_ok=True)
        spectrum_path.write_text(spectrum.to_json(), encoding="utf-8")
        result["spectrum"] = str(spectrum_path)
    return result


# ===================== OPTIMIZE =====================

def build_space(cfg: ExperimentConfig) -> ParameterSpace:
    if cfg.space == "tied":
        return TiedSpace.of(cfg.model, cfg.n_spins, cfg.leaves_per_unit, cfg.open_chain)
    topology = parse_topology(cfg.topology, cfg.n_spins)
    name = cfg.topology if isinstance(cfg.topology, str) else "custom"
    if cfg.space == "bounded":
        return BoundedSpace(cfg.n_spins, cfg.optimizer.bound_c, topology, name)
    return DirectSpace(cfg.n_spins, topology, name)


def apply_noise(cfg: ExperimentConfig, space: ParameterSpace, run: OptimizationRun, spectrum_summary: Optional[dict]) -> dict:
    """Оценка устойчивости найденного решения к шуму, заданному в конфигурации"""
    noise = cfg.noise
    if noise.kind == "uniform_gap_shift":
        d = (spectrum_summary or {}).get("first_excited_degeneracy") or 2 ** cfg.n_spins - 1
        variance = uniform_shift_variance(d, noise.epsilon)
        clean = uniform_shift_variance(d, 0.0)
        return {"kind": noise.kind, "d": d, "epsilon": noise.epsilon,
                "variance": variance, "ratio_to_unshifted": variance / clean}
    if noise.kind == "bandwidth":
        study = bandwidth_perturbation_study(cfg.n_spins, noise.delta, DEFAULT_TRIALS, noise.seed, noise.distribution)
        return {"kind": noise.kind, **study.to_dict()}
    if not isinstance(space, TiedSpace) or cfg.model not in ("star", "star_constrained"):
        raise SpinThermoValidationError("noise.kind", "coupling_asymmetry определена только для связанной модели Star")
    star = space.model.params(run.best_theta)
    if not isinstance(star, StarParams):
        raise SpinThermoValidationError("noise.kind", "coupling_asymmetry требует параметры Star")
    report = coupling_asymmetry_study(star, noise.deviations, cfg.beta)
    return {"kind": noise.kind, **report.to_dict()}


def summarize_found(hm, beta: float, best_c: float, threads: Optional[int] = None) -> dict:
    """Спектр и повторная оценка C перебором для найденного гамильтониана"""
    spectrum = enumerate_spectrum(hm, threads)
    enumerated = enumerate_stats(hm, beta, threads)
    if _mismatch(enumerated.heat_capacity, best_c):
        raise NumericalTripwireError(f"C оптимизатора {best_c!r} и перебора {enumerated.heat_capacity!r} расходятся")
    return {
        "n_levels": spectrum.n_levels,
        "ground_degeneracy": spectrum.degeneracies[0],
        "first_excited_degeneracy": spectrum.first_excited_degeneracy,
        "first_gap": spectrum.energies[1] if spectrum.n_levels > 1 else None,
        "enumerated_c": enumerated.heat_capacity,
    }


def run_experiment(
    cfg: ExperimentConfig,
    archive: ResultArchive,
    threads: Optional[int] = None,
    unit_size: Optional[int] = None,
) -> dict:
    """Оптимизация по конфигурации с записью config.json, result.json и траектории"""
    archive.write_config(cfg.to_dict())
    space = build_space(cfg)
    run = multi_restart(space, cfg.optimizer, cfg.beta, cfg.parallel)

    result = {"run": run.to_dict(), "best_c": run.best_c}
    hm = space.render(run.best_theta)
    spectrum_summary = None
    if hm is not None:
        report = detect_structure(hm)
        result["structure"] = report.to_dict()
        result["hamiltonian"] = hm.to_dict()
        if unit_size:
            result["privileged_per_unit"] = privileged_per_unit(hm, unit_size)
        if hm.n_spins <= RECHECK_SPINS:
            spectrum_summary = summarize_found(hm, cfg.beta, run.best_c, threads)
            result["spectrum"] = spectrum_summary
        logger.info(f"{cfg.name}: C = {run.best_c:.6f}, структура {report.verdict}")
    if cfg.noise is not None:
        try:
            result["noise"] = apply_noise(cfg, space, run, spectrum_summary)
        except Exception as e:
            logger.error(f"{cfg.name}: оценка шума не выполнена: {e}")
            result["noise"] = {"kind": cfg.noise.kind, "error": str(e)}

    result["config"] = cfg.to_dict()
    meta = provenance(cfg.optimizer.seed, method=f"adam/{space.kind}", threads=threads)
    archive.write_table("trajectory", ["step", "heat_capacity", "learning_rate"],
                        [[p.step, p.heat_capacity, p.learning_rate] for p in run.trajectory],
                        dict(meta, restart=run.restart))
    archive.write_result(result, dict(meta, wall_time=run.wall_time))
    archive.index(
        n_spins=cfg.n_spins,
        best_c=run.best_c,
        verdict=result.get("structure", {}).get("verdict"),
        seed=cfg.optimizer.seed,
    )
    return result


def cmd_optimize(
    config_path: Path,
    out_root: Path,
    seed: Optional[int] = None,
    threads: Optional[int] = None,
    steps: Optional[int] = None,
    beta: Optional[float] = None,
) -> dict:
    cfg = ExperimentConfig.load(config_path)
    overrides = {}
    if seed is not None:
        overrides["seed"] = seed
    if steps is not None:
        overrides["steps"] = steps
    if overrides:
        cfg = replace(cfg, optimizer=replace(cfg.optimizer, **overrides))
    if beta is not None:
        cfg = replace(cfg, beta=beta)
    configure_threads(threads)
    with ResultArchive(out_root, cfg.name, "optimize") as archive:
        result = run_experiment(cfg, archive, threads)
        result["archive"] = str(archive.path)
    return result


# ===================== CHIMERA =====================

def chimera_runtime_hours(cfg: OptimizerConfig, n_spins: int, n_params: int, threads: int) -> float:
    seconds = cfg.restarts * cfg.steps * 2 ** n_spins * n_params * SECONDS_PER_STATE_PARAM
    return seconds / 3600.0 / max(1, threads)


def chimera_config(units: int, seed: int = 0, steps: Optional[int] = None, beta: float = 1.0,
                   parallel: bool = False) -> ExperimentConfig:
    optimizer = replace(CHIMERA_PROTOCOL, seed=seed)
    if steps is not None:
        optimizer = replace(optimizer, steps=steps)
    return ExperimentConfig(
        name=f"chimera-{units}",
        space="direct",
        n_spins=UNIT_SIZE * units,
        topology=f"chimera:{units}",
        beta=beta,
        optimizer=optimizer,
        parallel=parallel,
    )


def cmd_chimera(
    units: int,
    out_root: Path,
    allow_long: bool = False,
    seed: int = 0,
    steps: Optional[int] = None,
    beta: float = 1.0,
    threads: Optional[int] = None,
    parallel: bool = False,
) -> dict:
    """Прямая оптимизация с маской Chimera; 3 ячейки (24 спина) только с --long"""
    if units not in CHIMERA_UNITS:
        raise SpinThermoValidationError("units", f"ожидалось одно из {CHIMERA_UNITS}")
    cfg = chimera_config(units, seed, steps, beta, parallel)
    threads = configure_threads(threads)
    n_params = cfg.n_spins + len(chimera_topology(units))
    hours = chimera_runtime_hours(cfg.optimizer, cfg.n_spins, n_params, threads)
    if units == 3 and not allow_long:
        raise RuntimeGateRefused(
            f"Chimera из 3 ячеек: оценка {hours:.1f} ч на {threads} потоках; запустите с --long", hours
        )
    logger.info(f"Chimera {units} яч.: {cfg.n_spins} спинов, {n_params} параметров, оценка {hours:.2f} ч")
    with ResultArchive(out_root, cfg.name, "chimera") as archive:
        result = run_experiment(cfg, archive, threads, unit_size=UNIT_SIZE)
        result["archive"] = str(archive.path)
    return result


# ===================== RUNS =====================

def parse_since(value: Optional[str]) -> Optional[datetime]:
    if value is None:
        return None
    try:
        return date_parser.parse(value)
    except (ValueError, OverflowError) as e:
        raise SpinThermoValidationError("since", f"не удалось разобрать дату {value!r}: {e}")


def cmd_runs(since: Optional[str] = None, limit: int = 20, url: Optional[str] = None) -> List[dict]:
    """Список проиндексированных запусков, новые первыми"""
    moment = parse_since(since)

    async def _query():
        try:
            await init_db(url)
            if moment is None:
                records = await get_recent_runs(limit, url)
            else:
                records = await get_runs_since(moment, limit, url)
            return [
                {
                    "name": r.name,
                    "command": r.command,
                    "created_at": r.created_at.isoformat() if r.created_at else None,
                    "n_spins": r.n_spins,
                    "best_c": r.best_c,
                    "verdict": r.verdict,
                    "status": r.status,
                    "path": r.path,
                }
                for r in records
            ]
        finally:
            await dispose_engines()

    return asyncio.run(_query())


def format_stats(result: dict) -> str:
    lines = [
        f"ln Z   = {result['log_partition']!r}",
        f"<E>    = {result['mean_energy']!r}",
        f"Var(E) = {result['energy_variance']!r}",
        f"C      = {result['heat_capacity']!r}",
        f"метод  = {result['method']}" + (" (сверено с перебором)" if result.get("cross_checked") else ""),
    ]
    return "\n".join(lines)


def format_runs(rows: Sequence[dict]) -> str:
    if not rows:
        return "Запусков нет"
    lines = []
    for row in rows:
        c = "-" if row["best_c"] is None or not math.isfinite(row["best_c"]) else f"{row['best_c']:.6f}"
        lines.append(f"{row['created_at']}  {row['command']:<10} {row['name']}  C={c}  {row['verdict'] or ''}")
    return "\n".join(lines)
