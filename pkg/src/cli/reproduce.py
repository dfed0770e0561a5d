"""
Воспроизведение таблиц и наборов данных для рисунков

Каждая цель пишет CSV в curves/ архива и файл происхождения рядом с каждым CSV.
Масштаб desk урезает диапазоны N и число шагов, full повторяет исходные протоколы.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import replace
from typing import Dict, List, Optional, Sequence, Tuple

from src.analysis import (
    ScalingCurve,
    analytic_optimum,
    bandwidth_perturbation_study,
    bandwidth_scaling_curve,
    comparison_curves,
    coupling_asymmetry_study,
    parameter_scaling_study,
    protocol_config,
    provenance,
    uniform_shift_variance,
)
from src.analysis.export import curve_paths
from src.cli.archive import ResultArchive
from src.exceptions import DomainError, SpinThermoValidationError
from src.models import StarChainParams, StarParams, ksat_reference_curve, star_chain_spectrum, star_spectrum
from src.optimizer import BoundedSpace, OptimizerConfig, UniformInit, multi_restart
from src.thermo import single_spin_c_max

logger = logging.getLogger(__name__)

SCALES = ("desk", "full")
LN2_SQ_QUARTER = math.log(2.0) ** 2 / 4.0
CHAIN_LEAVES = 3


class ReproductionTarget(ABC):
    """Базовый класс цели воспроизведения"""

    name: str = "abstract"
    description: str = ""
    # Описание масштаба desk для --help
    desk_note: str = ""

    @abstractmethod
    def run(self, archive: ResultArchive, scale: str, beta: float) -> dict:
        """
        Расчёт цели и запись CSV в архив

        Returns:
            dict: краткая сводка для result.json
        """
        pass

    def meta(self, method: str, **extra) -> dict:
        return provenance(target=self.name, method=method, **extra)


# ===================== ТАБЛИЦА МОДЕЛЕЙ =====================

def star_degeneracy_formula(n: int) -> int:
    return 2 ** (n - 1) + n - 1


def ksat_degeneracy_formula(n: int) -> int:
    return 2 ** (n // 2) - 1


def star_chain_degeneracy_formula(n: int, m: int = CHAIN_LEAVES) -> int:
    leaves = m * n // (m + 1)
    return 2 ** leaves + leaves


def asymptotic_c_max(model: str, n: int, m: int = CHAIN_LEAVES) -> float:
    """Асимптотика C_max ~ (ln 2)^2/4 * (эффективное число спинов)^2"""
    if model == "ksat":
        return LN2_SQ_QUARTER * n ** 2 / 4.0
    if model == "star":
        return LN2_SQ_QUARTER * (n - 1) ** 2
    if model == "star_chain":
        return LN2_SQ_QUARTER * (m * n / (m + 1)) ** 2
    raise DomainError(f"нет асимптотики для {model!r}")


class ModelTableTarget(ReproductionTarget):
    """Кратность первого возбуждённого уровня, асимптотика C_max и локальность связей"""

    name = "table1"
    description = "модели, воспроизводящие эффективный спектр"
    desk_note = "N = 8..24 с шагом 4"
    SIZES = {"desk": range(8, 25, 4), "full": range(8, 49, 4)}

    def run(self, archive: ResultArchive, scale: str, beta: float) -> dict:
        rows = []
        for n in self.SIZES[scale]:
            rows.append(["ksat", n, ksat_degeneracy_formula(n), "", asymptotic_c_max("ksat", n),
                         ksat_reference_curve(n), False])

            # Кратность - на связанном оптимуме a = b(N - 3), C_max - по свободным (a, b)
            _, theta = analytic_optimum("star_constrained", n, beta)
            b = float(theta[0])
            found = star_spectrum(StarParams(n, b * (n - 3), b)).first_excited_degeneracy
            c_star, _ = analytic_optimum("star", n, beta)
            rows.append(["star", n, star_degeneracy_formula(n), found, asymptotic_c_max("star", n), c_star, False])

            c_chain, theta = analytic_optimum("star_chain", n, beta)
            params = StarChainParams(n // (CHAIN_LEAVES + 1), CHAIN_LEAVES, *(float(t) for t in theta))
            found = star_chain_spectrum(params).first_excited_degeneracy
            rows.append(["star_chain", n, star_chain_degeneracy_formula(n), found,
                         asymptotic_c_max("star_chain", n), c_chain, True])
            logger.info(f"table1: N={n} готово")

        header = ["model", "n", "first_excited_degeneracy", "found_degeneracy",
                  "asymptotic_c_max", "c_max", "short_range"]
        archive.write_table(self.name, header, rows,
                            self.meta("closed-form + lbfgs", beta=beta, scale=scale))
        return {"rows": len(rows)}


# ===================== ТАБЛИЦЫ ПАРАМЕТРОВ =====================

class ParameterTableTarget(ReproductionTarget):
    """Оптимальные (a, b) для Star в двух протоколах и (a, b, J) для Star-chain с m = 3"""

    desk_note = ""

    def __init__(self, name: str, sizes: Dict[str, range]):
        self.name = name
        self.sizes = sizes
        self.description = f"параметры Star и Star-chain, N = {sizes['full'].start}..{sizes['full'].stop - 1}"
        desk = sizes["desk"]
        self.desk_note = f"N = {desk.start}..{desk.stop - 1}"

    def run(self, archive: ResultArchive, scale: str, beta: float) -> dict:
        rows_range = self.sizes[scale]
        lo, hi = rows_range.start, rows_range.stop - 1
        # Тёплый старт идёт от наименьшего N, поэтому ряды считаются с начала
        star_ns = list(range(2, hi + 1))
        chain_ns = list(range(CHAIN_LEAVES + 1, hi + 1, CHAIN_LEAVES + 1))
        summary = {}

        studies = (
            ("unconstrained", "star", star_ns, True),
            ("constrained", "star", star_ns, False),
            ("star_chain", "star_chain", chain_ns, True),
        )
        for label, model, ns, polish in studies:
            protocol = "constrained" if label == "constrained" else "unconstrained"
            try:
                curves = parameter_scaling_study(model, ns, protocol, beta=beta, polish=polish,
                                                 open_chain=model == "star_chain")
            except Exception as e:
                logger.error(f"{self.name}/{label}: исследование не выполнено: {e}")
                summary[label] = {"error": str(e)}
                continue
            c_curve = curves["c"]
            keys = ["a", "b", "j"] if model == "star_chain" else ["a", "b"]
            rows = [
                [n, *(extra.get(k, "") for k in keys), value, c_curve.note]
                for (n, value), extra in zip(c_curve.points, c_curve.params)
                if lo <= n <= hi
            ]
            cfg = protocol_config(model, protocol)
            archive.write_table(
                f"{self.name}_{label}", ["n", *keys, "heat_capacity", "source"], rows,
                self.meta(c_curve.note, protocol=label, steps=cfg.steps, learning_rate=cfg.learning_rate,
                          beta=beta, scale=scale, open_chain=model == "star_chain"),
            )
            summary[label] = {"rows": len(rows), "source": c_curve.note}
        return summary


# ===================== КРИВЫЕ СРАВНЕНИЯ =====================

class ComparisonTarget(ReproductionTarget):
    """C_max(N) оптимальной границы и моделей сравнения"""

    def __init__(self, name: str, models: Sequence[str], sizes: Dict[str, range], description: str):
        self.name = name
        self.models = tuple(models)
        self.sizes = sizes
        self.description = description
        desk = sizes["desk"]
        self.desk_note = f"N = {desk.start}..{desk.stop - 1}"

    def run(self, archive: ResultArchive, scale: str, beta: float) -> dict:
        curves = comparison_curves(self.sizes[scale], beta, self.models)
        for name, curve in curves.items():
            method = {"c_opt": "closed-form", "non_interacting": "closed-form", "ksat": "closed-form"}.get(name, "lbfgs")
            archive.write_curve(curve, self.meta(method, beta=beta, scale=scale), name=f"{self.name}_{name}")
        x_single, c_single = single_spin_c_max()
        return {
            "curves": sorted(curves),
            "single_spin_c_max": c_single,
            "single_spin_gap": x_single,
        }


# ===================== МАСШТАБИРОВАНИЕ ПАРАМЕТРОВ =====================

class ParameterScalingTarget(ReproductionTarget):
    """Степенные законы a(N), b(N) для Star и плато b в протоколе со свободными (a, b)"""

    name = "fig7"
    description = "масштабирование оптимальных параметров Star и Star-chain"
    desk_note = "N = 2..30, окна подгонки [10, 30]"
    SIZES = {"desk": 30, "full": 50}
    WINDOWS = {"desk": {"a": (10, 30), "b": (10, 30)}, "full": {"a": (30, 50), "b": (10, 50)}}
    PLATEAU_FROM = 20

    def run(self, archive: ResultArchive, scale: str, beta: float) -> dict:
        hi = self.SIZES[scale]
        summary: Dict[str, dict] = {}
        studies = (
            ("star", "unconstrained", list(range(2, hi + 1)), self.WINDOWS[scale], True),
            ("star", "constrained", list(range(2, hi + 1)), None, False),
            ("star_chain", "unconstrained", list(range(4, hi + 1, 4)), None, True),
        )
        for model, protocol, ns, windows, polish in studies:
            label = f"{model}_{protocol}" if model == "star" else model
            try:
                curves = parameter_scaling_study(model, ns, protocol, beta=beta, windows=windows, polish=polish,
                                                 open_chain=model == "star_chain")
            except Exception as e:
                logger.error(f"fig7/{label}: исследование не выполнено: {e}")
                summary[label] = {"error": str(e)}
                continue
            entry: Dict[str, object] = {}
            for key, curve in curves.items():
                archive.write_curve(curve, self.meta(curve.note, protocol=protocol, beta=beta, scale=scale),
                                    name=f"fig7_{label}_{key}")
                if curve.power_law is not None:
                    entry[f"{key}_exponent"] = curve.power_law.exponent
            if protocol == "constrained":
                plateau = [v for n, v in curves["b"].points if n >= self.PLATEAU_FROM]
                entry["b_plateau"] = sum(plateau) / len(plateau) if plateau else None
            if model == "star":
                n_last, c_last = curves["c"].points[-1]
                entry["c_over_asymptote"] = c_last / asymptotic_c_max("star", n_last)
            summary[label] = entry
        return summary


# ===================== ОГРАНИЧЕННЫЕ ПАРАМЕТРЫ =====================

class BoundedTarget(ReproductionTarget):
    """Максимум C при |h_i|, |J_ij| <= c: прямая оптимизация через tanh"""

    name = "fig9"
    description = "оптимизация с ограниченными параметрами"
    desk_note = "c = 1.0, N = 3..14, 1500 шагов, 4 перезапуска"
    BOUNDS = {"desk": (1.0,), "full": (0.5, 1.0, 2.0)}
    SIZES = {"desk": range(3, 15), "full": range(3, 21)}
    CONFIGS = {
        "desk": OptimizerConfig(steps=1500, init=UniformInit(-1.5, 1.5), restarts=4,
                                restart_learning_rates=(0.01, 0.03)),
        "full": OptimizerConfig(steps=60000, init=UniformInit(-1.5, 1.5), restarts=12,
                                restart_learning_rates=(0.01,) * 6 + (0.03,) * 6),
    }

    def __init__(self, seed: int = 0):
        self.seed = seed

    def run(self, archive: ResultArchive, scale: str, beta: float) -> dict:
        cfg = replace(self.CONFIGS[scale], seed=self.seed)
        summary = {}
        for bound in self.BOUNDS[scale]:
            curve = ScalingCurve(f"fig9_c_{bound:g}")
            for n in self.SIZES[scale]:
                try:
                    run = multi_restart(BoundedSpace(n, bound), cfg, beta)
                except Exception as e:
                    logger.error(f"fig9: c={bound}, N={n} не выполнено: {e}")
                    continue
                curve.add(n, run.best_c, restart=run.restart)
                logger.info(f"fig9: c={bound}, N={n}: C = {run.best_c:.6f}")
            archive.write_curve(curve, self.meta("adam/tanh_bounded", bound_c=bound, steps=cfg.steps,
                                                 restarts=cfg.restarts, beta=beta, scale=scale, seed=self.seed))
            summary[f"{bound:g}"] = {"points": len(curve.points)}
        return summary


# ===================== ШУМ =====================

class NoiseTarget(ReproductionTarget):
    """Устойчивость вырожденного спектра: сдвиг щели, полоса и асимметрия поле/связь"""

    name = "noise"
    description = "устойчивость оптимального спектра к шуму"
    desk_note = "полоса для N = 4..14, 100 испытаний"
    SIZES = {"desk": range(4, 15, 2), "full": range(4, 21, 2)}
    EPSILONS = (-0.2, -0.1, -0.05, 0.0, 0.05, 0.1, 0.2)
    DELTA = 1.0

    def __init__(self, seed: int = 0):
        self.seed = seed

    def run(self, archive: ResultArchive, scale: str, beta: float) -> dict:
        rows = []
        for n in self.SIZES[scale]:
            d = 2 ** n - 1
            for eps in self.EPSILONS:
                rows.append([n, eps, uniform_shift_variance(d, eps), uniform_shift_variance(d, 0.0)])
        archive.write_table("noise_gap_shift", ["n", "epsilon", "variance", "unshifted_variance"], rows,
                            self.meta("closed-form", scale=scale))

        curve = bandwidth_scaling_curve(self.SIZES[scale], self.DELTA, seed=self.seed)
        archive.write_curve(curve, self.meta("sampled", delta=self.DELTA, seed=self.seed, scale=scale))
        largest = max(self.SIZES["desk"])
        study = bandwidth_perturbation_study(largest, self.DELTA, seed=self.seed)

        star_n = 7
        b = 1.267
        star = StarParams(star_n, b * (star_n - 3), b)
        deviations = [0.05 * (-1) ** i for i in range(star_n - 1)]
        asymmetry = coupling_asymmetry_study(star, deviations, beta)
        return {
            "bandwidth": study.to_dict(),
            "coupling_asymmetry": asymmetry.to_dict(),
        }


# ===================== РЕЕСТР =====================

def build_targets(seed: int = 0) -> List[ReproductionTarget]:
    return [
        ModelTableTarget(),
        ParameterTableTarget("table2", {"desk": range(2, 25), "full": range(2, 25)}),
        ParameterTableTarget("table3", {"desk": range(25, 31), "full": range(25, 51)}),
        ComparisonTarget(
            "fig1", ("c_opt", "star", "ising", "non_interacting"),
            {"desk": range(2, 17), "full": range(2, 31)},
            "C_max(N): граница, Star, Ising 1D и невзаимодействующие спины",
        ),
        ComparisonTarget(
            "fig6", ("c_opt", "star", "star_chain", "ising", "all_to_all", "ksat", "non_interacting"),
            {"desk": range(2, 25), "full": range(2, 51)},
            "C_max(N) всех моделей сравнения",
        ),
        ParameterScalingTarget(),
        BoundedTarget(seed),
        NoiseTarget(seed),
    ]


TARGET_NAMES = tuple(t.name for t in build_targets())


def target_help() -> str:
    return "; ".join(f"{t.name}: {t.description} (desk: {t.desk_note})" for t in build_targets())


def run_target(target: ReproductionTarget, archive: ResultArchive, scale: str, beta: float) -> dict:
    archive.write_config({"target": target.name, "scale": scale, "beta": beta, "schema_version": 1})
    summary = target.run(archive, scale, beta)
    result = {
        "target": target.name,
        "scale": scale,
        "summary": summary,
        "files": [name for name, _ in curve_paths(archive.curves_dir)],
    }
    archive.write_result(result, provenance(target=target.name, scale=scale, beta=beta))
    archive.index(status="ok")
    return result


def cmd_reproduce(
    targets: Sequence[str],
    out_root,
    scale: str = "desk",
    beta: float = 1.0,
    seed: int = 0,
) -> Dict[str, Optional[dict]]:
    """
    Воспроизведение целей по именам ("all" - все); ошибка одной цели
    записывается в журнал и не прерывает остальные
    """
    if scale not in SCALES:
        raise SpinThermoValidationError("scale", f"ожидалось одно из {SCALES}")
    registry = {t.name: t for t in build_targets(seed)}
    names: Tuple[str, ...] = tuple(registry) if "all" in targets else tuple(targets)
    unknown = [n for n in names if n not in registry]
    if unknown:
        raise SpinThermoValidationError("target", f"неизвестные цели: {', '.join(unknown)}; доступны: {', '.join(registry)}")

    results: Dict[str, Optional[dict]] = {}
    for name in names:
        target = registry[name]
        try:
            logger.info(f"Воспроизведение {name} ({scale})...")
            with ResultArchive(out_root, f"reproduce-{name}-{scale}", "reproduce") as archive:
                results[name] = run_target(target, archive, scale, beta)
                results[name]["archive"] = str(archive.path)
            logger.info(f"{name}: готово")
        except Exception as e:
            logger.error(f"Ошибка при воспроизведении {name}: {e}")
            if len(names) == 1:
                raise
            results[name] = None
            continue
    return results
