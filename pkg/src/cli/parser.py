"""
Разбор аргументов командной строки и диспетчеризация команд
"""

import argparse
import json
import logging
from pathlib import Path
from typing import List, Optional

from config.settings import Settings
from src.cli.commands import (
    CHIMERA_UNITS,
    METHODS,
    cmd_chimera,
    cmd_evaluate,
    cmd_optimize,
    cmd_runs,
    format_runs,
    format_stats,
)
from src.cli.reproduce import SCALES, TARGET_NAMES, cmd_reproduce, target_help

logger = logging.getLogger(__name__)


def _common(parser: argparse.ArgumentParser, settings: Settings):
    parser.add_argument("--beta", type=float, default=1.0, help="обратная температура (по умолчанию 1.0)")
    parser.add_argument("--threads", type=int, default=settings.THREADS,
                        help=f"потоки перебора (по умолчанию {settings.THREADS})")
    parser.add_argument("--seed", type=int, default=None, help="зерно генератора")
    parser.add_argument("--out", type=Path, default=settings.OUTPUT_DIR,
                        help="корень архива результатов (или SPINTHERMO_OUT)")


def build_parser(settings: Optional[Settings] = None) -> argparse.ArgumentParser:
    settings = settings or Settings()
    parser = argparse.ArgumentParser(
        prog="spinthermo",
        description="Спиновые сети с максимальной теплоёмкостью для равновесной термометрии",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    evaluate = sub.add_parser("evaluate", help="ln Z, <E>, Var(E), C модели из JSON-файла")
    evaluate.add_argument("model", type=Path)
    evaluate.add_argument("--method", choices=METHODS, default="auto",
                          help="auto: аналитика, со сверкой перебором при N <= 14")
    evaluate.add_argument("--spectrum", type=Path, default=None, help="записать спектр в JSON")
    _common(evaluate, settings)

    optimize = sub.add_parser("optimize", help="оптимизация по конфигурации эксперимента")
    optimize.add_argument("config", type=Path)
    optimize.add_argument("--steps", type=int, default=None, help="переопределить число шагов")
    _common(optimize, settings)

    reproduce = sub.add_parser("reproduce", help="пересчёт таблиц и данных рисунков",
                               epilog=target_help())
    reproduce.add_argument("targets", nargs="+", choices=TARGET_NAMES + ("all",), metavar="target")
    reproduce.add_argument("--scale", choices=SCALES, default="desk",
                           help="desk - урезанные диапазоны (минуты), full - исходные протоколы")
    _common(reproduce, settings)

    chimera = sub.add_parser("chimera", help="прямая оптимизация на графе Chimera")
    chimera.add_argument("units", type=int, choices=CHIMERA_UNITS)
    chimera.add_argument("--long", action="store_true", help="разрешить многочасовой запуск (3 ячейки)")
    chimera.add_argument("--steps", type=int, default=None, help="переопределить 20000 шагов протокола")
    chimera.add_argument("--parallel", action="store_true", help="перезапуски в отдельных процессах")
    _common(chimera, settings)

    runs = sub.add_parser("runs", help="проиндексированные запуски")
    runs.add_argument("--since", default=None, help="дата в свободной форме, например '2024-05-01' или 'May 1'")
    runs.add_argument("--limit", type=int, default=20)
    runs.add_argument("--json", action="store_true", help="вывод в JSON")
    return parser


def dispatch(args: argparse.Namespace, settings: Optional[Settings] = None) -> int:
    settings = settings or Settings()
    seed = getattr(args, "seed", None)

    if args.command == "evaluate":
        result = cmd_evaluate(args.model, args.beta, args.method, args.spectrum, args.threads)
        print(format_stats(result))
        return 0

    if args.command == "optimize":
        result = cmd_optimize(args.config, args.out, seed, args.threads, args.steps, args.beta)
        print(f"C = {result['best_c']!r}; структура: {result.get('structure', {}).get('verdict', '-')}")
        print(f"архив: {result['archive']}")
        return 0

    if args.command == "reproduce":
        seed = settings.SEED if seed is None else seed
        results = cmd_reproduce(args.targets, args.out, args.scale, args.beta, seed)
        failed = [name for name, result in results.items() if result is None]
        for name, result in results.items():
            print(f"{name}: {'ошибка, см. журнал' if result is None else result['archive']}")
        return 1 if failed else 0

    if args.command == "chimera":
        seed = settings.SEED if seed is None else seed
        result = cmd_chimera(args.units, args.out, args.long, seed, args.steps, args.beta,
                             args.threads, args.parallel)
        print(f"C = {result['best_c']!r}; структура: {result.get('structure', {}).get('verdict', '-')}")
        print(f"привилегированные спины по ячейкам: {result.get('privileged_per_unit')}")
        print(f"архив: {result['archive']}")
        return 0

    rows = cmd_runs(args.since, args.limit)
    print(json.dumps(rows, indent=2, ensure_ascii=False) if args.json else format_runs(rows))
    return 0


def run(argv: Optional[List[str]] = None) -> int:
    settings = Settings()
    args = build_parser(settings).parse_args(argv)
    return dispatch(args, settings)
