"""CLI Package"""
from src.cli.archive import ResultArchive
from src.cli.config import ExperimentConfig
from src.cli.commands import (
    build_space,
    check_agreement,
    cmd_chimera,
    cmd_evaluate,
    cmd_optimize,
    cmd_runs,
    run_experiment,
)
from src.cli.reproduce import TARGET_NAMES, ReproductionTarget, build_targets, cmd_reproduce
from src.cli.parser import build_parser, dispatch, run

__all__ = [
    'ResultArchive',
    'ExperimentConfig',
    'build_space',
    'check_agreement',
    'cmd_chimera',
    'cmd_evaluate',
    'cmd_optimize',
    'cmd_runs',
    'run_experiment',
    'TARGET_NAMES',
    'ReproductionTarget',
    'build_targets',
    'cmd_reproduce',
    'build_parser',
    'dispatch',
    'run',
]
