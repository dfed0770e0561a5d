"""Optimizer Package"""
from src.optimizer.config import (
    FixedSchedule,
    CyclicSchedule,
    UniformInit,
    ExplicitInit,
    WarmStart,
    OptimizerConfig,
    cyclic_lr,
)
from src.optimizer.spaces import ParameterSpace, DirectSpace, BoundedSpace, TiedSpace
from src.optimizer.adam import (
    Adam,
    TrajectoryPoint,
    OptimizationRun,
    adam_maximize,
    multi_restart,
    tied_model_optimize,
    warm_start_chain,
)
from src.optimizer.structure import (
    StructureReport,
    detect_structure,
    fingerprint,
    fingerprints_match,
    privileged_per_unit,
)

__all__ = [
    'FixedSchedule',
    'CyclicSchedule',
    'UniformInit',
    'ExplicitInit',
    'WarmStart',
    'OptimizerConfig',
    'cyclic_lr',
    'ParameterSpace',
    'DirectSpace',
    'BoundedSpace',
    'TiedSpace',
    'Adam',
    'TrajectoryPoint',
    'OptimizationRun',
    'adam_maximize',
    'multi_restart',
    'tied_model_optimize',
    'warm_start_chain',
    'StructureReport',
    'detect_structure',
    'fingerprint',
    'fingerprints_match',
    'privileged_per_unit',
]
