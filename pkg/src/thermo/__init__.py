"""Thermo Package"""
from src.thermo.spectrum import Spectrum, MERGE_TOLERANCE
from src.thermo.stats import (
    ThermalStats,
    DegenerateModel,
    GapTemplate,
    gibbs_populations,
    thermal_stats,
    optimal_gap,
    c_opt,
    degenerate_heat_capacity,
    estimation_error_bound,
    max_c_over_gap,
    single_spin_c_max,
)
from src.thermo.levels import LinearLevelFamily

__all__ = [
    'Spectrum',
    'MERGE_TOLERANCE',
    'ThermalStats',
    'DegenerateModel',
    'GapTemplate',
    'gibbs_populations',
    'thermal_stats',
    'optimal_gap',
    'c_opt',
    'degenerate_heat_capacity',
    'estimation_error_bound',
    'max_c_over_gap',
    'single_spin_c_max',
    'LinearLevelFamily',
]
