"""Enumeration Package"""
from src.enumeration.engine import (
    MAX_SPECTRUM_SPINS,
    GradientRecord,
    MomentAccumulator,
    GrayCodeEnumerator,
    configure_threads,
    enumerate_stats,
    enumerate_gradient,
    enumerate_spectrum,
    level_statistics,
    gray_tour_final_energy,
)

__all__ = [
    'MAX_SPECTRUM_SPINS',
    'GradientRecord',
    'MomentAccumulator',
    'GrayCodeEnumerator',
    'configure_threads',
    'enumerate_stats',
    'enumerate_gradient',
    'enumerate_spectrum',
    'level_statistics',
    'gray_tour_final_energy',
]
