"""Analysis Package"""
from src.analysis.scaling import (
    PowerLawFit,
    ScalingCurve,
    fit_power_law,
    analytic_optimum,
    comparison_curves,
    parameter_scaling_study,
    protocol_config,
    conjectured_degeneracy,
    degeneracy_conjecture_report,
)
from src.analysis.noise import (
    DEFAULT_TRIALS,
    NoiseSpec,
    BandwidthStudy,
    AsymmetryReport,
    uniform_shift_variance,
    bandwidth_perturbation_study,
    bandwidth_scaling_curve,
    build_noisy_star,
    coupling_asymmetry_study,
)
from src.analysis.export import provenance, read_curve_csv, write_curve_csv, write_json, write_rows_csv

__all__ = [
    'PowerLawFit',
    'ScalingCurve',
    'fit_power_law',
    'analytic_optimum',
    'comparison_curves',
    'parameter_scaling_study',
    'protocol_config',
    'conjectured_degeneracy',
    'degeneracy_conjecture_report',
    'DEFAULT_TRIALS',
    'NoiseSpec',
    'BandwidthStudy',
    'AsymmetryReport',
    'uniform_shift_variance',
    'bandwidth_perturbation_study',
    'bandwidth_scaling_curve',
    'build_noisy_star',
    'coupling_asymmetry_study',
    'provenance',
    'read_curve_csv',
    'write_curve_csv',
    'write_json',
    'write_rows_csv',
]
