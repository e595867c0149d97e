"""Batch analyses: stationarity, ANOVA, z-density checks and method comparison."""
from .anova import AnovaResult, anova_by, anova_oneway, betainc_regularized, f_sf
from .comparison import ComparisonReport, ComparisonRow, MethodStats, compare_methods, outlier_rate
from .stationarity import StationarityReport, block_standard_errors, stationarity_report, window_deviations
from .zdensity import half_normal_pdf, monte_carlo_sigma_z, z_density_numeric

__all__ = [
    "AnovaResult",
    "ComparisonReport",
    "ComparisonRow",
    "MethodStats",
    "StationarityReport",
    "anova_by",
    "anova_oneway",
    "betainc_regularized",
    "block_standard_errors",
    "compare_methods",
    "f_sf",
    "half_normal_pdf",
    "monte_carlo_sigma_z",
    "outlier_rate",
    "stationarity_report",
    "window_deviations",
    "z_density_numeric",
]
