# Benchmark harness: suites, CSV records and performance profiles
from .suite import BenchRecord, export_records, format_table, load_records, run_suite
from .profiles import PerformanceProfile, default_tau_grid, export_profile, export_ratios, perf_profile

__all__ = [
    'BenchRecord', 'run_suite', 'export_records', 'load_records', 'format_table',
    'PerformanceProfile', 'perf_profile', 'default_tau_grid', 'export_profile', 'export_ratios',
]
