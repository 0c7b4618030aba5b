"""Classification metrics and report emission."""

from src.metrics.report import ReportFormat, emit_report, load_report, load_reports, reports_to_json
from src.metrics.scores import (
    ConfusionMatrix,
    MetricReport,
    confusion_matrix,
    f1_scores,
    macro_f1,
    round_half_even,
)

__all__ = [
    'ConfusionMatrix',
    'MetricReport',
    'ReportFormat',
    'confusion_matrix',
    'emit_report',
    'f1_scores',
    'load_report',
    'load_reports',
    'macro_f1',
    'reports_to_json',
    'round_half_even',
]
