"""Report emission: versioned JSON, markdown tables and CSV."""

import json
import logging
from enum import Enum
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Union

import pandas as pd

from src.metrics.published import CATEGORIZATION_LABELS, IDENTIFICATION_LABELS, published_row
from src.metrics.scores import MetricReport, round_half_even

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

SHORT_NAMES = {
    'CODE_DESIGN': 'C/D',
    'DOCUMENTATION': 'DOC',
    'TEST': 'TES',
    'REQUIREMENT': 'REQ',
    'NOT_SATD': 'Not-SATD',
    'SATD': 'SATD',
}


class ReportFormat(str, Enum):
    JSON = 'JSON'
    MARKDOWN = 'MARKDOWN'
    CSV = 'CSV'


SUFFIXES = {ReportFormat.JSON: '.json', ReportFormat.MARKDOWN: '.md', ReportFormat.CSV: '.csv'}


def reports_to_json(reports: Mapping[str, MetricReport]) -> str:
    """Deterministic JSON for several named views (no timestamps)."""
    payload = {
        'schema_version': SCHEMA_VERSION,
        'views': {name: report.to_dict() for name, report in reports.items()},
    }
    return json.dumps(payload, indent=2, sort_keys=True) + '\n'


def load_reports(path: Union[str, Path]) -> Dict[str, MetricReport]:
    with open(path, 'r', encoding='utf-8') as f:
        payload = json.load(f)
    if payload.get('schema_version') != SCHEMA_VERSION:
        raise ValueError(f"Unsupported metrics schema version {payload.get('schema_version')}")
    return {name: MetricReport.from_dict(data) for name, data in payload['views'].items()}


def render_markdown(report: MetricReport, title: str = '') -> str:
    """Precision/Recall/F1 rows, one column per class plus Macro-Avg."""
    header = [SHORT_NAMES.get(label, label) for label in report.labels]
    lines = []
    if title:
        lines += [f"### {title}", '']
    lines.append('| Metric | ' + ' | '.join(header) + ' | Macro-Avg. |')
    lines.append('|---' * (len(header) + 2) + '|')
    for metric, values in (('Precision', report.precision), ('Recall', report.recall), ('F1-score', report.f1)):
        cells = [f"{round_half_even(values[label]):.3f}" for label in report.labels]
        macro = f"{round_half_even(report.macro_f1):.3f}" if metric == 'F1-score' else ''
        lines.append(f"| {metric} | " + ' | '.join(cells) + f" | {macro} |")
    lines.append('| Support | ' + ' | '.join(str(report.support[label]) for label in report.labels) + ' | |')
    return '\n'.join(lines) + '\n'


def report_frame(report: MetricReport) -> pd.DataFrame:
    rows = [
        {
            'label': label,
            'precision': report.precision[label],
            'recall': report.recall[label],
            'f1': report.f1[label],
            'support': report.support[label],
        }
        for label in report.labels
    ]
    rows.append({'label': 'MACRO', 'precision': None, 'recall': None, 'f1': report.macro_f1, 'support': sum(report.support.values())})
    return pd.DataFrame(rows, columns=['label', 'precision', 'recall', 'f1', 'support'])


def emit_report(
    report: MetricReport,
    format: Union[ReportFormat, str],
    path: Union[str, Path],
    title: str = '',
) -> Path:
    """Write one report in the given format.

    Args:
        report: A complete MetricReport
        format: JSON, MARKDOWN or CSV
        path: Output file; parent directories are created

    Returns:
        Path written
    """
    format = ReportFormat(str(format.value if isinstance(format, Enum) else format).upper())
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    if format == ReportFormat.JSON:
        payload = {'schema_version': SCHEMA_VERSION, **report.to_dict()}
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + '\n', encoding='utf-8')
    elif format == ReportFormat.MARKDOWN:
        path.write_text(render_markdown(report, title), encoding='utf-8')
    else:
        report_frame(report).to_csv(path, index=False, float_format='%.6f', lineterminator='\n')

    logger.info(f"Wrote {format.value} report to {path}")
    return path


def load_report(path: Union[str, Path]) -> MetricReport:
    """Read a report written with ReportFormat.JSON."""
    with open(path, 'r', encoding='utf-8') as f:
        payload = json.load(f)
    if payload.pop('schema_version', None) != SCHEMA_VERSION:
        raise ValueError(f"Unsupported report schema in {path}")
    return MetricReport.from_dict(payload)


# Model evaluated by each view of an ablation run
VIEW_MODELS = {'identification': 'BiLSTM', 'categorization': 'BERT'}


def comparison_table(
    variants: Mapping[str, Mapping[str, MetricReport]],
    artifact: Optional[str] = None,
) -> Dict[str, List[Dict]]:
    """Per view, one F1 row per variant, then the published rows for the artifact."""
    table: Dict[str, List[Dict]] = {}
    for view, model in VIEW_MODELS.items():
        rows = []
        for variant, reports in variants.items():
            report = reports.get(view)
            if report is None:
                continue
            rows.append({
                'model': f"{model} ({variant})",
                'source': 'run',
                'labels': list(report.labels),
                'f1': [report.f1[label] for label in report.labels],
                'macro_f1': report.macro_f1,
            })
        if artifact:
            labels = IDENTIFICATION_LABELS if view == 'identification' else CATEGORIZATION_LABELS
            for variant in variants:
                row = published_row(view, variant, artifact)
                if row is None:
                    continue
                rows.append({
                    'model': f"{model} ({variant}, published)",
                    'source': 'published',
                    'labels': list(labels),
                    'f1': list(row.per_class),
                    'macro_f1': row.macro,
                })
        table[view] = rows
    return table


def comparison_to_json(
    variants: Mapping[str, Mapping[str, MetricReport]],
    table: Mapping[str, List[Dict]],
    artifact: Optional[str] = None,
) -> str:
    payload = {
        'schema_version': SCHEMA_VERSION,
        'artifact': artifact,
        'variants': {
            variant: {name: report.to_dict() for name, report in reports.items()}
            for variant, reports in variants.items()
        },
        'comparison': table,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + '\n'


def render_comparison(table: Mapping[str, List[Dict]]) -> str:
    """F1 per class and Macro-Avg., one markdown table per view."""
    sections = []
    for view, rows in table.items():
        if not rows:
            continue
        header = [SHORT_NAMES.get(label, label) for label in rows[0]['labels']]
        lines = [f"### {view}", '']
        lines.append('| Model | ' + ' | '.join(header) + ' | Macro-Avg. |')
        lines.append('|---' * (len(header) + 2) + '|')
        for row in rows:
            cells = [f"{round_half_even(value):.3f}" for value in row['f1']]
            lines.append(f"| {row['model']} | " + ' | '.join(cells) + f" | {round_half_even(row['macro_f1']):.3f} |")
        sections.append('\n'.join(lines) + '\n')
    return '\n'.join(sections)
