"""Published F1 rows of the identification and categorization result tables.

Used to check that the printed Macro-Avg. column follows from the per-class
columns; the full-scale scores themselves are not reproducible offline.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

from src.metrics.scores import macro_f1

IDENTIFICATION_LABELS = ('NOT_SATD', 'SATD')
CATEGORIZATION_LABELS = ('CODE_DESIGN', 'DOCUMENTATION', 'TEST', 'REQUIREMENT')

# Slack for macro values printed from unrounded per-class scores
MACRO_TOLERANCE = 0.002


@dataclass(frozen=True)
class PublishedRow:
    experiment: str
    artifact: str
    per_class: Tuple[float, ...]
    macro: float

    def recomputed_macro(self) -> float:
        return macro_f1(self.per_class)

    def consistent(self, tolerance: float = MACRO_TOLERANCE) -> bool:
        return abs(self.recomputed_macro() - self.macro) <= tolerance + 1e-12


def _rows(experiment: str, table: dict) -> List[PublishedRow]:
    return [PublishedRow(experiment, artifact, values[:-1], values[-1]) for artifact, values in table.items()]


# (Not-SATD, SATD, Macro-Avg.)
IDENTIFICATION_ROWS: List[PublishedRow] = [
    *_rows('NLP', {'CC': (0.929, 0.494, 0.711)}),
    *_rows('MAT', {'CC': (0.985, 0.721, 0.853)}),
    *_rows('XGBoost+SMOTE', {
        'CC': (0.980, 0.540, 0.760), 'IS': (0.893, 0.475, 0.684),
        'PS': (0.866, 0.381, 0.623), 'CM': (0.937, 0.642, 0.790),
    }),
    *_rows('XGBoost+EDA', {
        'CC': (0.989, 0.721, 0.855), 'IS': (0.919, 0.453, 0.686),
        'PS': (0.878, 0.373, 0.625), 'CM': (0.937, 0.429, 0.683),
    }),
    *_rows('LightGBM', {
        'CC': (0.927, 0.728, 0.828), 'IS': (0.946, 0.492, 0.719),
        'PS': (0.938, 0.429, 0.683), 'CM': (0.934, 0.416, 0.675),
    }),
    *_rows('JSD-GAN', {
        'CC': (0.989, 0.831, 0.910), 'IS': (0.924, 0.390, 0.657),
        'PS': (0.927, 0.331, 0.629), 'CM': (0.915, 0.191, 0.553),
    }),
    *_rows('BiLSTM', {
        'CC': (0.952, 0.799, 0.875), 'IS': (0.937, 0.559, 0.748),
        'PS': (0.915, 0.422, 0.668), 'CM': (0.926, 0.668, 0.797),
    }),
    *_rows('BiLSTM+AugGPT', {
        'CC': (0.952, 0.927, 0.939), 'IS': (0.937, 0.820, 0.878),
        'PS': (0.917, 0.806, 0.862), 'CM': (0.940, 0.821, 0.880),
    }),
]

# (C/D, DOC, TES, REQ, Macro-Avg.)
CATEGORIZATION_ROWS: List[PublishedRow] = [
    *_rows('XGBoost+SMOTE', {
        'CC': (0.878, 0.571, 0.571, 0.333, 0.589), 'IS': (0.889, 0.706, 0.667, 0.308, 0.642),
        'PS': (0.863, 0.571, 0.364, 0.000, 0.450), 'CM': (0.886, 0.800, 0.444, 0.500, 0.658),
    }),
    *_rows('XGBoost+EDA', {
        'CC': (0.884, 0.667, 0.269, 0.500, 0.580), 'IS': (0.887, 0.637, 0.761, 0.462, 0.687),
        'PS': (0.754, 0.472, 0.545, 0.211, 0.495), 'CM': (0.667, 0.533, 0.516, 0.286, 0.500),
    }),
    *_rows('JSD-GAN', {
        'CC': (0.904, 0.667, 0.200, 0.590, 0.590), 'IS': (0.814, 0.577, 0.545, 0.111, 0.512),
        'PS': (0.825, 0.400, 0.636, 0.000, 0.465), 'CM': (0.852, 0.364, 0.500, 0.250, 0.491),
    }),
    *_rows('MT-Text-CNN', {
        'CC': (0.725, 0.626, 0.540, 0.585, 0.619), 'IS': (0.486, 0.457, 0.432, 0.437, 0.453),
        'PS': (0.539, 0.441, 0.461, 0.325, 0.441), 'CM': (0.536, 0.659, 0.449, 0.255, 0.475),
    }),
    *_rows('BERT', {
        'CC': (0.885, 0.668, 0.644, 0.426, 0.656), 'IS': (0.902, 0.766, 0.791, 0.419, 0.719),
        'PS': (0.842, 0.625, 0.727, 0.000, 0.549), 'CM': (0.882, 0.667, 0.400, 0.333, 0.571),
    }),
    *_rows('BERT+AugGPT', {
        'CC': (0.885, 0.925, 0.925, 0.796, 0.882), 'IS': (0.902, 0.922, 0.922, 0.851, 0.899),
        'PS': (0.842, 0.895, 0.851, 0.842, 0.876), 'CM': (0.882, 0.826, 0.841, 0.840, 0.847),
    }),
]

# Printed macro does not follow from the printed per-class cells (mean is 0.8575)
KNOWN_INCONSISTENT = {('BERT+AugGPT', 'PS')}


def inconsistent_rows(rows: List[PublishedRow], tolerance: float = MACRO_TOLERANCE) -> List[PublishedRow]:
    return [row for row in rows if not row.consistent(tolerance)]


# Published experiment behind each (view, variant) of an ablation run
PUBLISHED_VARIANTS = {
    ('identification', 'baseline'): 'BiLSTM',
    ('identification', 'augmented'): 'BiLSTM+AugGPT',
    ('categorization', 'baseline'): 'BERT',
    ('categorization', 'augmented'): 'BERT+AugGPT',
}


def published_row(view: str, variant: str, artifact: str) -> Optional[PublishedRow]:
    """Published row matching an ablation cell, None when there is none."""
    experiment = PUBLISHED_VARIANTS.get((view, variant))
    rows = IDENTIFICATION_ROWS if view == 'identification' else CATEGORIZATION_ROWS
    return next((row for row in rows if row.experiment == experiment and row.artifact == artifact), None)
