# This file makes the directory a Python package
from .experiment import (
    EXPERIMENT_KINDS, AdversarySection, ExperimentConfig, ExperimentSection, FamilySection, LearnerSection,
)
from .report import (
    CSV_COLUMNS, Acceptance, ExperimentInfo, ExperimentListResponse, ExperimentSummary,
    TrialReport, TrialSummary, VerifyResult,
)

__all__ = [
    'EXPERIMENT_KINDS', 'AdversarySection', 'ExperimentConfig', 'ExperimentSection', 'FamilySection',
    'LearnerSection', 'CSV_COLUMNS', 'Acceptance', 'ExperimentInfo', 'ExperimentListResponse',
    'ExperimentSummary', 'TrialReport', 'TrialSummary', 'VerifyResult',
]
