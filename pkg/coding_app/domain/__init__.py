"""
Незмінні типи предметної області (не зберігаються в базі даних)
"""
from coding_app.domain.bp import (
    BPConfig,
    BPState,
    DenseBPState,
    EnumerationBudget,
    Problem,
    StepTrace,
    Task,
)
from coding_app.domain.channels import ChannelParams, SourceModel
from coding_app.domain.experiments import (
    ExperimentConfig,
    ExperimentKind,
    ExperimentOutcome,
    HistogramResult,
    ResultRow,
)
from coding_app.domain.kernels import KernelEstimate, KernelInput, KernelOutput
from coding_app.domain.networks import Codebook, NetworkKind, NetworkSpec
from coding_app.domain.spins import BlockedSpins, SeededStream, SpinVector

__all__ = [
    'BPConfig',
    'BPState',
    'BlockedSpins',
    'ChannelParams',
    'Codebook',
    'DenseBPState',
    'EnumerationBudget',
    'ExperimentConfig',
    'ExperimentKind',
    'ExperimentOutcome',
    'HistogramResult',
    'KernelEstimate',
    'KernelInput',
    'KernelOutput',
    'NetworkKind',
    'NetworkSpec',
    'Problem',
    'ResultRow',
    'SeededStream',
    'SourceModel',
    'SpinVector',
    'StepTrace',
    'Task',
]
