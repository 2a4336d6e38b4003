from src.pipeline.alignment import (
    EmpiricalAlignments,
    assign_components,
    factor_alignments,
    measure_alignments,
)
from src.pipeline.deflation import DeflationRun, deflate
from src.pipeline.improved import (
    ImprovedResult,
    SignalComponent,
    TracePoint,
    best_gamma,
    gamma_sweep,
    improved_deflation,
    tracked_alignment,
)
from src.pipeline.initializer import simulated_initializer, solutions_from_run

__all__ = [
    "DeflationRun",
    "EmpiricalAlignments",
    "ImprovedResult",
    "SignalComponent",
    "TracePoint",
    "assign_components",
    "best_gamma",
    "deflate",
    "factor_alignments",
    "gamma_sweep",
    "improved_deflation",
    "measure_alignments",
    "simulated_initializer",
    "solutions_from_run",
    "tracked_alignment",
]
