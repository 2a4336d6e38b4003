from src.experiment.deflation import deflate_trial, run_deflate
from src.experiment.estimate import estimate_trial, roundtrip_row, run_estimate
from src.experiment.improve import improve_trial, run_improve
from src.experiment.runner import (
    EXIT_CONFIG,
    EXIT_NUMERIC,
    EXIT_OK,
    JobOutput,
    RunManifest,
    execute,
    fan_out,
    main_entry,
    make_solvers,
    summarize,
)
from src.experiment.solve import run_solve, solve_line
from src.experiment.spectrum import run_spectrum, solved_tau

__all__ = [
    "EXIT_CONFIG",
    "EXIT_NUMERIC",
    "EXIT_OK",
    "JobOutput",
    "RunManifest",
    "deflate_trial",
    "estimate_trial",
    "execute",
    "fan_out",
    "improve_trial",
    "main_entry",
    "make_solvers",
    "roundtrip_row",
    "run_deflate",
    "run_estimate",
    "run_improve",
    "run_solve",
    "run_spectrum",
    "solve_line",
    "solved_tau",
    "summarize",
]
