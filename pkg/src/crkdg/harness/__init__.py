"""Scenario registry, runner, convergence studies, config files and CSV output."""
from .runner import ErrorReport, RunResult, convergence_study, error_norms, run_scenario
from .scenarios import REGISTRY, DtRule, Scenario, get_scenario

__all__ = ["ErrorReport", "RunResult", "convergence_study", "error_norms", "run_scenario",
           "REGISTRY", "DtRule", "Scenario", "get_scenario"]
