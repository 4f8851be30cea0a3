"""Levy flight / Levy walk first-exit-time simulation and scaling analysis."""
from .fet_analytic import SurvivalSeries, eta
from .fet_mc import EmpiricalFet, run_batch
from .mobility import ExitRecord, ModelKind, coupled_first_exit, first_exit, projected_first_exit
from .projection import ProjectedLaw, cstar
from .scaling import ExponentFit, ScalingTable, fit_exponent, run_scaling, theoretical_exponent
from .stepdist import StepLaw

__all__ = [
    "EmpiricalFet", "ExitRecord", "ExponentFit", "ModelKind", "ProjectedLaw", "ScalingTable",
    "StepLaw", "SurvivalSeries", "coupled_first_exit", "cstar", "eta", "first_exit",
    "fit_exponent", "projected_first_exit", "run_batch", "run_scaling", "theoretical_exponent",
]
