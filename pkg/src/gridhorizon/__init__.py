"""Multi-year transmission investment planning with construction time,
maintenance costs and technological learning, solved by an in-house
simplex and branch-and-bound."""
from .builder import build, crf
from .bnb import BnbParams, SolveReport, solve
from .instance import PlanningInstance, load_instance, save_instance, validate
from .plan import InvestmentPlan, extract_plan, load_plan, save_plan
from .reference import reference_instance
from .verify import verify

__version__ = "0.1.0"

__all__ = ["BnbParams", "InvestmentPlan", "PlanningInstance", "SolveReport", "build", "crf",
           "extract_plan", "load_instance", "load_plan", "reference_instance", "save_instance",
           "save_plan", "solve", "validate", "verify"]
