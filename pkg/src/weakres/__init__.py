"""weakres: runtime feature-interaction resolution by adaptive requirement weakening.

The package monitors signal-temporal-logic requirements, weakens annotated
requirements by integer parameter vectors, encodes joint satisfiability as a
mixed-integer program over an affine environment model, solves it with an
embedded branch-and-bound solver, and evaluates the resulting runtime
resolver in two drone case studies.
"""

from __future__ import annotations

from .errors import (EmptyIntervalError, EncodingError, EvaluationError,
                     FeatureSpecError, HorizonError, InstantiationError,
                     ModelError, ParseError, ScenarioError, SolverError,
                     SolverNumericError, ThetaBoundsError,
                     UnknownVariableError, WeakresError)
from .parser import parse_affine, parse_comparison, parse_stl, parse_weakstl
from .signals import Signal
from .stl import (AffineExpr, Always, And, Eventually, Formula, Interval, Not,
                  Or, Pred, TrueF, Until, horizon, is_plain, robustness,
                  robustness_series, satisfied, to_text, variables,
                  weak_horizon)
from .weakening import (Polarity, Theta, ThetaSlot, degree_of_weakening,
                        instantiate, minimal_requirement, theta_slots,
                        weak_satisfied, weaken_param_count)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
