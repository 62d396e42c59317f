"""Distributed iterative soft thresholding for sparse recovery on sensor networks."""

from .data import SensorData
from .errors import (DistaError, DivergenceError, EstimationError, ParameterError,
                     ShapeError, StepsizeError)
from .graph import ConsensusMatrix, Topology, apply_consensus, build_complete, build_d_regular
from .numerics import (frobenius_norm, gradient_step, l1_norm, l2_norm, operator_norm, sgn,
                       soft_threshold)
from .objectives import (DistaParams, LassoParams, dista_functional, kkt_residual,
                         lasso_objective, surrogate_functional)
from .solvers import (SolverReport, TerminationCriteria, admm_run, dista_gamma, dista_run,
                      dsm_run, ista_run, memory_footprint, validate_stepsizes)

__version__ = "0.1.0"
