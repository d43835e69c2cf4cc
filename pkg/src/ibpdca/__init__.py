"""Inertial Bregman proximal DC algorithms for low-rank matrix and tensor completion."""

from .admm_dca import AdmmConfig, admm_dca_run, dca_subgradient_g
from .datasets import gen_matrix_instance, gen_tensor_instance
from .exceptions import (DivergenceError, FormatError, IBPDCAError, NonFiniteError,
                         NumericalFailureError, ParameterError, ShapeMismatchError,
                         SymmetryViolationError)
from .metrics import estimate_rank, psnr, rse
from .problems import (DcProblem, MatrixCompletionProblem, SamplingMask,
                       TensorCompletionProblem, objective_phi)
from .solver import SolverConfig, SolverTrace, bpdca_run, ibpdca_run, merit_params

__version__ = "0.1.0"
