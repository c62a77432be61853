"""Connection matrices of the generalized hypergeometric equation between x = 0 and x = 1."""

from .asymptotic import (AsymptoticEstimate, estimate_cn, estimate_step2, lemma_identity_check,
                         recover_first_column, schafke_schmidt_term,
                         singular_expansion_term)
from .complexfn import gamma, gamma_vec, log_gamma, pochhammer, pochhammer_vec, stirling_ratio
from .connection import (ConnectionMatrix, DMatrix, build_D, build_P, column_via_shift,
                         connection_matrix, first_column, shift_parameters)
from .errors import *  # noqa: F401,F403
from .frobenius import (DeltaOperator, LocalBasis, LocalSolution, evaluate_local,
                        indicial_polynomial, local_basis_at_one, local_basis_at_zero,
                        recurrence_at_one)
from .kernels import BACKEND
from .params import ParameterSet
from .series import (CoefficientStream, SeriesValue, coeff_a, evaluate_at_one, evaluate_nFn1,
                     falling_factorial, weighted_partial_sum)
from .verify import (VerificationReport, ode_residual, oracle_connection_coefficients,
                     overlap_residual)

__version__ = "0.1.0"
