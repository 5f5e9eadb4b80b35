"""Exact-arithmetic tools for E-sequences of the 3x+1 map.

An E-sequence lists the exponents ``a_n`` in ``x_n = (3 x_(n-1) + 1) / 2^(a_n)``
along an odd trajectory.  The package solves prefixes back to their least
start, decides eventually periodic sequences, and certifies divergence for
several non-periodic families.
"""

from .core import (
    BitCapExceeded,
    Accumulators,
    BlockAccumulators,
    ESequencePrefix,
    accumulate,
    accumulate_block,
    split_identity_check,
)
from .criteria import (
    CriterionError,
    min_start_lower_bound,
    positional_diagnostics,
    powers_of_two_runs,
    repeated_block_criterion,
    residue_product_bound,
    runs_of_ones_criterion,
    shifted_product_bounds_check,
    sturmian_verdict,
)
from .generators import GeneratorSpec
from .periodic import PeriodicSpec, b_periodic, branch_formulas_check, decide, enumerate_specs
from .solver import PrefixSolution, backward_chain_check, omega_limit, solve_block, solve_prefix
from .theta import PrecisionExhausted, Theta, floor_n_theta
from .trajectory import Trajectory, closed_form_check, e_sequence_of, matthews_watts_check
from .verdict import Certificate, Verdict, VerdictKind

__version__ = "0.1.0"
