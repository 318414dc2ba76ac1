"""Translated Poisson approximation for sums of hidden Markov emissions."""
from .chain import TransitionMatrix, is_irreducible, n_step, period, reverse, stationary, validate
from .emissions import (EmissionModel, conditional_moments, dominating_envelope, envelope_moments,
                        score_emissions, shift_emissions)
from .errors import RefusedError, ResourceError, TPMarkovError, ValidationError
from .lattice import (JointLatticePmf, LatticePmf, beta_n, forward_joint, marginal_w, mean_var,
                      shift_tv, tv)
from .periodic import (asymptotic_tv_gap, derive_period_structure, equidistribution_tests,
                       limit_residue_probs)
from .returns import (coincidence_return_dist, excursion_sum_dist, is_strongly_aperiodic,
                      product_chain, q_period, renewal_lattice_span, split_state_zero, tau_moments,
                      theorem1_bound)
from .tpoisson import (TPParams, minimal_b, stein_residual, stein_solve, stein_tv_bound,
                       tp_pair_bound, tp_params, tp_pmf, tp_residue_mass)

__version__ = "0.1.0"
