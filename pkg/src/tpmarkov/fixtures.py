"""Reference chains used by tests, configs and the CLI."""
import numpy as np

from .chain import validate
from .emissions import EmissionModel, score_emissions


def three_state_chain(alpha=0.1, beta=1.0):
    return validate(np.array([
        [1 - alpha, alpha, 0.0],
        [0.0, 0.0, 1.0],
        [beta, 1 - beta, 0.0],
    ]))


def fixture_a():
    """Aperiodic excursion sum: ``Q = {3: 0.9, 5: 0.1}``."""
    return three_state_chain(), score_emissions([3, 1, 1])


def fixture_b():
    """Same chain with scores ``(3, 1, 2)``; every excursion sum is a multiple of 3."""
    return three_state_chain(), score_emissions([3, 1, 2])


def fixture_c(alpha=0.25, beta=0.75):
    """Four-state chain with emission residues ``(0, 1, 0, 1)`` mod 2."""
    P = validate(np.array([
        [1 - alpha, alpha, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 1 - beta, beta],
        [1.0, 0.0, 0.0, 0.0],
    ]))
    return P, score_emissions([2, 1, 2, 1])


def fixture_c_stationary(alpha, beta):
    return np.array([beta, alpha * beta, alpha, alpha * beta]) / (alpha + beta + 2 * alpha * beta)


def smooth_fixture():
    """Fixture A's chain with state 1 emitting 1 or 2 with equal odds."""
    P = three_state_chain()
    m = EmissionModel.from_pmfs([{3: 1.0}, {1: 0.5, 2: 0.5}, {1: 1.0}])
    return P, m


def split_needed_fixture():
    """Two-state chain whose excursion sums are all odd: aperiodic, not strongly so."""
    P = validate(np.array([[0.5, 0.5], [0.5, 0.5]]))
    return P, score_emissions([3, 2])


FIXTURES = {
    "A": fixture_a,
    "B": fixture_b,
    "C": fixture_c,
    "smooth": smooth_fixture,
    "split-needed": split_needed_fixture,
}
