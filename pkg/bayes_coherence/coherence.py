"""Posterior confidence, the coherence measure and the coherence ordering.

All functions take a `WeightVector` <a_0, ..., a_n> and a likelihood ratio
x = q/p. Orderings compare two information sets of the same size n and are
reported from the point of view of the first argument.
"""

from enum import Enum
from typing import NamedTuple
from warnings import warn

import numpy as np
from numpy.polynomial import polynomial

from bayes_coherence.distribution import FloatArray, WeightVector
from bayes_coherence.utils import AdvisoryWarning, ModelError


DEFAULT_PROBE_RESOLUTION = 999
MIN_PROBE_RESOLUTION = 99
PROBE_TOLERANCE = 1e-12
DIRECTION_PROBE = 0.5


class LikelihoodRatioError(ModelError):
    """The likelihood ratio is outside (0, 1]."""
    def __init__(self, x: float) -> None:
        super().__init__("likelihood ratio must be in (0, 1], got {}"
                         .format(x))
        self.x = x


class DegenerateDistributionError(ModelError):
    """The posterior denominator sum of a_i x^i vanishes."""


class UndefinedCoherenceError(ModelError):
    """The coherence measure is undefined because a_0 = 0."""
    def __init__(self) -> None:
        super().__init__('coherence undefined: the expectation measure a0 '
                         'is 0')


class SizeMismatchError(ModelError):
    """Two information sets have sizes that cannot be compared."""


class ProbeEvidenceWarning(AdvisoryWarning):
    """A verdict rests on the numeric grid probe rather than a criterion."""


class Relation(Enum):
    """How the first information set compares to the second."""
    FIRST_MORE_COHERENT = 'first-more-coherent'
    SECOND_MORE_COHERENT = 'second-more-coherent'
    EQUAL = 'equal'
    INCOMPARABLE = 'incomparable'

    def swapped(self) -> 'Relation':
        """The relation seen with the two sets exchanged."""
        if self is Relation.FIRST_MORE_COHERENT:
            return Relation.SECOND_MORE_COHERENT
        if self is Relation.SECOND_MORE_COHERENT:
            return Relation.FIRST_MORE_COHERENT
        return self

    def __str__(self) -> str:
        return str(self.value)


class Criterion(Enum):
    """The rule that decided an ordering verdict."""
    PAIR = 'pair-criterion'
    GENERAL = 'general-sufficient'
    GRID_PROBE = 'grid-probe'

    def __str__(self) -> str:
        return str(self.value)


class CoherenceValue(NamedTuple('CoherenceValue', [('c', float),
                                                   ('x', float),
                                                   ('n', int)])):
    """The reliability-relative coherence c_x of a set of size n."""


class OrderingVerdict(NamedTuple('OrderingVerdict',
                                 [('relation', Relation),
                                  ('criterion', Criterion)])):
    """The outcome of comparing the coherence of two information sets."""
    @property
    def comparable(self) -> bool:
        """False only for incomparable pairs."""
        return self.relation is not Relation.INCOMPARABLE

    def swapped(self) -> 'OrderingVerdict':
        """The verdict with the two sets exchanged."""
        return self._replace(relation=self.relation.swapped())

    def __str__(self) -> str:
        return "{} ({})".format(self.relation, self.criterion)


def check_ratio(x: float) -> float:
    """Returns x as a float if 0 < x <= 1 (x = 1 is the randomizer limit)."""
    if not 0 < x <= 1:
        raise LikelihoodRatioError(x)
    return float(x)


def posterior_confidence(w: WeightVector, x: float) -> float:
    """
    P*(R_1, ..., R_n): the posterior probability of the whole information set
    once every source has reported, a_0 / sum(a_i x^i).
    """
    x = check_ratio(x)
    if x == 1:
        return w.a0

    denominator = float(polynomial.polyval(x, w.a))
    if denominator <= 0:
        raise DegenerateDistributionError("degenerate distribution: "
                                          "sum of a_i x^i is 0 at x={}"
                                          .format(x))

    return w.a0 / denominator


def max_coherence_posterior(a0: float, n: int, x: float) -> float:
    """
    The posterior a maximally coherent (coextensive) set of size n with the
    same expectation measure would reach: a_0 / (a_0 + (1 - a_0) x^n).
    """
    x = check_ratio(x)
    if n < 1:
        raise SizeMismatchError("set size must be at least 1, got {}"
                                .format(n))
    if not 0 <= a0 <= 1:
        raise ModelError("expectation measure must be in [0, 1], got {}"
                         .format(a0))
    if a0 == 0:
        raise UndefinedCoherenceError()

    return a0 / (a0 + (1 - a0) * x ** n)


def coherence_measure(w: WeightVector, x: float) -> CoherenceValue:
    """c_x = P* / P^max*, the impact of coherence on the posterior."""
    x = check_ratio(x)
    if w.a0 == 0:
        raise UndefinedCoherenceError()

    numerator = w.a0 + w.a0_bar * x ** w.n
    c = numerator / float(polynomial.polyval(x, w.a))

    return CoherenceValue(min(c, 1.0), x, w.n)


def coherence_curve(w: WeightVector, xs: FloatArray) -> FloatArray:
    """Evaluates c_x at every point of `xs` (all in (0, 1])."""
    if w.a0 == 0:
        raise UndefinedCoherenceError()

    numerator = w.a0 + w.a0_bar * xs ** w.n
    curve = numerator / polynomial.polyval(xs, w.a)
    return np.asarray(curve, dtype=np.float64)


def probe_points(resolution: int) -> FloatArray:
    """The interior grid k / (resolution + 1), k = 1..resolution."""
    if resolution < MIN_PROBE_RESOLUTION:
        raise ModelError("probe resolution must be at least {}, got {}"
                         .format(MIN_PROBE_RESOLUTION, resolution))

    steps = np.arange(1, resolution + 1, dtype=np.float64)
    return np.asarray(steps / (resolution + 1), dtype=np.float64)


def sign_verdict(differences: FloatArray) -> OrderingVerdict:
    """
    Turns sampled differences c_x - c_x' into a grid-probe verdict. Samples
    within PROBE_TOLERANCE of zero do not count towards either sign.
    """
    positive = bool(np.any(differences > PROBE_TOLERANCE))
    negative = bool(np.any(differences < -PROBE_TOLERANCE))

    if positive and negative:
        relation = Relation.INCOMPARABLE
    elif positive:
        relation = Relation.FIRST_MORE_COHERENT
    elif negative:
        relation = Relation.SECOND_MORE_COHERENT
    else:
        relation = Relation.EQUAL

    return OrderingVerdict(relation, Criterion.GRID_PROBE)


def grid_probe(w: WeightVector, w_prime: WeightVector,
               resolution: int = DEFAULT_PROBE_RESOLUTION) -> OrderingVerdict:
    """
    Samples the sign of c_x - c_x' on an interior grid of x values. A
    comparable verdict is numeric evidence of sign constancy, not a proof.
    """
    _check_comparable(w, w_prime)
    xs = probe_points(resolution)

    return sign_verdict(coherence_curve(w, xs) - coherence_curve(w_prime, xs))


def compare_pair(w: WeightVector, w_prime: WeightVector) -> OrderingVerdict:
    """
    Orders two information pairs. They are comparable if and only if

        (i)  a0/a0' <= a1/a1' and a1 >= a1', or
        (ii) a0/a0' >= a1/a1' and a1 <= a1'

    (evaluated cross-multiplied). The direction is read off at x = 1/2,
    since the sign of c_x - c_x' does not change when comparable.
    """
    _check_comparable(w, w_prime)
    if w.n != 2:
        raise SizeMismatchError("the pair criterion needs sets of size 2, "
                                "got {}".format(w.n))

    a0, a1 = w.a0, float(w.a[1])
    b0, b1 = w_prime.a0, float(w_prime.a[1])
    cross = a0 * b1 - b0 * a1

    if (cross <= 0 and a1 >= b1) or (cross >= 0 and a1 <= b1):
        return OrderingVerdict(_direction(w, w_prime), Criterion.PAIR)

    return OrderingVerdict(Relation.INCOMPARABLE, Criterion.PAIR)


def compare_general(w: WeightVector, w_prime: WeightVector,
                    resolution: int = DEFAULT_PROBE_RESOLUTION
                    ) -> OrderingVerdict:
    """
    Orders two information sets of size n >= 2 with the sufficient condition

        (i)  a_i/a_i' < a0/a0' < 1, or
        (ii) a_i/a_i' > a0/a0' > 1,   for i = 1, ..., n - 1

    and falls back on the grid probe when it does not hold. Terms with
    a_i = a_i' = 0 satisfy either condition.
    """
    _check_comparable(w, w_prime)
    if w.n < 2:
        raise SizeMismatchError("the sufficient criterion needs sets of size "
                                "2 or more, got {}".format(w.n))

    a0, b0 = w.a0, w_prime.a0
    pairs = [(float(a), float(b))
             for a, b in zip(w.a[1:-1], w_prime.a[1:-1])]

    below = a0 < b0 and all((a == b == 0) or a * b0 < a0 * b
                            for a, b in pairs)
    above = a0 > b0 and all((a == b == 0) or a * b0 > a0 * b
                            for a, b in pairs)

    if below or above:
        return OrderingVerdict(_direction(w, w_prime), Criterion.GENERAL)

    return grid_probe(w, w_prime, resolution)


def compare(w: WeightVector, w_prime: WeightVector,
            resolution: int = DEFAULT_PROBE_RESOLUTION) -> OrderingVerdict:
    """
    Picks the strongest available rule: the pair criterion for n = 2, the
    sufficient criterion (with grid probe fallback) otherwise. Warns with
    `ProbeEvidenceWarning` when the verdict came from the grid probe.
    """
    _check_comparable(w, w_prime)

    if w.n == 2:
        verdict = compare_pair(w, w_prime)
    elif w.n > 2:
        verdict = compare_general(w, w_prime, resolution)
    else:
        verdict = grid_probe(w, w_prime, resolution)

    if verdict.criterion is Criterion.GRID_PROBE:
        warn("verdict {} is grid-probe evidence only (resolution {}), not a "
             "proof".format(verdict.relation, resolution),
             ProbeEvidenceWarning)

    return verdict


def _direction(w: WeightVector, w_prime: WeightVector) -> Relation:
    if np.array_equal(w.a, w_prime.a):
        return Relation.EQUAL

    difference = coherence_measure(w, DIRECTION_PROBE).c \
        - coherence_measure(w_prime, DIRECTION_PROBE).c

    if difference > PROBE_TOLERANCE:
        return Relation.FIRST_MORE_COHERENT
    if difference < -PROBE_TOLERANCE:
        return Relation.SECOND_MORE_COHERENT
    return Relation.EQUAL


def _check_comparable(w: WeightVector, w_prime: WeightVector) -> None:
    if w.n != w_prime.n:
        raise SizeMismatchError("incomparable sizes: {} and {}"
                                .format(w.n, w_prime.n))
    if w.a0 == 0 or w_prime.a0 == 0:
        raise UndefinedCoherenceError()
