"""Non-prioritized belief expansion via the acceptance measure.

A belief set {R_1..R_n} is expanded with R_{n+1} if the acceptance measure
(the posterior of the whole set once every source has reported) does not
drop. The likelihood ratio x is either fixed, or unknown and averaged out
under a uniform prior.
"""

from enum import Enum
from typing import List, NamedTuple, Optional, Sequence, Set

from numpy.polynomial import polynomial
from scipy.integrate import quad

from bayes_coherence.coherence import DEFAULT_PROBE_RESOLUTION, \
    OrderingVerdict, SizeMismatchError, UndefinedCoherenceError, \
    check_ratio, coherence_curve, coherence_measure, \
    max_coherence_posterior, posterior_confidence, probe_points, \
    sign_verdict
from bayes_coherence.distribution import WeightVector
from bayes_coherence.utils import ModelError


DEFAULT_THRESHOLD = 0.5
QUADRATURE_TOLERANCE = 1e-9
QUADRATURE_LIMIT = 200
PEAK_DECADES = range(-2, 3)


class ModeKind(Enum):
    """Whether the likelihood ratio is known or averaged out."""
    FIXED = 'fixed'
    AVERAGED = 'averaged'


class ExpansionMode(NamedTuple('ExpansionMode', [('kind', ModeKind),
                                                 ('x', Optional[float])])):
    """The acceptance measure an expansion decision is based on."""
    @classmethod
    def fixed(cls, x: float) -> 'ExpansionMode':
        """Acceptance at a known likelihood ratio 0 < x <= 1."""
        return cls(ModeKind.FIXED, check_ratio(x))

    @classmethod
    def averaged(cls) -> 'ExpansionMode':
        """Acceptance averaged over a uniform prior on the reliability."""
        return cls(ModeKind.AVERAGED, None)

    def __str__(self) -> str:
        if self.kind is ModeKind.FIXED:
            return "fixed-x({:g})".format(self.x)
        return 'averaged'


class ExpansionVerdict(NamedTuple('ExpansionVerdict',
                                  [('accept', bool),
                                   ('value_old', float),
                                   ('value_new', float),
                                   ('mode', ExpansionMode),
                                   ('threshold_met', bool)])):
    """
    accept is value_new >= value_old. threshold_met says whether the old
    belief set sits at or above the belief threshold; it never gates accept.
    """


class WeightedAcceptance(NamedTuple('WeightedAcceptance',
                                    [('weight', float),
                                     ('coherence', float),
                                     ('product', float)])):
    """The acceptance measure split into a size weight and coherence."""


def acceptance(w: WeightVector, x: float) -> float:
    """e_x = a_0 / sum(a_i x^i), the posterior of the full set."""
    return posterior_confidence(w, x)


def acceptance_weighted_form(w: WeightVector, x: float) -> WeightedAcceptance:
    """
    Writes e_x as a_0 / (a_0 + (1 - a_0) x^n) times c_x. The weight tends to
    1 as x shrinks, so coherence dominates for reliable sources.
    """
    x = check_ratio(x)
    if w.a0 == 0:
        raise UndefinedCoherenceError()

    weight = max_coherence_posterior(w.a0, w.n, x)
    coherence = coherence_measure(w, x).c

    return WeightedAcceptance(weight, coherence, weight * coherence)


def averaged_acceptance(w: WeightVector) -> float:
    """
    E = integral of e_x over x in [0, 1], by adaptive quadrature. The
    integrand is continuous on [0, 1] with e_0 = 1 when a_0 > 0, but for a
    small a_0 it collapses next to x = 0, so the scales where it does are
    passed to the integrator as breakpoints.
    """
    if w.a0 == 0:
        return 0.0

    def _integrand(x: float) -> float:
        return w.a0 / float(polynomial.polyval(x, w.a))

    # E >= a_0, so the bound below also holds relative to E
    value, _ = quad(_integrand, 0, 1,
                    epsabs=QUADRATURE_TOLERANCE / 10 * w.a0,
                    epsrel=QUADRATURE_TOLERANCE / 10, limit=QUADRATURE_LIMIT,
                    points=_peak_points(w) or None)

    return min(max(float(value), 0.0), 1.0)


def _peak_points(w: WeightVector) -> List[float]:
    # a_0 / (a_0 + a_k x^k) halves at x = (a_0 / a_k)^(1/k)
    points = set()  # type: Set[float]
    for k in range(1, w.n + 1):
        a_k = float(w.a[k])
        if a_k > 0:
            scale = (w.a0 / a_k) ** (1 / k)
            points.update(scale * 10.0 ** j for j in PEAK_DECADES)

    return sorted(p for p in points if 0 < p < 1)


def decide_expansion(w_old: WeightVector, w_new: WeightVector,
                     mode: ExpansionMode,
                     threshold: float = DEFAULT_THRESHOLD
                     ) -> ExpansionVerdict:
    """
    Accepts R_{n+1} into {R_1..R_n} if e(new) >= e(old) under `mode`. An
    a_0 of 0 is acceptance 0, not an error.
    """
    _check_expansion(w_old, w_new)
    if not 0 <= threshold <= 1:
        raise ModelError("threshold must be in [0, 1], got {}"
                         .format(threshold))

    if mode.kind is ModeKind.FIXED:
        assert mode.x is not None
        value_old = acceptance(w_old, mode.x)
        value_new = acceptance(w_new, mode.x)
    else:
        value_old = averaged_acceptance(w_old)
        value_new = averaged_acceptance(w_new)

    return ExpansionVerdict(value_new >= value_old, value_old, value_new,
                            mode, value_old >= threshold)


def acceptance_profile(w_old: WeightVector, w_new: WeightVector,
                       xs: Sequence[float],
                       threshold: float = DEFAULT_THRESHOLD
                       ) -> List[ExpansionVerdict]:
    """The fixed-x verdict at each likelihood ratio in `xs`."""
    return [decide_expansion(w_old, w_new, ExpansionMode.fixed(x), threshold)
            for x in xs]


def expansion_coherence_probe(w_old: WeightVector, w_new: WeightVector,
                              resolution: int = DEFAULT_PROBE_RESOLUTION
                              ) -> OrderingVerdict:
    """
    Samples the sign of c_x(old) - c_x(new) for sets of size n and n + 1.
    There is no criterion for sets of different size, so the verdict is
    always grid-probe evidence and never feeds `decide_expansion`.
    """
    _check_expansion(w_old, w_new)
    xs = probe_points(resolution)

    return sign_verdict(coherence_curve(w_old, xs)
                        - coherence_curve(w_new, xs))


def _check_expansion(w_old: WeightVector, w_new: WeightVector) -> None:
    if w_new.n != w_old.n + 1:
        raise SizeMismatchError("the new set must have exactly one more "
                                "proposition: got sizes {} and {}"
                                .format(w_old.n, w_new.n))
