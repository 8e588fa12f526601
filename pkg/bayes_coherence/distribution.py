"""Joint distributions over binary propositions and their weight vectors.

Assignments are bitmasks: bit i set means proposition R_{i+1} is true. In
documents an assignment is written as a bitstring whose leftmost character
is R_1, so the bitstring '10' (R_1 true, R_2 false) is mask 0b01.
"""

from math import fsum, isfinite
from pathlib import Path
from typing import Any, Iterable, List, NamedTuple, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from bayes_coherence.utils import DocumentError, DocumentSource, ModelError, \
    is_int, is_number, load_document, parse_bitstring


FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.intp]
Interval = Tuple[int, int]

MAX_VARIABLES = 20
SUM_TOLERANCE = 1e-6


class DistributionError(ModelError):
    """A joint distribution (or its document) violates an invariant."""


class VariableCountError(DistributionError):
    """The number of propositional variables is outside [1, 20]."""
    def __init__(self, n: int) -> None:
        super().__init__("number of variables must be in [1, {}], got {}"
                         .format(MAX_VARIABLES, n))
        self.n = n


class NegativeProbabilityError(DistributionError):
    """A probability table holds a negative (or non-finite) entry."""
    def __init__(self, mask: int, value: float) -> None:
        super().__init__("invalid probability {} for assignment {}"
                         .format(value, mask))
        self.mask = mask
        self.value = value


class UnnormalizedError(DistributionError):
    """The probabilities do not sum to 1 within tolerance."""
    def __init__(self, total: float) -> None:
        super().__init__("unnormalized distribution: probabilities sum to {}"
                         .format(total))
        self.total = total


class GridError(DistributionError):
    """A grid document has an empty or out-of-range interval."""


class ReliabilityError(ModelError):
    """Reliability parameters violate p > q > 0."""


def _frozen(values: Iterable[float]) -> FloatArray:
    table = np.array(list(values), dtype=np.float64)
    table.flags.writeable = False
    return table


class JointDistribution(NamedTuple('JointDistribution',
                                   [('n', int), ('probs', FloatArray)])):
    """
    A full probability table over n binary propositional variables R_1..R_n,
    indexed by assignment bitmask. Instances are immutable and normalized;
    build them with `create` (or `load`) rather than directly.
    """
    @classmethod
    def create(cls, n: int, probs: Iterable[float]) -> 'JointDistribution':
        """Validates and normalizes a dense table of 2^n probabilities."""
        if isinstance(n, bool) or not isinstance(n, int) \
                or not 1 <= n <= MAX_VARIABLES:
            raise VariableCountError(n)

        values = [float(p) for p in probs]
        if len(values) != 1 << n:
            raise DistributionError("expected {} probabilities for n={}, got "
                                    "{}".format(1 << n, n, len(values)))

        for mask, value in enumerate(values):
            if not isfinite(value) or value < 0:
                raise NegativeProbabilityError(mask, value)

        total = fsum(values)
        if abs(total - 1) > SUM_TOLERANCE:
            raise UnnormalizedError(total)

        if total != 1:
            values = [v / total for v in values]

        return cls(n, _frozen(values))

    @classmethod
    def load(cls, path: Union[str, Path]) -> 'JointDistribution':
        """Load and return a JointDistribution from the filesystem."""
        return load_distribution(Path(path))

    def probability(self, bits: str) -> float:
        """The probability of one assignment, written as a bitstring."""
        return float(self.probs[parse_bitstring(bits, self.n)])


class WeightVector(NamedTuple('WeightVector', [('a', FloatArray)])):
    """
    The coefficients <a_0, ..., a_n>: a[i] is the probability that exactly i
    of the n propositions are false. a_0 is the expectation measure.
    """
    @classmethod
    def create(cls, values: Iterable[float]) -> 'WeightVector':
        """Validates (and renormalizes) a user-supplied weight vector."""
        a = [float(v) for v in values]
        if len(a) < 2:
            raise DistributionError('a weight vector needs at least two '
                                    'coefficients')

        for i, value in enumerate(a):
            if not isfinite(value) or value < 0:
                raise NegativeProbabilityError(i, value)

        total = fsum(a)
        if abs(total - 1) > SUM_TOLERANCE:
            raise UnnormalizedError(total)

        if total != 1:
            a = [v / total for v in a]

        return cls(_frozen(a))

    @property
    def n(self) -> int:
        """The size of the information set."""
        return len(self.a) - 1

    @property
    def a0(self) -> float:
        """The expectation measure (prior of the whole information set)."""
        return float(self.a[0])

    @property
    def a0_bar(self) -> float:
        """1 - a_0, the mass a maximally coherent set puts on a_n."""
        return 1 - self.a0

    @property
    def is_maximally_coherent(self) -> bool:
        """True if only a_0 and a_n carry mass (coextensive propositions)."""
        return not np.any(self.a[1:-1])

    def __str__(self) -> str:
        return "<{}>".format(', '.join("{:g}".format(v) for v in self.a))


class ReliabilityParams(NamedTuple('ReliabilityParams',
                                   [('p', float), ('q', float)])):
    """P(REPR_i | R_i) = p and P(REPR_i | not R_i) = q, with p > q > 0."""
    @classmethod
    def create(cls, p: float, q: float) -> 'ReliabilityParams':
        """Validates less-than-full reliability, p > q > 0."""
        if not 0 < p <= 1 or not 0 < q < 1:
            raise ReliabilityError("p must be in (0, 1] and q in (0, 1), got "
                                   "p={}, q={}".format(p, q))
        if not p > q:
            raise ReliabilityError("requires p > q, got p={}, q={}"
                                   .format(p, q))

        return cls(float(p), float(q))

    @classmethod
    def from_ratio(cls, x: float) -> 'ReliabilityParams':
        """The parameters p = 1, q = x for a likelihood ratio 0 < x < 1."""
        if not 0 < x < 1:
            raise ReliabilityError("likelihood ratio must be in (0, 1), got {}"
                                   .format(x))
        return cls(1.0, float(x))

    @property
    def x(self) -> float:
        """The likelihood ratio q/p."""
        return self.q / self.p

    @property
    def r(self) -> float:
        """The reliability measure 1 - x."""
        return 1 - self.x


def true_counts(n: int) -> IntArray:
    """Returns the popcount of every bitmask in [0, 2^n)."""
    masks = np.arange(1 << n, dtype=np.intp)
    counts = np.zeros(1 << n, dtype=np.intp)

    for i in range(n):
        counts += (masks >> i) & 1

    return counts


def weight_vector(d: JointDistribution) -> WeightVector:
    """Groups the probability mass of `d` by number of false propositions."""
    false_counts = d.n - true_counts(d.n)
    a = np.bincount(false_counts, weights=d.probs, minlength=d.n + 1)

    return WeightVector.create(a)


def marginalize(d: JointDistribution, keep: int) -> JointDistribution:
    """Returns the marginal of `d` over its first `keep` variables."""
    if not 1 <= keep <= d.n:
        raise DistributionError("can only keep 1 to {} variables, not {}"
                                .format(d.n, keep))

    # mask = high * 2^keep + low, where low encodes R_1..R_keep
    table = d.probs.reshape(1 << (d.n - keep), 1 << keep).sum(axis=0)
    return JointDistribution.create(keep, table)


def region_counts(cells: int, intervals: Sequence[Interval]) -> IntArray:
    """
    Counts the cells of a uniform grid that fall in each region of the Venn
    partition induced by the intervals. Entry `mask` is the number of cells
    lying inside exactly the intervals whose bits are set in `mask`.
    """
    if isinstance(cells, bool) or not isinstance(cells, int) or cells < 1:
        raise GridError("a grid needs at least one cell, got {}"
                        .format(cells))
    if not 1 <= len(intervals) <= MAX_VARIABLES:
        raise VariableCountError(len(intervals))

    positions = np.arange(1, cells + 1, dtype=np.intp)
    masks = np.zeros(cells, dtype=np.intp)

    for i, (lo, hi) in enumerate(intervals):
        if lo > hi:
            raise GridError("empty interval [{}, {}]".format(lo, hi))
        if lo < 1 or hi > cells:
            raise GridError("interval [{}, {}] is outside the grid [1, {}]"
                            .format(lo, hi, cells))

        inside = (positions >= lo) & (positions <= hi)
        masks += inside.astype(np.intp) << i

    return np.bincount(masks, minlength=1 << len(intervals))


def grid_overlap_distribution(cells: int,
                              intervals: Sequence[Interval]
                              ) -> JointDistribution:
    """
    Builds the joint distribution of the propositions "the target is in
    interval i" under a uniform prior over `cells` grid cells.
    """
    counts = region_counts(cells, intervals)
    return JointDistribution.create(len(intervals), counts / cells)


def load_distribution(source: DocumentSource) -> JointDistribution:
    """
    Loads a distribution document, either

        {"n": 2, "table": {"11": 0.1, "10": 0.1, "01": 0.1, "00": 0.7}}

    (a sparse table; omitted assignments are 0), a dense table given as a
    list of 2^n probabilities indexed by bitmask, or a grid document:

        {"cells": 100, "intervals": [[41, 60], [51, 70]]}
    """
    document = load_document(source)

    if 'cells' in document:
        return grid_overlap_distribution(
            document['cells'], _parse_intervals(document.get('intervals')))

    n = document.get('n')
    table = document.get('table')
    if isinstance(n, bool) or not isinstance(n, int):
        raise DocumentError("distribution document needs an integer 'n'")
    if not 1 <= n <= MAX_VARIABLES:
        raise VariableCountError(n)

    if isinstance(table, list):
        return JointDistribution.create(n, [_number(p) for p in table])
    if isinstance(table, dict):
        probs = [0.0] * (1 << n)
        for bits, p in table.items():
            probs[parse_bitstring(bits, n)] = _number(p)
        return JointDistribution.create(n, probs)

    raise DocumentError("distribution document needs a 'table' object or "
                        "list")


def _parse_intervals(value: Any) -> List[Interval]:
    if not isinstance(value, list):
        raise DocumentError("grid document needs a list of 'intervals'")

    intervals = []
    for interval in value:
        if not isinstance(interval, list) or len(interval) != 2 \
                or not all(is_int(v) for v in interval):
            raise DocumentError("interval must be [lo, hi], got {!r}"
                                .format(interval))
        intervals.append((interval[0], interval[1]))

    return intervals


def _number(value: Any) -> float:
    if not is_number(value):
        raise DocumentError("expected a probability, got {!r}".format(value))
    return float(value)
