"""Slow but obviously correct reference computations for the tests."""
from itertools import product
from random import Random
from typing import List, Sequence, Tuple

import numpy as np
from scipy.integrate import simpson

from bayes_coherence.bayesnet import BayesNet, Evidence, Node, \
    joint_probability
from bayes_coherence.distribution import JointDistribution, WeightVector


SIMPSON_INTERVALS = 10 ** 6


def bayes_posterior(d: JointDistribution,
                    sources: Sequence[Tuple[float, float]]) -> float:
    """
    P(R_1..R_n | REPR_1..REPR_n) by enumerating the joint over every
    proposition and report variable (2^2n assignments).
    """
    n = d.n
    numerator = evidence = 0.0

    for r_mask in range(1 << n):
        for report_mask in range(1 << n):
            p = float(d.probs[r_mask])
            for i in range(n):
                true_p, false_q = sources[i]
                reported = report_mask >> i & 1
                likelihood = true_p if r_mask >> i & 1 else false_q
                p *= likelihood if reported else 1 - likelihood

            if report_mask == (1 << n) - 1:
                evidence += p
                if r_mask == (1 << n) - 1:
                    numerator += p

    return numerator / evidence


def enumerate_posterior(net: BayesNet, query: str,
                        evidence: Evidence) -> float:
    """P(query | evidence) by summing the full joint of the network."""
    names = net.names
    numerator = total = 0.0

    for values in product((False, True), repeat=len(names)):
        assignment = dict(zip(names, values))
        if any(assignment[k] != v for k, v in evidence.items()):
            continue
        p = joint_probability(net, assignment)
        total += p
        if assignment[query]:
            numerator += p

    return numerator / total


def simpson_acceptance(w: WeightVector) -> float:
    """The averaged acceptance by composite Simpson on 10^6 intervals."""
    xs = np.linspace(0, 1, SIMPSON_INTERVALS + 1)
    values = w.a0 / np.polynomial.polynomial.polyval(xs, w.a)
    return float(simpson(values, x=xs))


def random_distribution(rng: Random, n: int,
                        zeros: float = 0.0) -> JointDistribution:
    """A random joint over n variables; each cell is 0 with odds `zeros`."""
    while True:
        cells = [0.0 if rng.random() < zeros else rng.random()
                 for _ in range(1 << n)]
        total = sum(cells)
        if total > 0:
            return JointDistribution.create(n, [c / total for c in cells])


def random_weights(rng: Random, n: int) -> WeightVector:
    """A random weight vector of size n with a_0 > 0."""
    values = [rng.random() + 1e-3 for _ in range(n + 1)]
    total = sum(values)
    return WeightVector.create([v / total for v in values])


def random_reliability(rng: Random) -> Tuple[float, float]:
    """A random (p, q) with 1 >= p > q > 0."""
    p = rng.uniform(0.05, 1)
    q = rng.uniform(0.01, 0.99) * p
    return p, q


def random_network(rng: Random, size: int) -> BayesNet:
    """A random network; node k may have up to three earlier parents."""
    nodes = []  # type: List[Node]
    for k in range(size):
        earlier = ["N{}".format(i) for i in range(k)]
        parents = tuple(rng.sample(earlier, rng.randint(0, min(3, k))))
        cpt = tuple(rng.random() for _ in range(1 << len(parents)))
        nodes.append(Node("N{}".format(k), parents, cpt))

    return BayesNet.create(nodes)
