from random import Random
from unittest import main, TestCase
from warnings import catch_warnings, simplefilter

import numpy as np

from bayes_coherence.coherence import CoherenceValue, Criterion, \
    LikelihoodRatioError, OrderingVerdict, ProbeEvidenceWarning, Relation, \
    SizeMismatchError, UndefinedCoherenceError, check_ratio, coherence_curve, \
    coherence_measure, compare, compare_general, compare_pair, grid_probe, \
    max_coherence_posterior, posterior_confidence, probe_points, sign_verdict
from bayes_coherence.distribution import WeightVector
from bayes_coherence.utils import ModelError

from tests.bayes_coherence.oracles import random_weights


TOKYO_BASE = WeightVector.create([0.1, 0.2, 0.7])
TOKYO_A = WeightVector.create([0.1, 0.02, 0.88])
TOKYO_B = WeightVector.create([0.2, 0.3, 0.5])

SPREAD = WeightVector.create([0.2, 0.3, 0.3, 0.2])
CONCENTRATED = WeightVector.create([0.1, 0.1, 0.1, 0.7])


class TestPosteriorConfidence(TestCase):
    def test_tokyo(self):
        self.assertAlmostEqual(0.1 / 0.375, posterior_confidence(TOKYO_BASE,
                                                                 0.5))

    def test_randomizer_limit_is_the_prior(self):
        self.assertEqual(0.1, posterior_confidence(TOKYO_BASE, 1))

    def test_decreases_with_x(self):
        xs = np.linspace(0.01, 1, 100)
        values = [posterior_confidence(TOKYO_B, float(x)) for x in xs]

        self.assertTrue(all(a >= b for a, b in zip(values, values[1:])))

    def test_rejects_bad_ratio(self):
        for x in (0, -0.5, 1.5):
            with self.subTest(x=x):
                with self.assertRaises(LikelihoodRatioError) as cm:
                    posterior_confidence(TOKYO_BASE, x)

                self.assertEqual(x, cm.exception.x)


class TestMaxCoherencePosterior(TestCase):
    def test_tokyo(self):
        self.assertAlmostEqual(0.1 / 0.325, max_coherence_posterior(0.1, 2,
                                                                    0.5))

    def test_at_least_the_posterior(self):
        rng = Random(5)
        for _ in range(100):
            w = random_weights(rng, rng.randint(1, 6))
            x = rng.uniform(0.01, 1)
            with self.subTest(w=str(w), x=x):
                self.assertGreaterEqual(
                    max_coherence_posterior(w.a0, w.n, x) + 1e-12,
                    posterior_confidence(w, x))

    def test_errors(self):
        with self.assertRaises(SizeMismatchError):
            max_coherence_posterior(0.5, 0, 0.5)
        with self.assertRaises(ModelError):
            max_coherence_posterior(1.5, 2, 0.5)
        with self.assertRaises(UndefinedCoherenceError):
            max_coherence_posterior(0, 2, 0.5)


class TestCoherenceMeasure(TestCase):
    def test_tokyo(self):
        value = coherence_measure(TOKYO_BASE, 0.5)

        self.assertIsInstance(value, CoherenceValue)
        self.assertAlmostEqual(0.325 / 0.375, value.c)
        self.assertEqual((0.5, 2), (value.x, value.n))

    def test_is_ratio_of_posteriors(self):
        rng = Random(17)
        for _ in range(100):
            w = random_weights(rng, rng.randint(1, 6))
            x = rng.uniform(0.01, 0.99)
            with self.subTest(w=str(w), x=x):
                expected = posterior_confidence(w, x) \
                    / max_coherence_posterior(w.a0, w.n, x)
                self.assertAlmostEqual(expected, coherence_measure(w, x).c,
                                       places=12)

    def test_bounds(self):
        rng = Random(23)
        for _ in range(100):
            w = random_weights(rng, rng.randint(1, 6))
            x = rng.uniform(0.001, 1)
            c = coherence_measure(w, x).c
            with self.subTest(w=str(w), x=x):
                self.assertGreater(c, 0)
                self.assertLessEqual(c, 1)

    def test_single_proposition_is_one(self):
        w = WeightVector.create([0.3, 0.7])
        for x in (0.01, 0.5, 0.99):
            with self.subTest(x=x):
                self.assertAlmostEqual(1, coherence_measure(w, x).c)

    def test_maximally_coherent_is_one(self):
        w = WeightVector.create([0.25, 0, 0, 0.75])
        for x in (0.01, 0.5, 0.99):
            with self.subTest(x=x):
                self.assertAlmostEqual(1, coherence_measure(w, x).c)

    def test_limits(self):
        self.assertAlmostEqual(1, coherence_measure(TOKYO_BASE, 1e-9).c)
        self.assertAlmostEqual(1, coherence_measure(TOKYO_BASE, 1).c)

    def test_undefined(self):
        w = WeightVector.create([0, 0.5, 0.5])
        with self.assertRaisesRegex(UndefinedCoherenceError, 'a0 is 0'):
            coherence_measure(w, 0.5)
        with self.assertRaises(UndefinedCoherenceError):
            coherence_curve(w, np.array([0.5]))

    def test_curve_matches_measure(self):
        xs = np.array([0.1, 0.5, 0.9])
        curve = coherence_curve(TOKYO_B, xs)

        for x, c in zip(xs, curve):
            self.assertAlmostEqual(coherence_measure(TOKYO_B, float(x)).c, c)

    def test_check_ratio(self):
        self.assertEqual(1.0, check_ratio(1))
        with self.assertRaises(LikelihoodRatioError):
            check_ratio(0)


class TestPairCriterion(TestCase):
    def test_tokyo_a_is_more_coherent(self):
        self.assertEqual(
            OrderingVerdict(Relation.SECOND_MORE_COHERENT, Criterion.PAIR),
            compare_pair(TOKYO_BASE, TOKYO_A))

    def test_tokyo_b_is_incomparable(self):
        verdict = compare_pair(TOKYO_BASE, TOKYO_B)

        self.assertEqual(Relation.INCOMPARABLE, verdict.relation)
        self.assertFalse(verdict.comparable)

    def test_same_set_is_equal(self):
        self.assertEqual(OrderingVerdict(Relation.EQUAL, Criterion.PAIR),
                         compare_pair(TOKYO_B, TOKYO_B))

    def test_tokyo_b_curves_cross(self):
        differences = coherence_curve(TOKYO_BASE, probe_points(999)) \
            - coherence_curve(TOKYO_B, probe_points(999))

        self.assertTrue(np.any(differences > 0))
        self.assertTrue(np.any(differences < 0))

    def test_requires_pairs(self):
        with self.assertRaises(SizeMismatchError):
            compare_pair(SPREAD, CONCENTRATED)

    def test_antisymmetric(self):
        rng = Random(29)
        for _ in range(200):
            w, w_prime = random_weights(rng, 2), random_weights(rng, 2)
            with self.subTest(w=str(w), w_prime=str(w_prime)):
                self.assertEqual(compare_pair(w, w_prime).swapped(),
                                 compare_pair(w_prime, w))

    def test_str(self):
        self.assertEqual('second-more-coherent (pair-criterion)',
                         str(compare_pair(TOKYO_BASE, TOKYO_A)))


class TestGeneralCriterion(TestCase):
    def test_sufficient_condition(self):
        self.assertEqual(
            OrderingVerdict(Relation.SECOND_MORE_COHERENT,
                            Criterion.GENERAL),
            compare_general(SPREAD, CONCENTRATED))
        self.assertEqual(
            OrderingVerdict(Relation.FIRST_MORE_COHERENT, Criterion.GENERAL),
            compare_general(CONCENTRATED, SPREAD))

    def test_agrees_with_grid_probe(self):
        self.assertEqual(Relation.SECOND_MORE_COHERENT,
                         grid_probe(SPREAD, CONCENTRATED).relation)

    def test_zero_terms_satisfy_the_condition(self):
        w = WeightVector.create([0.2, 0.3, 0, 0.5])
        w_prime = WeightVector.create([0.1, 0.1, 0, 0.8])

        self.assertEqual(Criterion.GENERAL,
                         compare_general(w, w_prime).criterion)

    def test_falls_back_on_grid_probe(self):
        w = WeightVector.create([0.2, 0.3, 0.3, 0.2])
        w_prime = WeightVector.create([0.1, 0.4, 0.1, 0.4])

        self.assertEqual(Criterion.GRID_PROBE,
                         compare_general(w, w_prime).criterion)

    def test_requires_two_or_more(self):
        with self.assertRaises(SizeMismatchError):
            compare_general(WeightVector.create([0.5, 0.5]),
                            WeightVector.create([0.4, 0.6]))


class TestGridProbe(TestCase):
    def test_probe_points(self):
        xs = probe_points(99)

        self.assertEqual(99, len(xs))
        self.assertAlmostEqual(0.01, xs[0])
        self.assertAlmostEqual(0.99, xs[-1])

    def test_minimum_resolution(self):
        with self.assertRaises(ModelError):
            probe_points(98)

    def test_sign_verdict(self):
        for differences, relation in [
                ([0.1, 0.2], Relation.FIRST_MORE_COHERENT),
                ([-0.1, 0], Relation.SECOND_MORE_COHERENT),
                ([1e-13, -1e-13], Relation.EQUAL),
                ([0.1, -0.1], Relation.INCOMPARABLE)]:
            with self.subTest(differences=differences):
                self.assertEqual(
                    OrderingVerdict(relation, Criterion.GRID_PROBE),
                    sign_verdict(np.array(differences)))

    def test_single_propositions_are_equal(self):
        verdict = grid_probe(WeightVector.create([0.3, 0.7]),
                             WeightVector.create([0.6, 0.4]))
        self.assertEqual(Relation.EQUAL, verdict.relation)

    def test_size_mismatch(self):
        with self.assertRaisesRegex(SizeMismatchError,
                                    'incomparable sizes: 2 and 3'):
            grid_probe(TOKYO_BASE, SPREAD)


class TestCompare(TestCase):
    def test_dispatches_on_size(self):
        self.assertEqual(Criterion.PAIR,
                         compare(TOKYO_BASE, TOKYO_A).criterion)
        self.assertEqual(Criterion.GENERAL,
                         compare(SPREAD, CONCENTRATED).criterion)

    def test_warns_on_grid_probe(self):
        with self.assertWarnsRegex(ProbeEvidenceWarning,
                                   'grid-probe evidence only'):
            verdict = compare(WeightVector.create([0.3, 0.7]),
                              WeightVector.create([0.6, 0.4]))

        self.assertEqual(Criterion.GRID_PROBE, verdict.criterion)

    def test_no_warning_for_criteria(self):
        with catch_warnings(record=True) as caught:
            simplefilter('always')
            compare(TOKYO_BASE, TOKYO_B)

        self.assertEqual([], caught)

    def test_antisymmetric(self):
        rng = Random(31)
        with catch_warnings():
            simplefilter('ignore', ProbeEvidenceWarning)
            for _ in range(50):
                n = rng.randint(1, 5)
                w, w_prime = random_weights(rng, n), random_weights(rng, n)
                with self.subTest(w=str(w), w_prime=str(w_prime)):
                    self.assertEqual(compare(w, w_prime).swapped(),
                                     compare(w_prime, w))

    def test_errors(self):
        with self.assertRaises(SizeMismatchError):
            compare(TOKYO_BASE, SPREAD)
        with self.assertRaises(UndefinedCoherenceError):
            compare(TOKYO_BASE, WeightVector.create([0, 0.5, 0.5]))

    def test_relation_swapped(self):
        self.assertIs(Relation.INCOMPARABLE,
                      Relation.INCOMPARABLE.swapped())
        self.assertIs(Relation.EQUAL, Relation.EQUAL.swapped())
        self.assertIs(Relation.FIRST_MORE_COHERENT,
                      Relation.SECOND_MORE_COHERENT.swapped())


if __name__ == '__main__':
    main()
