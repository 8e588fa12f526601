"""Metadata about the bayes_coherence package."""

__version__ = '0.1.0'

__author__ = 'bayes_coherence contributors'
__copyright__ = '2026, bayes_coherence contributors'
__credits__ = ['bayes_coherence contributors']

__license__ = 'MIT'
__maintainer__ = 'bayes_coherence contributors'
__email__ = 'maintainers@bayes-coherence.invalid'
__status__ = 'Beta'
