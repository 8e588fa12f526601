"""Probabilistic coherence, belief expansion and Bayesian networks."""

# flake8: noqa: F401
from .version import __author__, __credits__, __copyright__, __email__, \
    __license__, __maintainer__, __status__, __version__
