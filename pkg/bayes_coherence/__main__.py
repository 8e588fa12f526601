"""Allows running the command line interface with `python -m`."""

from bayes_coherence.main import run


run()
