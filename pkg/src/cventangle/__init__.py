"""Entropic entanglement criteria for continuous-variable bipartite states,
with generalized-uncertainty-principle (GUP) corrections."""

__version__ = "0.1.0"
