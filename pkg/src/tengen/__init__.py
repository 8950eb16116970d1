"""Monte Carlo tree search Go engine with policy-guided expansion."""

__version__ = "0.1.0"
