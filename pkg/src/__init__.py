"""QKD Analyzer - exact and simulated eavesdropping analysis of BB84 and B92."""

__version__ = "1.0.0"
