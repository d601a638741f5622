"""Hierarchical source-code graphs for MiniLang programs and the MFGNN learner."""

__version__ = "0.1.0"
