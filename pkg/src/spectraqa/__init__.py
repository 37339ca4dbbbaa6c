"""Retrieval-augmented question answering over labeled spectral-detection literature."""

__version__ = "0.1.0"
