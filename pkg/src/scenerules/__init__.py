"""Incremental EAV scene model with FOIL-style rule induction from vision
and dialogue."""

from .kb import KnowledgeBase, Provenance, normalize_value  # noqa: F401

__version__ = "0.1.0"
