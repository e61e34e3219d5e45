"""Sentence-pair embedding sidecar: pairs JSONL in, vector file out."""

__version__ = "0.1.0"
