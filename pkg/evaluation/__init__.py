"""Evaluation package: beat scores and run artifacts."""
