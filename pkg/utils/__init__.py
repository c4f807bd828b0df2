"""Utilities package for composite diffusion experiments."""
