"""Configuration package for composite diffusion experiments."""
