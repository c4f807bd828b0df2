"""Data generation and file I/O for composite diffusion experiments."""
