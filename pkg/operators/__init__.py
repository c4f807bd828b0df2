"""Kernel and composite diffusion operators."""
