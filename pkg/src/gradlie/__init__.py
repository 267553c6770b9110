"""Lie symmetry toolkit for reaction-diffusion equations with gradient-dependent diffusivity."""

__version__ = "0.1.0"
