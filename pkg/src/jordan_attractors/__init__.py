"""Attractor points for cubic-norm supergravity models."""
