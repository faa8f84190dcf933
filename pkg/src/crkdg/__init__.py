"""Compact Runge-Kutta discontinuous Galerkin (cRKDG) and classical RKDG solvers."""

__version__ = "0.1.0"
