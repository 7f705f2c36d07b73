"""Numerical laboratory for homogeneous Monge-Ampere boundary problems,
Alexandrov measures of piecewise convex functions and a combinatorial
model of tropical cell complexes."""

__version__ = "0.1.0"
