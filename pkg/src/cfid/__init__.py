"""Conditional, restricted, marginal and joint Frechet distances, with an exact
discrete optimal-transport oracle."""

__version__ = "0.1.0"
