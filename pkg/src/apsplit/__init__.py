"""Ergodic and almost-periodic decompositions of bounded semigroups, at desk scale."""

__version__ = "0.1.0"
