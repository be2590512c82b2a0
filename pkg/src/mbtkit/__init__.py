"""Solvers, reductions and certificate checkers for the maximum binary tree problem."""

__version__ = "0.1.0"
