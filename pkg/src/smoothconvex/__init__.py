"""Smoothness-exploiting first-order solvers, online learners, and harness."""

__version__ = "0.1.0"
