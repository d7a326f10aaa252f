"""Reduce satisfiability in local theory extensions to an SMT problem."""

__version__ = "0.1.0"
