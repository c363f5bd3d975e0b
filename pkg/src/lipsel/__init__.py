"""Exact Lipschitz selections of polytope-valued maps on finite pseudometric spaces."""

__version__ = "0.1.0"
