"""Exact computer algebra for graded pro-unipotent groups: Birkhoff
decomposition of Hopf-algebra characters, time-ordered exponentials,
flat equisingular connections and their classification data."""

__version__ = "0.1.0"
