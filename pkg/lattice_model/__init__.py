"""Numerical lab for discrete elastic energies with random long-range fibers and their
continuum limit."""
