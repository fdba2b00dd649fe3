"""Dirichlet character sums and pretentious-distance experiments."""
