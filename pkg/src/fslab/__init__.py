"""Finite-sums combinatorics lab: ordinal notations, FS-trees, Folkman-type
searches and certificate-producing extraction algorithms."""

__version__ = "0.1.0"
