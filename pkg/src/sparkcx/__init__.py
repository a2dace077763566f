"""Exact spark complexes: cohomology, Cech models, products and line bundles."""
