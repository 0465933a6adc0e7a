"""Sumset arithmetic and automorphism search on finite 0-containing subsets of N."""
