"""Alignment, combined PCA/CCA, baselines and replicate studies."""
