"""Quantum kernel estimation and training benchmark."""
