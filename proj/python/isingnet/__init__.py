"""Ising network estimation by nodewise l1-penalised logistic regression."""

from ._core import IsingModel, exact_pmf, fit, generate, recovery, sample

__all__ = ["IsingModel", "exact_pmf", "fit", "generate", "recovery", "sample"]
