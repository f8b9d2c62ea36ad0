"""Coupled PT-symmetric oscillators: diagonal forms, spectra, metrics and Fock-space checks."""

from .canonical import DiagonalForm, CanonicalSolution, diagonalize, solve_canonical
from .model import (
    CriticalCouplingError,
    HamiltonianSpec,
    Model,
    ModelError,
    ModelParams,
    RegimeError,
    build_hamiltonian,
    hermitian_counterpart,
)
from .spectrum import EnergyLevel, Regime, classify_regime, energy, spectrum_table

__all__ = [
    "CanonicalSolution",
    "CriticalCouplingError",
    "DiagonalForm",
    "EnergyLevel",
    "HamiltonianSpec",
    "Model",
    "ModelError",
    "ModelParams",
    "Regime",
    "RegimeError",
    "build_hamiltonian",
    "classify_regime",
    "diagonalize",
    "energy",
    "hermitian_counterpart",
    "solve_canonical",
    "spectrum_table",
]

__version__ = "0.1.0"
