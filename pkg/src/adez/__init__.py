"""Weil representations, theta vectors and Epstein vector zeta functions of ADE root lattices."""

from adez.lattice import (
    DiscriminantData,
    EnumerationLimitError,
    LatticeSpec,
    NormSpectrum,
    cartan_matrix,
    discriminant_data,
    enumerate_norms,
    fundamental_weights,
    parse_spec,
)

__version__ = "0.1.0"

__all__ = [
    "DiscriminantData",
    "EnumerationLimitError",
    "LatticeSpec",
    "NormSpectrum",
    "cartan_matrix",
    "discriminant_data",
    "enumerate_norms",
    "fundamental_weights",
    "parse_spec",
    "__version__",
]
