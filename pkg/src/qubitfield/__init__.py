"""Quantum fields of qubits: operator algebra, equation-of-motion types,
lattice fields, conserved charges, and state diagnostics."""

from .operators import QubitTriple, embed_triple, verify_triple
from .superops import StructureConstants, extract_structure_constants, omega_apply
from .classify import EomSpec, determinant_polynomial, factorize
from .lattice import Lattice, Mode, harmonic_scalar, standing_wave, ansatz_triple
from .dynamics import evolve_type1, energy_charge
from .diagnostics import entanglement_witness, local_density

__version__ = "0.1.0"

__all__ = [
    "QubitTriple",
    "embed_triple",
    "verify_triple",
    "StructureConstants",
    "extract_structure_constants",
    "omega_apply",
    "EomSpec",
    "determinant_polynomial",
    "factorize",
    "Lattice",
    "Mode",
    "harmonic_scalar",
    "standing_wave",
    "ansatz_triple",
    "evolve_type1",
    "energy_charge",
    "entanglement_witness",
    "local_density",
]
