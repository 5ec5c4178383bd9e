"""qfluct: quantum thermal fluctuations of multiport linear electrical networks.

Pipeline: netlist -> quadratic Lagrangian -> Hamiltonian system -> symplectic
normal form -> spectral measure -> flux/charge correlators, with Foster
decomposition, scattering reduction and lossy-bath discretization.
"""

from . import cli, correlator, errors, foster, network, ratmat, spectra, symplectic

__version__ = "0.1.0"

__all__ = [
    "cli",
    "correlator",
    "errors",
    "foster",
    "network",
    "ratmat",
    "spectra",
    "symplectic",
    "__version__",
]
