"""trapshift: infinite-volume scattering phase shifts from trapped-particle
integrated correlation functions, plus a small gate-level quantum-circuit
simulator with noise channels for the same model.

Units: hbar = 1, dimensionless lengths. A particle of mass m lives on a
periodic box of size L with a contact potential of strength V0 at the
center of the box.
"""

__version__ = "0.1.0"

from .lattice import LatticeConfig, HamiltonianMatrix
from .analytic import ScatteringParams

__all__ = ["LatticeConfig", "HamiltonianMatrix", "ScatteringParams", "__version__"]
