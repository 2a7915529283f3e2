"""Discretized Hamiltonians of a trapped 1D particle with a contact potential.

The particle moves on a periodic box of size L. Three dense matrix
representations are provided:

* coordinate basis: second-order finite-difference Laplacian on N grid
  points x_alpha = -L/2 + a*alpha with spacing a = L/(N-1) and periodic
  wraparound |N> = |0> (the particle moves on a circle),
* momentum basis: exact plane-wave dispersion on the truncated mode set
  k = (2*pi/L)(-N/2 + n), n = 0..N-1,
* the L -> iL rotated (non-Hermitian) variants of both, used to smooth
  finite-volume pole structure in resolvent traces.

The contact potential V0*delta(x) is discretized as V0/(2a) on the two
grid sites alpha in {N/2 - 1, N/2} straddling x = 0 (trapezoidal weight
a per site, so the integrated strength is exactly V0), and as the
constant matrix V0/L in momentum space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LatticeConfig",
    "HamiltonianMatrix",
    "build_coordinate_hamiltonian",
    "build_momentum_hamiltonian",
    "build_il_rotated_hamiltonian",
]


@dataclass(frozen=True)
class LatticeConfig:
    """Box discretization: N grid points in a periodic box of size L.

    The lattice spacing a = L/(N-1) is derived. The continuum limit is
    taken at fixed L with N -> infinity (a -> 0, N*a -> L).
    """

    n: int
    box_size: float
    mass: float
    coupling: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need at least 2 grid points, got n={self.n}")
        if self.box_size <= 0:
            raise ValueError(f"box_size must be positive, got {self.box_size}")
        if self.mass <= 0:
            raise ValueError(f"mass must be positive, got {self.mass}")

    @property
    def spacing(self) -> float:
        return self.box_size / (self.n - 1)

    @property
    def delta_sites(self) -> tuple[int, int]:
        """Grid sites carrying the contact potential (requires even N)."""
        if self.n % 2 != 0:
            raise ValueError(
                f"contact-potential site rule N/2 needs even N, got n={self.n}"
            )
        return (self.n // 2 - 1, self.n // 2)


@dataclass(frozen=True)
class HamiltonianMatrix:
    """Dense complex Hamiltonian tagged with its basis and rotation."""

    matrix: np.ndarray
    basis: str                       # "coordinate" | "momentum"
    rotation: str = "none"           # "none" | "iL"
    hermitian: bool = True
    config: LatticeConfig | None = field(default=None, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"matrix must be square, got shape {m.shape}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def describe(self) -> str:
        return f"{self.basis} basis, rotation={self.rotation}, dim={self.dim}"


def _delta_profile(cfg: LatticeConfig) -> np.ndarray:
    """V(x_alpha): V0/(2a) on the two central sites, zero elsewhere."""
    v = np.zeros(cfg.n)
    for site in cfg.delta_sites:
        v[site] = cfg.coupling / (2.0 * cfg.spacing)
    return v


def build_coordinate_hamiltonian(cfg: LatticeConfig, interacting: bool = True) -> HamiltonianMatrix:
    """Finite-difference Hamiltonian on the periodic coordinate grid.

    Off-diagonal hopping -1/(2 m a^2) between neighbours (with wraparound),
    diagonal 1/(m a^2) + V(x_alpha). With interacting=False the potential
    is dropped entirely.
    """
    n, a, m = cfg.n, cfg.spacing, cfg.mass
    hop = -1.0 / (2.0 * m * a * a)
    h = np.zeros((n, n), dtype=complex)
    idx = np.arange(n)
    h[idx, (idx + 1) % n] += hop
    h[(idx + 1) % n, idx] += hop
    h[idx, idx] += 1.0 / (m * a * a)
    if interacting:
        h[idx, idx] += _delta_profile(cfg)
    return HamiltonianMatrix(h, basis="coordinate", config=cfg)


def build_momentum_hamiltonian(cfg: LatticeConfig, interacting: bool = True) -> HamiltonianMatrix:
    """Plane-wave Hamiltonian on the truncated mode set.

    Diagonal k^2/(2m) with k = (2*pi/L)(-N/2 + n); the contact potential
    adds the constant V0/L to every entry. The mode set is asymmetric by
    one unit (the +N/2 mode is absent), which is kept as written.
    """
    n_modes = np.arange(cfg.n)
    k = (2.0 * np.pi / cfg.box_size) * (-cfg.n / 2.0 + n_modes)
    h = np.diag(k * k / (2.0 * cfg.mass)).astype(complex)
    if interacting:
        h += cfg.coupling / cfg.box_size
    return HamiltonianMatrix(h, basis="momentum", config=cfg)


def build_il_rotated_hamiltonian(
    cfg: LatticeConfig, interacting: bool = True, basis: str = "coordinate"
) -> HamiltonianMatrix:
    """L -> iL rotated Hamiltonian (a -> ia in coordinate space).

    Coordinate basis: hopping sign flips to +1/(2 m a^2) and the diagonal
    becomes -(1/(m a^2) + i V(x_alpha)). Momentum basis: the dispersion
    negates and the constant coupling becomes -i V0/L. Either way the
    free spectrum is exactly the negated unrotated free spectrum; the
    interacting matrix is non-Hermitian.
    """
    if basis == "coordinate":
        n, a, m = cfg.n, cfg.spacing, cfg.mass
        hop = +1.0 / (2.0 * m * a * a)
        h = np.zeros((n, n), dtype=complex)
        idx = np.arange(n)
        h[idx, (idx + 1) % n] += hop
        h[(idx + 1) % n, idx] += hop
        h[idx, idx] -= 1.0 / (m * a * a)
        if interacting:
            h[idx, idx] -= 1j * _delta_profile(cfg)
    elif basis == "momentum":
        free = build_momentum_hamiltonian(cfg, interacting=False)
        h = -free.matrix.copy()
        if interacting:
            h += -1j * cfg.coupling / cfg.box_size
    else:
        raise ValueError(f"unknown basis {basis!r}")
    return HamiltonianMatrix(
        h, basis=basis, rotation="iL", hermitian=not interacting, config=cfg
    )
