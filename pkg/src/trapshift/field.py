"""Discretized 1D scalar phi^4 Hamiltonian on a field-value grid.

Each spatial site carries a field value phi_alpha = -phi_max/2 + a_phi*alpha
on N_phi grid points; the full Hilbert space is the N_x-fold tensor
product (dimension N_phi^N_x, site 0 rightmost). The conjugate-momentum
term is discretized with the same periodic finite-difference stencil as
the quantum-mechanics module.

Two coefficient conventions are built side by side:

* "canonical": obtained by discretizing
      a * sum_j [ (1/2) Pi_j^2 + (1/2) m^2 phi_j^2
                  + (1/(2 a^2))(phi_{j+1} - phi_j)^2 + (lambda/4!) phi_j^4 ]
  directly, which yields hopping -1/(2 a_phi^2) (no mass factor), a
  phi^2 coefficient (1/2)(m^2 + 2/a^2) from the gradient diagonal, and
  nearest-neighbour coupling -(1/a) phi phi.
* "as_printed": an alternative coefficient set kept verbatim for
  comparison, with hopping -1/(2 m a_phi^2), diagonal 1/(m a_phi^2), a
  phi^2 coefficient (1/2)(m^2 + 2/a_phi^2) and coupling
  +(a/a_phi^2) phi phi. Its suspect features: a mass factor on the
  conjugate-momentum stencil (Pi is not a velocity), a gradient diagonal
  drawn from the field spacing instead of the spatial one, and a
  positive neighbour coupling.

The two disagree wherever those factors differ; the builder reports the
max-norm disagreement rather than silently correcting either convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import PauliTerm
from .lattice import HamiltonianMatrix

__all__ = [
    "FieldLatticeConfig",
    "build_phi_operator",
    "phi_power_terms",
    "build_field_hamiltonian",
    "convention_difference",
]

_DIM_CAP = 4096


@dataclass(frozen=True)
class FieldLatticeConfig:
    """Spatial lattice (n_sites, box_size) and field-value grid
    (n_phi points over a range of phi_max).

    A sensible field range for resolving the low harmonic levels is
    phi_max ~ 12/sqrt(mass) (the default is left to the caller).
    """

    n_sites: int
    box_size: float
    mass: float
    quartic: float
    n_phi: int
    phi_max: float

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError(f"need n_sites >= 1, got {self.n_sites}")
        if self.n_phi < 2:
            raise ValueError(f"need n_phi >= 2, got {self.n_phi}")
        if self.box_size <= 0 or self.mass <= 0 or self.phi_max <= 0:
            raise ValueError("box_size, mass and phi_max must be positive")
        if self.dim > _DIM_CAP:
            raise ValueError(
                f"total dimension {self.n_phi}^{self.n_sites} exceeds {_DIM_CAP}"
            )

    @property
    def spacing(self) -> float:
        return self.box_size / (self.n_sites - 1) if self.n_sites > 1 else self.box_size

    @property
    def phi_spacing(self) -> float:
        return self.phi_max / (self.n_phi - 1)

    @property
    def dim(self) -> int:
        return self.n_phi**self.n_sites

    def phi_values(self) -> np.ndarray:
        return -self.phi_max / 2.0 + self.phi_spacing * np.arange(self.n_phi)


def build_phi_operator(gamma_phi: int) -> tuple[list[PauliTerm], np.ndarray]:
    """Single-site ladder operator U_phi = -sum_b (2^b/2) Z_b.

    Returns the Pauli terms and the dense diagonal; the field operator
    is phi = a_phi * U_phi with diagonal values -(N_phi-1)/2 + alpha.
    Unlike the momentum-space ladder used in the circuits module, this
    one carries no -I/2 offset, so its spectrum is symmetric about zero.
    """
    if gamma_phi < 1:
        raise ValueError(f"need at least one qubit, got {gamma_phi}")
    n_phi = 1 << gamma_phi
    terms = []
    for b in range(gamma_phi):
        s = "".join("Z" if gamma_phi - 1 - i == b else "I" for i in range(gamma_phi))
        terms.append(PauliTerm(-(2.0**b) / 2.0, s))
    diag = -(n_phi - 1) / 2.0 + np.arange(n_phi)
    return terms, diag


def phi_power_terms(gamma_phi: int, power: int) -> list[PauliTerm]:
    """Pauli expansion of U_phi^power (diagonal Z-algebra, masks xor)."""
    if power < 1:
        raise ValueError("power must be >= 1")
    base: dict[int, complex] = {}
    for b in range(gamma_phi):
        base[1 << b] = -(2.0**b) / 2.0
    acc = dict(base)
    for _ in range(power - 1):
        nxt: dict[int, complex] = {}
        for m1, c1 in acc.items():
            for m2, c2 in base.items():
                m = m1 ^ m2
                nxt[m] = nxt.get(m, 0.0) + c1 * c2
        acc = nxt
    out = []
    for mask, coef in sorted(acc.items()):
        s = "".join(
            "Z" if (mask >> (gamma_phi - 1 - i)) & 1 else "I" for i in range(gamma_phi)
        )
        out.append(PauliTerm(coef, s))
    return out


def _site_local(cfg: FieldLatticeConfig, convention: str) -> np.ndarray:
    """Dense single-site local Hamiltonian (without the overall factor a)."""
    n = cfg.n_phi
    a, a_phi, m, lam = cfg.spacing, cfg.phi_spacing, cfg.mass, cfg.quartic
    phi = cfg.phi_values()
    h = np.zeros((n, n), dtype=complex)
    idx = np.arange(n)
    if convention == "canonical":
        hop = -1.0 / (2.0 * a_phi**2)
        diag_kin = 1.0 / a_phi**2
        # gradient diagonal only exists with a genuine neighbour
        grad = 2.0 / a**2 if cfg.n_sites > 1 else 0.0
        phi2 = 0.5 * (m * m + grad)
    elif convention == "as_printed":
        hop = -1.0 / (2.0 * m * a_phi**2)
        diag_kin = 1.0 / (m * a_phi**2)
        phi2 = 0.5 * (m * m + 2.0 / a_phi**2)
    else:
        raise ValueError(f"unknown convention {convention!r}")
    h[idx, (idx + 1) % n] += hop
    h[(idx + 1) % n, idx] += hop
    h[idx, idx] += diag_kin + phi2 * phi**2 + lam / 24.0 * phi**4
    return h


def _embed(op: np.ndarray, site: int, cfg: FieldLatticeConfig) -> np.ndarray:
    """I (x) ... (x) op at `site` (x) ... (x) I, site 0 rightmost."""
    out = np.array([[1.0 + 0.0j]])
    for j in range(cfg.n_sites - 1, -1, -1):
        out = np.kron(out, op if j == site else np.eye(cfg.n_phi, dtype=complex))
    return out


def build_field_hamiltonian(
    cfg: FieldLatticeConfig, convention: str = "canonical"
) -> HamiltonianMatrix:
    """Full field Hamiltonian: local terms plus nearest-neighbour coupling.

    Periodic in space; at n_sites = 1 the canonical gradient term
    vanishes identically (the site is its own neighbour), while the
    as_printed coupling keeps its verbatim self-coupling term.
    """
    local = _site_local(cfg, convention)
    h = np.zeros((cfg.dim, cfg.dim), dtype=complex)
    for j in range(cfg.n_sites):
        h += cfg.spacing * _embed(local, j, cfg)
    phi_op = np.diag(cfg.phi_values()).astype(complex)
    if convention == "canonical":
        coupling = -1.0 / cfg.spacing
        skip_self = cfg.n_sites == 1     # (phi_{j+1}-phi_j)^2 = 0
    else:
        coupling = cfg.spacing / cfg.phi_spacing**2
        skip_self = False
    if not skip_self:
        for j in range(cfg.n_sites):
            nxt = (j + 1) % cfg.n_sites
            if nxt == j:
                h += coupling * _embed(phi_op @ phi_op, j, cfg)
            else:
                h += coupling * (_embed(phi_op, nxt, cfg) @ _embed(phi_op, j, cfg))
    return HamiltonianMatrix(h, basis="coordinate", hermitian=True)


def convention_difference(cfg: FieldLatticeConfig) -> dict:
    """Max-norm disagreement between the two coefficient conventions."""
    h_can = build_field_hamiltonian(cfg, "canonical").matrix
    h_pr = build_field_hamiltonian(cfg, "as_printed").matrix
    diff = np.max(np.abs(h_can - h_pr))
    scale = max(np.max(np.abs(h_can)), np.max(np.abs(h_pr)))
    return {
        "max_abs_difference": float(diff),
        "relative_to_max_entry": float(diff / scale) if scale else 0.0,
        "agree": bool(diff == 0.0),
    }
