"""Gate-level statevector simulator and the time-evolution circuits of the
trapped contact-potential Hamiltonian.

Qubit 0 is the least significant bit of the basis index alpha; Pauli
strings are written with qubit Gamma-1 leftmost. Global phases are
tracked as explicit gates because they become relative (ancilla) phases
once the circuit is controlled inside a Hadamard test.

Circuit builders
----------------
Coordinate basis, H = Ha + Hb + Hv with N = 2^Gamma grid sites:
  * exp(-i Ha dt): pairs (2a, 2a+1) differ only in bit 0, so this is a
    single RX on qubit 0.
  * exp(-i Hb dt): conjugate of the Ha evolution by the cyclic shift,
    decrement o exp(-i Ha dt) o increment, with the increment built from
    an MCX ladder.
  * exp(-i Hv dt): product of Z-string exponentials (all diagonal, so
    the order is irrelevant), each realized as a CX parity ladder onto
    its last qubit around an RZ.

Momentum basis, H = H1 + H2:
  * exp(-i H1 dt): diagonal Z/ZZ exponentials from the square of the
    position-like ladder operator U = -(1/2)I - sum_b (2^b/2) Z_b.
  * exp(-i H2 dt): H2 = (V0/L) * (all-ones matrix) = (N V0/L) * uniform
    projector, so the evolution is exact (not Trotterized): conjugate a
    zero-controlled phase on |0...0> by H on every qubit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import LatticeConfig

__all__ = [
    "Gate",
    "Circuit",
    "PauliTerm",
    "pauli_matrix",
    "pauli_sum_matrix",
    "pauli_terms_hv",
    "pauli_terms_h1",
    "pauli_terms_h2",
    "increment_circuit",
    "decrement_circuit",
    "circuit_exp_ha",
    "circuit_exp_hb",
    "circuit_exp_hv",
    "circuit_exp_h1",
    "circuit_exp_h2",
    "trotter_evolution",
    "hadamard_test_circuit",
    "HadamardEstimate",
    "hadamard_test",
    "TraceEstimate",
    "icf_trace_estimate",
]

_DIAGONAL_KINDS = {"z", "s", "sdg", "rz", "phase"}
_SQ = 1.0 / math.sqrt(2.0)
_MATRICES = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "h": np.array([[_SQ, _SQ], [_SQ, -_SQ]], dtype=complex),
}


@dataclass(frozen=True)
class Gate:
    """One gate: kind, target qubits, control qubits, angle.

    kinds: x y z h s sdg rx rz phase gphase. Multi-controlled variants
    are expressed through the controls tuple (cx = x with one control,
    mcx = x with k controls, cphase = phase with controls). gphase has
    no targets and multiplies the state by e^{i angle}.
    """

    kind: str
    targets: tuple[int, ...] = ()
    controls: tuple[int, ...] = ()
    angle: float = 0.0

    def __post_init__(self):
        if set(self.targets) & set(self.controls):
            raise ValueError(f"targets and controls overlap in {self}")
        if self.kind != "gphase" and len(self.targets) != 1:
            raise ValueError(f"{self.kind} takes exactly one target")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.targets + self.controls

    def display_kind(self) -> str:
        if self.kind == "x" and len(self.controls) == 1:
            return "cx"
        if self.kind == "x" and len(self.controls) > 1:
            return "mcx"
        if self.kind == "phase" and self.controls:
            return "cphase"
        return self.kind


def _matrix_1q(kind: str, angle: float) -> np.ndarray:
    if kind in _MATRICES:
        return _MATRICES[kind]
    if kind == "rx":
        c, s = math.cos(angle / 2), math.sin(angle / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    raise ValueError(f"no dense matrix for kind {kind!r}")


def _diag_phase(kind: str, angle: float) -> complex:
    # factor applied to amplitudes with target bit = 1 (rz also scales bit 0)
    if kind == "z":
        return -1.0
    if kind == "s":
        return 1j
    if kind == "sdg":
        return -1j
    if kind in ("rz", "phase"):
        return np.exp(1j * angle) if kind == "phase" else np.exp(1j * angle / 2)
    raise ValueError(kind)


class Circuit:
    """Ordered gate list on `width` qubits with simulation helpers."""

    def __init__(self, width: int):
        if width < 1:
            raise ValueError(f"width must be >= 1, got {width}")
        self.width = width
        self.gates: list[Gate] = []

    # -- construction -----------------------------------------------------
    def add(self, gate: Gate) -> "Circuit":
        for q in gate.qubits:
            if not 0 <= q < self.width:
                raise ValueError(f"qubit {q} out of range for width {self.width}")
        self.gates.append(gate)
        return self

    def x(self, q, controls=()):
        return self.add(Gate("x", (q,), tuple(controls)))

    def y(self, q, controls=()):
        return self.add(Gate("y", (q,), tuple(controls)))

    def z(self, q, controls=()):
        return self.add(Gate("z", (q,), tuple(controls)))

    def h(self, q, controls=()):
        return self.add(Gate("h", (q,), tuple(controls)))

    def s(self, q, controls=()):
        return self.add(Gate("s", (q,), tuple(controls)))

    def sdg(self, q, controls=()):
        return self.add(Gate("sdg", (q,), tuple(controls)))

    def rx(self, angle, q, controls=()):
        return self.add(Gate("rx", (q,), tuple(controls), angle))

    def rz(self, angle, q, controls=()):
        return self.add(Gate("rz", (q,), tuple(controls), angle))

    def phase(self, angle, q, controls=()):
        return self.add(Gate("phase", (q,), tuple(controls), angle))

    def gphase(self, angle):
        return self.add(Gate("gphase", angle=angle))

    def cx(self, control, target):
        return self.x(target, controls=(control,))

    def mcx(self, controls, target):
        return self.x(target, controls=tuple(controls))

    def cphase(self, angle, controls, target):
        return self.phase(angle, target, controls=tuple(controls))

    def extend(self, other: "Circuit") -> "Circuit":
        if other.width != self.width:
            raise ValueError("width mismatch")
        for g in other.gates:
            self.add(g)
        return self

    # -- accounting --------------------------------------------------------
    @property
    def global_phase(self) -> float:
        return sum(g.angle for g in self.gates if g.kind == "gphase")

    def gate_counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for g in self.gates:
            k = g.display_kind()
            out[k] = out.get(k, 0) + 1
        return out

    def multiqubit_gate_count(self) -> int:
        """Gates touching two or more qubits (targets plus controls)."""
        return sum(1 for g in self.gates if len(g.qubits) >= 2)

    # -- simulation ---------------------------------------------------------
    def apply(self, state: np.ndarray) -> np.ndarray:
        """Apply all gates to a statevector (or a (dim, k) column batch)."""
        dim = 1 << self.width
        if state.shape[0] != dim:
            raise ValueError(f"state dim {state.shape[0]} != {dim}")
        out = state.astype(complex, copy=True)
        idx = np.arange(dim)
        for g in self.gates:
            out = _apply_gate(out, g, idx)
        return out

    def run(self) -> np.ndarray:
        state = np.zeros(1 << self.width, dtype=complex)
        state[0] = 1.0
        return self.apply(state)

    def unitary(self) -> np.ndarray:
        return self.apply(np.eye(1 << self.width, dtype=complex))

    def controlled(self) -> "Circuit":
        """Same circuit with every gate controlled on a fresh top qubit.

        Global phases are promoted to phase gates on the new control:
        once controlled they are relative phases and dropping them would
        corrupt interference estimates.
        """
        anc = self.width
        out = Circuit(self.width + 1)
        for g in self.gates:
            if g.kind == "gphase":
                out.phase(g.angle, anc)
            else:
                out.add(Gate(g.kind, g.targets, g.controls + (anc,), g.angle))
        return out

    # -- serialization -------------------------------------------------------
    def to_text(self) -> str:
        """Plain-text gate list: kind, targets, controls, angle per line."""
        lines = [f"width {self.width}"]
        for g in self.gates:
            tgt = ",".join(map(str, g.targets)) or "-"
            ctl = ",".join(map(str, g.controls)) or "-"
            lines.append(f"{g.kind} {tgt} {ctl} {g.angle!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        head = lines[0].split()
        if head[0] != "width":
            raise ValueError("missing width header")
        circ = cls(int(head[1]))
        for ln in lines[1:]:
            kind, tgt, ctl, angle = ln.split()
            targets = () if tgt == "-" else tuple(map(int, tgt.split(",")))
            controls = () if ctl == "-" else tuple(map(int, ctl.split(",")))
            circ.add(Gate(kind, targets, controls, float(angle)))
        return circ


def _apply_gate(state: np.ndarray, g: Gate, idx: np.ndarray) -> np.ndarray:
    if g.kind == "gphase":
        return state * np.exp(1j * g.angle)
    ctrl_mask = 0
    for c in g.controls:
        ctrl_mask |= 1 << c
    t_bit = 1 << g.targets[0]
    if g.kind in _DIAGONAL_KINDS:
        sel1 = (idx & ctrl_mask) == ctrl_mask
        hi = sel1 & ((idx & t_bit) != 0)
        state[hi] *= _diag_phase(g.kind, g.angle)
        if g.kind == "rz":
            lo = sel1 & ((idx & t_bit) == 0)
            state[lo] *= np.exp(-1j * g.angle / 2)
        return state
    mat = _matrix_1q(g.kind, g.angle)
    sel0 = ((idx & ctrl_mask) == ctrl_mask) & ((idx & t_bit) == 0)
    i0 = idx[sel0]
    i1 = i0 | t_bit
    a0 = state[i0].copy()
    a1 = state[i1].copy()
    state[i0] = mat[0, 0] * a0 + mat[0, 1] * a1
    state[i1] = mat[1, 0] * a0 + mat[1, 1] * a1
    return state


# ---------------------------------------------------------------------------
# Pauli strings
# ---------------------------------------------------------------------------

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliTerm:
    """coefficient * (tensor product of Paulis), qubit Gamma-1 leftmost."""

    coefficient: complex
    string: str

    def __post_init__(self):
        if not self.string or any(ch not in "IXYZ" for ch in self.string):
            raise ValueError(f"bad Pauli string {self.string!r}")
        if not np.isfinite(self.coefficient):
            raise ValueError("non-finite coefficient")

    @property
    def width(self) -> int:
        return len(self.string)

    def qubits(self) -> tuple[int, ...]:
        """Qubit indices with a non-identity factor (qubit 0 = rightmost)."""
        g = self.width
        return tuple(g - 1 - i for i, ch in enumerate(self.string) if ch != "I")


def pauli_matrix(term: PauliTerm) -> np.ndarray:
    out = np.array([[term.coefficient]], dtype=complex)
    for ch in term.string:
        out = np.kron(out, _PAULI[ch])
    return out


def pauli_sum_matrix(terms: list[PauliTerm]) -> np.ndarray:
    if not terms:
        raise ValueError("empty term list")
    return sum(pauli_matrix(t) for t in terms)


def _gamma_for(cfg: LatticeConfig) -> int:
    gamma = cfg.n.bit_length() - 1
    if 1 << gamma != cfg.n:
        raise ValueError(f"grid count must be a power of two, got n={cfg.n}")
    return gamma


def _z_string(width: int, zs: tuple[int, ...]) -> str:
    return "".join("Z" if (width - 1 - i) in zs else "I" for i in range(width))


def pauli_terms_hv(cfg: LatticeConfig) -> list[PauliTerm]:
    """Diagonal part Hv = (1/(m a^2)) I + contact potential, as Z-strings.

    The potential expands into all even Z-insertions on qubits
    0..Gamma-2 (weight +V0/(2a 2^{Gamma-1})) and, tensored with Z on
    qubit Gamma-1, all odd insertions (weight -V0/(2a 2^{Gamma-1})).
    """
    gamma = _gamma_for(cfg)
    a, m = cfg.spacing, cfg.mass
    terms = [PauliTerm(1.0 / (m * a * a), "I" * gamma)]
    w = cfg.coupling / (2.0 * a) / 2 ** (gamma - 1)
    low = list(range(gamma - 1))
    for mask in range(1 << (gamma - 1)):
        zs = tuple(q for q in low if (mask >> q) & 1)
        if len(zs) % 2 == 0:
            terms.append(PauliTerm(w, _z_string(gamma, zs)))
        else:
            terms.append(PauliTerm(-w, _z_string(gamma, zs + (gamma - 1,))))
    return terms


def pauli_terms_h1(cfg: LatticeConfig) -> list[PauliTerm]:
    """Momentum kinetic term H1 = (2pi/L)^2/(2m) U^2 as I/Z/ZZ strings.

    U = -(1/2) I - sum_b (2^b/2) Z_b has U^2 constant (2^{2 Gamma}+2)/12
    (fixed against the dense matrix; expanding the square gives
    1/4 + (4^Gamma - 1)/12), linear coefficients 2^a/2 and pair
    coefficients 2^{a+b}/2.
    """
    gamma = _gamma_for(cfg)
    scale = (2.0 * np.pi / cfg.box_size) ** 2 / (2.0 * cfg.mass)
    const = (4.0**gamma + 2.0) / 12.0
    terms = [PauliTerm(scale * const, "I" * gamma)]
    for q in range(gamma):
        terms.append(PauliTerm(scale * 2.0**q / 2.0, _z_string(gamma, (q,))))
    for q1 in range(gamma):
        for q2 in range(q1 + 1, gamma):
            terms.append(
                PauliTerm(scale * 2.0 ** (q1 + q2) / 2.0, _z_string(gamma, (q1, q2)))
            )
    return terms


def pauli_terms_h2(cfg: LatticeConfig) -> list[PauliTerm]:
    """Constant matrix H2 = (V0/L) * ones as the sum of all X-insertions."""
    gamma = _gamma_for(cfg)
    w = cfg.coupling / cfg.box_size
    terms = []
    for mask in range(1 << gamma):
        s = "".join("X" if (mask >> (gamma - 1 - i)) & 1 else "I" for i in range(gamma))
        terms.append(PauliTerm(w, s))
    return terms


# ---------------------------------------------------------------------------
# evolution circuits
# ---------------------------------------------------------------------------


def increment_circuit(width: int) -> Circuit:
    """Cyclic |alpha> -> |alpha + 1 mod 2^width> as an MCX ladder."""
    circ = Circuit(width)
    for target in range(width - 1, 0, -1):
        circ.mcx(tuple(range(target)), target)
    circ.x(0)
    return circ


def decrement_circuit(width: int) -> Circuit:
    circ = Circuit(width)
    circ.x(0)
    for target in range(1, width):
        circ.mcx(tuple(range(target)), target)
    return circ


def circuit_exp_ha(cfg: LatticeConfig, dt: float) -> Circuit:
    """exp(-i Ha dt): RX(-dt/(m a^2)) on qubit 0."""
    gamma = _gamma_for(cfg)
    circ = Circuit(gamma)
    circ.rx(-dt / (cfg.mass * cfg.spacing**2), 0)
    return circ


def circuit_exp_hb(cfg: LatticeConfig, dt: float) -> Circuit:
    """exp(-i Hb dt) = decrement o exp(-i Ha dt) o increment.

    Hb couples the pairs (2a+1, 2a+2 mod N), which the cyclic shift maps
    onto the bit-0 pairs of Ha. At Gamma = 1 the shift is a single X and
    Ha, Hb coincide, reproducing the doubled single-qubit coupling.
    """
    gamma = _gamma_for(cfg)
    circ = Circuit(gamma)
    circ.extend(increment_circuit(gamma))
    circ.rx(-dt / (cfg.mass * cfg.spacing**2), 0)
    circ.extend(decrement_circuit(gamma))
    return circ


def _append_z_string_exp(circ: Circuit, qubits: tuple[int, ...], theta: float):
    """Append exp(-i theta Z...Z) on the given qubits (CX ladder + RZ)."""
    if not qubits:
        circ.gphase(-theta)
        return
    qs = sorted(qubits)
    last = qs[-1]
    for q in qs[:-1]:
        circ.cx(q, last)
    circ.rz(2.0 * theta, last)
    for q in reversed(qs[:-1]):
        circ.cx(q, last)


def circuit_exp_hv(cfg: LatticeConfig, dt: float) -> Circuit:
    """exp(-i Hv dt): global phase plus commuting Z-string exponentials.

    Zero-coefficient strings (e.g. the whole potential at V0 = 0) emit
    no gates, so the free case reduces to the global phase alone.
    """
    gamma = _gamma_for(cfg)
    circ = Circuit(gamma)
    for term in pauli_terms_hv(cfg):
        if term.coefficient != 0:
            _append_z_string_exp(circ, term.qubits(), term.coefficient.real * dt)
    return circ


def circuit_exp_h1(cfg: LatticeConfig, dt: float) -> Circuit:
    """exp(-i H1 dt): diagonal, one Z-string exponential per term."""
    gamma = _gamma_for(cfg)
    circ = Circuit(gamma)
    for term in pauli_terms_h1(cfg):
        if term.coefficient != 0:
            _append_z_string_exp(circ, term.qubits(), term.coefficient.real * dt)
    return circ


def circuit_exp_h2(cfg: LatticeConfig, dt: float) -> Circuit:
    """exp(-i H2 dt), exact: H2 = (N V0/L) x uniform projector.

    Realized as H^(ox Gamma) . (phase on |0...0>) . H^(ox Gamma) with
    phase angle -N V0 dt / L; the zero-controlled phase is an X-framed
    multi-controlled phase gate. Matrix elements reproduce
    1 + (e^{-i N V0 dt/L} - 1)/N on the diagonal and
    (e^{-i N V0 dt/L} - 1)/N off it.
    """
    gamma = _gamma_for(cfg)
    theta = -cfg.n * cfg.coupling * dt / cfg.box_size
    circ = Circuit(gamma)
    for q in range(gamma):
        circ.h(q)
    for q in range(gamma):
        circ.x(q)
    circ.cphase(theta, tuple(range(1, gamma)), 0)
    for q in range(gamma):
        circ.x(q)
    for q in range(gamma):
        circ.h(q)
    return circ


def trotter_evolution(cfg: LatticeConfig, basis: str, t: float, steps: int) -> Circuit:
    """First-order Trotter circuit for exp(-i H t).

    Per step the operator product is exp_Ha * exp_Hb * exp_Hv in the
    coordinate basis and exp_H1 * exp_H2 in the momentum basis (rightmost
    factor applied first, matching the first-order split).
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    gamma = _gamma_for(cfg)
    dt = t / steps
    if basis == "coordinate":
        parts = [circuit_exp_hv(cfg, dt), circuit_exp_hb(cfg, dt), circuit_exp_ha(cfg, dt)]
    elif basis == "momentum":
        parts = [circuit_exp_h2(cfg, dt), circuit_exp_h1(cfg, dt)]
    else:
        raise ValueError(f"unknown basis {basis!r}")
    circ = Circuit(gamma)
    for _ in range(steps):
        for p in parts:
            circ.extend(p)
    return circ


# ---------------------------------------------------------------------------
# Hadamard test
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HadamardEstimate:
    value: float
    stderr: float
    p0: float
    p1: float


def hadamard_test_circuit(u: Circuit, alpha: int, part: str) -> Circuit:
    """Full test circuit on width+1 qubits (ancilla last, no measurement).

    Prepares |alpha>, then H on the ancilla (S as well for the imaginary
    part), the controlled U, and the closing H. Re<alpha|U|alpha> is
    P(0) - P(1) on the ancilla; the imaginary part is P(1) - P(0).
    """
    if part not in ("re", "im"):
        raise ValueError(f"part must be 're' or 'im', got {part!r}")
    if not 0 <= alpha < (1 << u.width):
        raise ValueError(f"basis index {alpha} out of range")
    anc = u.width
    circ = Circuit(u.width + 1)
    for q in range(u.width):
        if (alpha >> q) & 1:
            circ.x(q)
    circ.h(anc)
    if part == "im":
        circ.s(anc)
    circ.extend(u.controlled())
    circ.h(anc)
    return circ


def _ancilla_p1(state: np.ndarray, width: int) -> float:
    dim = 1 << width
    probs = np.abs(state) ** 2
    return float(np.sum(probs[dim // 2:]))


def hadamard_test(
    u: Circuit,
    alpha: int,
    part: str,
    shots: int | None = None,
    rng: np.random.Generator | None = None,
) -> HadamardEstimate:
    """Estimate Re or Im of <alpha|U|alpha> from the ancilla statistics.

    shots=None returns the exact probabilities (stderr 0); otherwise the
    ancilla is sampled binomially and stderr = 2 sqrt(p(1-p)/shots).
    """
    circ = hadamard_test_circuit(u, alpha, part)
    state = circ.run()
    p1 = _ancilla_p1(state, circ.width)
    p1 = min(max(p1, 0.0), 1.0)
    if shots is None:
        p0 = 1.0 - p1
        value = (p0 - p1) if part == "re" else (p1 - p0)
        return HadamardEstimate(value, 0.0, p0, p1)
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    if rng is None:
        rng = np.random.default_rng()
    p1_hat = rng.binomial(shots, p1) / shots
    p0_hat = 1.0 - p1_hat
    value = (p0_hat - p1_hat) if part == "re" else (p1_hat - p0_hat)
    stderr = 2.0 * math.sqrt(max(p0_hat * p1_hat, 0.0) / shots)
    return HadamardEstimate(value, stderr, p0_hat, p1_hat)


@dataclass(frozen=True)
class TraceEstimate:
    value: complex
    stderr_re: float
    stderr_im: float


def trace_estimate(
    u: Circuit, shots: int | None = None, seed: int | None = None
) -> TraceEstimate:
    """Tr U = sum_alpha <alpha|U|alpha> via Hadamard tests over all alpha.

    In exact mode this equals the trace of the dense circuit unitary. In
    shot mode each (alpha, part) run draws from an independent seeded
    stream; stderrs combine in quadrature.
    """
    re_tot = im_tot = 0.0
    var_re = var_im = 0.0
    if shots is not None:
        streams = np.random.SeedSequence(seed).spawn(2 * (1 << u.width))
    for alpha in range(1 << u.width):
        for j, part in enumerate(("re", "im")):
            rng = (
                np.random.default_rng(streams[2 * alpha + j])
                if shots is not None
                else None
            )
            est = hadamard_test(u, alpha, part, shots, rng)
            if part == "re":
                re_tot += est.value
                var_re += est.stderr**2
            else:
                im_tot += est.value
                var_im += est.stderr**2
    return TraceEstimate(complex(re_tot, im_tot), math.sqrt(var_re), math.sqrt(var_im))


def icf_trace_estimate(
    cfg: LatticeConfig,
    basis: str,
    t: float,
    steps: int,
    shots: int | None = None,
    seed: int | None = None,
) -> TraceEstimate:
    """C(t) = Tr exp(-i H t) from the Trotterized circuit.

    The interacting/free difference Delta C(t) is obtained by a second
    call with the coupling set to zero in the config.
    """
    u = trotter_evolution(cfg, basis, t, steps)
    return trace_estimate(u, shots, seed)
