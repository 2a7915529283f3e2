"""Density-matrix simulation of the noise study: readout error,
depolarizing gate errors, and thermal relaxation.

Channels are applied after each gate on that gate's qubits only (idle
qubits accrue no error): single-qubit gates get the single-qubit
depolarizing probability and the short gate duration, gates touching
two or more qubits (controls included) get the two-qubit depolarizing
probability applied jointly across their qubits and the long duration
on each. Readout error acts only at the final measurement through a
symmetric confusion map. Setting a channel's parameters to zero turns
it off exactly, which is how the per-channel sweeps are produced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits import Circuit, Gate, _apply_gate

__all__ = [
    "NoiseModel",
    "NOISE_PRESETS",
    "validate_density",
    "apply_gate_to_density",
    "depolarizing_channel",
    "thermal_channel",
    "apply_channel",
    "noisy_simulate",
    "ReadoutResult",
    "measure_with_readout",
    "NoiseExperiment",
    "ExperimentSummary",
    "run_noise_sweep",
]


@dataclass(frozen=True)
class NoiseModel:
    """Channel parameters. Times in microseconds, durations in nanoseconds."""

    readout_p: float = 0.0
    depol1: float = 0.0
    depol2: float = 0.0
    t1_us: float = math.inf
    t2_us: float = math.inf
    dur1_ns: float = 0.0
    dur2_ns: float = 0.0

    def __post_init__(self):
        for name in ("readout_p", "depol1", "depol2"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")
        if self.t1_us <= 0 or self.t2_us <= 0:
            raise ValueError("relaxation times must be positive")
        if self.t2_us > 2.0 * self.t1_us:
            raise ValueError(f"T2 ={self.t2_us} exceeds 2*T1 = {2 * self.t1_us}")
        if self.dur1_ns < 0 or self.dur2_ns < 0:
            raise ValueError("gate durations must be non-negative")

    @property
    def thermal_active(self) -> bool:
        return math.isfinite(self.t1_us) or math.isfinite(self.t2_us)


# Median rates typical of two recent superconducting device generations.
NOISE_PRESETS = {
    "heron-median": NoiseModel(
        readout_p=0.01, depol1=0.0002, depol2=0.002,
        t1_us=250.0, t2_us=150.0, dur1_ns=50.0, dur2_ns=100.0,
    ),
    "eagle-median": NoiseModel(
        readout_p=0.02, depol1=0.0002, depol2=0.008,
        t1_us=250.0, t2_us=150.0, dur1_ns=50.0, dur2_ns=500.0,
    ),
}


def validate_density(rho: np.ndarray, atol: float = 1e-10) -> None:
    """Assert Hermiticity, unit trace and positivity (CPTP book-keeping)."""
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > atol or abs(np.trace(rho).imag) > atol:
        raise ValueError(f"trace {np.trace(rho)} != 1")
    if np.min(np.linalg.eigvalsh((rho + rho.conj().T) / 2)) < -atol:
        raise ValueError("density matrix has a negative eigenvalue")


def zero_density(width: int) -> np.ndarray:
    rho = np.zeros((1 << width, 1 << width), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def apply_gate_to_density(rho: np.ndarray, gate: Gate, width: int) -> np.ndarray:
    """rho -> U rho U^dag using the statevector engine column-wise."""
    idx = np.arange(1 << width)
    out = _apply_gate(rho.astype(complex, copy=True), gate, idx)       # U rho
    out = _apply_gate(np.ascontiguousarray(out.conj().T), gate, idx)   # U (U rho)^dag
    return out.conj().T


def _kraus_on_targets(rho: np.ndarray, kraus: list[np.ndarray], targets, width: int) -> np.ndarray:
    """Apply sum_k K rho K^dag with K acting on the given qubits."""
    dim = 1 << width
    targets = tuple(targets)
    k = len(targets)
    # amplitude index factorization: rows of K act on the target bits
    t_axes = [width - 1 - q for q in targets]          # tensor axes, qubit 0 last
    tensor = rho.reshape([2] * (2 * width))
    out = np.zeros_like(tensor)
    bra_axes = [a + width for a in t_axes]
    for kop in kraus:
        km = kop.reshape([2] * (2 * k))
        # contract ket side: km indices (out_1..out_k, in_1..in_k)
        tmp = np.tensordot(km, tensor, axes=(list(range(k, 2 * k)), t_axes))
        tmp = np.moveaxis(tmp, list(range(k)), t_axes)
        # contract bra side with conjugate
        tmp = np.tensordot(km.conj(), tmp, axes=(list(range(k, 2 * k)), bra_axes))
        tmp = np.moveaxis(tmp, list(range(k)), bra_axes)
        out += tmp
    return out.reshape(dim, dim)


def depolarizing_channel(rho: np.ndarray, p: float, targets, width: int) -> np.ndarray:
    """rho -> (1-p) rho + p * Tr_targets[rho] (x) I/2^k on the targets."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing probability {p} outside [0, 1]")
    if p == 0.0:
        return rho
    targets = tuple(targets)
    k = len(targets)
    t_axes = [width - 1 - q for q in targets]
    bra_axes = [a + width for a in t_axes]
    rest = [a for a in range(2 * width) if a not in t_axes and a not in bra_axes]
    tensor = rho.reshape([2] * (2 * width))
    # partial trace over the target block, then tensor I/2^k back in place
    block = np.transpose(tensor, t_axes + bra_axes + rest).reshape(1 << k, 1 << k, -1)
    traced = np.einsum("iij->j", block).reshape([2] * len(rest))
    eye = np.eye(1 << k, dtype=complex).reshape([2] * (2 * k)) / (1 << k)
    mixed = np.transpose(
        np.tensordot(eye, traced, axes=0),
        axes=_inverse_permutation(t_axes, bra_axes, rest),
    )
    dim = 1 << width
    return (1.0 - p) * rho + p * mixed.reshape(dim, dim)


def _inverse_permutation(t_axes, bra_axes, rest):
    """Permutation sending (t_kets, t_bras, rest...) back to natural order."""
    src = list(t_axes) + list(bra_axes) + list(rest)
    inv = [0] * len(src)
    for new_pos, axis in enumerate(src):
        inv[axis] = new_pos
    return inv


def thermal_channel(
    rho: np.ndarray, t1_us: float, t2_us: float, duration_ns: float, qubit: int, width: int
) -> np.ndarray:
    """Amplitude damping (T1) composed with pure dephasing topped up so the
    off-diagonals scale by exactly e^{-d/T2}; requires T2 <= 2 T1."""
    if t2_us > 2.0 * t1_us:
        raise ValueError(f"T2 = {t2_us} exceeds 2*T1 = {2 * t1_us}")
    if duration_ns == 0.0:
        return rho
    d_us = duration_ns * 1e-3
    gamma = 1.0 - math.exp(-d_us / t1_us)
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    rho = _kraus_on_targets(rho, [k0, k1], (qubit,), width)
    # residual dephasing: amplitude damping already gives e^{-d/2T1}
    scale = math.exp(-d_us / t2_us + d_us / (2.0 * t1_us))
    pz = (1.0 - scale) / 2.0
    if pz > 0.0:
        kz0 = math.sqrt(1.0 - pz) * np.eye(2, dtype=complex)
        kz1 = math.sqrt(pz) * np.diag([1.0, -1.0]).astype(complex)
        rho = _kraus_on_targets(rho, [kz0, kz1], (qubit,), width)
    return rho


def apply_channel(rho: np.ndarray, channel: str, width: int, **params) -> np.ndarray:
    """Dispatch by name: 'depolarizing'(p, targets) or 'thermal'(t1_us,
    t2_us, duration_ns, qubit)."""
    if channel == "depolarizing":
        return depolarizing_channel(rho, params["p"], params["targets"], width)
    if channel == "thermal":
        return thermal_channel(
            rho, params["t1_us"], params["t2_us"], params["duration_ns"],
            params["qubit"], width,
        )
    raise ValueError(f"unknown channel {channel!r}")


def noisy_simulate(circuit: Circuit, noise: NoiseModel) -> np.ndarray:
    """Run the circuit from |0...0><0...0| with per-gate noise channels."""
    if circuit.width > 4:
        raise ValueError(
            f"density-matrix path capped at width 4, got {circuit.width}"
        )
    rho = zero_density(circuit.width)
    for gate in circuit.gates:
        rho = apply_gate_to_density(rho, gate, circuit.width)
        qubits = gate.qubits
        if not qubits:
            continue  # global phase: no physical qubit touched
        if len(qubits) == 1:
            if noise.depol1 > 0:
                rho = depolarizing_channel(rho, noise.depol1, qubits, circuit.width)
            if noise.thermal_active and noise.dur1_ns > 0:
                rho = thermal_channel(
                    rho, noise.t1_us, noise.t2_us, noise.dur1_ns, qubits[0], circuit.width
                )
        else:
            if noise.depol2 > 0:
                rho = depolarizing_channel(rho, noise.depol2, qubits, circuit.width)
            if noise.thermal_active and noise.dur2_ns > 0:
                for q in qubits:
                    rho = thermal_channel(
                        rho, noise.t1_us, noise.t2_us, noise.dur2_ns, q, circuit.width
                    )
    return rho


@dataclass(frozen=True)
class ReadoutResult:
    p0: float
    p1: float


def measure_with_readout(
    rho: np.ndarray,
    qubit: int,
    readout_p: float,
    shots: int | None = None,
    rng: np.random.Generator | None = None,
) -> ReadoutResult:
    """Marginal probabilities of one qubit through the symmetric confusion
    map p0' = (1-p) p0 + p p1, optionally binomially sampled."""
    if not 0.0 <= readout_p < 0.5:
        raise ValueError(f"readout_p must be in [0, 0.5), got {readout_p}")
    probs = np.real(np.diag(rho))
    idx = np.arange(rho.shape[0])
    p1 = float(np.sum(probs[(idx >> qubit) & 1 == 1]))
    p1 = min(max(p1, 0.0), 1.0)
    p0 = 1.0 - p1
    p0c = (1.0 - readout_p) * p0 + readout_p * p1
    p1c = 1.0 - p0c
    if shots is None:
        return ReadoutResult(p0c, p1c)
    if rng is None:
        rng = np.random.default_rng()
    ones = rng.binomial(shots, p1c)
    return ReadoutResult((shots - ones) / shots, ones / shots)


@dataclass(frozen=True)
class NoiseExperiment:
    """A Hadamard-test signal traced over Trotter step count.

    Produces the wrapped (width+1) circuit for k steps of size dt and
    reads the ancilla; value convention matches the ideal Hadamard test
    (re: P0 - P1, im: P1 - P0).
    """

    circuit_for_steps: "callable"
    steps: tuple[int, ...]
    dt: float
    part: str = "re"

    def times(self) -> np.ndarray:
        return self.dt * np.asarray(self.steps, dtype=float)


@dataclass(frozen=True)
class ExperimentSummary:
    """Per-time-step statistics over seeded repetitions."""

    steps: np.ndarray
    times: np.ndarray
    ideal: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    lo: np.ndarray                # mean - 1.96 std
    hi: np.ndarray                # mean + 1.96 std
    repetitions: int
    shots: int | None

    def __post_init__(self):
        if self.repetitions < 2:
            raise ValueError("need at least 2 repetitions")


def run_noise_sweep(
    experiment: NoiseExperiment,
    noise_grid: list[NoiseModel],
    repetitions: int,
    shots: int | None,
    seed: int = 0,
) -> list[ExperimentSummary]:
    """Repeat the experiment per noise setting; 95% prediction intervals.

    Deterministic under a fixed seed: every (noise setting, step,
    repetition) draws from its own spawned stream.
    """
    if repetitions < 2:
        raise ValueError("need at least 2 repetitions")
    summaries = []
    root = np.random.SeedSequence(seed)
    grids = root.spawn(len(noise_grid))
    for noise, gseq in zip(noise_grid, grids):
        step_seqs = gseq.spawn(len(experiment.steps))
        ideal, mean, std, lo, hi = [], [], [], [], []
        for k, sseq in zip(experiment.steps, step_seqs):
            circ = experiment.circuit_for_steps(k)
            anc = circ.width - 1
            rho = noisy_simulate(circ, noise)
            sign = 1.0 if experiment.part == "re" else -1.0
            exact = measure_with_readout(rho, anc, noise.readout_p, shots=None)
            ideal_rho = noisy_simulate(circ, NoiseModel())
            ideal_exact = measure_with_readout(ideal_rho, anc, 0.0, shots=None)
            ideal.append(sign * (ideal_exact.p0 - ideal_exact.p1))
            if shots is None:
                vals = np.full(repetitions, sign * (exact.p0 - exact.p1))
            else:
                rngs = [np.random.default_rng(s) for s in sseq.spawn(repetitions)]
                vals = np.array(
                    [
                        sign * (r.p0 - r.p1)
                        for r in (
                            measure_with_readout(rho, anc, noise.readout_p, shots, g)
                            for g in rngs
                        )
                    ]
                )
            mu = float(np.mean(vals))
            sd = float(np.std(vals, ddof=1))
            mean.append(mu)
            std.append(sd)
            lo.append(mu - 1.96 * sd)
            hi.append(mu + 1.96 * sd)
        summaries.append(
            ExperimentSummary(
                np.asarray(experiment.steps),
                experiment.times(),
                np.asarray(ideal),
                np.asarray(mean),
                np.asarray(std),
                np.asarray(lo),
                np.asarray(hi),
                repetitions,
                shots,
            )
        )
    return summaries
