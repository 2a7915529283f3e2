"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines and timings. The heavy spectra (N = 2000) are diagonalized once and
shared across criteria 2-4.
"""

import time

import numpy as np
import pytest

from trapshift.analytic import (
    ScatteringParams,
    amplitudes,
    icf_infinite_limit,
    phase_shift_cot,
)
from trapshift.lattice import (
    LatticeConfig,
    build_coordinate_hamiltonian,
    build_momentum_hamiltonian,
)
from trapshift import circuits as qc
from trapshift import noise as nz
from trapshift.field import (
    FieldLatticeConfig,
    build_field_hamiltonian,
    build_phi_operator,
    convention_difference,
    phi_power_terms,
)
from trapshift.circuits import pauli_sum_matrix
from trapshift.spectral import (
    eigen_spectrum,
    icf_difference,
    scan_prescription,
)

from test_analytic import icf_quadrature_oracle
from test_circuits import coordinate_terms, expm_hermitian


def report(num: int, name: str, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {num} ({name}): {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    assert ok, line


BIG = dict(n=2000, box=100.0, mass=1.0, coupling=2.0)


@pytest.fixture(scope="module")
def il_scan_big():
    cfg = LatticeConfig(BIG["n"], BIG["box"], BIG["mass"], BIG["coupling"])
    energies = np.linspace(0.1, 2.0, 40)
    start = time.perf_counter()
    scan = scan_prescription(cfg, "il", energies, basis="momentum")
    return scan, time.perf_counter() - start


@pytest.fixture(scope="module")
def eps_scan_big():
    cfg = LatticeConfig(BIG["n"], BIG["box"], BIG["mass"], BIG["coupling"])
    energies = np.concatenate([np.linspace(0.1, 0.5, 9), np.linspace(0.8, 2.0, 13)])
    start = time.perf_counter()
    scan = scan_prescription(cfg, "e_plus_ieps", energies, eps=0.1, basis="momentum")
    return scan, time.perf_counter() - start


def test_criterion_1_euclidean_icf():
    start = time.perf_counter()
    worst = {}
    for v0 in (2.0, -0.5):
        cfg = LatticeConfig(400, 10.0, 1.0, v0)
        s_int = eigen_spectrum(build_coordinate_hamiltonian(cfg, True))
        s_free = eigen_spectrum(build_coordinate_hamiltonian(cfg, False))
        p = ScatteringParams(1.0, v0)
        errs = [
            abs(
                icf_difference(s_int, s_free, tau, "euclidean").real
                - icf_infinite_limit(tau, p, "euclidean").real
            )
            for tau in np.linspace(1.0, 4.0, 31)
        ]
        worst[v0] = max(errs)
    elapsed = time.perf_counter() - start
    ok = all(w <= 0.02 for w in worst.values()) and elapsed < 5.0
    report(
        1, "Euclidean ICF convergence", ok,
        f"max|dC - limit| = {worst[2.0]:.4f} (V0=2), {worst[-0.5]:.4f} (V0=-0.5), "
        f"bound 0.02, runtime {elapsed:.1f}s < 5s",
    )


def test_criterion_2_il_phase(il_scan_big):
    scan, build_time = il_scan_big
    start = time.perf_counter()
    p = ScatteringParams(BIG["mass"], BIG["coupling"])
    cot_phi = scan.cot_phi()
    cot_delta = np.array([phase_shift_cot(e, p) for e in scan.energies])
    rel = np.abs(cot_phi - cot_delta) / np.abs(cot_delta)
    elapsed = build_time + (time.perf_counter() - start)
    ok = bool(np.max(rel) <= 0.02) and elapsed < 600.0
    report(
        2, "iL phase extraction", ok,
        f"max rel err = {np.max(rel):.4%} over 40 points in [0.1, 2] "
        f"(bound 2%; worst at E = {scan.energies[int(np.argmax(rel))]:.3f}; "
        f"{int(np.sum(rel <= 0.02))}/40 points pass), runtime {elapsed:.0f}s < 600s",
    )


def test_criterion_3_eps_phase(eps_scan_big):
    scan, build_time = eps_scan_big
    p = ScatteringParams(BIG["mass"], BIG["coupling"])
    cot_phi = scan.cot_phi()
    cot_delta = np.array([phase_shift_cot(e, p) for e in scan.energies])
    rel = np.abs(cot_phi - cot_delta) / np.abs(cot_delta)
    low = scan.energies <= 0.5
    high = scan.energies >= 0.8
    low_ok = bool(np.max(rel[low]) <= 0.05)
    degradation_ok = bool(np.max(rel[high]) > 0.10)
    ok = low_ok and degradation_ok
    report(
        3, "E+i eps prescription", ok,
        f"max rel err on [0.1, 0.5] = {np.max(rel[low]):.4%} (bound 5%); "
        f"max rel err on [0.8, 2] = {np.max(rel[high]):.1%} "
        f"(documented degradation requires > 10%); runtime {build_time:.0f}s",
    )


def test_criterion_4_friedel_identity(eps_scan_big):
    scan, _ = eps_scan_big
    p = ScatteringParams(BIG["mass"], BIG["coupling"])
    low = scan.energies <= 0.5
    lhs = scan.energy_weighted()[low]
    zs = scan.complex_energies[low]
    rhs = np.array([-z * amplitudes(z, p).dlog_transmission for z in zs])
    rel_re = np.abs(lhs.real - rhs.real) / np.abs(rhs.real)
    rel_im = np.abs(lhs.imag - rhs.imag) / np.abs(rhs.imag)
    ok = bool(np.max(rel_re) <= 0.05 and np.max(rel_im) <= 0.05)
    report(
        4, "Friedel/Krein identity", ok,
        f"pointwise rel err on [0.1, 0.5]: re <= {np.max(rel_re):.3%}, "
        f"im <= {np.max(rel_im):.3%} (bound 5%)",
    )


def test_criterion_5_analytic_self_consistency():
    start = time.perf_counter()
    p = ScatteringParams(1.0, 2.0)
    unitarity = max(
        abs(abs(amplitudes(e, p).transmission) ** 2 + abs(amplitudes(e, p).scattering) ** 2 - 1)
        for e in np.geomspace(0.01, 10.0, 40)
    )
    quad_err = max(
        abs(icf_infinite_limit(t, ScatteringParams(1.0, v0), "real")
            - icf_quadrature_oracle(t, ScatteringParams(1.0, v0)))
        for t in (0.3, 1.0, 3.0)
        for v0 in (2.0, -0.5)
    )
    cfg = LatticeConfig(400, 10.0, 1.0, 2.0)
    s_int = eigen_spectrum(build_coordinate_hamiltonian(cfg, True))
    s_free = eigen_spectrum(build_coordinate_hamiltonian(cfg, False))
    h = 1e-3
    moment_err = 0.0
    for tau in (1.0, 2.0, 3.0):
        m1 = icf_difference(s_int, s_free, tau, "euclidean", 1).real
        d0 = (
            icf_difference(s_int, s_free, tau + h, "euclidean").real
            - icf_difference(s_int, s_free, tau - h, "euclidean").real
        ) / (2 * h)
        moment_err = max(moment_err, abs(m1 + d0) / abs(m1))
    elapsed = time.perf_counter() - start
    ok = unitarity <= 1e-12 and quad_err <= 1e-6 and moment_err <= 1e-4 and elapsed < 60.0
    report(
        5, "analytic self-consistency", ok,
        f"unitarity {unitarity:.1e} <= 1e-12; erfc-limit vs quadrature "
        f"{quad_err:.1e} <= 1e-6; moment-derivative {moment_err:.1e} <= 1e-4; "
        f"runtime {elapsed:.1f}s < 60s",
    )


def test_criterion_6_circuit_fidelity():
    worst = 0.0
    for gamma in (1, 2, 3):
        cfg = LatticeConfig(2**gamma, 4.0, 1.0, 2.0)
        dt = 0.04
        ha, hb, hv = coordinate_terms(cfg)
        h1 = build_momentum_hamiltonian(cfg, interacting=False).matrix
        h2 = np.full((cfg.n, cfg.n), cfg.coupling / cfg.box_size, dtype=complex)
        for circ, hmat in (
            (qc.circuit_exp_ha(cfg, dt), ha),
            (qc.circuit_exp_hb(cfg, dt), hb),
            (qc.circuit_exp_hv(cfg, dt), hv),
            (qc.circuit_exp_h1(cfg, dt), h1),
            (qc.circuit_exp_h2(cfg, dt), h2),
        ):
            worst = max(worst, np.max(np.abs(circ.unitary() - expm_hermitian(hmat, dt))))
    cfg = LatticeConfig(4, 4.0, 1.0, 2.0)
    ratios = {}
    for basis, builder in (
        ("coordinate", build_coordinate_hamiltonian),
        ("momentum", build_momentum_hamiltonian),
    ):
        exact = expm_hermitian(builder(cfg).matrix, 1.0)
        errs = [
            np.linalg.svd(
                qc.trotter_evolution(cfg, basis, 1.0, steps).unitary() - exact,
                compute_uv=False,
            )[0]
            for steps in (64, 128)
        ]
        ratios[basis] = errs[1] / errs[0]
    ok = worst <= 1e-12 and all(0.4 <= r <= 0.6 for r in ratios.values())
    report(
        6, "circuit fidelity", ok,
        f"max |circuit - exact exponential| = {worst:.2e} <= 1e-12 (Gamma <= 3); "
        f"Trotter halving ratios {ratios['coordinate']:.3f} (coordinate), "
        f"{ratios['momentum']:.3f} (momentum) within [0.4, 0.6]",
    )


def test_criterion_7_pauli_reconstruction():
    worst = 0.0
    for gamma in (1, 2, 3):
        cfg = LatticeConfig(2**gamma, 4.0, 1.0, 2.0)
        _, _, hv = coordinate_terms(cfg)
        worst = max(worst, np.max(np.abs(pauli_sum_matrix(qc.pauli_terms_hv(cfg)) - hv)))
        h1 = build_momentum_hamiltonian(cfg, interacting=False).matrix
        worst = max(worst, np.max(np.abs(pauli_sum_matrix(qc.pauli_terms_h1(cfg)) - h1)))
        # exp(-i H2 dt) closed-form matrix elements
        dt = 0.07
        theta = cfg.n * cfg.coupling * dt / cfg.box_size
        closed = np.full((cfg.n, cfg.n), (np.exp(-1j * theta) - 1) / cfg.n, dtype=complex)
        closed += np.eye(cfg.n)
        worst = max(worst, np.max(np.abs(qc.circuit_exp_h2(cfg, dt).unitary() - closed)))
        # field ladder operator and its powers
        terms, diag = build_phi_operator(gamma)
        worst = max(worst, np.max(np.abs(pauli_sum_matrix(terms) - np.diag(diag))))
        worst = max(
            worst,
            np.max(np.abs(pauli_sum_matrix(phi_power_terms(gamma, 2)) - np.diag(diag**2))),
        )
    # adjudicate the kinetic-expansion constant: (4^G + 2)/12 reconstructs,
    # the alternative printed value (4^G + 4)/12 does not
    cfg = LatticeConfig(4, 4.0, 1.0, 2.0)
    scale = (2 * np.pi / cfg.box_size) ** 2 / (2 * cfg.mass)
    h1 = build_momentum_hamiltonian(cfg, interacting=False).matrix
    terms = qc.pauli_terms_h1(cfg)
    shift = scale * ((4.0**2 + 4.0) / 12.0 - (4.0**2 + 2.0) / 12.0)
    alt = pauli_sum_matrix(terms) + shift * np.eye(4)
    alt_fails = np.max(np.abs(alt - h1)) > 1e-6
    ok = worst <= 1e-12 and alt_fails
    report(
        7, "Pauli reconstruction", ok,
        f"max reconstruction error {worst:.2e} <= 1e-12; kinetic constant "
        f"(4^Gamma + 2)/12 validated, (4^Gamma + 4)/12 rejected",
    )


def test_criterion_8_hadamard_statistics():
    start = time.perf_counter()
    cfg = LatticeConfig(2, 4.0, 1.0, 2.0)
    cfg0 = LatticeConfig(2, 4.0, 1.0, 0.0)
    # exact mode equals dense overlaps
    worst = 0.0
    for gamma_cfg in (cfg, LatticeConfig(4, 4.0, 1.0, 2.0)):
        u = qc.trotter_evolution(gamma_cfg, "coordinate", 0.8, 2)
        dense = u.unitary()
        for alpha in range(gamma_cfg.n):
            est = complex(
                qc.hadamard_test(u, alpha, "re").value,
                qc.hadamard_test(u, alpha, "im").value,
            )
            worst = max(worst, abs(est - dense[alpha, alpha]))
    # shot statistics
    s_int = eigen_spectrum(build_coordinate_hamiltonian(cfg, True))
    s_free = eigen_spectrum(build_coordinate_hamiltonian(cfg, False))
    times = [0.4, 0.8, 1.2, 1.6, 2.0]
    exact = {t: icf_difference(s_int, s_free, t, "real") for t in times}
    seeds = np.random.SeedSequence(2024).spawn(100)
    hits = 0
    for seq in seeds:
        good = True
        for t, sub in zip(times, seq.spawn(len(times))):
            sa, sb = sub.spawn(2)
            est = qc.icf_trace_estimate(cfg, "coordinate", t, 1, 1000, sa.entropy)
            est0 = qc.icf_trace_estimate(cfg0, "coordinate", t, 1, 1000, sb.entropy)
            val = est.value - est0.value
            se_re = np.hypot(est.stderr_re, est0.stderr_re)
            se_im = np.hypot(est.stderr_im, est0.stderr_im)
            if abs(val.real - exact[t].real) > 3 * se_re:
                good = False
            if abs(val.imag - exact[t].imag) > 3 * se_im:
                good = False
        hits += good
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-12 and hits >= 95 and elapsed < 60.0
    report(
        8, "Hadamard-test statistics", ok,
        f"exact-mode max error {worst:.2e} <= 1e-12; {hits}/100 seeded "
        f"repetitions within 3x stderr (need >= 95); runtime {elapsed:.1f}s < 60s",
    )


def test_criterion_9_noise_study():
    cfg = LatticeConfig(4, 4.0, 1.0, 2.0)

    def circuit_for_steps(k):
        u = qc.trotter_evolution(cfg, "coordinate", 0.04 * k, k)
        return qc.hadamard_test_circuit(u, 0, "re")

    steps = tuple(range(1, 26))
    exp = nz.NoiseExperiment(circuit_for_steps, steps, 0.04)
    # readout-only sweeps at <= 1%
    readout_grid = [nz.NoiseModel(readout_p=p) for p in (0.001, 0.005, 0.01)]
    summaries = nz.run_noise_sweep(exp, readout_grid, repetitions=2, shots=None)
    readout_shift = max(np.max(np.abs(s.mean - s.ideal)) for s in summaries)
    exact_linear = all(
        np.allclose(s.mean, (1 - 2 * g.readout_p) * s.ideal, atol=1e-12)
        for s, g in zip(summaries, readout_grid)
    )
    # two-qubit depolarizing at 1%: contraction bound per accumulated gate count
    contraction_ok = True
    worst_excess = -1.0
    for k_steps in steps:
        circ = circuit_for_steps(k_steps)
        k = circ.multiqubit_gate_count()
        rho = nz.noisy_simulate(circ, nz.NoiseModel(depol2=0.01))
        r = nz.measure_with_readout(rho, circ.width - 1, 0.0)
        excess = abs(r.p0 - r.p1) - (0.99**k + 0.05)
        worst_excess = max(worst_excess, excess)
        if excess > 0:
            contraction_ok = False
    # CPTP invariants across all channels
    rho = nz.noisy_simulate(
        circuit_for_steps(6),
        nz.NoiseModel(readout_p=0.01, depol1=0.001, depol2=0.01,
                      t1_us=100.0, t2_us=50.0, dur1_ns=50.0, dur2_ns=250.0),
    )
    cptp_ok = True
    try:
        nz.validate_density(rho, atol=1e-10)
    except ValueError:
        cptp_ok = False
    ok = readout_shift <= 0.03 and exact_linear and contraction_ok and cptp_ok
    report(
        9, "noise study", ok,
        f"readout <= 1% shifts curve by {readout_shift:.4f} <= 0.03 (exact "
        f"(1-2p) map: {exact_linear}); depol2 = 1% signal stays below "
        f"(0.99)^k + 0.05 (worst margin {-worst_excess:.3f}); CPTP at 1e-10: {cptp_ok}",
    )


def test_criterion_10_field_module():
    start = time.perf_counter()
    cfg = FieldLatticeConfig(
        n_sites=1, box_size=1.0, mass=1.0, quartic=0.0, n_phi=64, phi_max=12.0,
    )
    levels = np.linalg.eigvalsh(build_field_hamiltonian(cfg, "canonical").matrix)
    rels = [
        abs(levels[n] - cfg.spacing * cfg.mass * (n + 0.5)) / (cfg.spacing * cfg.mass * (n + 0.5))
        for n in range(3)
    ]
    diff = convention_difference(cfg)
    elapsed = time.perf_counter() - start
    ok = (
        max(rels) < 0.05
        and diff["max_abs_difference"] > 0
        and "relative_to_max_entry" in diff
        and elapsed < 30.0
    )
    report(
        10, "field module", ok,
        f"harmonic levels off by {[f'{r:.3%}' for r in rels]} (bound 5%); "
        f"convention diff report max_abs = {diff['max_abs_difference']:.3e}; "
        f"runtime {elapsed:.1f}s < 30s",
    )
