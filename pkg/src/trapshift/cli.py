"""Command-line front end: one subcommand per experiment family.

Every run writes a CSV table (deterministic body), a JSON manifest
capturing all resolved inputs, and a PNG figure unless --no-plot is
given. Parameters come from flags, falling back to an optional
`key = value` config file (--config) or a previous run's manifest
(--from-manifest); flags always win. The default output directory is
$TRAPSHIFT_OUTDIR, else the current directory.

Exit codes: 0 success, 2 configuration/validation failure (the message
names the offending key), 3 numerical failure (pole proximity, solver
breakdown, overflow).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, analytic, circuits, field, noise, plotting, spectral
from .lattice import (
    LatticeConfig,
    build_coordinate_hamiltonian,
)
from .spectral import PoleProximityError

MANIFEST_SCHEMA = 1

_UNITS_NOTE = "natural units: hbar = 1, dimensionless lengths"


class ConfigError(Exception):
    """Bad or missing configuration value; message names the key."""


# ---------------------------------------------------------------------------
# parameter plumbing
# ---------------------------------------------------------------------------


def _grid(text: str) -> np.ndarray:
    """Inclusive grid syntax start:stop:count."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:stop:count, got {text!r}")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ValueError(f"grid count must be >= 1, got {count}")
    return np.linspace(start, stop, count)


def _floats(text: str) -> list[float]:
    return [float(x) for x in str(text).split(",") if x]


def _pairs(text: str) -> list[tuple[float, float]]:
    """Comma-separated a:b pairs, e.g. thermal T1:T2 values."""
    out = []
    for chunk in str(text).split(","):
        if not chunk:
            continue
        a, b = chunk.split(":")
        out.append((float(a), float(b)))
    return out


# (name, converter, default, help); default None means required,
# _OPTIONAL means genuinely optional (stays None when absent).
_OPTIONAL = object()

_COMMON_LATTICE = [
    ("L", float, None, "box size L"),
    ("N", int, None, "grid-point / mode count N"),
    ("m", float, 1.0, "particle mass m"),
    ("V0", float, None, "contact coupling V0"),
]

_SPECS: dict[str, list[tuple]] = {
    "icf-euclidean": _COMMON_LATTICE + [
        ("tau", str, "0.5:4:50", "Euclidean time grid start:stop:count"),
    ],
    "icf-realtime": _COMMON_LATTICE + [
        ("t", str, "0.1:5:100", "real time grid start:stop:count"),
        ("window", float, _OPTIONAL, "sliding-average window width (optional)"),
    ],
    "resolvent-eps": _COMMON_LATTICE + [
        ("eps", float, 0.1, "imaginary energy shift"),
        ("emin", float, None, "lowest energy"),
        ("emax", float, None, "highest energy"),
        ("esteps", int, None, "number of grid energies"),
        ("basis", str, "momentum", "coordinate | momentum"),
    ],
    "phase-eps": _COMMON_LATTICE + [
        ("eps", float, 0.1, "imaginary energy shift"),
        ("emin", float, None, "lowest energy"),
        ("emax", float, None, "highest energy"),
        ("esteps", int, None, "number of grid energies"),
        ("basis", str, "momentum", "coordinate | momentum"),
    ],
    "phase-il": _COMMON_LATTICE + [
        ("emin", float, None, "lowest energy"),
        ("emax", float, None, "highest energy"),
        ("esteps", int, None, "number of grid energies"),
        ("basis", str, "momentum", "coordinate | momentum"),
    ],
    "qsim-single": [
        ("L", float, 4.0, "box size L"),
        ("m", float, 1.0, "particle mass m"),
        ("V0", float, 2.0, "contact coupling V0"),
        ("dt", float, 0.04, "Trotter step size"),
        ("steps", int, 50, "number of time steps"),
        ("shots", int, 1000, "measurement shots per Hadamard test (0 = exact)"),
        ("seed", int, 0, "random seed"),
    ],
    "qsim-two": [
        ("L", float, 4.0, "box size L"),
        ("m", float, 1.0, "particle mass m"),
        ("V0", float, 2.0, "contact coupling V0"),
        ("dt", float, 0.04, "Trotter step size"),
        ("steps", int, 50, "number of time steps"),
        ("alpha", int, 0, "diagonal element <alpha|U|alpha> to track"),
        ("shots", int, 1000, "measurement shots per Hadamard test (0 = exact)"),
        ("seed", int, 0, "random seed"),
    ],
    "noise-sweep": [
        ("L", float, 4.0, "box size L"),
        ("m", float, 1.0, "particle mass m"),
        ("V0", float, 2.0, "contact coupling V0"),
        ("dt", float, 0.04, "Trotter step size"),
        ("steps", int, 50, "number of time steps"),
        ("channel", str, "two", "readout | single | two | thermal | preset"),
        ("values", str, _OPTIONAL, "sweep values (floats; T1:T2 pairs for thermal; preset names)"),
        ("dur2", float, 100.0, "two-qubit gate length [ns] for thermal sweeps"),
        ("repetitions", int, 100, "repetitions per setting"),
        ("shots", int, 1000, "shots per repetition (0 = exact)"),
        ("seed", int, 0, "random seed"),
    ],
    "field-spectrum": [
        ("Nx", int, 1, "spatial sites"),
        ("L", float, 1.0, "spatial box size"),
        ("m", float, 1.0, "field mass"),
        ("lam", float, 0.0, "quartic coupling lambda"),
        ("Nphi", int, 64, "field-grid points (power of two for circuits)"),
        ("phimax", float, _OPTIONAL, "field range (default 12/sqrt(m))"),
        ("levels", int, 8, "levels to report"),
    ],
}

_DEFAULT_SWEEPS = {
    "readout": [0.001, 0.005, 0.01, 0.05],
    "single": [0.0001, 0.0005, 0.001],
    "two": [0.0025, 0.005, 0.01],
    "thermal": [(100.0, 50.0), (150.0, 100.0), (250.0, 150.0)],
    "preset": ["heron-median", "eagle-median"],
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trapshift",
        description="Scattering phase shifts from trapped-particle correlators",
    )
    parser.add_argument("--version", action="version", version=f"trapshift {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)
    for name, spec in _SPECS.items():
        sp = subs.add_parser(name)
        for pname, _, _, phelp in spec:
            sp.add_argument(f"--{pname}", default=None, type=str, help=phelp)
        sp.add_argument("--config", default=None, help="key = value config file")
        sp.add_argument("--from-manifest", default=None, dest="from_manifest",
                        help="seed parameters from a previous run's manifest")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--tag", default=None, help="output file stem (default: subcommand)")
        sp.add_argument("--no-plot", action="store_true", dest="no_plot")
    return parser


def _read_config(path: str) -> dict[str, str]:
    values = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line not 'key = value': {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key] = val
    return values


def resolve_params(subcommand: str, args: argparse.Namespace) -> dict:
    """defaults < manifest < config file < command-line flags."""
    spec = _SPECS[subcommand]
    layered: dict[str, str] = {}
    if args.from_manifest:
        manifest = json.loads(Path(args.from_manifest).read_text())
        if manifest.get("subcommand") != subcommand:
            raise ConfigError(
                f"manifest is for {manifest.get('subcommand')!r}, not {subcommand!r}"
            )
        layered.update(
            {k: str(v) for k, v in manifest["params"].items() if v is not None}
        )
    if args.config:
        layered.update(_read_config(args.config))
    for pname, _, _, _ in spec:
        flag_val = getattr(args, pname)
        if flag_val is not None:
            layered[pname] = flag_val
    resolved = {}
    for pname, conv, default, _ in spec:
        if pname in layered:
            try:
                resolved[pname] = conv(layered[pname])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {pname!r}: {exc}") from exc
        elif default is None:
            raise ConfigError(f"missing required parameter {pname!r}")
        elif default is _OPTIONAL:
            resolved[pname] = None
        else:
            resolved[pname] = default
    return resolved


# ---------------------------------------------------------------------------
# output writers
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: Path, subcommand: str, params: dict, header: list[str], rows) -> None:
    lines = [
        f"# trapshift {__version__} :: {subcommand}",
        f"# units: {_UNITS_NOTE}",
    ]
    for k in sorted(params):
        lines.append(f"# {k} = {_fmt(params[k])}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def write_manifest(path: Path, subcommand: str, params: dict, seed, runtime: float,
                   outputs: dict, extra: dict | None = None) -> None:
    doc = {
        "schema_version": MANIFEST_SCHEMA,
        "tool": "trapshift",
        "version": __version__,
        "subcommand": subcommand,
        "params": {k: (v if not isinstance(v, (np.integer, np.floating)) else v.item())
                   for k, v in params.items()},
        "seed": seed,
        "runtime_seconds": runtime,
        "outputs": outputs,
    }
    if extra:
        doc["results"] = extra
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# experiment runners: each returns (header, rows, plot_fn, seed, extra)
# ---------------------------------------------------------------------------


def _spectra_pair(cfg: LatticeConfig):
    s_int = spectral.eigen_spectrum(build_coordinate_hamiltonian(cfg, True))
    s_free = spectral.eigen_spectrum(build_coordinate_hamiltonian(cfg, False))
    return s_int, s_free


def run_icf_euclidean(p: dict):
    cfg = LatticeConfig(p["N"], p["L"], p["m"], p["V0"])
    sp = analytic.ScatteringParams(p["m"], p["V0"])
    s_int, s_free = _spectra_pair(cfg)
    taus = _grid(p["tau"])
    series = spectral.difference_series(s_int, s_free, taus, "euclidean")
    rows = []
    for tau, val in zip(series.grid, series.values):
        lim = analytic.icf_infinite_limit(tau, sp, "euclidean").real
        rows.append((tau, val.real, lim, abs(val.real - lim)))
    header = ["tau[nat]", "delta_C[nat]", "infinite_volume_limit[nat]", "abs_err[nat]"]

    def plot(png):
        arr = np.array(rows)
        plotting.plot_curves(
            png, arr[:, 0],
            {"trap (spectral sum)": arr[:, 1], "infinite volume": arr[:, 2]},
            "tau [nat]", "Delta C(tau)", f"Euclidean ICF, L={p['L']}, N={p['N']}, V0={p['V0']}",
        )

    return header, rows, plot, None, None


def run_icf_realtime(p: dict):
    cfg = LatticeConfig(p["N"], p["L"], p["m"], p["V0"])
    sp = analytic.ScatteringParams(p["m"], p["V0"])
    s_int, s_free = _spectra_pair(cfg)
    ts = _grid(p["t"])
    vals = spectral.difference_series(s_int, s_free, ts, "real").values
    lims = [analytic.icf_infinite_limit(t, sp, "real") for t in ts]
    header = ["t[nat]", "delta_C_re[nat]", "delta_C_im[nat]",
              "limit_re[nat]", "limit_im[nat]"]
    rows = [
        (t, v.real, v.imag, li.real, li.imag)
        for t, v, li in zip(ts, vals, lims)
    ]
    if p["window"] is not None:
        avg = spectral.sliding_window_average(s_int, s_free, ts, p["window"])
        header += ["windowed_re[nat]", "windowed_im[nat]"]
        rows = [r + (a.real, a.imag) for r, a in zip(rows, avg)]

    def plot(png):
        plotting.plot_complex_pair(
            png, ts, np.array(vals), np.array(lims), "t [nat]",
            "trap (spectral sum)", "infinite volume",
            f"Real-time ICF, L={p['L']}, N={p['N']}, V0={p['V0']}",
        )

    return header, rows, plot, None, None


def _phase_scan(p: dict, prescription: str):
    cfg = LatticeConfig(p["N"], p["L"], p["m"], p["V0"])
    energies = np.linspace(p["emin"], p["emax"], p["esteps"])
    eps = p.get("eps") if prescription == "e_plus_ieps" else None
    return spectral.scan_prescription(cfg, prescription, energies, eps=eps,
                                      basis=p["basis"])


def run_resolvent_eps(p: dict):
    scan = _phase_scan(p, "e_plus_ieps")
    sp = analytic.ScatteringParams(p["m"], p["V0"])
    zdc = scan.energy_weighted()
    friedel = np.array(
        [-z * analytic.amplitudes(z, sp).dlog_transmission for z in scan.complex_energies]
    )
    header = ["E[nat]", "E_delta_C_re[nat]", "E_delta_C_im[nat]",
              "friedel_re[nat]", "friedel_im[nat]", "rel_err_re[1]", "rel_err_im[1]"]
    rows = [
        (e, l.real, l.imag, r.real, r.imag,
         abs(l.real - r.real) / abs(r.real), abs(l.imag - r.imag) / abs(r.imag))
        for e, l, r in zip(scan.energies, zdc, friedel)
    ]

    def plot(png):
        plotting.plot_complex_pair(
            png, scan.energies, zdc, friedel, "E [nat]",
            "(E+i eps) Delta C~ (trap)", "-(E+i eps) dlnT/dE",
            f"Friedel identity, L={p['L']}, N={p['N']}, eps={p['eps']}",
        )

    return header, rows, plot, None, None


def _run_phase(p: dict, prescription: str, title: str):
    scan = _phase_scan(p, prescription)
    sp = analytic.ScatteringParams(p["m"], p["V0"])
    cot_phi = scan.cot_phi()
    cot_delta = np.array([analytic.phase_shift_cot(e, sp) for e in scan.energies])
    rel = np.abs(cot_phi - cot_delta) / np.abs(cot_delta)
    header = ["E[nat]", "cot_phi[1]", "cot_delta[1]", "rel_err[1]"]
    rows = list(zip(scan.energies, cot_phi, cot_delta, rel))

    def plot(png):
        plotting.plot_phase(png, scan.energies, cot_phi, cot_delta, title)

    return header, rows, plot, None, {"max_rel_err": float(np.max(rel))}


def run_phase_eps(p: dict):
    return _run_phase(
        p, "e_plus_ieps",
        f"E+i eps phase extraction, L={p['L']}, N={p['N']}, eps={p['eps']}",
    )


def run_phase_il(p: dict):
    return _run_phase(
        p, "il", f"L->iL phase extraction, L={p['L']}, N={p['N']}",
    )


def _gate_listing(cfg: LatticeConfig, dt: float, alpha: int) -> str:
    """One-step evolution circuit and its test wrapper, as plain text."""
    step = circuits.trotter_evolution(cfg, "coordinate", dt, 1)
    wrapped = circuits.hadamard_test_circuit(step, alpha, "re")
    return (
        "# one Trotter step of exp(-i H dt)\n" + step.to_text()
        + "# interference wrapper (ancilla last)\n" + wrapped.to_text()
    )


def run_qsim_single(p: dict):
    shots = p["shots"] or None
    cfg = LatticeConfig(2, p["L"], p["m"], p["V0"])
    cfg0 = LatticeConfig(2, p["L"], p["m"], 0.0)
    s_int, s_free = _spectra_pair(cfg)
    seeds = np.random.SeedSequence(p["seed"]).spawn(p["steps"])
    rows = []
    ts, ex_re, ex_im, est_re, est_im, err_re, err_im = [], [], [], [], [], [], []
    for k, seq in zip(range(1, p["steps"] + 1), seeds):
        t = k * p["dt"]
        exact = spectral.icf_difference(s_int, s_free, t, "real")
        c_seed, c0_seed = seq.spawn(2)
        est = circuits.icf_trace_estimate(cfg, "coordinate", t, k, shots,
                                          c_seed.entropy)
        est0 = circuits.icf_trace_estimate(cfg0, "coordinate", t, k, shots,
                                           c0_seed.entropy)
        val = est.value - est0.value
        se_re = float(np.hypot(est.stderr_re, est0.stderr_re))
        se_im = float(np.hypot(est.stderr_im, est0.stderr_im))
        rows.append((t, exact.real, exact.imag, val.real, val.imag, se_re, se_im))
        ts.append(t); ex_re.append(exact.real); ex_im.append(exact.imag)
        est_re.append(val.real); est_im.append(val.imag)
        err_re.append(se_re); err_im.append(se_im)
    header = ["t[nat]", "exact_re[nat]", "exact_im[nat]", "estimate_re[nat]",
              "estimate_im[nat]", "stderr_re[nat]", "stderr_im[nat]"]

    def plot(png):
        plotting.plot_estimates(
            png, ts, ex_re, ex_im, est_re, est_im, err_re, err_im,
            f"Single-qubit Delta C(t), shots={p['shots']}",
        )

    extra = {"files": {"gates.txt": _gate_listing(cfg, p["dt"], 0)}}
    return header, rows, plot, p["seed"], extra


def run_qsim_two(p: dict):
    shots = p["shots"] or None
    cfg = LatticeConfig(4, p["L"], p["m"], p["V0"])
    h = build_coordinate_hamiltonian(cfg)
    w, v = np.linalg.eigh(h.matrix)
    alpha = p["alpha"]
    if not 0 <= alpha < 4:
        raise ConfigError(f"alpha must be in [0, 4), got {alpha}")
    seeds = np.random.SeedSequence(p["seed"]).spawn(p["steps"])
    rows = []
    ts, ex_re, ex_im, est_re, est_im, err_re, err_im = [], [], [], [], [], [], []
    for k, seq in zip(range(1, p["steps"] + 1), seeds):
        t = k * p["dt"]
        amps = v[alpha, :] * np.exp(-1j * w * t)
        exact = complex(np.sum(amps * v[alpha, :].conj()))
        u = circuits.trotter_evolution(cfg, "coordinate", t, k)
        tr_re = circuits.hadamard_test(u, alpha, "re")
        tr_im = circuits.hadamard_test(u, alpha, "im")
        re_seq, im_seq = seq.spawn(2)
        sh_re = circuits.hadamard_test(u, alpha, "re", shots,
                                       np.random.default_rng(re_seq))
        sh_im = circuits.hadamard_test(u, alpha, "im", shots,
                                       np.random.default_rng(im_seq))
        rows.append((t, exact.real, exact.imag, tr_re.value, tr_im.value,
                     sh_re.value, sh_im.value, sh_re.stderr, sh_im.stderr))
        ts.append(t); ex_re.append(exact.real); ex_im.append(exact.imag)
        est_re.append(sh_re.value); est_im.append(sh_im.value)
        err_re.append(sh_re.stderr); err_im.append(sh_im.stderr)
    header = ["t[nat]", "exact_re[nat]", "exact_im[nat]", "trotter_re[nat]",
              "trotter_im[nat]", "estimate_re[nat]", "estimate_im[nat]",
              "stderr_re[nat]", "stderr_im[nat]"]

    def plot(png):
        plotting.plot_estimates(
            png, ts, ex_re, ex_im, est_re, est_im, err_re, err_im,
            f"Two-qubit <{p['alpha']}|U(t)|{p['alpha']}>, shots={p['shots']}",
        )

    extra = {"files": {"gates.txt": _gate_listing(cfg, p["dt"], alpha)}}
    return header, rows, plot, p["seed"], extra


def _noise_grid(channel: str, values, dur2: float) -> tuple[list[str], list[noise.NoiseModel]]:
    if channel == "readout":
        vals = _floats(values) if values else _DEFAULT_SWEEPS["readout"]
        return ([f"readout={v:g}" for v in vals],
                [noise.NoiseModel(readout_p=v) for v in vals])
    if channel == "single":
        vals = _floats(values) if values else _DEFAULT_SWEEPS["single"]
        return ([f"depol1={v:g}" for v in vals],
                [noise.NoiseModel(depol1=v) for v in vals])
    if channel == "two":
        vals = _floats(values) if values else _DEFAULT_SWEEPS["two"]
        return ([f"depol2={v:g}" for v in vals],
                [noise.NoiseModel(depol2=v) for v in vals])
    if channel == "thermal":
        pairs = _pairs(values) if values else _DEFAULT_SWEEPS["thermal"]
        return (
            [f"T1={a:g}us;T2={b:g}us;dur2={dur2:g}ns" for a, b in pairs],
            [noise.NoiseModel(t1_us=a, t2_us=b, dur1_ns=50.0, dur2_ns=dur2)
             for a, b in pairs],
        )
    if channel == "preset":
        names = str(values).split(",") if values else _DEFAULT_SWEEPS["preset"]
        try:
            return names, [noise.NOISE_PRESETS[n] for n in names]
        except KeyError as exc:
            raise ConfigError(f"unknown noise preset {exc.args[0]!r}") from exc
    raise ConfigError(f"unknown channel {channel!r}")


def run_noise_sweep(p: dict):
    labels, grid = _noise_grid(p["channel"], p["values"], p["dur2"])
    cfg = LatticeConfig(4, p["L"], p["m"], p["V0"])

    def circuit_for_steps(k: int) -> circuits.Circuit:
        u = circuits.trotter_evolution(cfg, "coordinate", k * p["dt"], k)
        return circuits.hadamard_test_circuit(u, 0, "re")

    exp = noise.NoiseExperiment(
        circuit_for_steps=circuit_for_steps,
        steps=tuple(range(1, p["steps"] + 1)),
        dt=p["dt"],
    )
    shots = p["shots"] or None
    summaries = noise.run_noise_sweep(exp, grid, p["repetitions"], shots, p["seed"])
    header = ["setting", "step[1]", "t[nat]", "ideal[nat]", "mean[nat]",
              "std[nat]", "pi_lo[nat]", "pi_hi[nat]"]
    rows = []
    for label, s in zip(labels, summaries):
        for i in range(len(s.steps)):
            rows.append((label, int(s.steps[i]), s.times[i], s.ideal[i],
                         s.mean[i], s.std[i], s.lo[i], s.hi[i]))

    def plot(png):
        plotting.plot_noise_bands(
            png, dict(zip(labels, summaries)), "ideal",
            f"Noise sweep ({p['channel']}), reps={p['repetitions']}, shots={p['shots']}",
        )

    return header, rows, plot, p["seed"], None


def run_field_spectrum(p: dict):
    phimax = p["phimax"] if p["phimax"] is not None else 12.0 / np.sqrt(p["m"])
    cfg = field.FieldLatticeConfig(
        n_sites=p["Nx"], box_size=p["L"], mass=p["m"], quartic=p["lam"],
        n_phi=p["Nphi"], phi_max=phimax,
    )
    e_can = np.linalg.eigvalsh(field.build_field_hamiltonian(cfg, "canonical").matrix)
    e_pr = np.linalg.eigvalsh(field.build_field_hamiltonian(cfg, "as_printed").matrix)
    diff = field.convention_difference(cfg)
    nlev = min(p["levels"], cfg.dim)
    header = ["n[1]", "energy_canonical[nat]", "energy_as_printed[nat]"]
    rows = [(n, e_can[n], e_pr[n]) for n in range(nlev)]

    def plot(png):
        plotting.plot_levels(
            png, list(range(nlev)),
            {"canonical": e_can[:nlev], "as printed": e_pr[:nlev]},
            f"Field spectrum, Nx={p['Nx']}, Nphi={p['Nphi']}, lambda={p['lam']}",
        )

    return header, rows, plot, None, {"convention_difference": diff,
                                      "phi_max": float(phimax)}


_RUNNERS = {
    "icf-euclidean": run_icf_euclidean,
    "icf-realtime": run_icf_realtime,
    "resolvent-eps": run_resolvent_eps,
    "phase-eps": run_phase_eps,
    "phase-il": run_phase_il,
    "qsim-single": run_qsim_single,
    "qsim-two": run_qsim_two,
    "noise-sweep": run_noise_sweep,
    "field-spectrum": run_field_spectrum,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    sub = args.subcommand
    try:
        params = resolve_params(sub, args)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"trapshift: configuration error: {exc}", file=sys.stderr)
        return 2

    out_dir = Path(args.out or os.environ.get("TRAPSHIFT_OUTDIR") or ".")
    tag = args.tag or sub
    started = time.perf_counter()
    try:
        header, rows, plot_fn, seed, extra = _RUNNERS[sub](params)
    except (PoleProximityError, OverflowError, np.linalg.LinAlgError) as exc:
        print(f"trapshift: numerical failure: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"trapshift: configuration error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"trapshift: invalid configuration: {exc}", file=sys.stderr)
        return 2
    runtime = time.perf_counter() - started

    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{tag}.csv"
    png_path = out_dir / f"{tag}.png"
    manifest_path = out_dir / f"{tag}.json"
    write_csv(csv_path, sub, params, header, rows)
    outputs = {"csv": str(csv_path)}
    if extra and "files" in extra:
        # side artifacts (e.g. plain-text gate listings)
        for suffix, content in extra.pop("files").items():
            side = out_dir / f"{tag}.{suffix}"
            side.write_text(content)
            outputs[suffix] = str(side)
    if not args.no_plot:
        plot_fn(str(png_path))
        outputs["png"] = str(png_path)
    write_manifest(manifest_path, sub, params, seed, runtime, outputs, extra or None)
    print(f"trapshift {sub}: wrote {', '.join(outputs.values())}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
