import numpy as np
import pytest

from trapshift.analytic import ScatteringParams, free_resolvent, icf_infinite_limit
from trapshift.lattice import (
    LatticeConfig,
    build_coordinate_hamiltonian,
    build_il_rotated_hamiltonian,
    build_momentum_hamiltonian,
)
from trapshift.spectral import (
    CorrelatorSeries,
    PoleProximityError,
    Spectrum,
    difference_series,
    eigen_spectrum,
    icf,
    icf_difference,
    phase_cot_from_resolvent,
    resolvent_trace,
    scan_prescription,
    sliding_window_average,
)


@pytest.fixture(scope="module")
def small_pair():
    cfg = LatticeConfig(64, 8.0, 1.0, 2.0)
    s_int = eigen_spectrum(build_coordinate_hamiltonian(cfg, True))
    s_free = eigen_spectrum(build_coordinate_hamiltonian(cfg, False))
    return cfg, s_int, s_free


class TestEigenSpectrum:
    def test_diagonal_momentum(self):
        cfg = LatticeConfig(8, 5.0, 1.0, 3.0)
        h = build_momentum_hamiltonian(cfg, interacting=False)
        spec = eigen_spectrum(h)
        assert np.allclose(np.sort(spec.eigenvalues.real), np.sort(np.diag(h.matrix).real))
        assert spec.dim == 8

    def test_two_site_closed_form(self):
        cfg = LatticeConfig(2, 4.0, 1.0, 2.0)
        spec = eigen_spectrum(build_coordinate_hamiltonian(cfg))
        a = 4.0
        expected = sorted([2 / (2 * a), 2 / a**2 + 2 / (2 * a)])
        assert np.allclose(spec.eigenvalues.real, expected, atol=1e-14)

    def test_il_free_negated(self):
        cfg = LatticeConfig(16, 6.0, 1.0, 2.0)
        free = eigen_spectrum(build_coordinate_hamiltonian(cfg, False))
        rot = eigen_spectrum(build_il_rotated_hamiltonian(cfg, interacting=False))
        assert np.allclose(
            np.sort(rot.eigenvalues.real), np.sort(-free.eigenvalues.real), atol=1e-11
        )

    def test_hermitian_spectra_are_real(self, small_pair):
        _, s_int, _ = small_pair
        radius = np.max(np.abs(s_int.eigenvalues))
        assert np.max(np.abs(s_int.eigenvalues.imag)) <= 1e-10 * radius

    def test_rejects_non_finite(self):
        from trapshift.lattice import HamiltonianMatrix

        bad = HamiltonianMatrix(np.array([[np.nan, 0], [0, 1]]), basis="coordinate")
        with pytest.raises(ValueError):
            eigen_spectrum(bad)


class TestIcf:
    def test_trace_identities(self, small_pair):
        cfg, s_int, _ = small_pair
        h = build_coordinate_hamiltonian(cfg).matrix
        dim = cfg.n
        assert icf(s_int, 0.0, "real", 0) == pytest.approx(dim)
        tr_h = np.trace(h).real
        assert icf(s_int, 0.0, "real", 1).real == pytest.approx(tr_h, rel=1e-8)
        tr_h2 = np.trace(h @ h).real
        assert icf(s_int, 0.0, "real", 2).real == pytest.approx(tr_h2, rel=1e-8)

    def test_difference_at_zero_time(self, small_pair):
        _, s_int, s_free = small_pair
        assert icf_difference(s_int, s_free, 0.0, "real") == 0.0

    def test_euclidean_matches_limit_fig1_point(self):
        cfg = LatticeConfig(400, 10.0, 1.0, 2.0)
        s_int = eigen_spectrum(build_coordinate_hamiltonian(cfg, True))
        s_free = eigen_spectrum(build_coordinate_hamiltonian(cfg, False))
        dc = icf_difference(s_int, s_free, 2.0, "euclidean").real
        lim = icf_infinite_limit(2.0, ScatteringParams(1.0, 2.0), "euclidean").real
        assert abs(dc - lim) < 0.02

    def test_negative_euclidean_rejected(self, small_pair):
        _, s_int, _ = small_pair
        with pytest.raises(ValueError):
            icf(s_int, -0.5, "euclidean")

    def test_overflow_guard(self):
        spec = Spectrum(np.array([-300.0 + 0j]), source="toy", hermitian=True)
        with pytest.raises(OverflowError):
            icf(spec, 3.0, "euclidean")

    def test_moment_derivative_identity(self, small_pair):
        # first difference moment equals -d/dtau of the zeroth, exactly
        # for the sum; central difference exposes it to 1e-4 relative
        _, s_int, s_free = small_pair
        h = 1e-3
        for tau in (1.0, 2.0, 3.0):
            m1 = icf_difference(s_int, s_free, tau, "euclidean", 1).real
            d0 = (
                icf_difference(s_int, s_free, tau + h, "euclidean").real
                - icf_difference(s_int, s_free, tau - h, "euclidean").real
            ) / (2 * h)
            assert m1 == pytest.approx(-d0, rel=1e-4)

    def test_bad_moment(self, small_pair):
        _, s_int, _ = small_pair
        with pytest.raises(ValueError):
            icf(s_int, 1.0, "real", 3)


class TestSeries:
    def test_difference_series_zero_at_origin(self, small_pair):
        _, s_int, s_free = small_pair
        ser = difference_series(s_int, s_free, [0.0, 1.0, 2.0], "euclidean")
        assert ser.values[0] == 0.0
        assert ser.pairing == "difference"

    def test_grid_must_increase(self):
        with pytest.raises(ValueError):
            CorrelatorSeries("real", np.array([0.0, 0.0]), np.zeros(2), "free")


class TestResolventTrace:
    def test_single_eigenvalue(self):
        spec = Spectrum(np.array([2.0 + 0j]), source="toy", hermitian=True)
        assert resolvent_trace(spec, 3.0) == pytest.approx(1.0)

    def test_pole_proximity_rejected(self):
        spec = Spectrum(np.array([2.0 + 0j]), source="toy", hermitian=True)
        with pytest.raises(PoleProximityError):
            resolvent_trace(spec, 2.0 + 1e-13)

    def test_schwarz_reflection(self, small_pair):
        _, s_int, _ = small_pair
        z = 0.4 + 0.2j
        assert resolvent_trace(s_int, np.conj(z)) == pytest.approx(
            np.conj(resolvent_trace(s_int, z))
        )

    def test_free_box_closed_form_with_truncation_tail(self):
        # momentum-builder free trace approaches the cot form as N grows;
        # the missing |n| > N/2 tail is summed explicitly and restored
        m, l = 1.0, 20.0
        z = 0.3 + 0.1j
        prev_gap = None
        for n in (200, 400, 800):
            cfg = LatticeConfig(n, l, m, 0.0)
            spec = eigen_spectrum(build_momentum_hamiltonian(cfg, interacting=False))
            tr = resolvent_trace(spec, z)
            tail_n = np.concatenate([np.arange(-20 * n, -n // 2), np.arange(n // 2, 20 * n)])
            tail = np.sum(1.0 / (z - (2 * np.pi * tail_n / l) ** 2 / (2 * m)))
            closed = free_resolvent(z, l, "box", m) * l
            gap = abs(tr + tail - closed)
            assert gap < 2e-3 * abs(closed)
            if prev_gap is not None:
                assert gap < prev_gap  # still approaching
            prev_gap = gap


class TestPhaseCot:
    def test_pure_imaginary_gives_sentinel(self):
        assert phase_cot_from_resolvent(-2.0j) == np.inf
        assert phase_cot_from_resolvent(2.0j) == -np.inf

    def test_krein_form_recovers_cot_delta(self):
        delta = 0.3
        for d in (1.0, -2.5, 0.07):
            v = (np.tan(delta) - 1j) * d
            assert phase_cot_from_resolvent(v) == pytest.approx(1 / np.tan(delta))


class TestScans:
    def test_free_scan_is_zero(self):
        cfg = LatticeConfig(64, 8.0, 1.0, 0.0)
        scan = scan_prescription(cfg, "il", [0.3, 0.7], basis="momentum")
        assert np.max(np.abs(scan.values)) < 1e-10

    @pytest.mark.parametrize("basis,tol", [("momentum", 0.05), ("coordinate", 0.12)])
    def test_il_converges_to_cot_delta(self, basis, tol):
        # coarse, fast check of the pipeline; the coordinate lattice has
        # the larger O(a) two-site-potential artifact
        cfg = LatticeConfig(400, 40.0, 1.0, 2.0)
        scan = scan_prescription(cfg, "il", [0.3, 0.5, 1.0], basis=basis)
        for e, cp in zip(scan.energies, scan.cot_phi()):
            cd = -np.sqrt(2 * e) / 2.0
            assert abs(cp - cd) / abs(cd) < tol

    def test_eps_free_column_matches_box_form(self):
        # interacting minus free is exercised elsewhere; here the free
        # trace alone, over L, against the closed cot form at E + i eps.
        # The truncated |n| > N/2 modes are restored: explicitly out to
        # 40N, then the polygamma remainder of sum 1/eps_n.
        from scipy.special import polygamma

        m, l, eps = 1.0, 100.0, 0.1
        cfg = LatticeConfig(2000, l, m, 2.0)
        spec = eigen_spectrum(build_momentum_hamiltonian(cfg, interacting=False))
        z = 0.5 + 1j * eps
        tr = resolvent_trace(spec, z) / l
        closed = free_resolvent(z, l, "box", m)
        n = cfg.n
        c = (2 * np.pi / l) ** 2 / (2 * m)
        tail_n = np.concatenate([np.arange(-40 * n, -n // 2), np.arange(n // 2, 40 * n)])
        tail = np.sum(1.0 / (z - c * tail_n.astype(float) ** 2)) / l
        tail += -(polygamma(1, 40 * n) + polygamma(1, 40 * n + 1)) / c / l
        assert abs(tr - closed) < 2 * abs(tail)
        assert abs(tr + tail - closed) < 1e-6 * abs(closed)

    def test_eps_warns_when_smearing_too_small(self):
        cfg = LatticeConfig(32, 8.0, 1.0, 2.0)
        with pytest.warns(UserWarning):
            scan_prescription(cfg, "e_plus_ieps", [0.5], eps=0.05, basis="momentum")

    def test_eps_requires_eps(self):
        cfg = LatticeConfig(32, 100.0, 1.0, 2.0)
        with pytest.raises(ValueError):
            scan_prescription(cfg, "e_plus_ieps", [0.5], basis="momentum")

    def test_scan_invariant_shared_eps(self):
        cfg = LatticeConfig(64, 100.0, 1.0, 2.0)
        scan = scan_prescription(cfg, "e_plus_ieps", [0.3, 0.6], eps=0.1, basis="momentum")
        assert np.all(scan.complex_energies.imag == 0.1)
        assert scan.eps == 0.1


class TestSlidingWindow:
    def test_free_carriers_annihilated(self):
        # with W = 2 pi / eps_1 every nonzero free mode hits a sinc zero,
        # so the averaged free correlator is exactly the n=0 contribution
        cfg = LatticeConfig(64, 10.0, 1.0, 0.0)
        free = eigen_spectrum(build_momentum_hamiltonian(cfg, interacting=False))
        eps1 = (2 * np.pi / 10.0) ** 2 / 2.0
        width = 2 * np.pi / eps1
        zero = Spectrum(np.array([0.0 + 0j]), source="toy", hermitian=True)
        # difference against a lone zero mode leaves exactly nothing
        avg = sliding_window_average(free, zero, [1.0, 2.5], width)
        assert np.max(np.abs(avg)) < 1e-10

    def test_tames_realtime_oscillation(self):
        # raw Delta C(t) oscillates with O(10) amplitude; the one-level
        # window pulls it to O(0.5) of the infinite-volume curve (the
        # residual offset is a genuine finite-volume feature at L = 10)
        cfg = LatticeConfig(300, 10.0, 1.0, 2.0)
        s_int = eigen_spectrum(build_coordinate_hamiltonian(cfg, True))
        s_free = eigen_spectrum(build_coordinate_hamiltonian(cfg, False))
        eps1 = (2 * np.pi / 10.0) ** 2 / 2.0
        width = 2 * np.pi / eps1
        ts = np.linspace(1.0, 5.0, 9)
        p = ScatteringParams(1.0, 2.0)
        lims = np.array([icf_infinite_limit(t, p, "real") for t in ts])
        raw = np.array([icf_difference(s_int, s_free, t, "real") for t in ts])
        avg = sliding_window_average(s_int, s_free, ts, width)
        raw_dev = np.max(np.abs(raw - lims))
        avg_dev = np.max(np.abs(avg - lims))
        assert raw_dev > 5.0
        assert avg_dev < 0.5
        assert avg_dev < raw_dev / 10.0
