import numpy as np
import pytest

from tcsense.measurement import (
    MeasurementSpec,
    PrecisionReport,
    UninformativeQuadratureError,
    delta_h,
    expectations_analytic,
    expectations_numeric,
    mean_field_parameter,
    nu_mean,
    optimize_quadrature,
    photon_distribution,
    working_phase,
)
from tcsense.model import SystemParams
from tcsense.qfi import qfi_cs
from tcsense.states import GaussianSpec


@pytest.fixture
def fast_params(params):
    """Reference frequencies with t = 10 ps, inside the mean-field window
    across the whole reference photon-number range."""
    return SystemParams(params.omega0, params.omega_a, params.g, params.h, 1e-11)


class TestExpectationsAnalytic:
    def test_polar_probe(self, fast_params):
        out = expectations_analytic(MeasurementSpec(0.3, theta=0.0), 6, 10.0, fast_params)
        assert out["m1"] == pytest.approx(0.0)
        assert out["m2"] == pytest.approx(6 / 4)

    def test_plugin_values(self, fast_params):
        n, n_bar = 5, 20.0
        spec = MeasurementSpec(varphi=1.1, theta=0.8, phi=0.4)
        x = working_phase(spec, fast_params, n_bar)
        out = expectations_analytic(spec, n, n_bar, fast_params)
        assert out["m1"] == pytest.approx(n / 2 * np.sin(0.8) * np.cos(x))
        m2 = n / 16 * (n + 3 + (1 - n) * np.cos(1.6) + 2 * (n - 1) * np.sin(0.8) ** 2 * np.cos(2 * x))
        assert out["m2"] == pytest.approx(m2)


class TestExpectationsNumeric:
    def test_g_zero_collapses_to_analytic(self, params):
        p0 = SystemParams(params.omega0, params.omega_a, 0.0, params.h, 1e-6)
        spec = MeasurementSpec(varphi=1.0, theta=1.1, phi=0.2)
        ana = expectations_analytic(spec, 4, 9.0, p0)
        num = expectations_numeric(spec, 4, GaussianSpec(alpha_mag=3.0), p0)
        assert num["m1"] == pytest.approx(ana["m1"], abs=1e-12)
        assert num["m2"] == pytest.approx(ana["m2"], abs=1e-12)

    def test_mean_field_window_agreement(self, fast_params):
        c = fast_params.coupling_shift()
        n_bar = 100.0 / c
        assert mean_field_parameter(fast_params, n_bar) <= 0.01
        spec = MeasurementSpec(varphi=0.7, theta=np.pi / 2, phi=0.0)
        ana = expectations_analytic(spec, 4, n_bar, fast_params)
        num = expectations_numeric(spec, 4, GaussianSpec(alpha_mag=np.sqrt(n_bar)), fast_params)
        assert num["m1"] == pytest.approx(ana["m1"], rel=1e-3, abs=1e-6)

    def test_phase_diffusion_regime_documented(self, params):
        """Outside the window the exact moments visibly deviate (reported,
        not asserted tight): the mean-field form overestimates coherence."""
        slow = SystemParams(params.omega0, params.omega_a, params.g, params.h, 3e-8)
        c = slow.coupling_shift()
        n_bar = 100.0 / c
        assert mean_field_parameter(slow, n_bar) > 1.0
        spec = MeasurementSpec(varphi=0.7, theta=np.pi / 2, phi=0.0)
        ana = expectations_analytic(spec, 4, n_bar, slow)
        num = expectations_numeric(spec, 4, GaussianSpec(alpha_mag=np.sqrt(n_bar)), slow)
        # fringe contrast collapses under strong phase diffusion
        assert abs(num["m1"]) < abs(ana["m1"])

    def test_requires_pure_optical(self, fast_params):
        with pytest.raises(ValueError):
            expectations_numeric(
                MeasurementSpec(0.0, 1.0), 4, GaussianSpec(alpha_mag=1.0, n_th=0.2), fast_params
            )

    def test_poisson_window_mass(self):
        k, p = photon_distribution(GaussianSpec(alpha_mag=200.0))
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
        assert k[0] > 0

    def test_photon_law_routes_agree(self, fast_params):
        """The Poisson fast path (r = 0) and the truncated-state route
        (r > 0) give the same moments in the overlap regime."""
        spec = MeasurementSpec(varphi=0.9, theta=1.0, phi=0.1)
        poisson = expectations_numeric(spec, 4, GaussianSpec(alpha_mag=3.0), fast_params)
        built = expectations_numeric(
            spec, 4, GaussianSpec(alpha_mag=3.0, r=1e-9), fast_params
        )
        assert built["m1"] == pytest.approx(poisson["m1"], abs=1e-9)
        assert built["m2"] == pytest.approx(poisson["m2"], abs=1e-9)

    def test_squeezed_probe_numeric(self, fast_params):
        """DSVS probe: second moment of the photon law feeds the dephasing."""
        gauss = GaussianSpec(alpha_mag=2.0, r=0.8)
        k, p = photon_distribution(gauss)
        from tcsense.states import optical_moments

        om = optical_moments(gauss)
        assert float(p @ k) == pytest.approx(om["n_bar"], rel=1e-9)
        assert float(p @ k**2) - float(p @ k) ** 2 == pytest.approx(om["var_n"], rel=1e-8)


class TestDeltaH:
    def test_optimal_point_closed_form(self, fast_params):
        c = fast_params.coupling_shift()
        n_bar = 50.0 / c
        nu = nu_mean(fast_params, n_bar)
        varphi = (nu * fast_params.t - np.pi / 2) % (2 * np.pi)
        rep = delta_h(MeasurementSpec(varphi=varphi, theta=np.pi / 2), 4, n_bar, fast_params)
        expected_sq = 1.0 / (4 * fast_params.t**2 * (c * n_bar - 1) ** 2)
        assert rep.delta_h**2 == pytest.approx(expected_sq, rel=1e-9)

    def test_large_photon_asymptote(self, fast_params):
        c = fast_params.coupling_shift()
        n_bar = 1e4 / c
        nu = nu_mean(fast_params, n_bar)
        varphi = (nu * fast_params.t - np.pi / 2) % (2 * np.pi)
        rep = delta_h(MeasurementSpec(varphi=varphi, theta=np.pi / 2), 4, n_bar, fast_params)
        bound_sq = 1.0 / (4 * fast_params.t**2 * (fast_params.g**4 / fast_params.delta() ** 4) * 4 * n_bar**2)
        assert rep.delta_h**2 == pytest.approx(bound_sq, rel=3e-4)

    def test_uninformative_quadrature(self, fast_params):
        n_bar = 100.0
        nu = nu_mean(fast_params, n_bar)
        varphi = (nu * fast_params.t) % (2 * np.pi)  # x = 0 mod pi
        with pytest.raises(UninformativeQuadratureError):
            delta_h(MeasurementSpec(varphi=varphi, theta=np.pi / 2), 4, n_bar, fast_params)
        with pytest.raises(UninformativeQuadratureError):
            delta_h(MeasurementSpec(varphi=1.0, theta=0.0), 4, n_bar, fast_params)

    def test_numeric_respects_qcrb(self, fast_params):
        c = fast_params.coupling_shift()
        for cn in (0.4, 7.0, 300.0):
            n_bar = cn / c
            varphi = optimize_quadrature(MeasurementSpec(0.0, np.pi / 2), 4, n_bar, fast_params)
            rep = delta_h(MeasurementSpec(varphi=varphi, theta=np.pi / 2), 4, n_bar, fast_params, numeric=True)
            f = qfi_cs(np.pi / 2, n_bar, 4, fast_params).value
            assert rep.delta_h * np.sqrt(f) >= 1 - 1e-9

    def test_pi_shift_invariance(self, fast_params):
        n_bar = 500.0
        spec = MeasurementSpec(varphi=0.8, theta=1.0, phi=0.2)
        shifted = MeasurementSpec(varphi=0.8 + np.pi, theta=1.0, phi=0.2)
        d1 = delta_h(spec, 4, n_bar, fast_params).delta_h
        d2 = delta_h(shifted, 4, n_bar, fast_params).delta_h
        assert d1 == pytest.approx(d2, rel=1e-12)

    def test_report_rejects_qcrb_violation(self):
        with pytest.raises(ValueError):
            PrecisionReport(delta_h=0.5, method="analytic", qcrb=1.0)


class TestOptimizeQuadrature:
    def test_phase_condition_zero_offsets(self, fast_params):
        # nu t = 0 (mod 2 pi) synthesized via varphi-free check at phi = 0
        n_bar = 1000.0
        nu = nu_mean(fast_params, n_bar)
        k = round(nu * fast_params.t / (2 * np.pi))
        t_stro = 2 * np.pi * k / nu
        p = SystemParams(fast_params.omega0, fast_params.omega_a, fast_params.g, fast_params.h, t_stro)
        vstar = optimize_quadrature(MeasurementSpec(0.0, np.pi / 2, 0.0), 4, n_bar, p)
        d = abs(vstar - np.pi / 2)
        assert min(d, np.pi - d) <= 1e-6

    def test_phase_condition_general(self, fast_params):
        n_bar = 2000.0
        vstar = optimize_quadrature(MeasurementSpec(0.0, np.pi / 2, 0.3), 4, n_bar, fast_params)
        expected = (nu_mean(fast_params, n_bar) * fast_params.t + 0.3 - np.pi / 2) % np.pi
        d = abs(vstar - expected)
        assert min(d, np.pi - d) <= 1e-6

    def test_beats_random_phases(self, fast_params, rng):
        n_bar = 800.0
        theta, phi = 1.2, 0.5
        vstar = optimize_quadrature(MeasurementSpec(0.0, theta, phi), 4, n_bar, fast_params)
        best = delta_h(MeasurementSpec(vstar, theta, phi), 4, n_bar, fast_params).delta_h
        for _ in range(100):
            v = float(rng.uniform(0, 2 * np.pi))
            try:
                other = delta_h(MeasurementSpec(v, theta, phi), 4, n_bar, fast_params).delta_h
            except UninformativeQuadratureError:
                continue
            assert best <= other * (1 + 1e-12)
