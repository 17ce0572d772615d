import numpy as np
import pytest

from poolmax import RngSpec
from poolmax.errors import (
    DegenerateSeriesError,
    InsufficientHistoryError,
    TooFewExceedancesError,
    TooFewObservationsError,
)
from poolmax.riskmodels import (
    GarchParams,
    VarMethod,
    empirical_var,
    evt_var,
    forecast_var,
    garch_filter,
    garch_fit,
    rolling_forecasts,
)


class TestFilter:
    def test_degenerate_recursion(self):
        params = GarchParams(a0=0.3, a1=0.0, b0=4.0, b1=0.0, b2=0.0)
        u = np.array([1.0, -2.0, 0.5, 3.0])
        mu, vol, z = garch_filter(u, params)
        assert np.allclose(mu, 0.3)
        assert np.allclose(vol, 2.0)
        assert np.allclose(z, (u - 0.3) / 2.0)

    def test_roundtrip_identity(self):
        params = GarchParams(a0=0.01, a1=0.2, b0=0.1, b1=0.15, b2=0.8)
        u = np.random.default_rng(0).standard_normal(500)
        mu, vol, z = garch_filter(u, params)
        assert np.max(np.abs(mu + vol * z - u)) < 1e-12

    def test_true_params_standardize(self, garch_path):
        params, u = garch_path
        _, _, z = garch_filter(u, params)
        assert z.var() == pytest.approx(1.0, abs=0.05)
        assert z.mean() == pytest.approx(0.0, abs=0.05)


class TestFit:
    def test_recovers_simulated_params(self, garch_path):
        params, u = garch_path
        fit = garch_fit(u)
        assert fit.b1 + fit.b2 == pytest.approx(0.95, abs=0.05)
        assert fit.a1 == pytest.approx(0.1, abs=0.05)
        assert np.max(np.abs(fit.cond_mean + fit.cond_vol * fit.residuals - u)) < 1e-12

    def test_refit_is_fixed_point(self, garch_path):
        _, u = garch_path
        fit = garch_fit(u)
        refit = garch_fit(u, init=GarchParams(fit.a0, fit.a1, fit.b0, fit.b1,
                                              fit.b2, fit.nu, fit.gamma))
        assert refit.loglik >= fit.loglik - 1e-6

    def test_constant_series(self):
        with pytest.raises(DegenerateSeriesError):
            garch_fit(np.ones(500))

    def test_too_short(self):
        with pytest.raises(TooFewObservationsError):
            garch_fit(np.random.default_rng(1).standard_normal(100))


class TestEmpiricalVar:
    def test_order_statistics(self):
        assert empirical_var(np.arange(1.0, 101.0), 0.01) == 99.0
        assert empirical_var(np.array([1.0, 2.0, 3.0, 4.0]), 0.5) == 2.0
        assert empirical_var(np.full(200, 3.5), 0.01) == 3.5

    def test_monotone_in_theta(self):
        r = np.random.default_rng(2).standard_normal(1000)
        qs = [empirical_var(r, th) for th in (0.01, 0.05, 0.1, 0.25)]
        assert all(a >= b for a, b in zip(qs, qs[1:]))

    def test_too_few(self):
        with pytest.raises(TooFewObservationsError):
            empirical_var(np.arange(10.0), 0.01)


class TestEvtVar:
    def test_guards(self):
        r = np.random.default_rng(3).standard_normal(100)
        with pytest.raises(TooFewExceedancesError):
            evt_var(r, 0.01, k=100)
        with pytest.raises(TooFewExceedancesError):
            evt_var(r, 0.01, k=5)

    def test_pareto_oracle(self):
        gen = np.random.default_rng(4)
        sample = gen.uniform(size=3000) ** (-0.5)  # survival x^-2, 0.99-quantile 10
        est = evt_var(sample, 0.01, 50)
        assert est == pytest.approx(10.0, rel=0.25)

    def test_exponential_oracle(self):
        gen = np.random.default_rng(5)
        est = evt_var(gen.exponential(size=3000), 0.01, 50)
        assert est == pytest.approx(np.log(100), rel=0.25)

    def test_translation_equivariance(self):
        r = np.random.default_rng(6).standard_normal(2000)
        base = evt_var(r, 0.01, 50)
        assert evt_var(r + 3.7, 0.01, 50) == pytest.approx(base + 3.7, abs=1e-8)


class TestForecast:
    def test_iid_normal_window(self):
        u = np.random.default_rng(7).standard_normal(3000)
        fc = forecast_var(u, VarMethod("empirical"), 0.01)
        assert fc == pytest.approx(2.326, abs=0.15)

    def test_methods_agree_roughly(self):
        u = np.random.default_rng(8).standard_normal(3000)
        fits = {
            kind: forecast_var(u, VarMethod(kind), 0.01)
            for kind in ("empirical", "skew-t", "evt")
        }
        for v in fits.values():
            assert v == pytest.approx(2.326, rel=0.10)

    def test_volatility_burst_raises_forecast(self, garch_path):
        _, u = garch_path
        fit = garch_fit(u)
        bumped = u.copy()
        bumped[-1] = u[-1] + 10 * u.std()
        lo = forecast_var(u, VarMethod("empirical"), 0.01, fit=fit)
        hi = forecast_var(bumped, VarMethod("empirical"), 0.01, fit=fit)
        assert hi > lo


class TestRolling:
    def test_insufficient_history(self):
        with pytest.raises(InsufficientHistoryError):
            rolling_forecasts(np.zeros(100), window=90, horizon=20,
                              method=VarMethod("empirical"), theta=0.01)

    def test_horizon_zero(self):
        u = np.random.default_rng(9).standard_normal(400)
        out = rolling_forecasts(u, window=350, horizon=0,
                                method=VarMethod("empirical"), theta=0.01)
        assert out.size == 0

    def test_refit_cadence_close(self):
        u = np.random.default_rng(10).standard_normal(430)
        daily = rolling_forecasts(u, window=400, horizon=30,
                                  method=VarMethod("empirical"), theta=0.05,
                                  refit_every=1)
        single = rolling_forecasts(u, window=400, horizon=30,
                                   method=VarMethod("empirical"), theta=0.05,
                                   refit_every=30)
        assert daily.shape == single.shape == (30,)
        rel = np.abs(daily - single) / np.abs(daily)
        assert rel.mean() < 0.05
