"""Rolling VaR forecasts and a cross-asset validation/comparative backtest.

Simulates a handful of AR-GARCH loss series, produces daily one-step VaR
forecasts with the empirical and tail-extrapolation methods, then runs
the pooled backtest: a validation test per method plus one-sided pairwise
comparisons.  A 5% target with a short horizon keeps the run quick while
still producing enough exceedances to test.
"""

import numpy as np

from poolmax import (
    BootstrapConfig,
    RngSpec,
    VarMethod,
    build_family,
    full_backtest,
    rolling_forecasts,
    tail_dependence,
)


def simulate_losses(n, gen, a1=0.05, b0=0.05, b1=0.08, b2=0.88):
    """AR(1) losses with GARCH(1,1) volatility, Gaussian innovations."""
    burn = 300
    z = gen.standard_normal(n + burn)
    u = np.empty(n + burn)
    sig2 = b0 / (1 - b1 - b2)
    prev = 0.0
    for t in range(n + burn):
        eps = np.sqrt(sig2) * z[t]
        u[t] = a1 * prev + eps
        prev = u[t]
        sig2 = b0 + b1 * eps**2 + b2 * sig2
    return u[burn:]


def main():
    gen = RngSpec(seed=99).generator()
    n_assets, window, horizon = 5, 400, 80
    theta = 0.05

    losses = np.column_stack(
        [simulate_losses(window + horizon, gen) for _ in range(n_assets)]
    )

    methods = {
        "empirical": VarMethod("empirical"),
        "evt": VarMethod("evt", k=40),
    }
    forecasts = {
        name: np.column_stack(
            [
                rolling_forecasts(
                    losses[:, j], window, horizon, vm, theta, refit_every=20
                )
                for j in range(n_assets)
            ]
        )
        for name, vm in methods.items()
    }

    realized = losses[-horizon:]
    fam = build_family(n_assets, 2, 2 * n_assets, RngSpec(99, 1))
    cfg = BootstrapConfig(rng=RngSpec(99, 2), replicates=500)
    report = full_backtest(realized, forecasts, theta, fam, 0.05, cfg)

    print(f"{n_assets} assets, horizon={horizon} days, theta={theta}")
    for name in report.method_names:
        res = report.validation[name]
        if res is None:
            print(f"  validation {name}: degenerate (no exceedance variation)")
        else:
            print(f"  validation {name}: p={res.p_value:.3f} reject={res.reject}")
    for (row, col), res in report.comparative.items():
        if res is not None:
            print(f"  '{col}' better than '{row}'? p={res.p_value:.3f}")

    lam = tail_dependence(realized, u=0.1)
    off = lam[~np.eye(n_assets, dtype=bool)]
    print(f"  mean off-diagonal tail dependence at u=0.1: {off.mean():.3f}")


if __name__ == "__main__":
    main()
