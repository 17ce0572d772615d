import numpy as np
import pytest

from poolmax.riskmodels import GarchParams


def simulate_ar_garch(params: GarchParams, n: int, rng: np.random.Generator,
                      burn: int = 500) -> np.ndarray:
    """Reference AR(1)-GARCH(1,1) path with Gaussian innovations.

    Step-by-step recursion independent of the filter implementation; used
    as the simulate-and-refit oracle.
    """
    total = n + burn
    z = rng.standard_normal(total)
    u = np.empty(total)
    sig2 = params.b0 / (1 - params.b1 - params.b2)
    prev = params.a0 / (1 - params.a1)
    for t in range(total):
        mu = params.a0 + params.a1 * prev
        eps = np.sqrt(sig2) * z[t]
        u[t] = mu + eps
        sig2 = params.b0 + params.b1 * eps**2 + params.b2 * sig2
        prev = u[t]
    return u[burn:]


@pytest.fixture(scope="session")
def garch_path():
    params = GarchParams(a0=0.0, a1=0.1, b0=0.05, b1=0.1, b2=0.85)
    return params, simulate_ar_garch(params, 3000, np.random.default_rng(12345))
