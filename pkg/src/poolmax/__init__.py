"""poolmax: high-dimensional mean tests via subsets-based data pooling,
with multiplier-bootstrap calibration, a Monte Carlo lab, and VaR
backtesting on GARCH-filtered loss panels."""

__version__ = "0.1.0"

from .backtest import (
    BacktestReport,
    comparative_test,
    exceedance_matrix,
    full_backtest,
    score,
    score_diff_matrix,
    tail_dependence,
    validation_test,
)
from .core import RngSpec, TestResult, substream, validate_matrix
from .pooltest import (
    BootstrapConfig,
    PooledPanel,
    bootstrap_quantile,
    marginal_test,
    max_statistic,
    multiplier_bootstrap,
    naive_test,
    pool_test,
    pooled_panel,
)
from .riskmodels import (
    GarchFit,
    GarchParams,
    VarMethod,
    empirical_var,
    evt_var,
    forecast_var,
    garch_filter,
    garch_fit,
    rolling_forecasts,
)
from .simlab import DgpSpec, SweepResult, run_sweep, sigma1, sigma2
from .sstd import sstd_cdf, sstd_logpdf, sstd_pdf, sstd_quantile
from .subsets import (
    SubsetFamily,
    build_family,
    circular_family,
    random_extension,
    verify_identifiability,
)
