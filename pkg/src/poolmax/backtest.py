"""Validation and comparative VaR backtests plus the tail-dependence check.

A validation backtest centers exceedance indicators at the target
probability and feeds them to the pooling test.  A comparative backtest
does the same with differences of a strictly consistent quantile score.
The upper tail-dependence matrix of the filtered residuals is an informal
diagnostic for blockwise cross-sectional dependence.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.stats import rankdata

from .core import TestResult, validate_matrix
from .errors import (
    BadThresholdError,
    DegenerateVarianceError,
    ShapeMismatchError,
)
from .pooltest import BootstrapConfig, _bootstrap_result, pool_test, pooled_panel
from .subsets import SubsetFamily

__all__ = [
    "logistic",
    "exceedance_matrix",
    "validation_test",
    "score",
    "score_diff_matrix",
    "comparative_test",
    "tail_dependence",
    "BacktestReport",
    "full_backtest",
]


def logistic(x):
    return 1.0 / (1.0 + np.exp(-np.asarray(x, dtype=np.float64)))


def _same_shape(*mats):
    arrs = [np.asarray(m, dtype=np.float64) for m in mats]
    shapes = {a.shape for a in arrs}
    if len(shapes) != 1:
        raise ShapeMismatchError(f"shapes differ: {sorted(shapes)}")
    return arrs


def exceedance_matrix(u, r, theta0: float) -> np.ndarray:
    """Centered violation indicators 1{U > R} - theta0 (ties are misses)."""
    u, r = _same_shape(u, r)
    if not 0 < theta0 < 1:
        raise BadThresholdError("theta0 must lie in (0, 1)")
    return (u > r).astype(np.float64) - theta0


def validation_test(
    u, r, theta0: float, fam: SubsetFamily, alpha: float, cfg: BootstrapConfig
) -> TestResult:
    """Pooling test of whether the forecast hits its target exceedance rate."""
    return pool_test(exceedance_matrix(u, r, theta0), fam, alpha, cfg)


def score(r, x, theta: float, g: Callable = logistic):
    """Strictly consistent quantile score (theta - 1{x>r}) g(r) + 1{x>r} g(x).

    In expectation the score is minimized when r is the quantile with
    exceedance probability theta, i.e. the (1-theta) quantile of x, so
    lower mean scores mean better forecasts.
    """
    r = np.asarray(r, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    hit = (x > r).astype(np.float64)
    out = (theta - hit) * g(r) + hit * g(x)
    return out if out.shape else float(out)


def score_diff_matrix(u, r, r_star, theta0: float, g: Callable = logistic) -> np.ndarray:
    """Entrywise score(r) - score(r_star); positive entries favor r_star."""
    u, r, r_star = _same_shape(u, r, r_star)
    return score(r, u, theta0, g) - score(r_star, u, theta0, g)


def comparative_test(
    u,
    r,
    r_star,
    theta0: float,
    fam: SubsetFamily,
    alpha: float,
    cfg: BootstrapConfig,
    one_sided: bool = False,
    g: Callable = logistic,
) -> TestResult:
    """Equal-predictive-accuracy test between two forecast panels.

    Two-sided: the usual pooling max test on score differences.
    One-sided: the signed max statistic with a one-sided bootstrap
    quantile; rejection is evidence that r_star (the column method)
    outperforms r (the row method).
    """
    diff = score_diff_matrix(u, r, r_star, theta0, g)
    if not one_sided:
        return pool_test(diff, fam, alpha, cfg)
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    panel = pooled_panel(diff, fam)
    return _bootstrap_result(panel, alpha, cfg, "subsets-pool", one_sided=True)


def tail_dependence(zhat, u: float) -> np.ndarray:
    """Pairwise upper tail-dependence coefficients of a residual panel.

    Empirical CDF via ranks/n; a point is in the upper tail when its
    rank-CDF strictly exceeds 1 - u, so the top observation always
    qualifies.  Entry (j1, j2) is the joint tail count over n*u.
    """
    z = validate_matrix(zhat)
    n = z.shape[0]
    if not 0 < u < 0.5:
        raise BadThresholdError("u must lie in (0, 0.5)")
    if n * u < 1:
        raise BadThresholdError("need n * u >= 1")
    cdf = rankdata(z, axis=0) / n
    hits = (cdf > 1.0 - u).astype(np.float64)
    return (hits.T @ hits) / (n * u)


@dataclass
class BacktestReport:
    """Validation p-values per method plus the lower-triangular
    comparative matrix; entry (row, col) tests whether the column method
    outperforms the row method."""

    method_names: List[str]
    validation: Dict[str, Optional[TestResult]] = field(default_factory=dict)
    comparative: Dict[Tuple[str, str], Optional[TestResult]] = field(
        default_factory=dict
    )
    errors: Dict[str, str] = field(default_factory=dict)
    config: Dict[str, float] = field(default_factory=dict)

    def _cell(self, res: Optional[TestResult]) -> Optional[float]:
        return None if res is None else res.p_value

    def to_dict(self) -> dict:
        return {
            "methods": self.method_names,
            "validation_pvalues": {
                m: self._cell(self.validation.get(m)) for m in self.method_names
            },
            "comparative_pvalues": [
                {"row": a, "col": b, "p_value": self._cell(res)}
                for (a, b), res in self.comparative.items()
            ],
            "errors": self.errors,
            "config": self.config,
        }

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kwargs)

    def to_csv(self, path) -> None:
        """Square matrix layout: validation on the diagonal, one-sided
        comparisons in the lower triangle, blanks elsewhere."""
        names = self.method_names
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow([""] + names)
            for a in names:
                row = [a]
                for b in names:
                    if a == b:
                        p = self._cell(self.validation.get(a))
                    else:
                        p = self._cell(self.comparative.get((a, b)))
                    row.append("" if p is None else f"{p:.6g}")
                w.writerow(row)


def full_backtest(
    u,
    forecasts: Dict[str, np.ndarray],
    theta0: float,
    fam: SubsetFamily,
    alpha: float,
    cfg: BootstrapConfig,
) -> BacktestReport:
    """Validation test per method and one-sided comparisons per pair.

    Degenerate cells (no variation in indicators or score differences)
    are recorded in the report instead of aborting it.
    """
    names = list(forecasts)
    report = BacktestReport(
        method_names=names,
        config={"theta0": theta0, "alpha": alpha, "B": cfg.replicates,
                "q": fam.q, "d": fam.d},
    )
    u = validate_matrix(u)
    for m in names:
        try:
            report.validation[m] = validation_test(
                u, forecasts[m], theta0, fam, alpha, cfg
            )
        except DegenerateVarianceError as e:
            report.validation[m] = None
            report.errors[m] = str(e)
    for i, a in enumerate(names):
        for b in names[:i]:
            try:
                report.comparative[(a, b)] = comparative_test(
                    u, forecasts[a], forecasts[b], theta0, fam, alpha, cfg,
                    one_sided=True,
                )
            except DegenerateVarianceError as e:
                report.comparative[(a, b)] = None
                report.errors[f"{a}|{b}"] = str(e)
    return report
