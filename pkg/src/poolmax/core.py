"""Shared data model: validated panels, reproducible RNG streams, test results.

The RNG contract is the backbone of every stochastic routine in the
package: an :class:`RngSpec` is a cheap immutable token (seed, stream_id)
and every bootstrap replicate / Monte Carlo repetition derives its own
substream, so results are bit-identical regardless of evaluation order or
parallelism degree.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NonFiniteError, TooSmallError

__all__ = ["RngSpec", "substream", "TestResult", "validate_matrix"]


@dataclass(frozen=True)
class RngSpec:
    """Token identifying a reproducible random stream.

    Identical (seed, stream_id) reproduce identical draws across runs and
    across thread counts; the underlying generator is counter-based
    (Philox), so streams with distinct ids are statistically independent.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if self.seed < 0 or self.stream_id < 0:
            raise ValueError("seed and stream_id must be non-negative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(ss))


def substream(rng: RngSpec, k: int) -> RngSpec:
    """Derive the k-th child stream of `rng`.

    The new stream_id is the Cantor pairing of (stream_id, k), which is
    injective, so nested derivations never collide.
    """
    if k < 0:
        raise ValueError("substream index must be non-negative")
    s = rng.stream_id
    return RngSpec(rng.seed, (s + k) * (s + k + 1) // 2 + k)


def validate_matrix(values) -> np.ndarray:
    """Validate an observations-by-dimensions panel.

    Returns a float64 C-contiguous copy with n_rows >= 2, n_cols >= 1 and
    all entries finite.

    Raises
    ------
    TooSmallError
        fewer than 2 rows or no columns
    NonFiniteError
        any NaN/Inf entry (first offending position reported)
    """
    x = np.ascontiguousarray(values, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise TooSmallError(f"expected a 2-d panel, got ndim={x.ndim}")
    n, p = x.shape
    if n < 2:
        raise TooSmallError(f"need at least 2 observations, got {n}")
    if p < 1:
        raise TooSmallError("need at least 1 dimension")
    bad = ~np.isfinite(x)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise NonFiniteError(int(i), int(j))
    return x


@dataclass(frozen=True)
class TestResult:
    """Outcome of one hypothesis test."""

    statistic: float
    critical_value: float
    p_value: float
    reject: bool
    alpha: float
    method: str  # "naive" | "subsets-pool" | "marginal"
    per_subset_t: Optional[np.ndarray] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        d = {
            "statistic": self.statistic,
            "critical_value": self.critical_value,
            "p_value": self.p_value,
            "reject": bool(self.reject),
            "alpha": self.alpha,
            "method_tag": self.method,
        }
        if self.per_subset_t is not None:
            d["per_subset_t"] = [float(t) for t in self.per_subset_t]
        return d

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kwargs)
