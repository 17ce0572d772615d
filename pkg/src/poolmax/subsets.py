"""Pooling designs: circular window families and random extensions.

The identifiability oracle (`verify_identifiability`) builds the 0/1
circulant membership matrix for the circular windows and computes its
rank exactly over the rationals; it is a small-instance test fixture, not
a runtime path for large p.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from .core import RngSpec
from .errors import (
    BadCardinalityError,
    DTooSmallError,
    NotCoprimeError,
    TooLargeError,
)

__all__ = [
    "SubsetFamily",
    "gcd",
    "circular_family",
    "random_extension",
    "build_family",
    "verify_identifiability",
    "IdentifiabilityResult",
]


def gcd(a: int, b: int) -> int:
    if a < 1 or b < 1:
        raise ValueError("gcd requires positive integers")
    return math.gcd(a, b)


@dataclass(frozen=True)
class SubsetFamily:
    """d index subsets of {1..p}, each of cardinality q (1-based, sorted)."""

    p: int
    q: int
    members: Tuple[Tuple[int, ...], ...]

    @property
    def d(self) -> int:
        return len(self.members)

    def __post_init__(self):
        for m in self.members:
            if len(m) != self.q or len(set(m)) != self.q:
                raise BadCardinalityError(
                    f"subset {m} does not have {self.q} distinct indices"
                )
            if min(m) < 1 or max(m) > self.p:
                raise BadCardinalityError(f"subset {m} has indices outside 1..{self.p}")

    def indicator(self) -> np.ndarray:
        """p x d 0/1 membership matrix; column ell indicates S_ell."""
        s = np.zeros((self.p, self.d))
        for ell, m in enumerate(self.members):
            s[np.asarray(m) - 1, ell] = 1.0
        return s

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "d": self.d,
            "members": [list(m) for m in self.members],
        }

    def to_json(self, **kwargs) -> str:
        kwargs.setdefault("sort_keys", True)
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> "SubsetFamily":
        members = tuple(tuple(sorted(int(i) for i in m)) for m in d["members"])
        fam = cls(p=int(d["p"]), q=int(d["q"]), members=members)
        if "d" in d and int(d["d"]) != fam.d:
            raise BadCardinalityError("declared d does not match member count")
        return fam

    @classmethod
    def from_json(cls, s: str) -> "SubsetFamily":
        return cls.from_dict(json.loads(s))


def _check_pq(p: int, q: int) -> None:
    if q < 1 or q >= p:
        raise BadCardinalityError(f"need 1 <= q < p, got p={p}, q={q}")


def circular_family(p: int, q: int) -> SubsetFamily:
    """The p circular windows {ell, ..., ell+q-1} with wrap-around.

    Requires gcd(p, q) = 1, which makes the window sums identify every
    individual mean (see `verify_identifiability`).
    """
    _check_pq(p, q)
    if math.gcd(p, q) != 1:
        raise NotCoprimeError(p, q)
    members = tuple(
        tuple(sorted((ell + t) % p + 1 for t in range(q))) for ell in range(p)
    )
    return SubsetFamily(p=p, q=q, members=members)


def random_extension(p: int, q: int, count: int, rng: RngSpec):
    """`count` subsets of cardinality q drawn uniformly without replacement.

    Subsets are sampled freely: duplicates between subsets are permitted.
    """
    if q < 1 or q > p:
        raise BadCardinalityError(f"need 1 <= q <= p, got p={p}, q={q}")
    if count < 0:
        raise ValueError("count must be non-negative")
    gen = rng.generator()
    return [
        tuple(sorted(int(j) + 1 for j in gen.choice(p, size=q, replace=False)))
        for _ in range(count)
    ]


def build_family(
    p: int,
    q: int,
    d: int,
    rng: RngSpec,
    user_subsets: Optional[Sequence[Sequence[int]]] = None,
) -> SubsetFamily:
    """Full design: p circular windows plus d - p extension subsets.

    The extension block is random by default; `user_subsets` replaces the
    leading part of it with caller-chosen subsets (validated for
    cardinality and range only).
    """
    if d < p:
        raise DTooSmallError(f"need d >= p, got d={d}, p={p}")
    base = circular_family(p, q)
    extra = []
    if user_subsets is not None:
        extra = [tuple(sorted(int(i) for i in m)) for m in user_subsets]
        if len(extra) > d - p:
            raise DTooSmallError("more user subsets than extension slots")
    extra += random_extension(p, q, d - p - len(extra), rng)
    return SubsetFamily(p=p, q=q, members=base.members + tuple(extra))


@dataclass(frozen=True)
class IdentifiabilityResult:
    identifiable: bool
    witness: Optional[Tuple[int, ...]] = None


def _rref(rows):
    """In-place rational row reduction; returns (rank, pivot column list)."""
    n_rows, n_cols = len(rows), len(rows[0])
    pivots = []
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, n_rows) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c]
        rows[r] = [v / inv for v in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return r, pivots


def verify_identifiability(p: int, q: int, max_p: int = 64) -> IdentifiabilityResult:
    """Brute-force check that circular q-window sums determine all means.

    Computes the exact rational rank of the p x p circulant membership
    matrix. When rank-deficient, returns an integer kernel vector: a
    nonzero mean profile whose every cyclic q-window sum is zero.
    """
    _check_pq(p, q)
    if p > max_p:
        raise TooLargeError(f"p={p} exceeds the small-instance bound {max_p}")
    rows = [
        [Fraction(1 if ((c - ell) % p) < q else 0) for c in range(p)]
        for ell in range(p)
    ]
    rank, pivots = _rref(rows)
    if rank == p:
        return IdentifiabilityResult(identifiable=True)
    free = next(c for c in range(p) if c not in pivots)
    v = [Fraction(0)] * p
    v[free] = Fraction(1)
    for i, pc in enumerate(pivots):
        v[pc] = -rows[i][free]
    scale = math.lcm(*(x.denominator for x in v))
    witness = tuple(int(x * scale) for x in v)
    return IdentifiabilityResult(identifiable=False, witness=witness)
