"""Sample and pair occurrence counts over the hv-block test blocks.

Two independent routes produce an :class:`OccurrenceProfile`:

* :func:`count_bruteforce` walks every test block and bumps a counter for
  each member and each pair of members. It is the reference.
* :func:`occurrence_matrix` fills the same profile from closed forms
  (:func:`r_analytic`, :func:`lambda_analytic`).

The gap width ``h`` never matters here; only test blocks are counted.
Storage is O(n^2) for the pair matrix. The brute-force walk costs
O((n-2v)(2v+1)^2) time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import BadPair, IndexOutOfRange
from .splitter import SplitConfig, hv_splits, validate_config


@dataclass(frozen=True, eq=False)
class OccurrenceProfile:
    """Per-sample counts ``r`` and the pair matrix ``lam`` (0-based arrays).

    ``lam[i, i] == r[i]`` by convention, so the matrix diagonal doubles as
    the single-sample occurrence.
    """

    n: int
    v: int
    r: np.ndarray
    lam: np.ndarray

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OccurrenceProfile):
            return NotImplemented
        return (
            self.n == other.n
            and self.v == other.v
            and np.array_equal(self.r, other.r)
            and np.array_equal(self.lam, other.lam)
        )

    __hash__ = None  # type: ignore[assignment]

    def diff(self, other: OccurrenceProfile) -> list[tuple[int, int, int, int]]:
        """Entries where the pair matrices disagree, as 1-based ``(i, j, a, b)``."""
        if self.lam.shape != other.lam.shape:
            raise ValueError("profiles have different sizes")
        rows, cols = np.nonzero(self.lam != other.lam)
        return [
            (int(i) + 1, int(j) + 1, int(self.lam[i, j]), int(other.lam[i, j]))
            for i, j in zip(rows, cols)
        ]

    def to_csv(self) -> str:
        return "".join(",".join(str(int(x)) for x in row) + "\n" for row in self.lam)

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "v": self.v,
            "r": [int(x) for x in self.r],
            "lambda": [[int(x) for x in row] for row in self.lam],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> OccurrenceProfile:
        return cls(
            n=int(d["n"]),
            v=int(d["v"]),
            r=np.asarray(d["r"], dtype=np.int64),
            lam=np.asarray(d["lambda"], dtype=np.int64),
        )


def count_bruteforce(cfg: SplitConfig) -> OccurrenceProfile:
    validate_config(cfg, "counting")
    n = cfg.n
    r = [0] * n
    lam = [[0] * n for _ in range(n)]
    for split in hv_splits(cfg):
        block = [i - 1 for i in split.test]
        for a in block:
            r[a] += 1
            for b in block:
                if a != b:
                    lam[a][b] += 1
    for a in range(n):
        lam[a][a] = r[a]
    return OccurrenceProfile(
        n=n, v=cfg.v, r=np.array(r, dtype=np.int64), lam=np.array(lam, dtype=np.int64)
    )


def _check_index(n: int, i: int) -> None:
    if not 1 <= i <= n:
        raise IndexOutOfRange(f"index {i} outside [1, {n}]")


def r_analytic(n: int, v: int, i: int) -> int:
    """Number of test blocks containing sample ``i``.

    The blocks containing ``i`` are those centered in ``[i-v, i+v]``,
    intersected with the legitimate centers ``[v+1, n-v]``.
    """
    validate_config(SplitConfig(n=n, v=v), "counting")
    _check_index(n, i)
    return max(0, min(n - v, i + v) - max(v + 1, i - v) + 1)


def lambda_analytic(n: int, v: int, i: int, j: int) -> int:
    """Number of test blocks containing both ``i`` and ``j`` (``i != j``)."""
    validate_config(SplitConfig(n=n, v=v), "counting")
    _check_index(n, i)
    _check_index(n, j)
    if i == j:
        raise BadPair(f"pair ({i}, {j}) is not a pair of distinct samples; use r_analytic")
    i, j = min(i, j), max(i, j)
    return max(0, min(n - v, i + v) - max(v + 1, j - v) + 1)


def occurrence_matrix(n: int, v: int) -> OccurrenceProfile:
    """Closed-form occurrence profile, vectorized over all pairs."""
    validate_config(SplitConfig(n=n, v=v), "counting")
    idx = np.arange(1, n + 1, dtype=np.int64)
    lo = np.minimum.outer(idx, idx)
    hi = np.maximum.outer(idx, idx)
    # the diagonal reduces to r_analytic since lo == hi there
    lam = np.minimum(n - v, lo + v) - np.maximum(v + 1, hi - v) + 1
    np.maximum(lam, 0, out=lam)
    return OccurrenceProfile(n=n, v=v, r=np.diagonal(lam).copy(), lam=lam)
