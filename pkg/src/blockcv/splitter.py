"""hv-block train/test/gap splits.

All indices exposed here are 1-based, matching the usual ``i = v+1 .. n-v``
convention for test-block centers. ``Split.train_idx`` and friends give
0-based numpy arrays for indexing into data.
"""

from __future__ import annotations

from collections.abc import Iterator
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np

from .errors import BadParameters, IllegitimateCenter, TooFewSamples

Purpose = Literal["counting", "cv"]


@dataclass(frozen=True)
class SplitConfig:
    """Series length ``n``, gap half-width ``h`` and test half-width ``v``."""

    n: int
    h: int = 0
    v: int = 0

    def __post_init__(self) -> None:
        for name in ("n", "h", "v"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise BadParameters(f"{name} must be an integer, got {value!r}")
        if self.n < 1:
            raise BadParameters(f"n must be positive, got {self.n}")
        if self.h < 0 or self.v < 0:
            raise BadParameters(f"h and v must be non-negative, got h={self.h}, v={self.v}")

    @property
    def n_v(self) -> int:
        """Test-block size ``2v+1``."""
        return 2 * self.v + 1

    @property
    def centers(self) -> range:
        return range(self.v + 1, self.n - self.v + 1)

    @property
    def min_train_size(self) -> int:
        # the split with the smallest train is any one whose gaps are not truncated
        return max(0, self.n - self.n_v - 2 * self.h)


def validate_config(cfg: SplitConfig, purpose: Purpose = "counting") -> SplitConfig:
    """Check ``cfg`` has enough samples for ``purpose``.

    Counting only needs one legitimate test block (``n >= 2v+1``). CV also
    needs every training set to be nonempty, which the central split bounds:
    ``n >= 2v+2h+2``.
    """
    if purpose == "counting":
        required, bound = 2 * cfg.v + 1, "n >= 2v+1"
    elif purpose == "cv":
        required, bound = 2 * cfg.v + 2 * cfg.h + 2, "n >= 2v+2h+2"
    else:
        raise BadParameters(f"unknown purpose {purpose!r}")
    if cfg.n < required:
        raise TooFewSamples(required=required, got=cfg.n, bound=bound)
    return cfg


@dataclass(frozen=True)
class Split:
    center: int
    test: tuple[int, ...]
    gap: tuple[int, ...]
    train: tuple[int, ...]

    @property
    def train_idx(self) -> np.ndarray:
        return np.asarray(self.train, dtype=np.intp) - 1

    @property
    def test_idx(self) -> np.ndarray:
        return np.asarray(self.test, dtype=np.intp) - 1

    @property
    def gap_idx(self) -> np.ndarray:
        return np.asarray(self.gap, dtype=np.intp) - 1

    def to_dict(self) -> dict[str, Any]:
        return {
            "center": self.center,
            "test": list(self.test),
            "gap": list(self.gap),
            "train": list(self.train),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Split:
        return cls(
            center=int(d["center"]),
            test=tuple(int(i) for i in d["test"]),
            gap=tuple(int(i) for i in d["gap"]),
            train=tuple(int(i) for i in d["train"]),
        )


def split_at(cfg: SplitConfig, center: int) -> Split:
    """Return the split whose test block is centered at ``center``.

    Gaps are truncated at the series edges: if fewer than ``h`` samples sit
    between the test block and an edge, all of them go to the gap.
    """
    n, h, v = cfg.n, cfg.h, cfg.v
    if not v + 1 <= center <= n - v:
        raise IllegitimateCenter(center, v + 1, n - v)
    lo, hi = center - v, center + v
    glo, ghi = max(1, lo - h), min(n, hi + h)
    return Split(
        center=center,
        test=tuple(range(lo, hi + 1)),
        gap=tuple(range(glo, lo)) + tuple(range(hi + 1, ghi + 1)),
        train=tuple(range(1, glo)) + tuple(range(ghi + 1, n + 1)),
    )


def hv_splits(cfg: SplitConfig, purpose: Purpose = "counting") -> Iterator[Split]:
    """Yield the ``n-2v`` legitimate splits, centers ``v+1 .. n-v`` in order.

    Validation happens eagerly, before the first split is requested.
    """
    validate_config(cfg, purpose)
    return (split_at(cfg, c) for c in cfg.centers)
