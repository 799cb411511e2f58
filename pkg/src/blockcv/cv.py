"""hv-block cross-validation score and model selection.

The engine only knows about splits and losses. Fitting and prediction come
in through an evaluator ``(series, split) -> float`` or through
:class:`Candidate` objects. Losses are lower-is-better.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import EvaluatorFailure
from .splitter import Split, SplitConfig, hv_splits, validate_config

Evaluator = Callable[[Any, Split], float]


@dataclass(frozen=True)
class CvResult:
    score: float
    per_split: tuple[float, ...]
    config: SplitConfig

    @property
    def centers(self) -> range:
        return self.config.centers

    @property
    def nv_nc_ratio(self) -> float:
        """Test size over the smallest training size, ``(2v+1) / (n-2v-1-2h)``."""
        return self.config.n_v / self.config.min_train_size

    def to_dict(self) -> dict[str, Any]:
        return {
            "score": self.score,
            "per_split": list(self.per_split),
            "n": self.config.n,
            "h": self.config.h,
            "v": self.config.v,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> CvResult:
        return cls(
            score=float(d["score"]),
            per_split=tuple(float(x) for x in d["per_split"]),
            config=SplitConfig(n=int(d["n"]), h=int(d["h"]), v=int(d["v"])),
        )


def _series_length(series: Any) -> int:
    if isinstance(series, tuple) and len(series) == 2:
        return len(series[1])
    return len(series)


def _evaluate(evaluator: Evaluator, series: Any, split: Split) -> float:
    try:
        loss = float(evaluator(series, split))
    except EvaluatorFailure:
        raise
    except Exception as exc:
        raise EvaluatorFailure(split.center, exc) from exc
    if not math.isfinite(loss):
        raise EvaluatorFailure(split.center, f"non-finite loss {loss!r}")
    return loss


def cv_hv(series: Any, cfg: SplitConfig, evaluator: Evaluator, *, workers: int = 1) -> CvResult:
    """Average the evaluator's loss over all ``n-2v`` hv-block splits.

    ``series`` is passed through to the evaluator untouched; its length (or
    the length of ``y`` for an ``(X, y)`` pair) must equal ``cfg.n``. With
    ``workers > 1`` splits are evaluated on a thread pool unless the
    evaluator has a true ``serial`` attribute. The mean is always summed in
    center order.
    """
    validate_config(cfg, "cv")
    if _series_length(series) != cfg.n:
        raise ValueError(f"series has length {_series_length(series)}, config says n = {cfg.n}")
    splits = list(hv_splits(cfg, "cv"))
    if workers > 1 and not getattr(evaluator, "serial", False):
        with ThreadPoolExecutor(max_workers=workers) as pool:
            losses = list(pool.map(lambda s: _evaluate(evaluator, series, s), splits))
    else:
        losses = [_evaluate(evaluator, series, s) for s in splits]
    total = 0.0
    for loss in losses:
        total += loss
    return CvResult(score=total / len(losses), per_split=tuple(losses), config=cfg)


def targets(series: Any) -> np.ndarray:
    """Response vector of a series: ``y`` for ``(X, y)``, else the series itself."""
    if isinstance(series, tuple) and len(series) == 2:
        return np.asarray(series[1])
    return np.asarray(series)


def squared_error(y_true: np.ndarray, y_pred: np.ndarray) -> float:
    """Mean squared error over the test block."""
    diff = np.asarray(y_true, dtype=float) - np.asarray(y_pred, dtype=float)
    return float(np.mean(diff * diff))


@dataclass(frozen=True)
class Candidate:
    """A model to score by CV.

    ``fit(series, train_idx)`` returns a fitted model and
    ``predict(model, series, test_idx)`` returns predictions for the test
    block. Index arrays are 0-based.
    """

    fit: Callable[[Any, np.ndarray], Any]
    predict: Callable[[Any, Any, np.ndarray], np.ndarray]
    n_params: int
    name: str = ""

    def evaluator(self, loss: Callable[[np.ndarray, np.ndarray], float] = squared_error) -> Evaluator:
        def evaluate(series: Any, split: Split) -> float:
            model = self.fit(series, split.train_idx)
            test = split.test_idx
            return loss(targets(series)[test], self.predict(model, series, test))

        return evaluate


def mean_candidate() -> Candidate:
    """Predict the training mean of the response."""
    return Candidate(
        fit=lambda series, train: float(np.mean(targets(series)[train])),
        predict=lambda model, series, test: np.full(len(test), model),
        n_params=1,
        name="mean",
    )


@dataclass(frozen=True)
class SelectionResult:
    chosen: int
    scores: tuple[float, ...]
    tie_broken: bool


def select_model(
    series: Any,
    cfg: SplitConfig,
    candidates: Sequence[Candidate],
    loss: Callable[[np.ndarray, np.ndarray], float] = squared_error,
    *,
    tie_rtol: float = 1e-9,
    tie_atol: float = 1e-12,
    workers: int = 1,
) -> SelectionResult:
    """Pick the candidate with the smallest hv-block CV score.

    Scores within ``tie_atol + tie_rtol * |best|`` of the minimum count as
    tied. Float round-off in exact-fit situations leaves residual scores of
    order 1e-30 that are not bitwise equal, hence the tolerance. Ties go to
    the candidate with fewer parameters, then the lower index.
    """
    if not candidates:
        raise ValueError("select_model needs at least one candidate")
    validate_config(cfg, "cv")
    scores = []
    for pos, cand in enumerate(candidates):
        try:
            scores.append(cv_hv(series, cfg, cand.evaluator(loss), workers=workers).score)
        except EvaluatorFailure as exc:
            raise EvaluatorFailure(exc.center, exc.cause, candidate=pos) from exc
    best = min(scores)
    tol = tie_atol + tie_rtol * abs(best)
    tied = [pos for pos, s in enumerate(scores) if s - best <= tol]
    chosen = min(tied, key=lambda pos: (candidates[pos].n_params, pos))
    return SelectionResult(chosen=chosen, scores=tuple(scores), tie_broken=len(tied) > 1)
