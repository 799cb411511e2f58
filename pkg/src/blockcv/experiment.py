"""Monte-Carlo comparison of ungapped, h-block and hv-block CV.

Linear regression with AR(1) errors; each replication draws a fresh data set
and lets every CV method pick a subset of a fixed regressor dictionary.

The regressor dictionary is an intercept ``const`` plus four stationary
regressors ``x1..x4``, each an independent AR(1) with coefficient
``REGRESSOR_RHO`` and unit innovation scale, so regressors are serially
dependent too.

RNG contract: numpy ``default_rng`` (PCG64). Errors for a data set with seed
``s`` come from ``default_rng(s)``; regressor ``xj`` comes from
``gen_ar1(n, REGRESSOR_RHO, 1, [s, j])``. Replication ``j`` of an experiment with seed ``s``
uses data seed ``s + j``, so results do not depend on scheduling.
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np
from scipy.signal import lfilter

from .cv import Candidate, select_model
from .errors import BadParameters, RankDeficient
from .splitter import SplitConfig, validate_config

DICTIONARY = ("const", "x1", "x2", "x3", "x4")
REGRESSOR_RHO = 0.5


def gen_ar1(n: int, rho: float, sigma: float, seed: int | Sequence[int]) -> np.ndarray:
    """Stationary AR(1) series ``e[t] = rho e[t-1] + sigma z[t]``.

    ``e[0]`` is drawn from the stationary law N(0, sigma^2 / (1 - rho^2)).
    ``sigma = 0`` is allowed and gives all zeros.
    """
    if n < 1:
        raise BadParameters(f"n must be positive, got {n}")
    if not abs(rho) < 1:
        raise BadParameters(f"need |rho| < 1, got {rho}")
    if not sigma >= 0:
        raise BadParameters(f"need sigma >= 0, got {sigma}")
    z = np.random.default_rng(seed).standard_normal(n)
    shocks = sigma * z
    shocks[0] = z[0] * sigma / math.sqrt(1.0 - rho * rho)
    return lfilter([1.0], [1.0, -rho], shocks)


@dataclass(frozen=True)
class Dgp:
    n: int
    beta: tuple[float, ...]
    rho: float = 0.5
    sigma: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if len(self.beta) != len(DICTIONARY):
            raise BadParameters(f"beta needs {len(DICTIONARY)} entries ({', '.join(DICTIONARY)}), got {len(self.beta)}")
        if not abs(self.rho) < 1:
            raise BadParameters(f"need |rho| < 1, got {self.rho}")
        if not self.sigma >= 0:
            raise BadParameters(f"need sigma >= 0, got {self.sigma}")

    @property
    def true_subset(self) -> tuple[int, ...]:
        return tuple(j for j, b in enumerate(self.beta) if b != 0)


def regressors(n: int, seed: int) -> np.ndarray:
    cols = [np.ones(n)]
    cols.extend(gen_ar1(n, REGRESSOR_RHO, 1.0, [seed, j]) for j in range(1, len(DICTIONARY)))
    return np.column_stack(cols)


def gen_linear(dgp: Dgp) -> tuple[np.ndarray, np.ndarray]:
    X = regressors(dgp.n, dgp.seed)
    e = gen_ar1(dgp.n, dgp.rho, dgp.sigma, dgp.seed)
    return X, X @ np.asarray(dgp.beta, dtype=float) + e


def ols_fit(X: np.ndarray, y: np.ndarray, subset: Sequence[int] | None = None) -> np.ndarray:
    """Least-squares coefficients of ``y`` on the columns ``subset`` of ``X``."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if subset is not None:
        X = X[:, list(subset)]
    rows, cols = X.shape
    if rows < cols:
        raise RankDeficient(f"{rows} rows cannot determine {cols} coefficients")
    coef, _, rank, _ = np.linalg.lstsq(X, np.asarray(y, dtype=float), rcond=None)
    if rank < cols:
        raise RankDeficient(f"design has rank {rank} < {cols} columns")
    return coef


def ols_candidate(subset: Sequence[int], name: str = "") -> Candidate:
    """OLS on the dictionary columns ``subset`` of an ``(X, y)`` series."""
    cols = list(subset)

    def fit(series: tuple[np.ndarray, np.ndarray], train: np.ndarray) -> np.ndarray:
        X, y = series
        return ols_fit(X[train][:, cols], y[train])

    def predict(coef: np.ndarray, series: tuple[np.ndarray, np.ndarray], test: np.ndarray) -> np.ndarray:
        return series[0][test][:, cols] @ coef

    return Candidate(fit=fit, predict=predict, n_params=len(cols), name=name or subset_label(cols))


def subset_label(subset: Sequence[int]) -> str:
    return "+".join(DICTIONARY[j] for j in subset)


@dataclass(frozen=True)
class Method:
    name: str
    h: int
    v: int


def default_methods(n: int, h_fraction: float = 0.1, min_train: int = 1) -> tuple[Method, ...]:
    """Ungapped LOO, h-block and hv-block settings for length ``n``.

    h-block uses ``h = ceil(h_fraction * n)``. hv-block keeps that ``h`` and
    takes the largest ``v`` whose smallest training set, ``n-2v-1-2h``,
    still holds ``min_train`` samples (pass the largest candidate's
    parameter count so every split is fittable).
    """
    h = math.ceil(h_fraction * n)
    v = (n - 1 - 2 * h - max(1, min_train)) // 2
    if v < 0:
        raise BadParameters(f"no hv-block setting fits n = {n}, h = {h}, min_train = {min_train}")
    cfg = validate_config(SplitConfig(n=n, h=h, v=v), "cv")
    if cfg.n_v < cfg.min_train_size:
        raise BadParameters(f"hv-block v = {v} gives n_v/n_c < 1 for n = {n}, h = {h}")
    return (Method("ungapped", 0, 0), Method("h-block", h, 0), Method("hv-block", h, v))


@dataclass(frozen=True)
class ExperimentConfig:
    dgp: Dgp
    candidates: tuple[tuple[int, ...], ...]
    methods: tuple[Method, ...]
    replications: int = 200
    seed: int = 0

    @classmethod
    def default(cls, seed: int = 20191018) -> ExperimentConfig:
        n = 100
        candidates = ((0,), (0, 1), (0, 1, 2), (0, 1, 2, 3), (0, 1, 2, 3, 4))
        return cls(
            dgp=Dgp(n=n, beta=(1.0, 1.0, 1.0, 0.0, 0.0), rho=0.5, sigma=1.0),
            candidates=candidates,
            methods=default_methods(n, min_train=max(map(len, candidates))),
            replications=200,
            seed=seed,
        )

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> ExperimentConfig:
        """Build from a JSON-style mapping; missing keys fall back to :meth:`default`."""
        base = cls.default()
        dgp_d = d.get("dgp", {})
        dgp = Dgp(
            n=int(dgp_d.get("n", base.dgp.n)),
            beta=tuple(float(b) for b in dgp_d.get("beta", base.dgp.beta)),
            rho=float(dgp_d.get("rho", base.dgp.rho)),
            sigma=float(dgp_d.get("sigma", base.dgp.sigma)),
        )
        candidates = tuple(tuple(int(j) for j in c) for c in d.get("candidates", base.candidates))
        if "methods" in d:
            methods = tuple(Method(m["name"], int(m["h"]), int(m["v"])) for m in d["methods"])
        else:
            methods = default_methods(
                dgp.n, float(d.get("h_fraction", 0.1)), min_train=max(map(len, candidates))
            )
        return cls(
            dgp=dgp,
            candidates=candidates,
            methods=methods,
            replications=int(d.get("replications", base.replications)),
            seed=int(d.get("seed", base.seed)),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "dgp": {"n": self.dgp.n, "beta": list(self.dgp.beta), "rho": self.dgp.rho, "sigma": self.dgp.sigma},
            "candidates": [list(c) for c in self.candidates],
            "methods": [{"name": m.name, "h": m.h, "v": m.v} for m in self.methods],
            "replications": self.replications,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class FrequencyTable:
    methods: tuple[Method, ...]
    candidates: tuple[tuple[int, ...], ...]
    counts: dict[str, tuple[int, ...]]
    replications: int
    true_subset: tuple[int, ...] = field(default=())

    def frequency(self, method: str, candidate: int) -> float:
        return self.counts[method][candidate] / self.replications

    def true_frequency(self, method: str) -> float:
        return self.frequency(method, self.candidates.index(self.true_subset))

    def rows(self) -> list[tuple[str, str, int, float]]:
        return [
            (m.name, subset_label(c), self.counts[m.name][pos], self.counts[m.name][pos] / self.replications)
            for m in self.methods
            for pos, c in enumerate(self.candidates)
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["method", "candidate", "count", "frequency"])
        for method, label, count, freq in self.rows():
            writer.writerow([method, label, count, repr(freq)])
        return buf.getvalue()

    def to_dict(self) -> dict[str, Any]:
        return {
            "replications": self.replications,
            "true_subset": list(self.true_subset),
            "candidates": [list(c) for c in self.candidates],
            "methods": [
                {"name": m.name, "h": m.h, "v": m.v, "counts": list(self.counts[m.name])}
                for m in self.methods
            ],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> FrequencyTable:
        methods = tuple(Method(m["name"], int(m["h"]), int(m["v"])) for m in d["methods"])
        return cls(
            methods=methods,
            candidates=tuple(tuple(c) for c in d["candidates"]),
            counts={m["name"]: tuple(int(x) for x in m["counts"]) for m in d["methods"]},
            replications=int(d["replications"]),
            true_subset=tuple(d["true_subset"]),
        )


class ReplicationFailure(RuntimeError):
    def __init__(self, replication: int, cause: BaseException) -> None:
        self.replication = replication
        super().__init__(f"replication {replication} failed: {cause}")


def _replicate(config: ExperimentConfig, cands: list[Candidate], rep: int) -> list[int]:
    dgp = replace(config.dgp, seed=config.seed + rep)
    series = gen_linear(dgp)
    try:
        return [
            select_model(series, SplitConfig(n=dgp.n, h=m.h, v=m.v), cands).chosen
            for m in config.methods
        ]
    except Exception as exc:
        raise ReplicationFailure(rep, exc) from exc


def run_experiment(config: ExperimentConfig, *, workers: int = 1) -> FrequencyTable:
    """Tally which candidate each method selects over all replications."""
    if config.replications < 1:
        raise BadParameters("need at least one replication")
    true = config.dgp.true_subset
    if true not in config.candidates:
        raise BadParameters(f"true subset {true} is not among the candidates")
    if not any(set(c) > set(true) for c in config.candidates):
        raise BadParameters("candidates need at least one strict superset of the true subset")
    for m in config.methods:
        validate_config(SplitConfig(n=config.dgp.n, h=m.h, v=m.v), "cv")

    cands = [ols_candidate(c) for c in config.candidates]
    reps = range(config.replications)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            choices = list(pool.map(lambda j: _replicate(config, cands, j), reps))
    else:
        choices = [_replicate(config, cands, j) for j in reps]

    counts = {}
    for pos, m in enumerate(config.methods):
        tally = [0] * len(config.candidates)
        for chosen in choices:
            tally[chosen[pos]] += 1
        counts[m.name] = tuple(tally)
    return FrequencyTable(
        methods=config.methods,
        candidates=config.candidates,
        counts=counts,
        replications=config.replications,
        true_subset=true,
    )


__all__ = [
    "DICTIONARY",
    "Dgp",
    "ExperimentConfig",
    "FrequencyTable",
    "Method",
    "ReplicationFailure",
    "default_methods",
    "gen_ar1",
    "gen_linear",
    "ols_candidate",
    "ols_fit",
    "regressors",
    "run_experiment",
    "subset_label",
]
