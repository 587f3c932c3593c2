"""Bayesian optimization of the four ensemble hyper-parameters.

Minimizes k-fold CV RMSE over {aggregation method, learning cycles, shrinkage
rate, min leaf size}. A seeded Halton design initializes the search; after
that a Gaussian-process surrogate (Matern 5/2 on normalized dims, one-hot
embedding for the categorical method) proposes the candidate with maximal
expected improvement from a seeded quasi-random pool.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .boosting import BoostConfig, BoostMethod, fit_ensemble
from .metrics import kfold_cv, rmse

_HALTON_BASES = (2, 3, 5, 7)
_GP_NOISE = 1e-8
_EI_POOL_SIZE = 1024


@dataclass(frozen=True)
class SearchSpace:
    """Ranges for the four tuned hyper-parameters.

    learn_rate is searched on a log scale. Degenerate ranges (lo == hi) pin a
    dimension. max_depth is not searched; it is applied to every candidate.
    """

    methods: tuple[BoostMethod, ...] = (BoostMethod.LSBOOST, BoostMethod.BAG)
    cycles: tuple[int, int] = (10, 600)
    learn_rate: tuple[float, float] = (1e-3, 0.3)
    min_leaf_size: tuple[int, int] = (1, 50)
    max_depth: int | None = 5

    def validate(self) -> None:
        if not self.methods:
            raise ValueError("methods must be non-empty")
        if self.cycles[0] > self.cycles[1] or self.cycles[0] < 1:
            raise ValueError("invalid cycles range")
        if self.learn_rate[0] > self.learn_rate[1] or self.learn_rate[0] <= 0:
            raise ValueError("learn_rate range must be positive (log-scaled)")
        if self.min_leaf_size[0] > self.min_leaf_size[1] or self.min_leaf_size[0] < 1:
            raise ValueError("invalid min_leaf_size range")


@dataclass(frozen=True)
class Trial:
    config: BoostConfig
    objective: float
    wall_time: float


@dataclass
class TrialLog:
    """Append-only record of evaluated configs, best-first queryable."""

    trials: list[Trial] = field(default_factory=list)

    def append(self, trial: Trial) -> None:
        self.trials.append(trial)

    @property
    def incumbent_index(self) -> int:
        if not self.trials:
            raise ValueError("empty trial log")
        objectives = [t.objective for t in self.trials]
        return int(np.argmin(objectives))

    @property
    def incumbent(self) -> Trial:
        return self.trials[self.incumbent_index]

    def incumbent_curve(self) -> list[float]:
        """Running minimum of the objective over the trial sequence."""
        out: list[float] = []
        best = math.inf
        for t in self.trials:
            best = min(best, t.objective)
            out.append(best)
        return out


# ---------------------------------------------------------------------------
# Seeded quasi-random sampling
# ---------------------------------------------------------------------------


def _radical_inverse(index: int, base: int) -> float:
    inv = 0.0
    denom = 1.0
    while index > 0:
        denom *= base
        index, digit = divmod(index, base)
        inv += digit / denom
    return inv


class _HaltonStream:
    """Halton sequence with a seeded Cranley-Patterson rotation per dimension."""

    def __init__(self, dims: int, seed: int) -> None:
        rng = np.random.default_rng(seed)
        self._shift = rng.random(dims)
        self._bases = _HALTON_BASES[:dims]
        self._index = 0

    def draw(self, count: int) -> np.ndarray:
        out = np.empty((count, len(self._bases)))
        for i in range(count):
            self._index += 1
            for d, base in enumerate(self._bases):
                out[i, d] = (_radical_inverse(self._index, base) + self._shift[d]) % 1.0
        return out


def _round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def _decode(u: np.ndarray, space: SearchSpace, seed: int) -> BoostConfig:
    """Map a unit-cube point to a config inside the space (ints rounded half-up)."""
    m = len(space.methods)
    method = space.methods[min(int(u[0] * m), m - 1)]
    lo_c, hi_c = space.cycles
    cycles = min(max(_round_half_up(lo_c + u[1] * (hi_c - lo_c)), lo_c), hi_c)
    lo_r, hi_r = space.learn_rate
    if hi_r > lo_r:
        learn_rate = math.exp(math.log(lo_r) + u[2] * (math.log(hi_r) - math.log(lo_r)))
    else:
        learn_rate = lo_r
    lo_l, hi_l = space.min_leaf_size
    min_leaf = min(max(_round_half_up(lo_l + u[3] * (hi_l - lo_l)), lo_l), hi_l)
    return BoostConfig(
        method=method,
        cycles=cycles,
        learn_rate=learn_rate,
        min_leaf_size=min_leaf,
        max_depth=space.max_depth,
        seed=seed,
    )


def _gp_features(config: BoostConfig, space: SearchSpace) -> np.ndarray:
    """Normalized surrogate input: one-hot method + scaled numeric dims."""

    def norm(v: float, lo: float, hi: float) -> float:
        return (v - lo) / (hi - lo) if hi > lo else 0.5

    onehot = [1.0 if m is config.method else 0.0 for m in space.methods]
    lo_r, hi_r = space.learn_rate
    return np.array(
        onehot
        + [
            norm(config.cycles, space.cycles[0], space.cycles[1]),
            norm(math.log(config.learn_rate), math.log(lo_r), math.log(hi_r))
            if hi_r > lo_r
            else 0.5,
            norm(config.min_leaf_size, space.min_leaf_size[0], space.min_leaf_size[1]),
        ]
    )


# ---------------------------------------------------------------------------
# Gaussian-process surrogate
# ---------------------------------------------------------------------------


def _matern52(sq_dists: np.ndarray, lengthscale: float) -> np.ndarray:
    r = np.sqrt(np.maximum(sq_dists, 0.0)) / lengthscale
    s5r = math.sqrt(5.0) * r
    return (1.0 + s5r + (5.0 / 3.0) * r * r) * np.exp(-s5r)


def _sq_dists(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return np.sum((A[:, None, :] - B[None, :, :]) ** 2, axis=2)


class _GaussianProcess:
    """Zero-mean GP on standardized targets with a Matern 5/2 kernel.

    Lengthscale and signal variance are chosen by marginal likelihood over a
    two-stage (coarse then refined) gradient-free search; the noise term is
    fixed at 1e-8 because the tuning objective is deterministic.
    """

    def __init__(self, X: np.ndarray, y: np.ndarray) -> None:
        self.X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        self._y_mean = float(np.mean(y))
        ystd = float(np.std(y))
        self._y_std = ystd if ystd > 0 else 1.0
        self._z = (y - self._y_mean) / self._y_std
        self._train_sq = _sq_dists(self.X, self.X)
        self.lengthscale, self.signal_var = self._fit_hyperparams()
        K = self.signal_var * _matern52(self._train_sq, self.lengthscale)
        K[np.diag_indices_from(K)] += _GP_NOISE
        self._chol = np.linalg.cholesky(K)
        self._alpha = np.linalg.solve(
            self._chol.T, np.linalg.solve(self._chol, self._z)
        )

    def _nll(self, lengthscale: float, signal_var: float) -> float:
        K = signal_var * _matern52(self._train_sq, lengthscale)
        K[np.diag_indices_from(K)] += _GP_NOISE
        try:
            chol = np.linalg.cholesky(K)
        except np.linalg.LinAlgError:
            return math.inf
        alpha = np.linalg.solve(chol.T, np.linalg.solve(chol, self._z))
        logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))
        return 0.5 * float(self._z @ alpha) + 0.5 * logdet

    def _fit_hyperparams(self) -> tuple[float, float]:
        coarse = np.geomspace(0.05, 4.0, 10)
        variances = (0.25, 1.0, 4.0)
        best = min(
            ((self._nll(ls, sv), ls, sv) for ls in coarse for sv in variances),
            key=lambda t: t[0],
        )
        _, ls0, sv0 = best
        refined = ls0 * np.geomspace(0.5, 2.0, 7)
        best = min(
            ((self._nll(ls, sv), ls, sv) for ls in refined for sv in variances),
            key=lambda t: t[0],
        )
        return best[1], best[2]

    def posterior(self, Xq: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and stddev at query points, on the original y scale."""
        Kq = self.signal_var * _matern52(_sq_dists(np.asarray(Xq, float), self.X), self.lengthscale)
        mean_z = Kq @ self._alpha
        v = np.linalg.solve(self._chol, Kq.T)
        var_z = self.signal_var * _matern52(np.zeros(len(Xq)), self.lengthscale) - np.sum(
            v * v, axis=0
        )
        sd = np.sqrt(np.maximum(var_z, 0.0)) * self._y_std
        return mean_z * self._y_std + self._y_mean, sd


def expected_improvement(mean: float, sd: float, best: float) -> float:
    """EI for minimization: (best-mean)*Phi(z) + sd*phi(z), z=(best-mean)/sd."""
    if sd < 0:
        raise ValueError("sd must be >= 0")
    if sd == 0.0:
        return max(best - mean, 0.0)
    z = (best - mean) / sd
    cdf = 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))
    pdf = math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    return max((best - mean) * cdf + sd * pdf, 0.0)


# ---------------------------------------------------------------------------
# Optimization loop
# ---------------------------------------------------------------------------


def default_n_init(budget: int) -> int:
    return max(5, budget // 10)


def optimize(
    objective: Callable[[BoostConfig], float],
    space: SearchSpace,
    budget: int,
    seed: int,
    n_init: int | None = None,
) -> TrialLog:
    """Sequential Bayesian optimization of a deterministic objective.

    The first n_init trials come from a seeded Halton design; each later trial
    maximizes expected improvement over a fresh pool of 1024 quasi-random
    candidates under the GP surrogate. A failing objective is logged as a
    trial with +inf objective and the search continues.
    """
    space.validate()
    if n_init is None:
        n_init = default_n_init(budget)
    if budget < n_init:
        raise ValueError(f"budget {budget} is below the initial design size {n_init}")

    stream = _HaltonStream(dims=4, seed=seed)
    log = TrialLog()

    def evaluate(config: BoostConfig) -> None:
        start = time.perf_counter()
        try:
            value = float(objective(config))
        except Exception:
            value = math.inf
        log.append(Trial(config=config, objective=value, wall_time=time.perf_counter() - start))

    for u in stream.draw(n_init):
        evaluate(_decode(u, space, seed))

    while len(log.trials) < budget:
        finite = [t for t in log.trials if math.isfinite(t.objective)]
        pool = stream.draw(_EI_POOL_SIZE)
        candidates = [_decode(u, space, seed) for u in pool]
        if not finite:
            evaluate(candidates[0])
            continue
        Phi = np.array([_gp_features(t.config, space) for t in finite])
        gp = _GaussianProcess(Phi, [t.objective for t in finite])
        best = min(t.objective for t in finite)
        Phi_cand = np.array([_gp_features(c, space) for c in candidates])
        means, sds = gp.posterior(Phi_cand)
        scores = np.array(
            [expected_improvement(m, s, best) for m, s in zip(means, sds)]
        )
        evaluate(candidates[int(np.argmax(scores))])

    return log


def tune_ensemble(
    X: np.ndarray,
    y: np.ndarray,
    space: SearchSpace | None = None,
    budget: int = 100,
    k: int = 5,
    seed: int = 0,
) -> tuple[BoostConfig, TrialLog]:
    """Locate the config minimizing k-fold CV RMSE; returns it with the full log."""
    space = space or SearchSpace()

    def cv_objective(config: BoostConfig) -> float:
        def fit(Xtr: np.ndarray, ytr: np.ndarray):
            model = fit_ensemble(Xtr, ytr, config)
            return model.predict_raw

        mean_score, _ = kfold_cv(X, y, k, fit, rmse, seed)
        return mean_score

    log = optimize(cv_objective, space, budget, seed)
    return log.incumbent.config, log
