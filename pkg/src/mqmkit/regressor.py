"""Feature-based multi-output quality regression.

A linear model is trained with mini-batch gradient descent on a mean
squared error objective (mean over examples, summed over output
components) plus an L2 penalty on the weights. Two head shapes exist:
``multi`` predicts the three dimension scores jointly, ``single`` predicts
one overall score. Training is deterministic given the seed.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError

from .features import FeatureExtractor, feature_names
from .rank_correlation import CorrelationResult, kendall_tau
from .taxonomy import MqmScore, TranslationUnit

__all__ = [
    "HEADS",
    "DegenerateFeatures",
    "RegressorConfig",
    "MqmRegressor",
    "TrainedModel",
    "EvalReport",
    "mse_l2_loss",
    "mse_l2_gradients",
    "train",
    "predict",
    "evaluate",
]

HEADS = ("multi", "single")
MODEL_FORMAT = "mqmkit-model"
MODEL_VERSION = 1

Target = Union[MqmScore, Sequence[float], float]


class DegenerateFeatures(UserWarning):
    """A zero-variance feature was dropped before standardization."""


def mse_l2_loss(
    weights: np.ndarray, bias: np.ndarray, X: np.ndarray, Y: np.ndarray, l2_weight: float
) -> float:
    """Mean (over examples) of the summed squared output errors, plus an L2
    penalty on the weight matrix (the bias is unregularized).

    Summing rather than averaging over output components keeps each output
    row's gradient independent of how many heads the model has.
    """
    errors = X @ weights.T + bias - Y
    return float(np.mean(np.sum(errors * errors, axis=1)) + l2_weight * np.sum(weights * weights))


def mse_l2_gradients(
    weights: np.ndarray, bias: np.ndarray, X: np.ndarray, Y: np.ndarray, l2_weight: float
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradients of :func:`mse_l2_loss` w.r.t. weights and bias."""
    batch = X.shape[0]
    errors = X @ weights.T + bias - Y
    grad_w = (2.0 / batch) * errors.T @ X + 2.0 * l2_weight * weights
    grad_b = (2.0 / batch) * errors.sum(axis=0)
    return grad_w, grad_b


@dataclass(frozen=True)
class RegressorConfig:
    mode: str = "qe"
    head: str = "multi"
    learning_rate: float = 1e-2
    epochs: int = 100
    batch_size: int = 8
    l2_weight: float = 1e-4
    seed: int = 0
    standardize_features: bool = True
    standardize_targets: bool = False

    def __post_init__(self) -> None:
        if self.head not in HEADS:
            raise ValueError(f"unknown head {self.head!r}; expected one of {HEADS}")
        if self.learning_rate <= 0 or self.epochs <= 0 or self.batch_size <= 0:
            raise ValueError("learning_rate, epochs and batch_size must be positive")

    @property
    def n_outputs(self) -> int:
        return 3 if self.head == "multi" else 1

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RegressorConfig":
        return cls(**data)


class MqmRegressor(BaseEstimator, RegressorMixin):
    """Linear multi-output regressor trained by mini-batch gradient descent.

    Operates on plain feature matrices; pair it with
    :class:`~mqmkit.features.FeatureExtractor` (or anything else producing
    arrays). ``passthrough_features`` indexes columns that are neither
    standardized nor dropped, used for designated constant components.

    Fitted attributes: ``coef_`` (outputs x kept features), ``intercept_``,
    ``keep_mask_``, ``feature_means_``, ``feature_scales_`` (in kept-column
    space) and ``loss_trace_`` (full-data loss after each epoch).
    """

    def __init__(
        self,
        head: str = "multi",
        learning_rate: float = 1e-2,
        epochs: int = 100,
        batch_size: int = 8,
        l2_weight: float = 1e-4,
        seed: int = 0,
        standardize: bool = True,
        standardize_targets: bool = False,
        passthrough_features: tuple = (),
    ):
        self.head = head
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.l2_weight = l2_weight
        self.seed = seed
        self.standardize = standardize
        self.standardize_targets = standardize_targets
        self.passthrough_features = passthrough_features

    def _as_targets(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64)
        if self.head == "single":
            if y.ndim == 2 and y.shape[1] == 1:
                y = y.ravel()
            if y.ndim != 1:
                raise ValueError(f"single head expects 1-d targets, got shape {y.shape}")
            return y.reshape(-1, 1)
        if y.ndim != 2 or y.shape[1] != 3:
            raise ValueError(f"multi head expects (n, 3) targets, got shape {y.shape}")
        return y

    def fit(self, X, y) -> "MqmRegressor":
        if self.head not in HEADS:
            raise ValueError(f"unknown head {self.head!r}; expected one of {HEADS}")
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValueError("X must be a non-empty 2-d array")
        if not np.all(np.isfinite(X)):
            raise ValueError("X contains non-finite values")
        Y = self._as_targets(y)
        if Y.shape[0] != X.shape[0]:
            raise ValueError(f"{X.shape[0]} rows of X but {Y.shape[0]} targets")
        n, d = X.shape

        passthrough = np.zeros(d, dtype=bool)
        for index in self.passthrough_features:
            passthrough[index] = True
        means = np.zeros(d)
        scales = np.ones(d)
        keep = np.ones(d, dtype=bool)
        if self.standardize:
            stds = X.std(axis=0)
            degenerate = (stds == 0.0) & ~passthrough
            if degenerate.any():
                dropped = np.flatnonzero(degenerate).tolist()
                warnings.warn(
                    f"dropping zero-variance feature columns {dropped}", DegenerateFeatures
                )
                keep = ~degenerate
            active = keep & ~passthrough
            means[active] = X[:, active].mean(axis=0)
            scales[active] = stds[active]
        if not keep.any():
            raise ValueError("all feature columns were dropped")

        self.keep_mask_ = keep
        self.feature_means_ = means[keep]
        self.feature_scales_ = scales[keep]
        Xk = (X[:, keep] - self.feature_means_) / self.feature_scales_

        self.target_means_ = np.zeros(Y.shape[1])
        self.target_scales_ = np.ones(Y.shape[1])
        if self.standardize_targets:
            self.target_means_ = Y.mean(axis=0)
            stds = Y.std(axis=0)
            self.target_scales_ = np.where(stds > 0, stds, 1.0)
        Yt = (Y - self.target_means_) / self.target_scales_

        k, dk = Y.shape[1], Xk.shape[1]
        weights = np.zeros((k, dk))
        bias = np.zeros(k)
        rng = np.random.RandomState(self.seed)
        trace = []
        for _ in range(self.epochs):
            order = rng.permutation(n)
            for start in range(0, n, self.batch_size):
                batch = order[start : start + self.batch_size]
                grad_w, grad_b = mse_l2_gradients(
                    weights, bias, Xk[batch], Yt[batch], self.l2_weight
                )
                weights -= self.learning_rate * grad_w
                bias -= self.learning_rate * grad_b
            trace.append(mse_l2_loss(weights, bias, Xk, Yt, self.l2_weight))

        self.coef_ = weights
        self.intercept_ = bias
        self.loss_trace_ = trace
        self.n_features_in_ = d
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "coef_"):
            raise NotFittedError("regressor is not fitted; call fit first")

    def predict(self, X) -> np.ndarray:
        """Affine map of standardized features. Raw regression output: no
        clamping, so negative predictions are possible."""
        self._check_fitted()
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected (n, {self.n_features_in_}) feature matrix, got {X.shape}"
            )
        Xk = (X[:, self.keep_mask_] - self.feature_means_) / self.feature_scales_
        Y = Xk @ self.coef_.T + self.intercept_
        Y = Y * self.target_scales_ + self.target_means_
        return Y.ravel() if self.head == "single" else Y


def as_target_vector(target: Target) -> np.ndarray:
    if isinstance(target, MqmScore):
        return np.asarray(target.as_vector(), dtype=np.float64)
    arr = np.asarray(target, dtype=np.float64)
    if arr.shape != (3,):
        raise ValueError(f"expected an MqmScore or 3-component target, got shape {arr.shape}")
    return arr


def as_target_scalar(target: Target) -> float:
    if isinstance(target, MqmScore):
        return float(target.total)
    arr = np.asarray(target, dtype=np.float64)
    if arr.ndim == 0:
        return float(arr)
    if arr.shape == (3,):
        return float(arr.sum())
    raise ValueError(f"cannot interpret target of shape {arr.shape} as a single score")


@dataclass
class TrainedModel:
    """A fitted regressor together with its feature configuration."""

    config: RegressorConfig
    feature_names: tuple[str, ...]
    estimator: MqmRegressor

    def predict_units(self, units: Sequence[TranslationUnit]) -> np.ndarray:
        X = FeatureExtractor(self.config.mode).transform(units)
        return self.estimator.predict(X)

    def predict_unit(self, unit: TranslationUnit) -> np.ndarray:
        return self.predict_units([unit])[0]

    def save(self, path: Union[str, Path]) -> None:
        est = self.estimator
        est._check_fitted()
        payload = {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "config": self.config.to_dict(),
            "feature_names": list(self.feature_names),
            "keep_mask": est.keep_mask_.astype(int).tolist(),
            "feature_means": est.feature_means_.tolist(),
            "feature_scales": est.feature_scales_.tolist(),
            "target_means": est.target_means_.tolist(),
            "target_scales": est.target_scales_.tolist(),
            "weights": est.coef_.tolist(),
            "bias": est.intercept_.tolist(),
            "loss_trace": est.loss_trace_,
        }
        Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "TrainedModel":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        if payload.get("format") != MODEL_FORMAT:
            raise ValueError(f"not a {MODEL_FORMAT} file: {path}")
        if payload.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version {payload.get('version')}")
        config = RegressorConfig.from_dict(payload["config"])
        est = MqmRegressor(
            head=config.head,
            learning_rate=config.learning_rate,
            epochs=config.epochs,
            batch_size=config.batch_size,
            l2_weight=config.l2_weight,
            seed=config.seed,
            standardize=config.standardize_features,
            standardize_targets=config.standardize_targets,
        )
        est.keep_mask_ = np.asarray(payload["keep_mask"], dtype=bool)
        est.feature_means_ = np.asarray(payload["feature_means"], dtype=np.float64)
        est.feature_scales_ = np.asarray(payload["feature_scales"], dtype=np.float64)
        est.target_means_ = np.asarray(payload["target_means"], dtype=np.float64)
        est.target_scales_ = np.asarray(payload["target_scales"], dtype=np.float64)
        est.coef_ = np.asarray(payload["weights"], dtype=np.float64)
        est.intercept_ = np.asarray(payload["bias"], dtype=np.float64)
        est.loss_trace_ = list(payload["loss_trace"])
        est.n_features_in_ = len(payload["keep_mask"])
        return cls(
            config=config,
            feature_names=tuple(payload["feature_names"]),
            estimator=est,
        )


def train(
    dataset: Sequence[tuple[TranslationUnit, Target]],
    cfg: RegressorConfig = RegressorConfig(),
) -> TrainedModel:
    """Fit a quality model on gold-scored units.

    Multi-head targets are the three dimension scores, single-head targets
    the total. The constant bias feature column is passed through
    standardization untouched.
    """
    if not dataset:
        raise ValueError("dataset is empty")
    units = [unit for unit, _ in dataset]
    names = feature_names(cfg.mode)
    X = FeatureExtractor(cfg.mode).fit(units).transform(units)
    if cfg.head == "multi":
        y = np.stack([as_target_vector(target) for _, target in dataset])
    else:
        y = np.asarray([as_target_scalar(target) for _, target in dataset])
    estimator = MqmRegressor(
        head=cfg.head,
        learning_rate=cfg.learning_rate,
        epochs=cfg.epochs,
        batch_size=cfg.batch_size,
        l2_weight=cfg.l2_weight,
        seed=cfg.seed,
        standardize=cfg.standardize_features,
        standardize_targets=cfg.standardize_targets,
        passthrough_features=(names.index("bias"),),
    )
    estimator.fit(X, y)
    return TrainedModel(config=cfg, feature_names=names, estimator=estimator)


def predict(model: TrainedModel, unit: TranslationUnit) -> np.ndarray:
    return model.predict_unit(unit)


@dataclass(frozen=True)
class EvalReport:
    """Rank correlations of model predictions against gold scores.

    For multi-head models the overall correlation is computed on the sum
    of the three predicted scores; for single-head models the scalar
    prediction is correlated against each gold dimension and the total.
    """

    taus: dict[str, CorrelationResult]
    variant: str
    n: int
    head: str
    mode: str
    predictions: tuple[tuple[float, ...], ...] = field(repr=False, default=())

    def tau_values(self) -> dict[str, float]:
        return {key: result.tau for key, result in self.taus.items()}

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "n": self.n,
            "head": self.head,
            "mode": self.mode,
            "taus": {key: result.to_dict() for key, result in self.taus.items()},
        }


def evaluate(
    model: TrainedModel,
    testset: Sequence[tuple[TranslationUnit, Target]],
    variant: str = "eq5",
) -> EvalReport:
    if len(testset) < 2:
        raise ValueError("need at least 2 test units")
    units = [unit for unit, _ in testset]
    gold = np.stack([as_target_vector(target) for _, target in testset])
    gold_total = gold.sum(axis=1)
    preds = model.predict_units(units)

    taus: dict[str, CorrelationResult] = {}
    dims = ("accuracy", "fluency", "style")
    if model.config.head == "multi":
        for i, dim in enumerate(dims):
            taus[dim] = kendall_tau(preds[:, i], gold[:, i], variant=variant)
        taus["overall"] = kendall_tau(preds.sum(axis=1), gold_total, variant=variant)
        rows = tuple(tuple(float(v) for v in row) for row in preds)
    else:
        for i, dim in enumerate(dims):
            taus[dim] = kendall_tau(preds, gold[:, i], variant=variant)
        taus["overall"] = kendall_tau(preds, gold_total, variant=variant)
        rows = tuple((float(v),) for v in preds)
    return EvalReport(
        taus=taus,
        variant=variant,
        n=len(testset),
        head=model.config.head,
        mode=model.config.mode,
        predictions=rows,
    )
