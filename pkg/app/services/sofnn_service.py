# app/services/sofnn_service.py
import json
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import ValidationError
from scipy.linalg import lstsq, orth, svd
from scipy.special import logsumexp

from app.core.exceptions import DataError, ModelFileError, NumericalError
from app.core.manifest import dump_json
from app.models.sofnn_models import MODEL_FILE_VERSION, NeuronRecord, SofnnModelFile, SofnnParams, TrainingLog

logger = logging.getLogger(__name__)

WIDTH_FLOOR = 1e-6
REFIT_COND = 1e-8
RIDGE_GRID = np.logspace(-12, 2, 29)
INPUT_TOL = 1e-12


class RecursiveLeastSquares:
    """Online least squares with forgetting factor 1.0; the parameter vector can grow"""

    def __init__(self, n_params: int = 0, init: float = 1e4):
        self.init = init
        self.theta = np.zeros(n_params)
        self.P = np.eye(n_params) * init

    def grow(self, extra: int) -> None:
        n = len(self.theta)
        self.theta = np.concatenate([self.theta, np.zeros(extra)])
        P = np.eye(n + extra) * self.init
        P[:n, :n] = self.P
        self.P = P

    def reset(self, theta: np.ndarray) -> None:
        self.theta = np.array(theta, dtype=float)
        self.P = np.eye(len(self.theta)) * self.init

    def update(self, phi: np.ndarray, y: float) -> None:
        Pphi = self.P @ phi
        gain = Pphi / (1.0 + phi @ Pphi)
        self.theta = self.theta + gain * (y - phi @ self.theta)
        self.P = self.P - np.outer(gain, Pphi)


class SofnnModel:
    """Gaussian membership layer, product rules, normalisation and first-order TSK consequents.

    Consequents are stored per neuron as [bias, slope_1 .. slope_r] and flattened
    in neuron order for least squares.
    """

    def __init__(self, r: int, params: SofnnParams):
        self.r = r
        self.params = params.for_inputs(r)
        self.centers = np.zeros((0, r))
        self.widths = np.zeros((0, r))
        self.theta = np.zeros(0)

    @property
    def n_neurons(self) -> int:
        return self.centers.shape[0]

    def _check_inputs(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.r:
            raise DataError(f"model expects {self.r} inputs, got {X.shape[1]}")
        return X

    def normalized_firing(self, X) -> np.ndarray:
        """psi_j(x) for every row of X; rows sum to 1"""
        X = self._check_inputs(X)
        if self.n_neurons == 0:
            raise NumericalError("model has no neurons; train it first")
        diff = (X[:, None, :] - self.centers[None, :, :]) / self.widths[None, :, :]
        log_phi = -0.5 * np.sum(diff * diff, axis=2)
        return np.exp(log_phi - logsumexp(log_phi, axis=1, keepdims=True))

    def regressors(self, X) -> np.ndarray:
        X = self._check_inputs(X)
        psi = self.normalized_firing(X)
        augmented = np.column_stack([np.ones(len(X)), X])
        return (psi[:, :, None] * augmented[:, None, :]).reshape(len(X), -1)

    def predict_many(self, X) -> np.ndarray:
        return self.regressors(X) @ self.theta

    def predict(self, x: Sequence[float]) -> float:
        value = float(self.predict_many([x])[0])
        if not math.isfinite(value):
            raise NumericalError("model produced a non-finite prediction")
        return value

    def consequents(self) -> np.ndarray:
        return self.theta.reshape(self.n_neurons, self.r + 1)

    def add_neuron(self, x: np.ndarray) -> None:
        p = self.params
        if self.n_neurons == 0 or p.width_rule == "fixed":
            widths = np.full(self.r, p.sigma0)
        else:
            gaps = np.abs(self.centers - x)
            nearest = gaps.argmin(axis=0)
            distance = gaps[nearest, np.arange(self.r)]
            reused = self.widths[nearest, np.arange(self.r)]
            widths = np.where(distance > np.asarray(p.k_d), distance, reused)
            widths = np.maximum(widths, p.sigma0)
        self.centers = np.vstack([self.centers, x])
        self.widths = np.vstack([self.widths, np.maximum(widths, WIDTH_FLOOR)])
        self.theta = np.concatenate([self.theta, np.zeros(self.r + 1)])

    def covering_neuron(self, x: np.ndarray) -> Optional[int]:
        """Nearest neuron lying within k_d(i) of x on every input, if any"""
        if self.n_neurons == 0:
            return None
        gaps = np.abs(self.centers - x)
        inside = np.all(gaps <= np.asarray(self.params.k_d), axis=1)
        if not inside.any():
            return None
        distance = np.where(inside, np.sum(gaps * gaps, axis=1), np.inf)
        return int(distance.argmin())

    def nearest_neuron(self, x: np.ndarray) -> int:
        gaps = self.centers - x
        return int(np.sum(gaps * gaps, axis=1).argmin())

    def prune(self, X: np.ndarray) -> int:
        psi = self.normalized_firing(X)
        keep = psi.max(axis=0) >= self.params.prune_threshold
        removed = int(np.count_nonzero(~keep))
        if removed:
            self.centers = self.centers[keep]
            self.widths = self.widths[keep]
            self.theta = self.consequents()[keep].reshape(-1)
        return removed

    def refit(self, X: np.ndarray, y: np.ndarray) -> float:
        """Batch consequents on a fixed structure; returns the deviation penalty used.

        Normalized firing sums to one, so giving every neuron the same linear rule
        reproduces a global linear model. That shared rule is fitted without
        penalty; each neuron's deviation from it is ridge-shrunk with the penalty
        that minimises generalized cross-validation.
        """
        X = self._check_inputs(X)
        y = np.asarray(y, dtype=float)
        regressors = self.regressors(X)
        shared_design = np.column_stack([np.ones(len(X)), X])
        basis = orth(shared_design)
        local = regressors - basis @ (basis.T @ regressors)
        target = y - basis @ (basis.T @ y)

        U, s, Vt = svd(local, full_matrices=False)
        keep = s > REFIT_COND * max(regressors.shape) * max(np.abs(regressors).max(), 1.0)
        penalty = 0.0
        deviation = np.zeros(regressors.shape[1])
        if keep.any():
            U, s, Vt = U[:, keep], s[keep], Vt[keep]
            projected = U.T @ target
            unexplained = max(float(target @ target - projected @ projected), 0.0)
            n, df_shared = len(y), basis.shape[1]
            candidates = s[0] ** 2 * RIDGE_GRID
            penalty = float(candidates[0])
            best = math.inf
            for candidate in candidates:
                shrink = s * s / (s * s + candidate)
                dof = n - df_shared - shrink.sum()
                if dof <= 0:
                    continue
                rss = unexplained + float(np.sum(((1.0 - shrink) * projected) ** 2))
                score = n * rss / (dof * dof)
                if score < best:
                    best, penalty = score, float(candidate)
            deviation = Vt.T @ (s / (s * s + penalty) * projected)

        shared, _, _, _ = lstsq(shared_design, y - regressors @ deviation, cond=REFIT_COND)
        self.theta = deviation + np.tile(shared, self.n_neurons)
        return penalty


def _validate_samples(X, y) -> Tuple[np.ndarray, np.ndarray]:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).reshape(-1)
    if len(y) == 0:
        raise DataError("cannot train on an empty sample set")
    if X.shape[0] != len(y):
        raise DataError(f"{X.shape[0]} input rows but {len(y)} targets")
    if not np.all(np.isfinite(y)):
        raise NumericalError("training targets must be finite")
    if not np.all(np.isfinite(X)) or X.min() < -INPUT_TOL or X.max() > 1.0 + INPUT_TOL:
        raise DataError("training inputs must be finite and scaled to [0, 1]")
    return X, y


def train(X, y, params: SofnnParams) -> Tuple[SofnnModel, TrainingLog]:
    """Grow, widen and prune rule neurons over ordered passes through the samples.

    Consequents follow recursive least squares during a pass. Afterwards they are
    refitted in batch when params.batch_refit is set or a neuron was pruned;
    otherwise the online estimate is kept.
    """
    X, y = _validate_samples(X, y)
    model = SofnnModel(X.shape[1], params)
    p = model.params
    cap = p.max_neurons(len(y), model.r)
    rls = RecursiveLeastSquares(init=p.rls_init)
    log = TrainingLog()
    squared = 0.0
    seen = 0

    for epoch in range(p.epochs):
        additions = widenings = capped = 0
        for x, target in zip(X, y):
            if model.n_neurons == 0:
                error = abs(target)
                model.add_neuron(x)
                rls.grow(model.r + 1)
                additions += 1
            else:
                error = abs(target - float(model.regressors(x[None, :])[0] @ rls.theta))
                if error > p.delta:
                    covering = model.covering_neuron(x)
                    if covering is None and (cap is None or model.n_neurons < cap):
                        model.add_neuron(x)
                        rls.grow(model.r + 1)
                        additions += 1
                    else:
                        if covering is None:
                            covering = model.nearest_neuron(x)
                            capped += 1
                        model.widths[covering] *= p.widen_factor
                        widenings += 1
            rls.update(model.regressors(x[None, :])[0], target)
            squared += error * error
            seen += 1
            log.rmse_so_far.append(math.sqrt(squared / seen))
            log.neuron_counts.append(model.n_neurons)

        model.theta = rls.theta
        pruned = model.prune(X)
        penalty = None
        if p.batch_refit or pruned:
            penalty = model.refit(X, y)
            rls.reset(model.theta)

        residual = y - model.predict_many(X)
        rmse = float(np.sqrt(np.mean(residual * residual)))
        log.additions.append(additions)
        log.widenings.append(widenings)
        log.pruned.append(pruned)
        log.capped.append(capped)
        log.ridge_penalty.append(penalty)
        log.epoch_rmse.append(rmse)
        log.epochs_run = epoch + 1
        log.final_rmse = rmse
        logger.info(f"🧠 Epoch {epoch + 1}: {model.n_neurons} neurons (+{additions}, -{pruned}, "
                    f"{widenings} widened), training RMSE {rmse:.4f}")
        if capped:
            logger.info(f"ℹ️ Neuron cap {cap} reached; {capped} uncovered sample(s) widened the nearest neuron")
        if rmse <= p.k_rmse:
            break

    if log.final_rmse > p.k_rmse:
        logger.warning(f"⚠️ Training RMSE {log.final_rmse:.4f} above k_rmse={p.k_rmse}")
    return model, log


def to_model_file(model: SofnnModel) -> SofnnModelFile:
    return SofnnModelFile(
        version=MODEL_FILE_VERSION,
        r=model.r,
        neurons=[NeuronRecord(centers=c.tolist(), widths=w.tolist()) for c, w in zip(model.centers, model.widths)],
        consequents=model.consequents().tolist(),
        params=model.params,
    )


def from_model_file(record: SofnnModelFile) -> SofnnModel:
    if record.version != MODEL_FILE_VERSION:
        raise ModelFileError(f"model file version {record.version} is not supported (expected {MODEL_FILE_VERSION})")
    if len(record.consequents) != len(record.neurons):
        raise ModelFileError(f"{len(record.neurons)} neurons but {len(record.consequents)} consequent rows")
    for neuron, row in zip(record.neurons, record.consequents):
        if len(neuron.centers) != record.r or len(neuron.widths) != record.r or len(row) != record.r + 1:
            raise ModelFileError(f"neuron dimensions do not match r={record.r}")
        if min(neuron.widths, default=1.0) < WIDTH_FLOOR:
            raise ModelFileError("neuron widths must be at least 1e-6")
    model = SofnnModel(record.r, record.params)
    model.centers = np.array([n.centers for n in record.neurons], dtype=float).reshape(-1, record.r)
    model.widths = np.array([n.widths for n in record.neurons], dtype=float).reshape(-1, record.r)
    model.theta = np.array(record.consequents, dtype=float).reshape(-1)
    return model


def save_model(model: SofnnModel, path: str) -> None:
    dump_json(to_model_file(model).model_dump(), path)
    logger.info(f"💾 Model with {model.n_neurons} neurons saved to {path}")


def load_model(path: str) -> SofnnModel:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            record = SofnnModelFile.model_validate(json.load(handle))
    except OSError as e:
        raise ModelFileError(f"Cannot read model file {path}: {e}")
    except json.JSONDecodeError as e:
        raise ModelFileError(f"Model file {path} is corrupt: {e.msg}")
    except ValidationError as e:
        raise ModelFileError(f"Model file {path} is corrupt: {e.errors()[0]['msg']}")
    return from_model_file(record)


def sample_arrays(samples: List[Tuple[Sequence[float], float]]) -> Tuple[np.ndarray, np.ndarray]:
    """Split (x, y) pairs into an input matrix and a target vector"""
    if not samples:
        raise DataError("cannot train on an empty sample set")
    return np.array([x for x, _ in samples], dtype=float), np.array([y for _, y in samples], dtype=float)
