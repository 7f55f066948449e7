"""Single-hidden-layer perceptron trained by Levenberg-Marquardt.

Parameter layout: ``w_in`` is ``(l_w, l_x + 1)`` with the bias in column 0,
``w_out`` is ``(l_w + 1,)`` with the output bias at index 0.  The flattened
vector ``theta`` is ``w_in`` row-major followed by ``w_out``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg


class TrainingError(RuntimeError):
    pass


class SolveError(TrainingError):
    """The damped normal equations could not be solved."""

    def __init__(self, msg, mu, cond=None):
        super().__init__(f"{msg} (mu={mu:g}, cond={cond if cond is None else f'{cond:.3g}'})")
        self.mu = mu
        self.cond = cond


def n_params(l_x: int, l_w: int, l_y: int = 1) -> int:
    return (l_x + 1) * l_w + (l_w + 1) * l_y


@dataclass(frozen=True, eq=False)
class MlpParams:
    w_in: np.ndarray
    w_out: np.ndarray

    def __post_init__(self):
        w_in = np.array(self.w_in, dtype=float, ndmin=2)
        w_out = np.array(self.w_out, dtype=float).reshape(-1)
        if w_in.size == 0:
            w_in = w_in.reshape(0, max(w_in.shape[-1], 1))
        if len(w_out) != w_in.shape[0] + 1:
            raise ValueError(f"w_out needs {w_in.shape[0] + 1} entries, got {len(w_out)}")
        if not (np.all(np.isfinite(w_in)) and np.all(np.isfinite(w_out))):
            raise ValueError("parameters must be finite")
        w_in.setflags(write=False)
        w_out.setflags(write=False)
        object.__setattr__(self, "w_in", w_in)
        object.__setattr__(self, "w_out", w_out)

    @property
    def l_x(self) -> int:
        return self.w_in.shape[1] - 1

    @property
    def l_w(self) -> int:
        return self.w_in.shape[0]

    @property
    def theta(self) -> np.ndarray:
        return np.concatenate([self.w_in.ravel(), self.w_out])

    @classmethod
    def from_theta(cls, theta, l_x: int, l_w: int) -> "MlpParams":
        theta = np.asarray(theta, dtype=float)
        if theta.size != n_params(l_x, l_w):
            raise ValueError(f"theta has {theta.size} entries, expected {n_params(l_x, l_w)}")
        k = (l_x + 1) * l_w
        return cls(theta[:k].reshape(l_w, l_x + 1), theta[k:])

    @classmethod
    def initial(cls, l_x: int, l_w: int, seed) -> "MlpParams":
        rng = np.random.default_rng(seed)
        return cls.from_theta(rng.uniform(-0.5, 0.5, n_params(l_x, l_w)), l_x, l_w)


def _inputs(params: MlpParams, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != params.l_x:
        raise ValueError(f"input has {X.shape[1]} features, network expects {params.l_x}")
    return X


def _hidden(params: MlpParams, X: np.ndarray) -> np.ndarray:
    return np.tanh(X @ params.w_in[:, 1:].T + params.w_in[:, 0])


def forward(params: MlpParams, x):
    """Network output; a scalar for one input vector, an array for a matrix."""
    X = _inputs(params, x)
    y = params.w_out[0] + _hidden(params, X) @ params.w_out[1:]
    return float(y[0]) if np.ndim(x) == 1 else y


def cost(params: MlpParams, X, y_actual) -> float:
    """Half mean squared residual."""
    y_actual = np.asarray(y_actual, dtype=float)
    if y_actual.size == 0:
        raise ValueError("cost of an empty dataset")
    e = forward(params, np.atleast_2d(X)) - y_actual
    return float(e @ e) / (2 * len(e))


def jacobian(params: MlpParams, X) -> np.ndarray:
    """d(residual_l)/d(theta_j) for every sample l, shape ``(m, L_theta)``."""
    X = _inputs(params, X)
    m = len(X)
    H = _hidden(params, X)
    D = (1.0 - H * H) * params.w_out[1:]
    Xb = np.hstack([np.ones((m, 1)), X])
    J_in = (D[:, :, None] * Xb[:, None, :]).reshape(m, -1)
    return np.hstack([J_in, np.ones((m, 1)), H])


def _damped_solve(A: np.ndarray, g: np.ndarray, mu: float) -> np.ndarray | None:
    """Solve (A + mu I) d = g; None when the Cholesky factorization breaks down."""
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(g))):
        raise SolveError("non-finite normal equations", mu)
    M = A + mu * np.eye(len(A))
    try:
        c = scipy.linalg.cho_factor(M, check_finite=False)
    except np.linalg.LinAlgError:
        return None
    d = scipy.linalg.cho_solve(c, g, check_finite=False)
    if not np.all(np.isfinite(d)):
        return None
    return d


def lm_step(params: MlpParams, X, y_actual, mu: float) -> tuple[MlpParams, float]:
    """One damped Gauss-Newton update, theta - (L'L + mu I)^-1 L'e."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    X = _inputs(params, X)
    e = forward(params, X) - np.asarray(y_actual, dtype=float)
    L = jacobian(params, X)
    A = L.T @ L
    d = _damped_solve(A, L.T @ e, mu)
    if d is None:
        raise SolveError("damped system not positive definite", mu, np.linalg.cond(A + mu * np.eye(len(A))))
    new = MlpParams.from_theta(params.theta - d, params.l_x, params.l_w)
    return new, cost(new, X, y_actual)


class StopReason(str, Enum):
    EPOCH_LIMIT = "EpochLimit"
    PERFORMANCE_GOAL = "PerformanceGoal"
    MU_OVERFLOW = "MuOverflow"
    VALIDATION_FAILURES = "ValidationFailures"


@dataclass(frozen=True)
class TrainConfig:
    mu0: float = 0.01
    mu_increase: float = 10.0
    mu_decrease: float = 0.1
    mu_max: float = 1e10
    max_epochs: int = 1000
    max_validation_failures: int = 6
    seed: int = 0
    # raw-unit threshold on the learning sum of squared errors
    performance_goal: float = 0.0

    def __post_init__(self):
        if not 0 < self.mu0 < self.mu_max:
            raise ValueError("need 0 < mu0 < mu_max")
        if not self.mu_decrease < 1 < self.mu_increase:
            raise ValueError("need mu_decrease < 1 < mu_increase")
        if self.max_epochs < 0 or self.max_validation_failures < 1:
            raise ValueError("epoch and failure limits must be non-negative / positive")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class TrainResult:
    params: MlpParams
    epochs_run: int
    stop_reason: StopReason
    learn_cost: list = field(default_factory=list)
    validation_cost: list = field(default_factory=list)
    best_epoch: int = 0
    final_mu: float = 0.0

    @property
    def cost_history(self) -> list[tuple[float, float]]:
        return list(zip(self.learn_cost, self.validation_cost))


def train(X_learn, y_learn, X_val, y_val, cfg: TrainConfig, hidden: int, target_std: float = 1.0) -> TrainResult:
    """Batch Levenberg-Marquardt with validation early stopping.

    Inputs are expected to be normalized already.  ``target_std`` converts the
    normalized learning SSE back to raw units for the performance-goal check.
    Returns the parameters of the best validation epoch.
    """
    X_learn = np.asarray(X_learn, dtype=float)
    y_learn = np.asarray(y_learn, dtype=float)
    X_val = np.asarray(X_val, dtype=float)
    y_val = np.asarray(y_val, dtype=float)
    if len(X_learn) == 0 or len(X_val) == 0:
        raise ValueError("learning and validation sets must be non-empty")
    m = len(y_learn)
    params = MlpParams.initial(X_learn.shape[1], hidden, cfg.seed)
    theta = params.theta
    l_x, l_w = params.l_x, params.l_w

    e = forward(params, X_learn) - y_learn
    J = float(e @ e) / (2 * m)
    best_val = cost(params, X_val, y_val)
    best, best_epoch = params, 0
    mu = cfg.mu0
    fails = 0
    learn_hist, val_hist = [], []
    stop = StopReason.EPOCH_LIMIT
    raw_scale = target_std**2

    while len(learn_hist) < cfg.max_epochs:
        if not np.isfinite(J):
            stop = StopReason.MU_OVERFLOW
            break
        L = jacobian(params, X_learn)
        A = L.T @ L
        g = L.T @ e
        accepted = False
        while mu <= cfg.mu_max:
            d = _damped_solve(A, g, mu)
            if d is not None:
                cand = theta - d
                cand_params = MlpParams.from_theta(cand, l_x, l_w) if np.all(np.isfinite(cand)) else None
                if cand_params is not None:
                    e_new = forward(cand_params, X_learn) - y_learn
                    J_new = float(e_new @ e_new) / (2 * m)
                    if np.isfinite(J_new) and J_new < J:
                        theta, params, e, J = cand, cand_params, e_new, J_new
                        mu *= cfg.mu_decrease
                        accepted = True
                        break
            mu *= cfg.mu_increase
        if not accepted:
            stop = StopReason.MU_OVERFLOW
            break

        v = cost(params, X_val, y_val)
        learn_hist.append(J)
        val_hist.append(v)
        if v < best_val:
            best_val, best, best_epoch = v, params, len(learn_hist)
            fails = 0
        else:
            fails += 1
        if 2 * m * J * raw_scale <= cfg.performance_goal:
            stop = StopReason.PERFORMANCE_GOAL
            break
        if fails >= cfg.max_validation_failures:
            stop = StopReason.VALIDATION_FAILURES
            break
    return TrainResult(best, len(learn_hist), stop, learn_hist, val_hist, best_epoch, mu)
