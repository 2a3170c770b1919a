"""Batch Levenberg-Marquardt and plain gradient descent on the MSE.

Both optimizers work on any least-squares problem given as a residual
callable and a Jacobian callable over a flat parameter vector; ``train``
and ``train_gd`` bind them to an :class:`~phnet.network.MlpNetwork`.
"""

import enum
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .exceptions import ConfigError, EmptyDataset, EmptyInput, NotPositiveDefinite, ShapeError
from .linalg import solve_spd
from .network import forward, jacobian


class Termination(str, enum.Enum):
    GOAL_REACHED = "goal_reached"
    MAX_EPOCHS = "max_epochs"
    GRADIENT_VANISHED = "gradient_vanished"
    LAMBDA_EXCEEDED = "lambda_exceeded"
    DIVERGED = "diverged"  # gradient descent only: MSE became non-finite


ALGORITHMS = ("levenberg_marquardt", "gradient_descent")


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 200
    mse_goal: float = 0.0025
    lambda_init: float = 1e-3
    lambda_up: float = 10.0
    lambda_down: float = 0.1
    lambda_max: float = 1e10
    min_grad_norm: float = 1e-10
    seed: int = 0
    algorithm: str = "levenberg_marquardt"
    learning_rate: float = 0.01

    def __post_init__(self):
        if int(self.max_epochs) != self.max_epochs or self.max_epochs < 1:
            raise ConfigError("max_epochs must be a positive integer")
        if not self.mse_goal > 0:
            raise ConfigError("mse_goal must be > 0")
        if not self.lambda_init > 0:
            raise ConfigError("lambda_init must be > 0")
        if not self.lambda_up > 1:
            raise ConfigError("lambda_up must be > 1")
        if not 0 < self.lambda_down < 1:
            raise ConfigError("lambda_down must lie in (0, 1)")
        if not self.lambda_max > self.lambda_init:
            raise ConfigError("lambda_max must exceed lambda_init")
        if self.min_grad_norm < 0:
            raise ConfigError("min_grad_norm must be >= 0")
        if self.learning_rate < 0:
            raise ConfigError("learning_rate must be >= 0")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_mapping(cls, mapping):
        """Build a config from string or typed values; unknown keys are errors."""
        types = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, value in mapping.items():
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                if types[key] in (int, "int"):
                    kwargs[key] = int(value)
                elif types[key] in (float, "float"):
                    kwargs[key] = float(value)
                else:
                    kwargs[key] = str(value)
            except ValueError:
                raise ConfigError(f"bad value for {key}: {value!r}") from None
        return cls(**kwargs)


def read_key_values(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


@dataclass(frozen=True)
class TrainReport:
    epochs_run: int
    final_train_mse: float
    final_lambda: float
    termination: Termination
    mse_trace: tuple
    seed: int
    config: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        d["termination"] = self.termination.value
        d["mse_trace"] = list(self.mse_trace)
        return d


def mse(predicted, observed):
    p = np.asarray(predicted, dtype=np.float64).ravel()
    o = np.asarray(observed, dtype=np.float64).ravel()
    if p.shape != o.shape:
        raise ShapeError(f"length mismatch: {p.size} predicted vs {o.size} observed")
    if p.size == 0:
        raise EmptyInput("mse of empty series")
    return float(np.mean((p - o) ** 2))


def damped_step(J, r, lam):
    """Solve ``(J'J + lam I) delta = -J'r``."""
    if not lam > 0:
        raise ValueError("damping must be > 0")
    J = np.asarray(J, dtype=np.float64)
    A = J.T @ J
    A[np.diag_indices_from(A)] += lam
    return solve_spd(A, -(J.T @ np.asarray(r, dtype=np.float64)))


def _flat_targets(net, y):
    y = np.asarray(y, dtype=np.float64)
    if y.ndim == 1 and net.n_out == 1:
        y = y[:, None]
    if y.ndim != 2 or y.shape[1] != net.n_out:
        raise ShapeError(f"targets of shape {y.shape} do not match {net.n_out} outputs")
    return y.ravel()


def _network_problem(net, X, y):
    X = np.asarray(X, dtype=np.float64)
    t = _flat_targets(net, y)
    if X.shape[0] == 0:
        raise EmptyDataset("training set is empty")
    if t.size != X.shape[0] * net.n_out:
        raise ShapeError(f"{X.shape[0]} inputs but {t.size // net.n_out} targets")

    def residual(p):
        return forward(net.with_params(p), X).ravel() - t

    def jac(p):
        return jacobian(net.with_params(p), X)

    return residual, jac


def lm_step(net, X, y, lam):
    """One damped Gauss-Newton proposal for ``net`` on (X, y).

    Returns the candidate parameter vector and the residuals the linearized
    model predicts for it, ``r + J delta``.
    """
    residual, jac = _network_problem(net, X, y)
    p = net.pack()
    r = residual(p)
    J = jac(p)
    delta = damped_step(J, r, lam)
    return p + delta, r + J @ delta


def minimize_lm(residual, jac, p0, cfg):
    """Levenberg-Marquardt on ``mean(residual(p)**2)``.

    A candidate is accepted only if it strictly lowers the MSE; then the
    damping shrinks by ``lambda_down``. Otherwise (including an indefinite
    system) the damping grows by ``lambda_up`` and the epoch is retried.
    """
    p = np.array(p0, dtype=np.float64)
    r = residual(p)
    cur = float(np.mean(r * r))
    lam = cfg.lambda_init
    trace = [cur]
    termination = Termination.MAX_EPOCHS
    epochs = 0
    if cur <= cfg.mse_goal:
        termination = Termination.GOAL_REACHED
    else:
        for epoch in range(1, cfg.max_epochs + 1):
            J = jac(p)
            g = J.T @ r
            if np.linalg.norm(g) < cfg.min_grad_norm:
                termination = Termination.GRADIENT_VANISHED
                break
            A = J.T @ J
            diag = np.diag_indices_from(A)
            base_diag = A[diag].copy()
            accepted = False
            while lam <= cfg.lambda_max:
                A[diag] = base_diag + lam
                try:
                    delta = solve_spd(A, -g)
                except NotPositiveDefinite:
                    delta = None
                if delta is not None:
                    cand = p + delta
                    r_new = residual(cand)
                    new = float(np.mean(r_new * r_new))
                    if new < cur:
                        p, r, cur = cand, r_new, new
                        lam *= cfg.lambda_down
                        accepted = True
                        break
                lam *= cfg.lambda_up
            if not accepted:
                termination = Termination.LAMBDA_EXCEEDED
                break
            epochs = epoch
            trace.append(cur)
            if cur <= cfg.mse_goal:
                termination = Termination.GOAL_REACHED
                break
    report = TrainReport(
        epochs_run=epochs,
        final_train_mse=cur,
        final_lambda=lam,
        termination=termination,
        mse_trace=tuple(trace),
        seed=cfg.seed,
        config=cfg.to_dict(),
    )
    return p, report


def minimize_gd(residual, jac, p0, cfg):
    """Full-batch gradient descent with a fixed learning rate."""
    p = np.array(p0, dtype=np.float64)
    r = residual(p)
    cur = float(np.mean(r * r))
    trace = [cur]
    termination = Termination.MAX_EPOCHS
    epochs = 0
    if cur <= cfg.mse_goal:
        termination = Termination.GOAL_REACHED
    else:
        for epoch in range(1, cfg.max_epochs + 1):
            g = jac(p).T @ r
            if np.linalg.norm(g) < cfg.min_grad_norm:
                termination = Termination.GRADIENT_VANISHED
                break
            p = p - cfg.learning_rate * (2.0 / r.size) * g
            with np.errstate(over="ignore", invalid="ignore"):
                r = residual(p)
                cur = float(np.mean(r * r))
            epochs = epoch
            trace.append(cur)
            if not math.isfinite(cur):
                termination = Termination.DIVERGED
                break
            if cur <= cfg.mse_goal:
                termination = Termination.GOAL_REACHED
                break
    report = TrainReport(
        epochs_run=epochs,
        final_train_mse=cur,
        final_lambda=None,
        termination=termination,
        mse_trace=tuple(trace),
        seed=cfg.seed,
        config=cfg.to_dict(),
    )
    return p, report


def train(net, X, y, cfg=None):
    """Fit ``net`` to normalized inputs ``X`` and targets ``y``.

    Dispatches on ``cfg.algorithm``. Returns the trained network and its
    :class:`TrainReport`; the input network is left untouched.
    """
    cfg = cfg or TrainConfig()
    residual, jac = _network_problem(net, X, y)
    solver = minimize_lm if cfg.algorithm == "levenberg_marquardt" else minimize_gd
    p, report = solver(residual, jac, net.pack(), cfg)
    return net.with_params(p), report


def train_gd(net, X, y, cfg=None):
    cfg = cfg or TrainConfig(algorithm="gradient_descent")
    residual, jac = _network_problem(net, X, y)
    p, report = minimize_gd(residual, jac, net.pack(), cfg)
    return net.with_params(p), report


def write_trace_csv(report, path):
    lines = ["epoch,mse"] + [f"{i},{m!r}" for i, m in enumerate(report.mse_trace)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
