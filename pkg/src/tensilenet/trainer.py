"""Levenberg-Marquardt training loop with accept/reject damping schedule,
seeded initialization and multi-restart selection."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from . import network
from .data import Scaler
from .network import MlpParams


@dataclass(frozen=True)
class LmConfig:
    mu0: float = 1e-3
    mu_inc: float = 10.0
    mu_dec: float = 0.1
    mu_max: float = 1e10
    max_epochs: int = 1000
    grad_tol: float = 1e-7
    seed: int = 0
    restarts: int = 1

    def __post_init__(self):
        if self.mu0 <= 0 or self.mu_max <= self.mu0:
            raise ValueError("require 0 < mu0 < mu_max")
        if not (self.mu_inc > 1.0 > self.mu_dec > 0.0):
            raise ValueError("require mu_inc > 1 > mu_dec > 0")
        if self.max_epochs < 1 or self.restarts < 1:
            raise ValueError("max_epochs and restarts must be >= 1")


@dataclass
class LmState:
    theta: np.ndarray
    mu: float
    epoch: int
    sse: float
    converged_reason: str = "none"  # none | grad_tol | max_epochs | mu_overflow


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    sse: float
    mu: float
    accepted: bool


@dataclass
class TrainHistory:
    records: list[EpochRecord] = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["epoch,sse,mu,accepted"]
        for r in self.records:
            lines.append(f"{r.epoch},{r.sse!r},{r.mu!r},{int(r.accepted)}")
        return "\n".join(lines) + "\n"


def init_params(h: int, seed: int) -> MlpParams:
    """Uniform [-0.5, 0.5] initialization from a seeded generator."""
    if h < 1:
        raise ValueError("hidden size must be >= 1")
    rng = np.random.default_rng(seed)
    theta = rng.uniform(-0.5, 0.5, network.param_count(h))
    return network.unflatten(theta, h)


def lm_delta(jac: np.ndarray, r: np.ndarray, mu: float) -> np.ndarray:
    """Solve (J^T J + mu I) delta = -J^T r by Cholesky factorization.

    jac is d residual / d theta, so -J^T r is the descent direction of the
    squared residual norm. Raises LinAlgError if the damped matrix is not SPD.
    """
    jtj = jac.T @ jac
    g = jac.T @ r
    a = jtj + mu * np.eye(jtj.shape[0])
    return cho_solve(cho_factor(a, lower=True), -g)


def _damped_iteration(residual_fn, state: LmState, jac: np.ndarray,
                      r: np.ndarray, cfg: LmConfig) -> LmState:
    """One accept/reject cycle: raise mu until a step reduces the SSE or mu
    overflows. jac and r must be evaluated at state.theta."""
    mu = state.mu
    while True:
        accepted = False
        try:
            delta = lm_delta(jac, r, mu)
            cand = state.theta + delta
            r_new = residual_fn(cand)
            sse_new = float(r_new @ r_new)
            accepted = np.isfinite(sse_new) and sse_new < state.sse
        except LinAlgError:
            accepted = False  # factorization failure: treat as rejection
        if accepted:
            return LmState(cand, mu * cfg.mu_dec, state.epoch + 1, sse_new)
        mu *= cfg.mu_inc
        if mu > cfg.mu_max:
            return LmState(state.theta, mu, state.epoch, state.sse, "mu_overflow")


def lm_step(state: LmState, x: np.ndarray, y: np.ndarray, cfg: LmConfig) -> LmState:
    """One LM epoch on an MLP state over a scaled dataset."""
    h = network.hidden_size_from_len(len(state.theta))

    def residual_fn(theta):
        return network.residuals(network.unflatten(theta, h), x, y)

    p = network.unflatten(state.theta, h)
    return _damped_iteration(residual_fn, state, network.jacobian(p, x),
                             network.residuals(p, x, y), cfg)


def lm_minimize(residual_fn, jacobian_fn, theta0: np.ndarray,
                cfg: LmConfig) -> tuple[np.ndarray, TrainHistory, LmState]:
    """Generic LM loop over residual/Jacobian callables; returns the best
    theta seen, the per-epoch history and the final state."""
    theta = np.asarray(theta0, dtype=float)
    r = residual_fn(theta)
    state = LmState(theta, cfg.mu0, 0, float(r @ r))
    history = TrainHistory()
    best_sse, best_theta = state.sse, state.theta

    while True:
        jac = jacobian_fn(state.theta)
        grad_inf = float(np.max(np.abs(jac.T @ r))) if jac.size else 0.0
        if grad_inf < cfg.grad_tol:
            state.converged_reason = "grad_tol"
            break
        if state.epoch >= cfg.max_epochs:
            state.converged_reason = "max_epochs"
            break
        new_state = _damped_iteration(residual_fn, state, jac, r, cfg)
        if new_state.converged_reason == "mu_overflow":
            state = new_state
            history.records.append(EpochRecord(state.epoch, state.sse, state.mu, False))
            break
        state = new_state
        r = residual_fn(state.theta)
        history.records.append(EpochRecord(state.epoch, state.sse, state.mu, True))
        if state.sse < best_sse:
            best_sse, best_theta = state.sse, state.theta

    return best_theta, history, state


def train(cfg: LmConfig, h: int, x: np.ndarray,
          y: np.ndarray) -> tuple[MlpParams, TrainHistory, LmState]:
    """Train a 2-h-2 net on a scaled dataset from a seeded initialization."""
    if np.asarray(x).size == 0:
        raise ValueError("empty training data")

    def residual_fn(theta):
        return network.residuals(network.unflatten(theta, h), x, y)

    def jacobian_fn(theta):
        return network.jacobian(network.unflatten(theta, h), x)

    theta0 = network.flatten(init_params(h, cfg.seed))
    best_theta, history, state = lm_minimize(residual_fn, jacobian_fn, theta0, cfg)
    return network.unflatten(best_theta, h), history, state


def physical_mse(p: MlpParams, scaler: Scaler, x: np.ndarray, y: np.ndarray) -> float:
    """MSE over all 2N output components after descaling to physical units."""
    err_scaled = (np.asarray(y).reshape(-1, 2) - forward_batch(p, x))
    err_phys = err_scaled * scaler.y_half_range
    return float(np.mean(err_phys ** 2))


def forward_batch(p: MlpParams, x: np.ndarray) -> np.ndarray:
    return network.forward(p, np.asarray(x, dtype=float).reshape(-1, 2))


@dataclass(frozen=True)
class RestartResult:
    seed: int
    train_mse: float
    epochs: int
    converged_reason: str


def train_best(cfg: LmConfig, h: int, x: np.ndarray, y: np.ndarray,
               scaler: Scaler) -> tuple[MlpParams, list[RestartResult]]:
    """Run cfg.restarts independent trainings with seeds seed, seed+1, ...
    and keep the one with the smallest training MSE in physical units.
    Ties break toward the lower seed."""
    best: MlpParams | None = None
    best_mse = np.inf
    summary: list[RestartResult] = []
    for k in range(cfg.restarts):
        run_cfg = replace(cfg, seed=cfg.seed + k)
        p, _, state = train(run_cfg, h, x, y)
        mse = physical_mse(p, scaler, x, y)
        summary.append(RestartResult(run_cfg.seed, mse, state.epoch, state.converged_reason))
        if mse < best_mse:
            best, best_mse = p, mse
    return best, summary
