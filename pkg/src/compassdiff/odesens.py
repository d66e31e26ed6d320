"""Subgradients of two-parameter ODE cost functions via directional sensitivities.

For a parametric system dx/dt = f(x), x(0) = x0(p) with locally Lipschitz,
directionally differentiable f, the directional derivative of the solution
along a parameter direction d solves the tangent system

    dy/dt = f'(x(t); y),    y(0) = x0'(p; d),

integrated here together with the state.  With a cost phi(p) = g(p, x(T)),
the map psi(d) = g'((p, x(T)); (d, y(T, d))) is the directional derivative of
phi, and the compass difference of psi (four integrations) is a guaranteed
subgradient of phi for p in the plane.

Integrator: an explicit Dormand-Prince 5(4) embedded pair with PI step-size
control, written here to keep runs dependency-free and deterministic.  No
event detection is attempted: the tangent right-hand side is only Lipschitz
in y, and adaptive step control absorbs the kink crossings at desk scale.
The default tolerances (1e-8 absolute and relative) are deliberately tight
so compass differences inherit roughly six accurate digits.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import expr as ex
from .compass import compass_from_psi
from .oracle import CompassResult, DirectionalOracle, VectorOracle


class IntegrationError(RuntimeError):
    """Adaptive integration failed; carries the failure time and, when the
    failure happened inside a directional probe, the parameter direction."""

    def __init__(self, message: str, time: float, direction=None):
        super().__init__(message)
        self.time = time
        self.direction = None if direction is None else np.asarray(direction, dtype=float)


@dataclass(frozen=True)
class IntegrationConfig:
    abs_tol: float = 1e-8
    rel_tol: float = 1e-8
    max_steps: int = 100_000
    min_step: float = 1e-13
    initial_step: Optional[float] = None  # None: choose automatically

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if self.min_step <= 0:
            raise ValueError("min_step must be positive")
        if self.initial_step is not None and self.initial_step <= 0:
            raise ValueError("initial_step must be positive")


@dataclass(frozen=True)
class OdeProblem:
    """Right-hand side, initial-condition map, cost, and horizon.

    ``rhs`` acts on R^n_state; ``init`` maps the two parameters to the initial
    state (with its directional derivative); ``cost`` acts on the
    concatenated (p, x(T)) vector of dimension 2 + n_state.  All three must be
    locally Lipschitz and directionally differentiable, and the state ODE is
    assumed to have unique solutions (not checkable at runtime for black-box
    oracles).
    """

    n_state: int
    rhs: VectorOracle
    init: VectorOracle
    cost: DirectionalOracle
    t_final: float

    def __post_init__(self):
        if self.t_final <= 0:
            raise ValueError("t_final must be positive")
        if self.rhs.dim_in != self.n_state or self.rhs.dim_out != self.n_state:
            raise ValueError("rhs oracle dimensions do not match n_state")
        if self.init.dim_in != 2 or self.init.dim_out != self.n_state:
            raise ValueError("init map must send R^2 to R^n_state")
        if self.cost.dim != 2 + self.n_state:
            raise ValueError("cost oracle must act on (p, x), dimension 2 + n_state")


@dataclass(frozen=True)
class StepStats:
    accepted: int
    rejected: int
    rhs_evals: int


@dataclass(frozen=True)
class SensitivityTrajectory:
    """Accepted-step record of one coupled state/tangent integration."""

    times: np.ndarray
    states: np.ndarray          # (len(times), n_state)
    sensitivities: np.ndarray   # (len(times), n_state)
    direction: np.ndarray
    stats: StepStats

    def to_csv(self) -> str:
        n = self.states.shape[1]
        header = ["t"] + [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(n)]
        lines = [",".join(header)]
        for k in range(self.times.size):
            row = [self.times[k], *self.states[k], *self.sensitivities[k]]
            lines.append(",".join(format(v, ".17g") for v in row))
        return "\n".join(lines) + "\n"


# Dormand-Prince 5(4) tableau.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
# b5 - b4: coefficients of the embedded error estimate
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_ORDER = 5.0


def _error_norm(err: np.ndarray, z_old: np.ndarray, z_new: np.ndarray, cfg: IntegrationConfig) -> float:
    scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(z_old), np.abs(z_new))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _initial_step(fun, t_final: float, z0: np.ndarray, f0: np.ndarray, cfg: IntegrationConfig) -> float:
    # standard two-evaluation heuristic, with a defensive fallback when the
    # problem starts at an equilibrium (f0 == 0)
    scale = cfg.abs_tol + cfg.rel_tol * np.abs(z0)
    d0 = float(np.sqrt(np.mean((z0 / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((f0 / scale) ** 2)))
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    h0 = min(h0, t_final)
    z1 = z0 + h0 * f0
    f1 = fun(z1)
    d2 = float(np.sqrt(np.mean(((f1 - f0) / scale) ** 2))) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / _ORDER)
    return min(100.0 * h0, h1, t_final)


def _dopri5(fun, z0: np.ndarray, t_final: float, cfg: IntegrationConfig,
            direction=None) -> tuple[list[float], list[np.ndarray], StepStats]:
    """Integrate dz/dt = fun(z) from 0 to t_final, recording accepted steps."""
    t = 0.0
    z = np.asarray(z0, dtype=float).copy()
    times = [0.0]
    states = [z.copy()]
    f0 = np.asarray(fun(z), dtype=float)
    evals = 1
    if cfg.initial_step is not None:
        h = min(cfg.initial_step, t_final)
    else:
        h = _initial_step(fun, t_final, z, f0, cfg)
        evals += 1
    accepted = 0
    rejected = 0
    err_prev = 1.0
    k = [np.zeros_like(z) for _ in range(7)]
    while t < t_final:
        if accepted + rejected >= cfg.max_steps:
            raise IntegrationError(
                f"step limit {cfg.max_steps} exceeded at t = {t:.6g}", time=t, direction=direction)
        last = h >= t_final - t
        if last:
            h = t_final - t
        if h < cfg.min_step:
            raise IntegrationError(
                f"step size underflow ({h:.3e}) at t = {t:.6g}", time=t, direction=direction)
        k[0] = np.asarray(fun(z), dtype=float)
        for s in range(1, 7):
            zs = z + h * sum(_A[s][j] * k[j] for j in range(s))
            k[s] = np.asarray(fun(zs), dtype=float)
        evals += 7
        z_new = z + h * sum(_B5[j] * k[j] for j in range(7))
        err_vec = h * sum(_E[j] * k[j] for j in range(7))
        err = _error_norm(err_vec, z, z_new, cfg)
        if not math.isfinite(err):
            raise IntegrationError(f"non-finite state at t = {t:.6g}", time=t, direction=direction)
        if err <= 1.0:
            # land exactly on t_final: t + (t_final - t) can round past it
            t = t_final if last else t + h
            z = z_new
            times.append(t)
            states.append(z.copy())
            accepted += 1
            # PI controller (error exponent 0.7/p, history exponent 0.4/p)
            factor = _SAFETY * (max(err, 1e-16) ** (-0.7 / _ORDER)) * (max(err_prev, 1e-16) ** (0.4 / _ORDER))
            h *= min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
            err_prev = max(err, 1e-16)
        else:
            rejected += 1
            h *= max(0.1, _SAFETY * err ** (-1.0 / _ORDER))
    return times, states, StepStats(accepted=accepted, rejected=rejected, rhs_evals=evals)


def integrate_state(problem: OdeProblem, p, config: IntegrationConfig = IntegrationConfig()):
    """Integrate the state system alone; returns (times, states, stats)."""
    p = np.asarray(p, dtype=float)
    x0 = np.asarray(problem.init.value(p), dtype=float)
    times, states, stats = _dopri5(problem.rhs.value, x0, problem.t_final, config)
    return np.array(times), np.array(states), stats


def integrate_coupled(problem: OdeProblem, p, d,
                      config: IntegrationConfig = IntegrationConfig()) -> SensitivityTrajectory:
    """Integrate state and directional sensitivity together along direction ``d``."""
    p = np.asarray(p, dtype=float)
    d = np.asarray(d, dtype=float)
    if p.size != 2 or d.size != 2:
        raise ValueError("the parameter space is two-dimensional")
    n = problem.n_state
    x0 = np.asarray(problem.init.value(p), dtype=float)
    y0 = np.asarray(problem.init.dir_deriv(p, d), dtype=float)

    def fun(z):
        x = z[:n]
        y = z[n:]
        return np.concatenate([
            np.asarray(problem.rhs.value(x), dtype=float),
            np.asarray(problem.rhs.dir_deriv(x, y), dtype=float),
        ])

    times, states, stats = _dopri5(fun, np.concatenate([x0, y0]), problem.t_final, config, direction=d)
    zs = np.array(states)
    return SensitivityTrajectory(
        times=np.array(times),
        states=zs[:, :n],
        sensitivities=zs[:, n:],
        direction=d.copy(),
        stats=stats,
    )


def ode_cost_value(problem: OdeProblem, p, config: IntegrationConfig = IntegrationConfig()) -> float:
    """phi(p) = g(p, x(T, p)) by one state integration."""
    p = np.asarray(p, dtype=float)
    times, states, _ = integrate_state(problem, p, config)
    return float(problem.cost.value(np.concatenate([p, states[-1]])))


def ode_cost_dirderiv(problem: OdeProblem, p, d,
                      config: IntegrationConfig = IntegrationConfig()) -> float:
    """psi(d) = g'((p, x(T)); (d, y(T, d))) by one coupled integration."""
    traj = integrate_coupled(problem, p, d, config)
    p = np.asarray(p, dtype=float)
    d = np.asarray(d, dtype=float)
    point = np.concatenate([p, traj.states[-1]])
    tangent = np.concatenate([d, traj.sensitivities[-1]])
    return float(problem.cost.dir_deriv(point, tangent))


def ode_subgradient(problem: OdeProblem, p,
                    config: IntegrationConfig = IntegrationConfig()) -> CompassResult:
    """Guaranteed subgradient of phi at ``p``: compass difference of psi.

    Four coupled integrations, one per compass direction.
    """
    p = np.asarray(p, dtype=float)
    if p.size != 2:
        raise ValueError("the parameter space is two-dimensional")
    return compass_from_psi(lambda d: ode_cost_dirderiv(problem, p, d, config), dim=2)


# ---------------------------------------------------------------------------
# JSON problem format

def _vector_oracle_from_exprs(exprs: list[ex.NonsmoothExpr], dim_in: int) -> VectorOracle:
    for e in exprs:
        if ex.dimension(e) > dim_in:
            raise ValueError(f"expression {ex.format_expr(e)} uses variables beyond dimension {dim_in}")

    def value(x):
        x = np.asarray(x, dtype=float)
        return np.array([ex.eval_value(e, x) for e in exprs])

    def dir_deriv(x, d):
        x = np.asarray(x, dtype=float)
        d = np.asarray(d, dtype=float)
        return np.array([ex.eval_dir_deriv(e, x, d) for e in exprs])

    return VectorOracle(value=value, dir_deriv=dir_deriv, dim_in=dim_in, dim_out=len(exprs))


def problem_from_json(source) -> OdeProblem:
    """Build an :class:`OdeProblem` from its JSON description.

    Schema::

        {"n_state": n,
         "rhs_expr":  [expr, ...]   n expressions over the state variables,
         "init_expr": [expr, ...]   n expressions over the two parameters,
         "cost_expr": expr          over the concatenated (p, x) variables,
         "t_final": T}
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source) as fh:
            data = json.load(fh)
    else:
        data = source
    for key in ("n_state", "rhs_expr", "init_expr", "cost_expr", "t_final"):
        if key not in data:
            raise ValueError(f"ODE problem JSON is missing {key!r}")
    n = int(data["n_state"])
    rhs_exprs = [ex.parse_expr(s) for s in data["rhs_expr"]]
    init_exprs = [ex.parse_expr(s) for s in data["init_expr"]]
    if len(rhs_exprs) != n or len(init_exprs) != n:
        raise ValueError(f"need exactly {n} rhs and init expressions")
    cost_expr = ex.parse_expr(data["cost_expr"])
    return OdeProblem(
        n_state=n,
        rhs=_vector_oracle_from_exprs(rhs_exprs, n),
        init=_vector_oracle_from_exprs(init_exprs, 2),
        cost=ex.as_oracle(cost_expr, 2 + n),
        t_final=float(data["t_final"]),
    )
