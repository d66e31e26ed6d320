"""Compass differences: subgradients built from directional derivatives.

The compass difference of f at x is the vector with components
(f'(x; e_i) - f'(x; -e_i)) / 2.  For functions of one or two variables it is
always a Clarke subgradient; for three or more variables it is computed but
flagged as carrying no membership guarantee.  A change of probing basis and a
centered finite-difference approximation are provided alongside, plus a
verification harness for the defining subgradient inequality of convex
functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .oracle import (
    CompassResult,
    DirectionalOracle,
    OracleError,
    Probe,
    UnivariateClarkeInterval,
    guarantee_for_dim,
)
from .sampling import halton_in_box, unit_directions

#: Bases with |det| below this are rejected as numerically singular; the
#: conditioning of the transposed-inverse solve dominates the error.
DEFAULT_DET_TOL = 1e-12


def _probe(oracle: DirectionalOracle, x: np.ndarray, d: np.ndarray) -> float:
    try:
        value = float(oracle.dir_deriv(x, d))
    except OracleError:
        raise
    except Exception as err:
        raise OracleError(f"oracle evaluation failed in direction {d.tolist()}: {err}", direction=d) from err
    if not math.isfinite(value):
        raise OracleError(f"oracle returned non-finite value in direction {d.tolist()}", direction=d)
    return value


def _paired_probes(oracle: DirectionalOracle, x: np.ndarray, directions) -> tuple[list[Probe], np.ndarray]:
    probes: list[Probe] = []
    half = np.empty(len(directions))
    for i, d in enumerate(directions):
        plus = _probe(oracle, x, d)
        minus = _probe(oracle, x, -d)
        probes.append(Probe(direction=d.copy(), value=plus))
        probes.append(Probe(direction=-d, value=minus))
        half[i] = 0.5 * (plus - minus)
    return probes, half


def compass_difference(oracle: DirectionalOracle, x) -> CompassResult:
    """Compass difference of the oracle's function at ``x``.

    Makes 2n directional-derivative calls (+-e_i in fixed order).  The result
    is a Clarke subgradient when n <= 2; for larger n the ``guarantee`` field
    is set accordingly.
    """
    x = np.asarray(x, dtype=float)
    n = oracle.dim
    if x.size != n:
        raise ValueError(f"point has dimension {x.size}, oracle expects {n}")
    directions = [e.copy() for e in np.eye(n)]
    probes, half = _paired_probes(oracle, x, directions)
    return CompassResult(
        subgradient=half,
        probes=tuple(probes),
        basis=np.eye(n),
        guarantee=guarantee_for_dim(n),
    )


def basis_compass_difference(oracle: DirectionalOracle, x, V, det_tol: float = DEFAULT_DET_TOL) -> CompassResult:
    """Compass difference probed along the columns of ``V`` instead of +-e_i.

    Returns (V^T)^{-1} * [ (f'(x; v_i) - f'(x; -v_i)) / 2 ]_i, which is again
    a Clarke subgradient in two dimensions (generally a different one from
    the plain compass difference).  With ``V`` exactly the identity this
    reproduces :func:`compass_difference` bit for bit.

    Directional derivatives are positively homogeneous in the direction, so
    the columns of ``V`` need not be normalised.
    """
    x = np.asarray(x, dtype=float)
    V = np.asarray(V, dtype=float)
    n = oracle.dim
    if V.shape != (n, n):
        raise ValueError(f"basis must be {n}x{n}, got {V.shape}")
    det = float(np.linalg.det(V))
    if abs(det) < det_tol:
        raise ValueError(f"basis not invertible: |det| = {abs(det):.3e} below threshold {det_tol:.0e}")
    directions = [V[:, i].copy() for i in range(n)]
    probes, half = _paired_probes(oracle, x, directions)
    if np.array_equal(V, np.eye(n)):
        subgradient = half
    else:
        subgradient = np.linalg.solve(V.T, half)
    return CompassResult(
        subgradient=subgradient,
        probes=tuple(probes),
        basis=V.copy(),
        guarantee=guarantee_for_dim(n),
    )


def finite_difference_probes(value_fn, x, delta: float) -> tuple[np.ndarray, tuple[Probe, ...]]:
    """Centered-difference compass approximation plus the sampled values."""
    if delta <= 0:
        raise ValueError(f"delta must be positive, got {delta}")
    x = np.asarray(x, dtype=float)
    n = x.size
    approx = np.empty(n)
    probes: list[Probe] = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        f_plus = float(value_fn(x + delta * e))
        f_minus = float(value_fn(x - delta * e))
        for point_value, sample in ((f_plus, x + delta * e), (f_minus, x - delta * e)):
            if not math.isfinite(point_value):
                raise ValueError(f"non-finite function value at sample point {sample.tolist()}")
        probes.append(Probe(direction=e, value=f_plus))
        probes.append(Probe(direction=-e, value=f_minus))
        approx[i] = (f_plus - f_minus) / (2.0 * delta)
    return approx, tuple(probes)


def finite_difference_compass(value_fn, x, delta: float) -> np.ndarray:
    """Centered finite-difference approximation of the compass difference.

    Component i is (f(x + delta e_i) - f(x - delta e_i)) / (2 delta); it
    converges to the compass difference as delta decreases, and is exact at
    any delta for piecewise-linear functions probed inside one conical piece.
    """
    approx, _ = finite_difference_probes(value_fn, x, delta)
    return approx


def univariate_clarke_interval(oracle: DirectionalOracle, x) -> UnivariateClarkeInterval:
    """The whole Clarke generalized gradient of a univariate function at ``x``.

    This is the convex hull of f'(x; 1) and -f'(x; -1).
    """
    if oracle.dim != 1:
        raise ValueError(f"univariate interval needs a one-dimensional oracle, got dim {oracle.dim}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    plus = _probe(oracle, x, np.array([1.0]))
    minus = _probe(oracle, x, np.array([-1.0]))
    endpoints = (plus, -minus)
    return UnivariateClarkeInterval(lo=min(endpoints), hi=max(endpoints))


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of a subgradient-inequality check over a sample set.

    ``violations[k]`` is f(x) + <s, y_k - x> - f(y_k); the check passes when
    the largest violation does not exceed ``slack``.  A pass certifies ``s``
    (up to slack) only when f is convex; for nonconvex f it is merely
    consistent with membership, never a certificate.
    """

    passed: bool
    slack: float
    max_violation: float
    worst_point: np.ndarray
    n_samples: int
    violations: np.ndarray
    note: str = (
        "pass certifies the subgradient up to slack only for convex f; "
        "for nonconvex f a pass is consistent-with, never a certificate"
    )


def _sample_values(value_fn, samples: np.ndarray) -> np.ndarray:
    try:
        vals = np.asarray(value_fn(samples), dtype=float)
        if vals.shape == (samples.shape[0],):
            return vals
    except Exception:
        pass
    return np.array([float(value_fn(y)) for y in samples])


def verify_subgradient_inequality(value_fn, x, s, samples, slack: float) -> VerificationReport:
    """Check f(y) >= f(x) + <s, y - x> over the given sample points.

    ``value_fn`` may accept a batch of shape (N, n) for vectorised
    evaluation; otherwise it is called one point at a time.
    """
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    x = np.asarray(x, dtype=float)
    s = np.asarray(s, dtype=float)
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    if samples.shape[0] == 0:
        raise ValueError("sample list must not be empty")
    f_x = float(value_fn(x))
    values = _sample_values(value_fn, samples)
    violations = f_x + (samples - x) @ s - values
    worst = int(np.argmax(violations))
    max_violation = float(violations[worst])
    return VerificationReport(
        passed=max_violation <= slack,
        slack=slack,
        max_violation=max_violation,
        worst_point=samples[worst].copy(),
        n_samples=samples.shape[0],
        violations=violations,
    )


def verification_points(x, lower, upper, count: int, seed: int = 0) -> np.ndarray:
    """Standard sample set for :func:`verify_subgradient_inequality`.

    Low-discrepancy points in the box [lower, upper], plus the 2n axis points
    x +- e_i, plus 64 points on a sphere of radius 1e-3 around x; the mix
    catches both global and local violations.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    box = halton_in_box(count, lower, upper, start=1 + max(seed, 0))
    axis = np.vstack([x + e for e in np.eye(n)] + [x - e for e in np.eye(n)])
    ring = x + 1e-3 * unit_directions(64, n, seed=seed)
    return np.vstack([box, axis, ring])


def compass_from_psi(psi_fn, dim: int = 2) -> CompassResult:
    """Assemble a compass difference from a directional map d -> psi(d).

    Used when psi is itself the directional derivative of some function
    (an ODE cost, an optimal-value function): the compass difference of psi
    at the origin is then a subgradient of that function.
    """
    directions = [e.copy() for e in np.eye(dim)]
    probes: list[Probe] = []
    half = np.empty(dim)
    for i, d in enumerate(directions):
        plus = float(psi_fn(d))
        minus = float(psi_fn(-d))
        if not (math.isfinite(plus) and math.isfinite(minus)):
            raise OracleError(f"non-finite directional value along {d.tolist()}", direction=d)
        probes.append(Probe(direction=d, value=plus))
        probes.append(Probe(direction=-d, value=minus))
        half[i] = 0.5 * (plus - minus)
    return CompassResult(
        subgradient=half,
        probes=tuple(probes),
        basis=np.eye(dim),
        guarantee=guarantee_for_dim(dim),
    )
