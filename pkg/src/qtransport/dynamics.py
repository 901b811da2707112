"""Fixed-step RK4 integration of the master equation with sanity monitors."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FitError, IntegrationQualityError
from .liouvillian import build_superoperator, total_rate
from .model import BrightGeometry, RateSet

STABILITY_LIMIT = 0.1  # max dt * total_rate
CONVERGED_TOL = 1e-10
DRIFT_FAIL = 1e-6
NEGATIVITY_FAIL = -1e-6


@dataclass(frozen=True, eq=False)
class EvolutionTrace:
    times: np.ndarray
    states: np.ndarray  # (n_samples, D, D)
    trace_drift: float
    min_eigenvalue_seen: float
    converged: bool
    final_residual: float

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def validate_density_matrix(rho, dim: int | None = None, tol: float = 1e-12) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DomainError(f"density matrix must be square, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise DomainError(f"density matrix must be {dim}x{dim}, got {rho.shape[0]}x{rho.shape[1]}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise DomainError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise DomainError(f"density matrix trace is {np.trace(rho).real!r}, not 1")
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise DomainError("density matrix is not positive semidefinite")
    return rho


def evolve(
    rates: RateSet,
    geom: BrightGeometry,
    rho0,
    t_end: float,
    dt: float,
    sample_every: int = 1,
) -> EvolutionTrace:
    """Integrate d rho/dt = (theta_em + theta_ph + theta_sink)(rho) from 0 to t_end.

    The step is shrunk so that an integer number of steps lands on t_end.
    """
    dim = geom.dim
    rho = validate_density_matrix(rho0, dim).copy()
    if not (dt > 0.0 and t_end > 0.0):
        raise DomainError("dt and t_end must be positive")
    scale = total_rate(rates, geom)
    if dt * scale > STABILITY_LIMIT:
        raise DomainError(
            f"dt*rate = {dt * scale:.3g} exceeds {STABILITY_LIMIT}; use dt <= {STABILITY_LIMIT / scale:.3g}"
        )
    n_steps = max(1, math.ceil(t_end / dt - 1e-9))
    h = t_end / n_steps
    lc = build_superoperator(rates, geom).complex_matrix

    v = rho.ravel()
    times, states = [0.0], [rho.copy()]
    drift = abs(np.trace(rho).real - 1.0)
    min_eig = float(np.linalg.eigvalsh(rho).min())
    for step in range(1, n_steps + 1):
        k1 = lc @ v
        k2 = lc @ (v + 0.5 * h * k1)
        k3 = lc @ (v + 0.5 * h * k2)
        k4 = lc @ (v + h * k3)
        v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = v.reshape(dim, dim)
        drift = max(drift, abs(np.trace(rho) - 1.0))
        rho = 0.5 * (rho + rho.conj().T)
        v = rho.ravel()
        lowest = float(np.linalg.eigvalsh(rho).min())
        min_eig = min(min_eig, lowest)
        if drift > DRIFT_FAIL or lowest < NEGATIVITY_FAIL:
            raise IntegrationQualityError(
                f"at t={step * h:.6g}: trace drift {drift:.3g}, min eigenvalue {lowest:.3g}; reduce dt"
            )
        if step % sample_every == 0 or step == n_steps:
            times.append(step * h)
            states.append(rho.copy())

    final_residual = float(np.max(np.abs(lc @ v)))
    return EvolutionTrace(
        times=np.array(times),
        states=np.array(states),
        trace_drift=float(drift),
        min_eigenvalue_seen=min_eig,
        converged=final_residual < CONVERGED_TOL,
        final_residual=final_residual,
    )


def relaxation_rate(trace: EvolutionTrace, floor: float = 1e-8, monotone_rtol: float = 1e-6) -> float:
    """Exponential rate of approach to the final state.

    Fits log ||rho(t) - rho_final||_max over the last decade of distances that
    remain above ``floor`` (the final state itself is only accurate to about
    the convergence tolerance, so smaller distances are noise).
    """
    if len(trace.times) < 10:
        raise FitError("need at least 10 samples")
    dist = np.max(np.abs(trace.states - trace.final_state), axis=(1, 2))
    above = np.nonzero(dist > floor)[0]
    if above.size == 0:
        return 0.0
    last = above[-1]
    if np.any(np.diff(above) != 1):
        raise FitError("distance re-crosses the noise floor")
    lo = last
    while lo > 0 and dist[lo - 1] <= 10.0 * dist[last]:
        lo -= 1
    window = slice(lo, last + 1)
    t, d = trace.times[window], dist[window]
    if t.size < 3:
        raise FitError("fewer than 3 samples in the final decade")
    if np.any(d[1:] > d[:-1] * (1.0 + monotone_rtol)):
        raise FitError("tail is not monotone")
    slope, _ = np.polyfit(t, np.log(d), 1)
    return max(0.0, float(-slope))
