"""Exciton flow into the sink, its closed forms, angle law, sweeps and dark states."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AmbiguityError, DegenerateModelError, DomainError, PreconditionError, QTransportError
from .liouvillian import build_superoperator
from .model import (
    BrightGeometry,
    RateSet,
    ReservoirSpec,
    SystemSpec,
    bright_geometry,
    build_rates,
    reservoir_map,
    with_angle,
)
from .stationary import (
    StationaryResult,
    generator_residual,
    stationary_alpha0,
    stationary_general,
    stationary_numeric,
    state_from_matrix,
)

SWEEP_PARAMETERS = ("alpha", "gamma0_em", "beta_em")
RESIDUAL_FLAG = 1e-8


@dataclass(frozen=True, eq=False)
class FlowResult:
    F: float
    state: StationaryResult
    numerator: float | None = None
    denominator: float | None = None
    F_exponential: float | None = None


def flow_value(rates: RateSet, rho11: float, rho00: float) -> float:
    """Net rate of sink absorption 2 gm_sink rho11 - 2 gp_sink rho00."""
    return 2.0 * rates.sink.gm_re * rho11 - 2.0 * rates.sink.gp_re * rho00


def flow_from_state(rates: RateSet, st: StationaryResult) -> FlowResult:
    return FlowResult(F=flow_value(rates, st.rho11, st.rho00), state=st)


def flow_from_matrix(rates: RateSet, geom: BrightGeometry, rho: np.ndarray) -> FlowResult:
    return flow_from_state(rates, state_from_matrix(geom, rho, method="long_time_integration"))


def _cycle_products(rates: RateSet) -> tuple[float, float]:
    forward = rates.em.gp_re * rates.ph.gm_re * rates.sink.gm_re
    backward = rates.em.gm_re * rates.ph.gp_re * rates.sink.gp_re
    return forward, backward


def _backward_times_temperature_factor(rates: RateSet) -> float | None:
    """gm_em gp_ph gp_sink * (exp((beta_ph - beta_em)(eps2 - eps0)) - 1), for beta_ph = beta_sink.

    Evaluated in logs with gp = gm exp(-beta omega): the backward product can
    underflow while the exponential overflows.  None when a beta is infinite.
    """
    betas = (rates.em.beta, rates.ph.beta, rates.sink.beta)
    if not all(math.isfinite(b) for b in betas):
        return None
    gms = (rates.em.gm_re, rates.ph.gm_re, rates.sink.gm_re)
    if min(gms) == 0.0:
        return 0.0
    log_b = sum(math.log(g) for g in gms) - rates.ph.beta * rates.ph.bohr - rates.sink.beta * rates.sink.bohr
    x = (rates.ph.beta - rates.em.beta) * rates.em.bohr
    if x > 0.0:
        # e^x - 1 = e^x (1 - e^-x) keeps the exponent bounded by log(forward)
        return math.exp(log_b + x) * -math.expm1(-x)
    return math.exp(log_b) * math.expm1(x)


def _same_sink_phonon_temperature(rates: RateSet) -> bool:
    return math.isclose(rates.ph.beta, rates.sink.beta, rel_tol=1e-12, abs_tol=0.0)


def flow_alpha0(rates: RateSet, norm_chi2: float, norm_psi2: float, geom: BrightGeometry | None = None) -> FlowResult:
    """Closed-form flow for parallel bright vectors, assuming beta_ph = beta_sink."""
    if not _same_sink_phonon_temperature(rates):
        raise PreconditionError(
            f"closed-form flow assumes beta_ph == beta_sink (got {rates.ph.beta} and {rates.sink.beta})"
        )
    st = stationary_alpha0(rates, norm_chi2, norm_psi2, geom)
    delta = st.extras["delta"]
    forward, backward = _cycle_products(rates)
    numerator = 2.0 * norm_chi2 * norm_psi2 * (forward - backward)
    F = numerator / delta
    factor = _backward_times_temperature_factor(rates)
    F_exp = None if factor is None else 2.0 * norm_chi2 * norm_psi2 * factor / delta
    if F_exp is not None and not math.isclose(F, F_exp, rel_tol=1e-9, abs_tol=1e-12 * max(abs(F), 1.0)):
        raise ArithmeticError(f"difference-of-products flow {F!r} disagrees with exponential form {F_exp!r}")
    return FlowResult(F=F, state=st, numerator=numerator, denominator=delta, F_exponential=F_exp)


def flow_general(rates: RateSet, geom: BrightGeometry) -> FlowResult:
    """Flow for arbitrary angle: rho00 * numerator / denominator, Lamb shifts zero.

    The numerator carries cos^2(alpha); the exponential form is also reported
    when beta_ph = beta_sink.
    """
    st = stationary_general(rates, geom)
    X, P = geom.norm_chi**2, geom.norm_psi**2
    c2 = geom.cos_alpha**2
    forward, backward = _cycle_products(rates)
    numerator = 2.0 * X * P * c2 * (forward - backward)
    denominator = X * P * c2 * rates.em.gm_re * rates.ph.gp_re + rates.sink.gm_re * (
        X * rates.em.gm_re + P * rates.ph.gm_re
    )
    if not denominator > 0.0:
        raise DegenerateModelError("flow denominator vanishes")
    F = st.rho00 * numerator / denominator
    F_exp = None
    if _same_sink_phonon_temperature(rates):
        factor = _backward_times_temperature_factor(rates)
        if factor is not None:
            F_exp = st.rho00 * 2.0 * X * P * c2 * factor / denominator
    return FlowResult(F=F, state=st, numerator=numerator, denominator=denominator, F_exponential=F_exp)


@dataclass(frozen=True)
class AngleLawRow:
    alpha: float
    cos2: float
    scaled_flow: float  # F * denominator / rho00
    normalized: float | None  # scaled_flow / cos^2, None at cos = 0
    F: float
    F_over_F0: float | None
    cos2_prediction: float | None  # F(0) * cos^2


def numerator_angle_law(rates: RateSet, geoms: Sequence[BrightGeometry]) -> list[AngleLawRow]:
    """Flow pieces along a family of geometries differing only in the angle."""
    rows = []
    F0 = None
    for geom in geoms:
        fr = flow_general(rates, geom)
        scaled = fr.F * fr.denominator / fr.state.rho00
        cos2 = geom.cos_alpha**2
        if F0 is None and geom.alpha == 0.0:
            F0 = fr.F
        rows.append(
            AngleLawRow(
                alpha=geom.alpha,
                cos2=cos2,
                scaled_flow=scaled,
                normalized=scaled / cos2 if cos2 > 1e-15 else None,
                F=fr.F,
                F_over_F0=None,
                cos2_prediction=None,
            )
        )
    if F0 is not None and F0 != 0.0:
        rows = [
            AngleLawRow(r.alpha, r.cos2, r.scaled_flow, r.normalized, r.F, r.F / F0, F0 * r.cos2) for r in rows
        ]
    return rows


def angle_family(sys: SystemSpec, alphas: Sequence[float]) -> list[BrightGeometry]:
    return [bright_geometry(with_angle(sys, a)) for a in alphas]


def dark_projector(geom: BrightGeometry, M: int | None = None, tol: float = 1e-10) -> np.ndarray:
    """Orthogonal projector (M x M) onto the complement of span{chi, psi}."""
    M = geom.M if M is None else M
    if M != geom.M:
        raise DomainError(f"M={M} does not match the geometry (M={geom.M})")
    bright = np.column_stack([geom.chi_hat, geom.psi_hat])
    u, s, _ = np.linalg.svd(bright, full_matrices=True)
    rank = int(np.sum(s > tol))
    dark = u[:, rank:]
    return dark @ dark.conj().T


def dark_basis(geom: BrightGeometry) -> np.ndarray:
    """Orthonormal columns spanning the dark subspace (M x rank)."""
    proj = dark_projector(geom)
    w, v = np.linalg.eigh(proj)
    return v[:, w > 0.5]


# --- sweeps ----------------------------------------------------------------


@dataclass(frozen=True)
class SweepPoint:
    value: float
    F: float
    rho00: float
    rho11: float
    rho_psipsi: float
    rho_etaeta: float
    residual: float
    method: str
    flagged: bool


@dataclass(frozen=True)
class SweepTable:
    parameter: str
    grid: np.ndarray
    points: tuple[SweepPoint, ...]

    @property
    def F(self) -> np.ndarray:
        return np.array([p.F for p in self.points])

    def monotonicity(self) -> str:
        """'nondecreasing', 'nonincreasing', 'constant' or 'non-monotone' (tolerance 1e-12 relative)."""
        d = np.diff(self.F)
        tol = 1e-12 * max(np.max(np.abs(self.F)), 1e-300)
        up, down = np.all(d >= -tol), np.all(d <= tol)
        if up and down:
            return "constant"
        if up:
            return "nondecreasing"
        if down:
            return "nonincreasing"
        return "non-monotone"

    def final_decade_change(self) -> float | None:
        """Relative change of F across the last factor-of-ten of the grid (log sweeps)."""
        g = self.grid
        if g[-1] <= 0.0:
            return None
        idx = np.nonzero(g <= g[-1] / 10.0 * (1.0 + 1e-12))[0]
        if idx.size == 0:
            return None
        ref = self.F[idx[-1]]
        if ref == 0.0:
            return None
        return float((self.F[-1] - ref) / abs(ref))


def _apply_parameter(sys: SystemSpec, reservoirs: dict[str, ReservoirSpec], parameter: str, value: float):
    if parameter == "alpha":
        return with_angle(sys, value), reservoirs
    res = dict(reservoirs)
    em = reservoirs["em"]
    if parameter == "gamma0_em":
        res["em"] = ReservoirSpec("em", em.beta, value, em.lamb_plus, em.lamb_minus)
    elif parameter == "beta_em":
        res["em"] = ReservoirSpec("em", value, em.gamma0_re, em.lamb_plus, em.lamb_minus)
    else:
        raise DomainError(f"sweep parameter must be one of {SWEEP_PARAMETERS}, got {parameter!r}")
    return sys, res


def solve_point(rates: RateSet, geom: BrightGeometry) -> StationaryResult:
    """Closed form where it applies, null-space oracle otherwise."""
    try:
        return stationary_general(rates, geom)
    except (PreconditionError, DegenerateModelError):
        return stationary_numeric(build_superoperator(rates, geom), geom)


def sweep(sys: SystemSpec, reservoirs, parameter: str, grid: Sequence[float]) -> SweepTable:
    """Recompute the stationary state and flow at every grid value of ``parameter``."""
    if parameter not in SWEEP_PARAMETERS:
        raise DomainError(f"sweep parameter must be one of {SWEEP_PARAMETERS}, got {parameter!r}")
    grid = np.asarray(grid, dtype=float)
    d = np.diff(grid)
    if grid.size == 0 or not (np.all(d > 0) or np.all(d < 0)):
        raise DomainError("sweep grid must be nonempty and strictly monotone")
    base = reservoir_map(reservoirs)
    points = []
    for value in grid:
        s, res = _apply_parameter(sys, base, parameter, float(value))
        rates = build_rates(s, res)
        geom = bright_geometry(s)
        try:
            st = solve_point(rates, geom)
            residual = generator_residual(rates, geom, st.full_rho)
            F = flow_from_state(rates, st).F
            points.append(
                SweepPoint(
                    float(value), F, st.rho00, st.rho11, st.rho_psipsi, st.rho_etaeta,
                    residual, st.method, residual > RESIDUAL_FLAG,
                )
            )
        except (AmbiguityError, QTransportError, ArithmeticError) as exc:
            nan = float("nan")
            points.append(SweepPoint(float(value), nan, nan, nan, nan, nan, nan, f"failed: {exc}", True))
    return SweepTable(parameter=parameter, grid=grid, points=tuple(points))
