"""Nonequilibrium stationary states: closed forms and a null-space oracle.

The closed forms live on the invariant subspace spanned by

    |0><0|, |1><1|, |psi><psi|, |eta><eta|, |psi><eta| + h.c.

(psi, eta the unit vectors of ``BrightGeometry``).  ``stationary_numeric``
finds the kernel of the full generator restricted to that subspace and is
independent of every closed form in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguityError, DegenerateModelError, PreconditionError
from .liouvillian import LiouvillianMatrix, apply_total, vectorize
from .model import BrightGeometry, RateSet

METHODS = ("analytic_alpha0", "analytic_general", "numeric_nullspace", "long_time_integration")

KERNEL_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class StationaryResult:
    rho00: float
    rho11: float
    rho_psipsi: float
    rho_etaeta: float
    rho_psieta: float
    full_rho: np.ndarray
    method: str
    rho_psieta_imag: float = 0.0
    restricted_kernel_dim: int | None = None
    full_kernel_dim: int | None = None
    extras: dict = field(default_factory=dict)

    @property
    def populations(self) -> np.ndarray:
        return np.array([self.rho00, self.rho11, self.rho_psipsi, self.rho_etaeta])

    @property
    def coordinates(self) -> np.ndarray:
        """(rho00, rho11, rho_psipsi, rho_etaeta, Re rho_psieta, Im rho_psieta)."""
        return np.array(
            [self.rho00, self.rho11, self.rho_psipsi, self.rho_etaeta, self.rho_psieta, self.rho_psieta_imag]
        )


def _projector(ket: np.ndarray) -> np.ndarray:
    return np.outer(ket, ket.conj())


def _unit(dim: int, k: int) -> np.ndarray:
    e = np.zeros(dim, dtype=complex)
    e[k] = 1.0
    return e


def invariant_basis(geom: BrightGeometry) -> list[np.ndarray]:
    """Hermitian basis of the invariant subspace (6 matrices, or 3 without eta)."""
    dim = geom.dim
    psi = geom.embed(geom.psi_hat)
    basis = [_projector(_unit(dim, 0)), _projector(_unit(dim, 1)), _projector(psi)]
    if geom.has_eta:
        eta = geom.embed(geom.eta_hat)
        pe = np.outer(psi, eta.conj())
        basis += [_projector(eta), pe + pe.conj().T, 1j * (pe - pe.conj().T)]
    return basis


def assemble_state(geom: BrightGeometry, rho00, rho11, rho_psipsi, rho_etaeta=0.0, rho_psieta=0.0) -> np.ndarray:
    dim = geom.dim
    psi = geom.embed(geom.psi_hat)
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = rho00
    rho[1, 1] = rho11
    rho += rho_psipsi * _projector(psi)
    if geom.eta_hat is not None and (rho_etaeta != 0.0 or rho_psieta != 0.0):
        eta = geom.embed(geom.eta_hat)
        pe = np.outer(psi, eta.conj())
        rho += rho_etaeta * _projector(eta) + rho_psieta * pe + np.conj(rho_psieta) * pe.conj().T
    return rho


def state_from_matrix(geom: BrightGeometry, rho: np.ndarray, method: str = "long_time_integration", **extras) -> StationaryResult:
    """Read the invariant-subspace coordinates off a full density matrix."""
    rho = np.asarray(rho, dtype=complex)
    psi = geom.embed(geom.psi_hat)
    rpp = np.vdot(psi, rho @ psi).real
    if geom.eta_hat is not None:
        eta = geom.embed(geom.eta_hat)
        ree = np.vdot(eta, rho @ eta).real
        rpe = np.vdot(psi, rho @ eta)
    else:
        ree, rpe = 0.0, 0.0j
    return StationaryResult(
        rho00=float(rho[0, 0].real),
        rho11=float(rho[1, 1].real),
        rho_psipsi=float(rpp),
        rho_etaeta=float(ree),
        rho_psieta=float(np.real(rpe)),
        rho_psieta_imag=float(np.imag(rpe)),
        full_rho=rho,
        method=method,
        extras=extras,
    )


def stationary_alpha0(rates: RateSet, norm_chi2: float, norm_psi2: float, geom: BrightGeometry | None = None) -> StationaryResult:
    """Stationary state for parallel bright vectors (cos alpha = 1).

    Populations are the three spanning-tree quotients over the common
    denominator ``Delta``.  ``geom`` only fixes where |psi> sits in
    ``full_rho``; without it a single degenerate level (M = 1) is assumed.
    """
    X, P = norm_chi2, norm_psi2
    ap, am = rates.em.gp_re, rates.em.gm_re
    bp, bm = rates.ph.gp_re, rates.ph.gm_re
    sp, sm = rates.sink.gp_re, rates.sink.gm_re

    n_pp = ap * bp * X * P + ap * sm * X + bp * sp * P
    n_11 = ap * bm * X * P + am * sp * X + bm * sp * P
    n_00 = am * bp * X * P + am * sm * X + bm * sm * P
    delta = (
        (bp * ap + bm * ap + bp * am) * X * P
        + (bp * sp + bm * sp + bm * sm) * P
        + (ap * sm + am * sp + am * sm) * X
    )
    if not delta > 0.0:
        raise DegenerateModelError("Delta vanishes: all couplings are zero")
    r00, r11, rpp = n_00 / delta, n_11 / delta, n_pp / delta
    if geom is None:
        full = np.diag([r00, r11, rpp]).astype(complex)
    else:
        full = assemble_state(geom, r00, r11, rpp)
    return StationaryResult(
        rho00=r00,
        rho11=r11,
        rho_psipsi=rpp,
        rho_etaeta=0.0,
        rho_psieta=0.0,
        full_rho=full,
        method="analytic_alpha0",
        extras={"delta": delta},
    )


def _general_pieces(rates: RateSet, geom: BrightGeometry):
    X, P = geom.norm_chi**2, geom.norm_psi**2
    c2, s2 = geom.cos_alpha**2, geom.sin_alpha**2
    ap, am = rates.em.gp_re, rates.em.gm_re
    bp, bm = rates.ph.gp_re, rates.ph.gm_re
    sp, sm = rates.sink.gp_re, rates.sink.gm_re
    # denominator shared by the rho11/rho00 and rho_psipsi/rho00 ratios
    den = X * P * c2 * am * bp + sm * (X * am + P * bm)
    # damping of the psi-eta coherence once eta_eta is eliminated
    s_den = X * s2 * am + P * bm
    return X, P, c2, s2, ap, am, bp, bm, sp, sm, den, s_den


def population_ratios(rates: RateSet, geom: BrightGeometry) -> tuple[float, float, float, float]:
    """(rho11, rho_psipsi, rho_etaeta, rho_psieta), each divided by rho00.

    rho_psipsi/rho00 includes the direct pumping term X c^2 gp_em gm_sink/den
    obtained by solving the psi_psi and sink-level balance equations jointly;
    without it the ratio would not reduce to the parallel-vector result at
    alpha = 0.
    """
    X, P, c2, s2, ap, am, bp, bm, sp, sm, den, s_den = _general_pieces(rates, geom)
    if not (am > 0.0 and bm > 0.0):
        raise DegenerateModelError("closed form needs positive emission rates for photons and phonons")
    if not (den > 0.0 and s_den > 0.0):
        raise DegenerateModelError("closed-form denominators vanish")
    cs = geom.cos_alpha * geom.sin_alpha

    v = (X * P * c2 * ap * bm + sp * (X * am + P * bm)) / den
    u = (bp / bm) * (X * P * c2 * ap * bm + sp * (X * s2 * am + P * bm)) / den + X * c2 * ap * sm / den
    w = (ap * (X * (s2 - c2) * am + P * bm) + X * c2 * am * am * u) / (am * s_den)
    q = X * cs * (ap - am * u) / s_den
    return v, u, w, q


def stationary_general(rates: RateSet, geom: BrightGeometry) -> StationaryResult:
    """Stationary state for arbitrary angle between bright vectors (Lamb shifts zero)."""
    if not rates.lamb_zero:
        raise PreconditionError("the general-angle closed form assumes all Lamb shifts are zero")
    if not geom.has_eta:
        st = stationary_alpha0(rates, geom.norm_chi**2, geom.norm_psi**2, geom)
        st.extras["delegated"] = True
        return st
    v, u, w, q = population_ratios(rates, geom)
    r00 = 1.0 / (1.0 + v + u + w)
    r11, rpp, ree, rpe = v * r00, u * r00, w * r00, q * r00
    return StationaryResult(
        rho00=r00,
        rho11=r11,
        rho_psipsi=rpp,
        rho_etaeta=ree,
        rho_psieta=rpe,
        full_rho=assemble_state(geom, r00, r11, rpp, ree, rpe),
        method="analytic_general",
    )


def stationarity_residuals(rates: RateSet, geom: BrightGeometry, st: StationaryResult) -> dict[str, float]:
    """Left-minus-right of the five balance conditions on the invariant subspace.

    ``eq1``..``eq3`` are the psi_psi, sink-level and ground balances with the
    coherence eliminated; ``coherence`` and ``etaeta`` are the d/dt = 0
    conditions for rho_psieta and rho_etaeta (only when eta is resolved).
    """
    X, P, c2, s2, ap, am, bp, bm, sp, sm, den, s_den = _general_pieces(rates, geom)
    r00, r11, rpp, ree, rpe = st.rho00, st.rho11, st.rho_psipsi, st.rho_etaeta, st.rho_psieta
    out = {
        "eq1": -rpp * (X * am * bm + P * bm * bm) + r11 * bp * s_den + r00 * X * c2 * ap * bm,
        "eq2": rpp * P * bm - r11 * (P * bp + sm) + r00 * sp,
        "eq3": rpp * X * P * c2 * am * bm
        + r11 * sm * s_den
        - r00 * (X * P * c2 * ap * bm + sp * s_den),
    }
    if geom.has_eta:
        cs = geom.cos_alpha * geom.sin_alpha
        out["coherence"] = rpe - X * cs * (2.0 * ap * r00 - am * (rpp + ree)) / (X * am + P * bm)
        cot = geom.cos_alpha / geom.sin_alpha
        out["etaeta"] = ree - (ap * r00 - cot * am * rpe) / am
    return out


def generator_residual(rates: RateSet, geom: BrightGeometry, rho: np.ndarray) -> float:
    """max |L(rho)| entrywise."""
    return float(np.max(np.abs(apply_total(rates, geom, rho))))


def restricted_generator(L: LiouvillianMatrix, geom: BrightGeometry) -> tuple[np.ndarray, float]:
    """Real matrix of L on the invariant basis, and the out-of-subspace leakage."""
    basis = invariant_basis(geom)
    B = np.column_stack([vectorize(b) for b in basis])
    images = np.column_stack([L.matrix @ B[:, k] for k in range(B.shape[1])])
    coords, *_ = np.linalg.lstsq(B, images, rcond=None)
    leak = float(np.max(np.abs(B @ coords - images))) if images.size else 0.0
    return coords, leak


def stationary_numeric(L: LiouvillianMatrix, geom: BrightGeometry, rtol: float = KERNEL_RTOL) -> StationaryResult:
    """Kernel of the generator restricted to the invariant subspace, trace normalized."""
    A, leak = restricted_generator(L, geom)
    _, s, vt = np.linalg.svd(A)
    scale = s[0] if s[0] > 0.0 else 1.0
    nullity = int(np.sum(s <= rtol * scale))
    if nullity != 1:
        raise AmbiguityError(nullity, f"restricted kernel dimension is {nullity}, expected 1")
    x = vt[-1]
    trace = x[0] + x[1] + x[2] + (x[3] if x.size > 3 else 0.0)
    x = x / trace
    rho = sum(coef * b for coef, b in zip(x, invariant_basis(geom)))
    st = state_from_matrix(geom, rho, method="numeric_nullspace", leakage=leak, singular_values=s)
    return StationaryResult(
        rho00=st.rho00,
        rho11=st.rho11,
        rho_psipsi=st.rho_psipsi,
        rho_etaeta=st.rho_etaeta,
        rho_psieta=st.rho_psieta,
        rho_psieta_imag=st.rho_psieta_imag,
        full_rho=rho,
        method="numeric_nullspace",
        restricted_kernel_dim=nullity,
        full_kernel_dim=L.kernel_dimension(),
        extras=st.extras,
    )


def gibbs_ratios(rates: RateSet) -> dict[str, float]:
    """Equilibrium ratios rho_psipsi/rho00 and rho11/rho00 at the photon temperature."""
    beta = rates.em.beta
    return {
        "psipsi/00": math.exp(-beta * rates.em.bohr),
        "11/00": math.exp(-beta * rates.sink.bohr),
    }
