"""Lindblad generators for the photon, phonon and sink reservoirs.

Each reservoir couples a lower state |lo> to an upper state |hi> through a
pair of dissipators (emission hi->lo at gm_re, absorption lo->hi at gp_re)
plus Lamb-shift commutators.  The photon and phonon generators carry the
superabsorption/supertransfer weights |chi|^2 and |psi|^2.

The superoperator acts on the real vectorization

    vec(rho) = [Re(rho.ravel()), Im(rho.ravel())]      (row-major, length 2 D^2)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import BrightGeometry, RateSet, ReservoirRates


def _basis_ket(dim: int, index: int) -> np.ndarray:
    ket = np.zeros(dim, dtype=complex)
    ket[index] = 1.0
    return ket


def _check_rho(rho: np.ndarray, dim: int) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dim, dim):
        raise DomainError(f"density matrix must be {dim}x{dim}, got shape {rho.shape}")
    return rho


def lindblad_pair(rho: np.ndarray, hi: np.ndarray, lo: np.ndarray, r: ReservoirRates, weight: float = 1.0) -> np.ndarray:
    """Dissipator pair between unit kets hi and lo, with Lamb-shift commutators."""
    p_hi = np.outer(hi, hi.conj())
    p_lo = np.outer(lo, lo.conj())
    pop_hi = np.vdot(hi, rho @ hi)
    pop_lo = np.vdot(lo, rho @ lo)
    rho_phi, phi_rho = rho @ p_hi, p_hi @ rho
    rho_plo, plo_rho = rho @ p_lo, p_lo @ rho
    out = 2.0 * r.gm_re * (pop_hi * p_lo - 0.5 * (rho_phi + phi_rho))
    out -= 1j * r.gm_im * (rho_phi - phi_rho)
    out += 2.0 * r.gp_re * (pop_lo * p_hi - 0.5 * (rho_plo + plo_rho))
    out += 1j * r.gp_im * (rho_plo - plo_rho)
    return weight * out


def apply_theta_em(rates: RateSet, geom: BrightGeometry, rho: np.ndarray) -> np.ndarray:
    rho = _check_rho(rho, geom.dim)
    return lindblad_pair(rho, geom.embed(geom.chi_hat), _basis_ket(geom.dim, 0), rates.em, geom.norm_chi**2)


def apply_theta_ph(rates: RateSet, geom: BrightGeometry, rho: np.ndarray) -> np.ndarray:
    rho = _check_rho(rho, geom.dim)
    return lindblad_pair(rho, geom.embed(geom.psi_hat), _basis_ket(geom.dim, 1), rates.ph, geom.norm_psi**2)


def apply_theta_sink(rates: RateSet, rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] < 2:
        raise DomainError(f"density matrix must be square with dim >= 2, got shape {rho.shape}")
    dim = rho.shape[0]
    return lindblad_pair(rho, _basis_ket(dim, 1), _basis_ket(dim, 0), rates.sink)


def apply_total(rates: RateSet, geom: BrightGeometry, rho: np.ndarray) -> np.ndarray:
    rho = _check_rho(rho, geom.dim)
    return apply_theta_em(rates, geom, rho) + apply_theta_ph(rates, geom, rho) + apply_theta_sink(rates, rho)


def vectorize(rho: np.ndarray) -> np.ndarray:
    flat = np.asarray(rho, dtype=complex).ravel()
    return np.concatenate([flat.real, flat.imag])


def unvectorize(vec: np.ndarray, dim: int) -> np.ndarray:
    n = dim * dim
    vec = np.asarray(vec, dtype=float)
    return (vec[:n] + 1j * vec[n:]).reshape(dim, dim)


@dataclass(frozen=True, eq=False)
class LiouvillianMatrix:
    """Dense real matrix of the total generator on vectorized density matrices."""

    matrix: np.ndarray
    dim: int

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return unvectorize(self.matrix @ vectorize(rho), self.dim)

    @property
    def complex_matrix(self) -> np.ndarray:
        """The same map as a complex D^2 x D^2 matrix on rho.ravel()."""
        n = self.dim * self.dim
        return self.matrix[:n, :n] + 1j * self.matrix[n:, :n]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.complex_matrix)

    def kernel_dimension(self, rtol: float = 1e-12) -> int:
        """Complex dimension of the kernel.

        Equals the number of independent Hermitian stationary matrices, since
        the kernel of a Hermiticity-preserving map is closed under adjoint.
        """
        s = np.linalg.svd(self.complex_matrix, compute_uv=False)
        if s[0] == 0.0:
            return self.dim * self.dim
        return int(np.sum(s <= rtol * s[0]))

    def spectral_bounds(self, rtol: float = 1e-12) -> tuple[float, float]:
        """(slowest nonzero decay rate, fastest decay rate) from -Re of the eigenvalues."""
        rates = -self.eigenvalues().real
        top = float(rates.max())
        nonzero = rates[rates > rtol * max(top, 1e-300)]
        return (float(nonzero.min()) if nonzero.size else 0.0, top)


def build_superoperator(rates: RateSet, geom: BrightGeometry, dim: int | None = None) -> LiouvillianMatrix:
    dim = geom.dim if dim is None else dim
    if dim != geom.dim:
        raise DomainError(f"dim must equal M+2 = {geom.dim}, got {dim}")
    n = dim * dim
    lc = np.empty((n, n), dtype=complex)
    unit = np.zeros((dim, dim), dtype=complex)
    for k in range(n):
        unit.flat[k] = 1.0
        lc[:, k] = apply_total(rates, geom, unit).ravel()
        unit.flat[k] = 0.0
    real = np.block([[lc.real, -lc.imag], [lc.imag, lc.real]])
    return LiouvillianMatrix(matrix=real, dim=dim)


def total_rate(rates: RateSet, geom: BrightGeometry) -> float:
    """Upper scale for the generator's spectral radius; sets time steps and horizons."""
    weights = {"em": geom.norm_chi**2, "ph": geom.norm_psi**2, "sink": 1.0}
    total = 0.0
    for label, w in weights.items():
        r = rates[label]
        total += w * (2.0 * (r.gp_re + r.gm_re) + abs(r.gp_im) + abs(r.gm_im))
    return total
