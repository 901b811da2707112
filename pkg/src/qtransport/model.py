"""System and reservoir data model, thermal rates and bright-vector geometry.

Basis convention for the (M+2)-dimensional system space: index 0 is the
ground state |0>, index 1 the sink level |1>, indices 2..M+1 span the
degenerate upper level.  The bright vectors chi (photons) and psi (phonons)
live in that degenerate block.

Energies and rates are dimensionless; only the products beta*omega enter the
thermal occupations, so any consistent unit system works.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import ConfigError, DomainError

RESERVOIRS = ("em", "ph", "sink")

# Below this value of sin(alpha) the orthogonal part of chi is treated as absent.
SIN_TOL = 1e-12


def planck_occupation(beta: float, omega: float) -> float:
    """Bose-Einstein occupation 1/(exp(beta*omega) - 1)."""
    x = beta * omega
    if not x > 0.0:
        raise DomainError(f"occupation undefined for beta*omega = {x!r} (must be > 0)")
    if x > 700.0:
        # expm1 overflows; exp(-x) equals the exact value to double precision here
        return math.exp(-x)
    return 1.0 / math.expm1(x)


def _as_vector(values, name: str) -> np.ndarray:
    vec = np.array(values, dtype=complex).reshape(-1)
    vec.setflags(write=False)
    return vec


@dataclass(frozen=True, eq=False)
class SystemSpec:
    eps0: float
    eps1: float
    eps2: float
    M: int
    chi: np.ndarray
    psi: np.ndarray

    def __post_init__(self):
        if not (self.eps0 < self.eps1 < self.eps2):
            raise DomainError(
                f"energies must satisfy eps0 < eps1 < eps2, got {self.eps0}, {self.eps1}, {self.eps2}"
            )
        if int(self.M) != self.M or self.M < 1:
            raise DomainError(f"degenerate dimension M must be a positive integer, got {self.M!r}")
        object.__setattr__(self, "M", int(self.M))
        for name in ("chi", "psi"):
            vec = _as_vector(getattr(self, name), name)
            if vec.shape != (self.M,):
                raise DomainError(f"{name} must have length M={self.M}, got {vec.shape[0]}")
            if not np.all(np.isfinite(vec)) or np.linalg.norm(vec) == 0.0:
                raise DomainError(f"{name} must be a finite nonzero vector")
            object.__setattr__(self, name, vec)

    @property
    def dim(self) -> int:
        return self.M + 2

    def bohr(self, label: str) -> float:
        if label == "em":
            return self.eps2 - self.eps0
        if label == "ph":
            return self.eps2 - self.eps1
        if label == "sink":
            return self.eps1 - self.eps0
        raise ConfigError(f"unknown reservoir label {label!r}")

    def replace(self, **changes) -> "SystemSpec":
        fields = dict(eps0=self.eps0, eps1=self.eps1, eps2=self.eps2, M=self.M, chi=self.chi, psi=self.psi)
        fields.update(changes)
        return SystemSpec(**fields)


@dataclass(frozen=True)
class ReservoirSpec:
    label: str
    beta: float
    gamma0_re: float
    lamb_plus: float = 0.0
    lamb_minus: float = 0.0

    def __post_init__(self):
        if self.label not in RESERVOIRS:
            raise ConfigError(f"reservoir label must be one of {RESERVOIRS}, got {self.label!r}")
        if not self.beta > 0.0:
            raise DomainError(f"{self.label}: beta must be positive, got {self.beta!r}")
        if not self.gamma0_re >= 0.0:
            raise DomainError(f"{self.label}: gamma0_re must be nonnegative, got {self.gamma0_re!r}")


@dataclass(frozen=True)
class ReservoirRates:
    """Rates of one reservoir: gp_* drive absorption, gm_* emission."""

    gp_re: float
    gm_re: float
    gp_im: float
    gm_im: float
    bohr: float
    beta: float

    @classmethod
    def from_pair(cls, gp_re: float, gm_re: float, bohr: float, gp_im: float = 0.0, gm_im: float = 0.0):
        """Build from explicit rates; beta is inferred from the detailed-balance ratio."""
        if not (gm_re > gp_re > 0.0) or bohr <= 0.0:
            raise DomainError("from_pair needs gm_re > gp_re > 0 and bohr > 0")
        beta = math.log(gm_re / gp_re) / bohr
        return cls(gp_re, gm_re, gp_im, gm_im, bohr, beta)

    @property
    def lamb_zero(self) -> bool:
        return self.gp_im == 0.0 and self.gm_im == 0.0


@dataclass(frozen=True)
class RateSet:
    em: ReservoirRates
    ph: ReservoirRates
    sink: ReservoirRates

    def __getitem__(self, label: str) -> ReservoirRates:
        if label not in RESERVOIRS:
            raise KeyError(label)
        return getattr(self, label)

    @property
    def lamb_zero(self) -> bool:
        return self.em.lamb_zero and self.ph.lamb_zero and self.sink.lamb_zero


def reservoir_map(reservoirs: Iterable[ReservoirSpec] | Mapping[str, ReservoirSpec]) -> dict[str, ReservoirSpec]:
    """Index reservoirs by label, rejecting duplicates and missing labels."""
    items = list(reservoirs.values()) if isinstance(reservoirs, Mapping) else list(reservoirs)
    by_label: dict[str, ReservoirSpec] = {}
    for res in items:
        if res.label in by_label:
            raise ConfigError(f"duplicate reservoir label {res.label!r}")
        by_label[res.label] = res
    missing = [label for label in RESERVOIRS if label not in by_label]
    if missing:
        raise ConfigError(f"missing reservoir(s): {', '.join(missing)}")
    return by_label


def build_rates(sys: SystemSpec, reservoirs) -> RateSet:
    """Thermal rates gamma0*N and gamma0*(N+1) for each reservoir at its Bohr frequency."""
    by_label = reservoir_map(reservoirs)
    out = {}
    for label in RESERVOIRS:
        res = by_label[label]
        bohr = sys.bohr(label)
        n = planck_occupation(res.beta, bohr)
        out[label] = ReservoirRates(
            gp_re=res.gamma0_re * n,
            gm_re=res.gamma0_re * (n + 1.0),
            gp_im=float(res.lamb_plus),
            gm_im=float(res.lamb_minus),
            bohr=bohr,
            beta=res.beta,
        )
    return RateSet(**out)


@dataclass(frozen=True, eq=False)
class BrightGeometry:
    """Decomposition chi_hat = cos_alpha * psi_hat + sin_alpha * eta_hat.

    psi_hat carries the overlap phase (psi_hat = phase * psi/|psi|) so that both
    coefficients are real and nonnegative.  eta_hat is None when M = 1.
    """

    norm_chi: float
    norm_psi: float
    cos_alpha: float
    sin_alpha: float
    psi_hat: np.ndarray
    eta_hat: np.ndarray | None
    chi_hat: np.ndarray
    phase: complex = 1.0
    eta_from_chi: bool = field(default=True)

    @property
    def M(self) -> int:
        return self.psi_hat.shape[0]

    @property
    def dim(self) -> int:
        return self.M + 2

    @property
    def alpha(self) -> float:
        return math.atan2(self.sin_alpha, self.cos_alpha)

    @property
    def has_eta(self) -> bool:
        """True when chi has a resolvable component orthogonal to psi."""
        return self.eta_hat is not None and self.sin_alpha > SIN_TOL

    def embed(self, vec: np.ndarray) -> np.ndarray:
        """Lift a degenerate-block vector into the full (M+2)-dim space."""
        full = np.zeros(self.dim, dtype=complex)
        full[2:] = vec
        return full


def _orthogonal_unit(v: np.ndarray) -> np.ndarray:
    """A deterministic unit vector orthogonal to the unit vector v (needs len(v) >= 2)."""
    k = int(np.argmin(np.abs(v)))
    e = np.zeros_like(v)
    e[k] = 1.0
    w = e - np.vdot(v, e) * v
    return w / np.linalg.norm(w)


def bright_geometry(sys: SystemSpec) -> BrightGeometry:
    return geometry_from_vectors(sys.chi, sys.psi)


def geometry_from_vectors(chi, psi) -> BrightGeometry:
    chi = np.asarray(chi, dtype=complex)
    psi = np.asarray(psi, dtype=complex)
    norm_chi = float(np.linalg.norm(chi))
    norm_psi = float(np.linalg.norm(psi))
    if norm_chi == 0.0 or norm_psi == 0.0:
        raise DomainError("bright vectors must be nonzero")
    chi_hat = chi / norm_chi
    psi_unit = psi / norm_psi
    overlap = np.vdot(psi_unit, chi_hat)
    cos_alpha = min(abs(overlap), 1.0)
    phase = overlap / abs(overlap) if abs(overlap) > 0.0 else 1.0 + 0.0j
    psi_hat = phase * psi_unit
    residual = chi_hat - np.vdot(psi_hat, chi_hat) * psi_hat
    sin_alpha = float(np.linalg.norm(residual))
    eta_from_chi = sin_alpha > SIN_TOL
    if eta_from_chi:
        eta_hat = residual / sin_alpha
        # second Gram-Schmidt pass: one pass loses orthogonality when sin_alpha is tiny
        eta_hat = eta_hat - np.vdot(psi_hat, eta_hat) * psi_hat
        eta_hat = eta_hat / np.linalg.norm(eta_hat)
    elif chi.shape[0] >= 2:
        eta_hat = _orthogonal_unit(psi_hat)
        sin_alpha = 0.0
    else:
        eta_hat = None
        sin_alpha = 0.0
    for vec in (chi_hat, psi_hat, eta_hat):
        if vec is not None:
            vec.setflags(write=False)
    return BrightGeometry(
        norm_chi=norm_chi,
        norm_psi=norm_psi,
        cos_alpha=float(cos_alpha),
        sin_alpha=sin_alpha,
        psi_hat=psi_hat,
        eta_hat=eta_hat,
        chi_hat=chi_hat,
        phase=complex(phase),
        eta_from_chi=eta_from_chi,
    )


def with_angle(sys: SystemSpec, alpha: float) -> SystemSpec:
    """Rotate chi to angle alpha from psi, keeping |chi|, psi and the rotation plane.

    The plane is the one spanned by psi and chi; if they are parallel, a fixed
    orthogonal direction is used.
    """
    if sys.M < 2 and abs(math.sin(alpha)) > 0.0:
        raise DomainError("a nonzero angle needs M >= 2")
    geom = bright_geometry(sys)
    if geom.eta_hat is None:
        return sys
    chi = geom.norm_chi * (math.cos(alpha) * geom.psi_hat + math.sin(alpha) * geom.eta_hat)
    return sys.replace(chi=chi)
