"""Random model draws for validation sweeps.

Ranges: gamma0 in [0.1, 10], beta*omega in [0.1, 20] per reservoir,
|chi|, |psi| in [0.5, 2], alpha in [0, pi/2], Lamb shifts zero.
"""

from __future__ import annotations

import math

import numpy as np

from .model import ReservoirSpec, SystemSpec


def random_unit_pair(rng: np.random.Generator, M: int) -> tuple[np.ndarray, np.ndarray]:
    """Two orthonormal complex vectors of length M (M >= 2)."""
    z = rng.normal(size=(M, 2)) + 1j * rng.normal(size=(M, 2))
    q, _ = np.linalg.qr(z)
    return q[:, 0], q[:, 1]


def random_model(
    rng: np.random.Generator,
    alpha: float | None = None,
    M: int | None = None,
    equal_beta: bool = False,
    sink_like_phonons: bool = False,
) -> tuple[SystemSpec, list[ReservoirSpec], float]:
    """Draw (system, reservoirs, alpha).

    ``alpha=None`` draws the angle uniformly in [0, pi/2].  ``equal_beta``
    puts all reservoirs at one temperature; ``sink_like_phonons`` sets
    beta_sink = beta_ph.
    """
    if M is None:
        M = int(rng.integers(2, 5))
    if alpha is None:
        alpha = float(rng.uniform(0.0, math.pi / 2))
    eps1, eps2 = sorted(rng.uniform(0.2, 3.0, size=2))
    if eps2 - eps1 < 0.05:
        eps2 = eps1 + 0.05
    eps = (0.0, float(eps1), float(eps2))
    bohr = {"em": eps[2] - eps[0], "ph": eps[2] - eps[1], "sink": eps[1] - eps[0]}

    norm_chi, norm_psi = rng.uniform(0.5, 2.0, size=2)
    psi_hat, eta_hat = random_unit_pair(rng, M)
    phase = np.exp(1j * rng.uniform(0, 2 * math.pi))
    chi = norm_chi * phase * (math.cos(alpha) * psi_hat + math.sin(alpha) * eta_hat)
    psi = norm_psi * np.exp(1j * rng.uniform(0, 2 * math.pi)) * psi_hat

    gamma0 = rng.uniform(0.1, 10.0, size=3)
    if equal_beta:
        # one beta for all, keeping every beta*omega inside [0.1, 20]
        lo = 0.1 / min(bohr.values())
        hi = 20.0 / max(bohr.values())
        beta = float(rng.uniform(lo, hi)) if hi > lo else lo
        betas = {k: beta for k in bohr}
    else:
        betas = {k: float(rng.uniform(0.1, 20.0)) / bohr[k] for k in bohr}
        if sink_like_phonons:
            betas["sink"] = betas["ph"]
    reservoirs = [ReservoirSpec(k, betas[k], float(g)) for k, g in zip(("em", "ph", "sink"), gamma0)]
    system = SystemSpec(*eps, M=M, chi=chi, psi=psi)
    return system, reservoirs, alpha
