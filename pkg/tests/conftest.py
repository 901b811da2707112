import math

import numpy as np
import pytest

from qtransport import ReservoirSpec, SystemSpec, bright_geometry, build_rates
from qtransport.model import RateSet, ReservoirRates

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_model(alpha=np.pi / 3, M=2, betas=(0.3, 2.0, 2.0), gamma0=(1.0, 0.8, 0.5), norms=(1.2, 0.9), lamb=None):
    """Deterministic model with psi along e_0 and chi at angle alpha in the (e_0, e_1) plane."""
    psi = np.zeros(M, dtype=complex)
    psi[0] = norms[1]
    chi = np.zeros(M, dtype=complex)
    chi[0] = norms[0] * np.cos(alpha)
    if M > 1:
        chi[1] = norms[0] * np.sin(alpha)
    sys = SystemSpec(0.0, 0.8, 2.0, M=M, chi=chi, psi=psi)
    lamb = lamb or {}
    res = [
        ReservoirSpec(k, b, g, *lamb.get(k, (0.0, 0.0)))
        for k, b, g in zip(("em", "ph", "sink"), betas, gamma0)
    ]
    return sys, res


@pytest.fixture
def generic():
    sys, res = make_model()
    return sys, res, build_rates(sys, res), bright_geometry(sys)


def _pair(gp, gm, bohr, lamb=(0.0, 0.0)):
    if gp == 0.0:
        # zero temperature
        return ReservoirRates(0.0, gm, lamb[0], lamb[1], bohr, math.inf)
    return ReservoirRates.from_pair(gp, gm, bohr=bohr, gp_im=lamb[0], gm_im=lamb[1])


def explicit_rates(em=(0.5, 1.0), ph=(0.1, 1.0), sink=(0.1, 1.0), lamb=(0.0, 0.0)):
    """RateSet from explicit (gp, gm) pairs; beta follows from detailed balance."""
    return RateSet(_pair(*em, bohr=2.0, lamb=lamb), _pair(*ph, bohr=1.2), _pair(*sink, bohr=0.8))


def random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return a + a.conj().T


def random_density(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)
