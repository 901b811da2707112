import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtransport import (
    ConfigError,
    DomainError,
    ReservoirSpec,
    SystemSpec,
    bright_geometry,
    build_rates,
    planck_occupation,
    with_angle,
)


@pytest.mark.parametrize(
    "x, expected",
    [(math.log(2.0), 1.0), (math.log(1.5), 2.0)],
)
def test_planck_occupation_exact_values(x, expected):
    assert planck_occupation(1.0, x) == pytest.approx(expected, rel=1e-14)
    assert planck_occupation(x / 3.0, 3.0) == pytest.approx(expected, rel=1e-14)


def test_planck_occupation_vanishes_at_low_temperature():
    assert planck_occupation(100.0, 1.0) <= 1e-40
    assert planck_occupation(1e4, 1.0) >= 0.0


@pytest.mark.parametrize("beta, omega", [(0.0, 1.0), (1.0, 0.0), (-1.0, 2.0), (1.0, -0.5)])
def test_planck_occupation_domain(beta, omega):
    with pytest.raises(DomainError):
        planck_occupation(beta, omega)


@given(st.floats(1e-3, 50.0), st.floats(1e-3, 50.0))
def test_planck_occupation_strictly_decreasing(a, b):
    if a == b:
        return
    lo, hi = min(a, b), max(a, b)
    assert planck_occupation(1.0, lo) > planck_occupation(1.0, hi)


def _system(M=2, chi=(1.0, 0.0), psi=(1.0, 0.0)):
    return SystemSpec(0.0, 1.0, 2.5, M=M, chi=list(chi), psi=list(psi))


def test_build_rates_detailed_balance_example():
    # beta*bohr(em) = ln 2 with bohr(em) = 2.5
    sys = _system()
    beta = math.log(2.0) / 2.5
    res = [ReservoirSpec("em", beta, 2.0), ReservoirSpec("ph", 1.0, 1.0), ReservoirSpec("sink", 1.0, 1.0)]
    r = build_rates(sys, res)
    assert r.em.gp_re == pytest.approx(2.0, rel=1e-14)
    assert r.em.gm_re == pytest.approx(4.0, rel=1e-14)
    assert r.em.gp_re / r.em.gm_re == pytest.approx(0.5, rel=1e-14)
    assert (r.em.bohr, r.ph.bohr, r.sink.bohr) == (2.5, 1.5, 1.0)


def test_build_rates_decoupled_and_cold():
    sys = _system()
    res = [ReservoirSpec("em", 1.0, 0.0), ReservoirSpec("ph", 50.0 / 1.5, 1.0), ReservoirSpec("sink", 1.0, 1.0)]
    r = build_rates(sys, res)
    assert r.em.gp_re == 0.0 and r.em.gm_re == 0.0
    assert r.ph.gp_re == pytest.approx(0.0, abs=1e-20)
    assert r.ph.gm_re == pytest.approx(1.0, rel=1e-15)


def test_build_rates_copies_lamb_shifts():
    sys = _system()
    res = [ReservoirSpec("em", 1.0, 1.0, 0.3, -0.2), ReservoirSpec("ph", 1.0, 1.0), ReservoirSpec("sink", 1.0, 1.0)]
    r = build_rates(sys, res)
    assert (r.em.gp_im, r.em.gm_im) == (0.3, -0.2)
    assert not r.lamb_zero


@pytest.mark.parametrize(
    "labels",
    [("em", "em", "sink"), ("em", "ph"), ("em", "ph", "sink", "sink")],
)
def test_build_rates_rejects_bad_labels(labels):
    res = [ReservoirSpec(k, 1.0, 1.0) for k in labels]
    with pytest.raises(ConfigError):
        build_rates(_system(), res)


def test_reservoir_spec_validation():
    with pytest.raises(ConfigError):
        ReservoirSpec("light", 1.0, 1.0)
    with pytest.raises(DomainError):
        ReservoirSpec("em", 0.0, 1.0)
    with pytest.raises(DomainError):
        ReservoirSpec("em", 1.0, -1.0)


@settings(max_examples=200)
@given(
    st.floats(0.1, 20.0),
    st.floats(0.1, 20.0),
    st.floats(0.1, 20.0),
    st.floats(0.0, 10.0),
)
def test_kms_ratio_property(x_em, x_ph, x_sink, g0):
    sys = _system()
    res = [
        ReservoirSpec("em", x_em / 2.5, g0 + 0.1),
        ReservoirSpec("ph", x_ph / 1.5, g0 + 0.1),
        ReservoirSpec("sink", x_sink / 1.0, g0 + 0.1),
    ]
    r = build_rates(sys, res)
    for label in ("em", "ph", "sink"):
        rr = r[label]
        assert rr.gm_re > rr.gp_re >= 0.0
        assert rr.gp_re / rr.gm_re == pytest.approx(math.exp(-rr.beta * rr.bohr), rel=1e-14)


def test_system_spec_validation():
    with pytest.raises(DomainError):
        SystemSpec(0.0, 2.0, 1.0, M=1, chi=[1.0], psi=[1.0])
    with pytest.raises(DomainError):
        SystemSpec(0.0, 1.0, 2.0, M=2, chi=[0.0, 0.0], psi=[1.0, 0.0])
    with pytest.raises(DomainError):
        SystemSpec(0.0, 1.0, 2.0, M=2, chi=[1.0], psi=[1.0, 0.0])
    with pytest.raises(DomainError):
        SystemSpec(0.0, 1.0, 2.0, M=0, chi=[], psi=[])


def test_geometry_parallel():
    g = bright_geometry(_system(chi=(2.0, 0.0), psi=(1.0, 0.0)))
    assert g.cos_alpha == pytest.approx(1.0, abs=1e-15)
    assert g.sin_alpha == 0.0
    assert not g.has_eta
    assert abs(np.vdot(g.eta_hat, g.psi_hat)) < 1e-15


def test_geometry_orthogonal():
    g = bright_geometry(_system(chi=(0.0, 1.0), psi=(1.0, 0.0)))
    assert g.cos_alpha == pytest.approx(0.0, abs=1e-15)
    assert g.sin_alpha == pytest.approx(1.0, abs=1e-15)


def test_geometry_symmetric_superposition():
    g = bright_geometry(_system(chi=(3.0 / math.sqrt(2), 3.0 / math.sqrt(2)), psi=(1.0, 0.0)))
    assert g.cos_alpha == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert g.sin_alpha == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert g.alpha == pytest.approx(math.pi / 4, abs=1e-15)
    assert g.norm_chi == pytest.approx(3.0)


def test_geometry_m1_has_no_eta():
    g = bright_geometry(SystemSpec(0.0, 1.0, 2.0, M=1, chi=[2j], psi=[-1.0]))
    assert g.eta_hat is None and not g.has_eta
    assert g.cos_alpha == pytest.approx(1.0)


complex_vec = st.lists(
    st.tuples(st.floats(-2, 2), st.floats(-2, 2)), min_size=3, max_size=3
).map(lambda pairs: np.array([complex(a, b) for a, b in pairs]))


@settings(max_examples=200)
@given(complex_vec, complex_vec, st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_geometry_invariants(chi, psi, ph1, ph2):
    if np.linalg.norm(chi) < 1e-3 or np.linalg.norm(psi) < 1e-3:
        return
    sys = SystemSpec(0.0, 1.0, 2.0, M=3, chi=chi, psi=psi)
    g = bright_geometry(sys)
    assert g.cos_alpha**2 + g.sin_alpha**2 == pytest.approx(1.0, abs=1e-12)
    assert abs(np.linalg.norm(g.psi_hat) - 1.0) < 1e-12
    assert abs(np.linalg.norm(g.eta_hat) - 1.0) < 1e-12
    assert abs(np.vdot(g.psi_hat, g.eta_hat)) < 1e-12
    recon = g.cos_alpha * g.psi_hat + g.sin_alpha * g.eta_hat
    assert np.linalg.norm(chi / np.linalg.norm(chi) - recon) <= 1e-12
    # psi_hat is psi/|psi| up to the stored overlap phase
    assert np.linalg.norm(g.psi_hat - g.phase * psi / np.linalg.norm(psi)) <= 1e-12
    # independent global phases leave the angle unchanged
    rotated = bright_geometry(sys.replace(chi=chi * np.exp(1j * ph1), psi=psi * np.exp(1j * ph2)))
    assert abs(rotated.cos_alpha - g.cos_alpha) <= 1e-14


def test_geometry_rejects_zero_vector():
    from qtransport.model import geometry_from_vectors

    with pytest.raises(DomainError):
        geometry_from_vectors([0.0, 0.0], [1.0, 0.0])


@pytest.mark.parametrize("alpha", [0.0, 0.3, math.pi / 4, math.pi / 2])
def test_with_angle_sets_angle_and_keeps_norm(alpha):
    sys = _system(chi=(1.0, 1.0), psi=(0.0, 2.0))
    rotated = bright_geometry(with_angle(sys, alpha))
    assert rotated.alpha == pytest.approx(alpha, abs=1e-12)
    assert rotated.norm_chi == pytest.approx(math.sqrt(2.0))
