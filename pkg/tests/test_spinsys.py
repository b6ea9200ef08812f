import math

import numpy as np
import pytest

from spinbeats import experiments as ex
from spinbeats.linalg import partial_trace
from spinbeats.spinsys import (
    GAMMA,
    Coupling,
    PairDynamics,
    SpinSystemError,
    SpinSystemSpec,
    analytic_two_g,
    build_hamiltonian,
    initial_state,
    second_moment,
    singlet_probability,
    spin_operators,
    trotter_singlet,
)


@pytest.mark.parametrize("s", [0.5, 1])
def test_spin_operator_algebra(s):
    sx, sy, sz = spin_operators(s)
    assert np.allclose(sx @ sy - sy @ sx, 1j * sz)
    assert np.allclose(sx @ sx + sy @ sy + sz @ sz, s * (s + 1) * np.eye(int(2 * s + 1)))


def test_spin_operator_diagonals():
    assert np.allclose(np.diag(spin_operators(0.5)[2]), [0.5, -0.5])
    assert np.allclose(np.diag(spin_operators(1)[2]), [1, 0, -1])
    with pytest.raises(SpinSystemError):
        spin_operators(1.5)


def test_dps_hamiltonian_is_zeeman_only():
    spec = ex.dps("high")
    h = build_hamiltonian(spec)
    w1, w2 = GAMMA * spec.g1 * spec.B, GAMMA * spec.g2 * spec.B
    sz = np.diag([0.5, -0.5])
    assert np.allclose(h, w1 * np.kron(sz, np.eye(2)) + w2 * np.kron(np.eye(2), sz))


def test_tmp_hamiltonian_dimension(tmp_low):
    h = build_hamiltonian(tmp_low)
    assert h.shape == (24, 24)
    assert np.allclose(h, h.conj().T)


def test_zero_field_no_hfc_is_zero():
    assert np.allclose(build_hamiltonian(SpinSystemSpec(2.0, 2.0, 0.0)), 0)


def test_initial_state_reductions(tmp_low):
    rho = initial_state(tmp_low)
    assert np.isclose(np.trace(rho).real, 1.0)
    sing = np.array([0, 1, -1, 0]) / math.sqrt(2)
    assert np.allclose(partial_trace(rho, tmp_low.dims, [0, 1]), np.outer(sing, sing))
    assert np.allclose(partial_trace(rho, tmp_low.dims, [2, 3]), np.eye(6) / 6)


def test_singlet_probability_starts_at_one(tmp_low):
    assert singlet_probability(tmp_low, 0.0) == pytest.approx(1.0, abs=1e-12)
    assert singlet_probability(ex.dps("low"), 0.0) == pytest.approx(1.0, abs=1e-12)


def test_dps_high_field_analytic_over_100ns():
    spec = ex.dps("high")
    t = np.linspace(0, 100, 401)
    assert np.max(np.abs(singlet_probability(spec, t) - analytic_two_g(spec, t))) < 1e-10


def test_analytic_two_g_properties():
    spec = SpinSystemSpec(2.0, 2.1, 10.0)
    dw = GAMMA * 0.1 * 10.0
    assert analytic_two_g(spec, 0.0) == 1.0
    assert analytic_two_g(spec, math.pi / dw) == pytest.approx(0.0, abs=1e-15)
    assert np.allclose(analytic_two_g(SpinSystemSpec(2.0, 2.0, 50.0), np.linspace(0, 10, 5)), 1.0)
    with pytest.raises(SpinSystemError):
        analytic_two_g(ex.tmp("low", tau=10.0), 1.0)


def test_tmp_zero_field_against_trotter(tmp_low):
    for t in (3.0, 17.0):
        assert singlet_probability(tmp_low, t) == pytest.approx(trotter_singlet(tmp_low, t, steps=10_000), abs=1e-6)


def test_population_completeness_and_tpm_symmetry(tmp_high):
    pops = PairDynamics(tmp_high).populations(np.linspace(0, 100, 41))
    total = sum(pops.values())
    assert np.max(np.abs(total - 1)) < 1e-10
    assert np.max(np.abs(pops["Tplus"] - pops["Tminus"])) < 1e-10
    assert np.all((pops["S"] > -1e-12) & (pops["S"] < 1 + 1e-12))


def test_no_hfc_never_reaches_tpm():
    pops = PairDynamics(ex.dps("low")).populations(np.linspace(0, 60, 31))
    assert np.max(np.abs(pops["Tplus"])) < 1e-14
    assert np.max(np.abs(pops["Tminus"])) < 1e-14


def test_energy_conservation(tmp_high):
    dyn = PairDynamics(tmp_high)
    h = dyn.hamiltonian
    rho0 = initial_state(tmp_high)
    e0 = np.trace(h @ rho0).real
    for t in (1.0, 20.0, 80.0):
        u = dyn.propagator.unitary(t)
        assert np.trace(h @ u @ rho0 @ u.conj().T).real == pytest.approx(e0, abs=1e-10)


def test_second_moment():
    assert second_moment([]) == 0.0
    assert second_moment([(2.0, 0.5)]) == pytest.approx(GAMMA)
    hfc = [(1.3, 1.0), (-0.4, 0.5)]
    assert second_moment([(3 * a, i) for a, i in hfc]) == pytest.approx(3 * second_moment(hfc))
    assert second_moment([Coupling(1, 0.5, 2.0)]) == pytest.approx(GAMMA)


def test_spec_validation():
    with pytest.raises(SpinSystemError):
        SpinSystemSpec(2.0, 2.0, 1.0, T1=10.0, T2=25.0)
    with pytest.raises(SpinSystemError):
        SpinSystemSpec(2.0, 2.0, 1.0, theta=1.5)
    with pytest.raises(SpinSystemError):
        SpinSystemSpec(2.0, 2.0, 1.0, hfc=((3, 0.5, 1.0),))
    assert SpinSystemSpec(2, 2, 0, hfc=((1, 1, 1.0), (2, 0.5, 1.0))).dim == 4 * 3 * 2
