import math

import numpy as np
import pytest

from spinbeats.channels import dephasing_kraus
from spinbeats.circuits import (
    CircuitError,
    Gate,
    NoiseModel,
    dump_circuit,
    echo_drift_operator,
    probabilities,
    run_density,
    rz,
    sample,
    stochastic_rz_dephasing,
)
from spinbeats.protocols import bell_readout, singlet_preparation
from spinbeats.spinsys import SINGLET


def test_bell_state():
    rho = run_density([Gate("H", 0), Gate("CX", (0, 1))], 2)
    expected = np.zeros((4, 4))
    expected[np.ix_([0, 3], [0, 3])] = 0.5
    assert np.allclose(rho, expected)


def test_singlet_preparation_and_readout():
    rho = run_density(singlet_preparation(), 2)
    assert np.allclose(rho, np.outer(SINGLET, SINGLET))
    assert probabilities(run_density(bell_readout(), 2, initial=rho))["11"] == pytest.approx(1.0)


def test_gate_validation():
    with pytest.raises(CircuitError):
        Gate("CX", (0,))
    with pytest.raises(CircuitError):
        Gate("RY", 0)
    with pytest.raises(CircuitError):
        Gate("FOO", 0)
    with pytest.raises(CircuitError):
        Gate("U", 0, unitary=np.array([[1, 1], [0, 1]]))
    with pytest.raises(CircuitError):
        run_density([Gate("X", 3)], 2)


def test_dump_circuit_lists_gates():
    text = dump_circuit([Gate("RZ", 1, theta=0.5), Gate("I", (0, 1), duration=2.0)])
    assert text.splitlines() == ["RZ 1 0.5 -", "I 0,1 - 2.0"]


def test_identity_gates_decay_population():
    noise = NoiseModel(T1=40.0, T2=30.0, t_id=0.7)
    n = 37
    rho = run_density([Gate("X", 0)] + [Gate("I", 0)] * n, 1, noise)
    assert rho[1, 1].real == pytest.approx(math.exp(-n * 0.7 / 40.0), abs=1e-10)


def test_identity_gates_decay_coherence():
    noise = NoiseModel(T1=40.0, T2=30.0, t_id=0.7)
    n = 23
    rho = run_density([Gate("H", 0)] + [Gate("I", 0)] * n, 1, noise)
    assert abs(rho[0, 1]) == pytest.approx(0.5 * math.exp(-n * 0.7 / 30.0), abs=1e-10)


def test_per_qubit_noise_only_touches_targets():
    noise = NoiseModel(T1=(10.0, math.inf), T2=(10.0, math.inf), t_id=1.0)
    rho = run_density([Gate("X", 0), Gate("X", 1), Gate("I", (0, 1))], 2, noise)
    assert probabilities(rho)["11"] == pytest.approx(math.exp(-0.1))
    rho = run_density([Gate("X", 0), Gate("X", 1), Gate("I", 1)], 2, noise)
    assert probabilities(rho)["11"] == pytest.approx(1.0)


def test_noise_model_validation():
    with pytest.raises(CircuitError):
        NoiseModel(T1=10.0, T2=30.0)
    with pytest.raises(CircuitError):
        NoiseModel(t_id=0.0)


def test_sample_deterministic_and_reproducible():
    circ = [Gate("X", 0), Gate("X", 1)]
    res = sample(circ, 2, None, 1000, seed=5)
    assert res.counts == {"11": 1000}
    circ = [Gate("H", 0), Gate("CX", (0, 1))]
    a = sample(circ, 2, None, 5000, seed=42)
    b = sample(circ, 2, None, 5000, seed=42)
    assert a.counts == b.counts
    assert "PCG64" in a.prng


def test_sample_hadamard_statistics():
    inside = 0
    for seed in range(200):
        p0 = sample([Gate("H", 0)], 1, None, 5000, seed).probability("0")
        inside += abs(p0 - 0.5) <= 4 * math.sqrt(0.25 / 5000)
    assert inside >= 198


def test_sample_measure_subset():
    res = sample([Gate("X", 1)], 3, None, 10, seed=0, measure=[1])
    assert res.counts == {"1": 10}


def test_stochastic_rz_basics(rng):
    assert stochastic_rz_dephasing(0.0, rng) == 0.0
    with pytest.raises(CircuitError):
        stochastic_rz_dephasing(0.5, rng)


def test_stochastic_rz_ensemble_matches_channel(rng):
    p = 0.3
    rho = np.array([[0.6, 0.3 - 0.2j], [0.3 + 0.2j, 0.4]])
    n = 100_000
    angles = np.array([stochastic_rz_dephasing(p, rng) for _ in range(n)])
    offdiag = rho[0, 1] * np.exp(-1j * angles)
    target = dephasing_kraus(p)(rho)[0, 1]
    se = np.std(offdiag.real) / math.sqrt(n), np.std(offdiag.imag) / math.sqrt(n)
    assert abs(offdiag.real.mean() - target.real) < 3 * se[0]
    assert abs(offdiag.imag.mean() - target.imag) < 3 * se[1]


def test_stochastic_noise_model_runs_per_shot():
    noise = NoiseModel(T1=math.inf, T2=5.0, t_id=1.0, stochastic_dephasing=True)
    res = sample([Gate("H", 0), Gate("I", 0), Gate("H", 0)], 1, noise, 2000, seed=3)
    # dephasing over 1 ns with T2 = 5 ns leaves P(0) = (1 + e^{-0.2}) / 2
    assert res.probability("0") == pytest.approx(0.5 * (1 + math.exp(-0.2)), abs=4 * math.sqrt(0.25 / 2000))


@pytest.mark.parametrize("n", [2, 4, 6, 10])
def test_even_echo_cancels_drift(n):
    for phase in (0.3, 2.0, 11.0):
        assert np.allclose(echo_drift_operator(phase, n), np.eye(2), atol=1e-12)


def test_odd_echo_leaves_a_flip():
    op = echo_drift_operator(0.7, 3)
    assert np.allclose(np.abs(op), [[0, 1], [1, 0]])


def test_drift_is_applied_during_waits():
    noise = NoiseModel(drift=0.2, t_id=1.5)
    rho = run_density([Gate("H", 0), Gate("I", 0)], 1, noise)
    u = rz(0.3)
    plus = np.full((2, 2), 0.5)
    assert np.allclose(rho, u @ plus @ u.conj().T)
