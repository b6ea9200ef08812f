"""Relaxation channels, their parameters, and closed-form relaxed singlet yields.

Conventions
-----------
Single-qubit basis index 0 is the state amplitude damping relaxes toward at
zero temperature (``p_n = 1``). ``p_n = 1/2`` is the infinite-temperature
limit used for the radical pair itself.

Pair-effective times: the radical-pair ``T1``/``T2`` that enter the closed
forms combine both radicals (``1/T = 1/T_a + 1/T_c``). Relaxation acting on
*both* electrons therefore uses per-electron times ``2*T1``/``2*T2``;
:func:`pair_relaxation` does that conversion.

Dephasing probability
---------------------
``p_z`` is fixed by demanding ``sqrt(1 - p_x) (1 - 2 p_z) = exp(-t/T2)`` for
the coherence together with ``p_x = 1 - exp(-t/T1)``, which gives
``p_z = (1 - exp(t/(2 T1) - t/T2)) / 2``. The alternative exponent
``-t (1/(2 T1) + 1/T2)`` fails that coherence condition (and the closed form
:func:`relaxed_closed_form`); it is kept only as :func:`dephasing_probability_alt`
for the verification suite to demonstrate the failure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .linalg import apply_kraus, dagger, random_density_matrix

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

COMPLETENESS_TOL = 1e-12


class ChannelError(ValueError):
    pass


def _check_probability(name: str, value: float, hi: float = 1.0) -> float:
    value = float(value)
    if not (0.0 <= value <= hi) or math.isnan(value):
        raise ChannelError(f"{name}={value!r} outside [0, {hi}]")
    return value


@dataclass(frozen=True)
class QuantumChannel:
    dim: int
    kraus: tuple
    label: str = ""

    def __post_init__(self):
        ks = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        for k in ks:
            if k.shape != (self.dim, self.dim):
                raise ChannelError(f"Kraus operator shape {k.shape} != ({self.dim}, {self.dim})")
        object.__setattr__(self, "kraus", ks)

    def completeness_error(self) -> float:
        acc = sum(dagger(k) @ k for k in self.kraus)
        return float(np.max(np.abs(acc - np.eye(self.dim))))

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        return sum(k @ rho @ dagger(k) for k in self.kraus)

    def then(self, other: "QuantumChannel") -> "QuantumChannel":
        """Channel applying ``self`` first and ``other`` second."""
        if other.dim != self.dim:
            raise ChannelError("cannot compose channels of different dimension")
        ks = [b @ a for a in self.kraus for b in other.kraus]
        return QuantumChannel(self.dim, tuple(ks), f"{other.label}*{self.label}")

    def tensor(self, other: "QuantumChannel") -> "QuantumChannel":
        ks = [np.kron(a, b) for a in self.kraus for b in other.kraus]
        return QuantumChannel(self.dim * other.dim, tuple(ks), f"{self.label}(x){other.label}")


@dataclass(frozen=True)
class DecayParams:
    p_x: float
    p_z: float
    p_n: float = 1.0

    def __post_init__(self):
        _check_probability("p_x", self.p_x)
        _check_probability("p_z", self.p_z, 0.5)
        _check_probability("p_n", self.p_n)


def identity_channel(dim: int = 2) -> QuantumChannel:
    return QuantumChannel(dim, (np.eye(dim),), "I")


def gad_kraus(p_x: float, p_n: float) -> QuantumChannel:
    """Generalized amplitude damping with damping ``p_x`` and temperature parameter ``p_n``."""
    p_x = _check_probability("p_x", p_x)
    p_n = _check_probability("p_n", p_n)
    keep = math.sqrt(1.0 - p_x)
    jump = math.sqrt(p_x)
    a, b = math.sqrt(p_n), math.sqrt(1.0 - p_n)
    k0 = a * np.array([[1, 0], [0, keep]])
    k1 = a * np.array([[0, jump], [0, 0]])
    k2 = b * np.array([[keep, 0], [0, 1]])
    k3 = b * np.array([[0, 0], [jump, 0]])
    return QuantumChannel(2, (k0, k1, k2, k3), f"GAD(p_x={p_x:.6g},p_n={p_n:.6g})")


def dephasing_kraus(p_z: float) -> QuantumChannel:
    """With probability ``p_z`` apply Z, otherwise nothing."""
    p_z = _check_probability("p_z", p_z, 0.5)
    return QuantumChannel(2, (math.sqrt(1 - p_z) * PAULI_I, math.sqrt(p_z) * PAULI_Z), f"Z(p_z={p_z:.6g})")


def relaxation_channel(params: DecayParams) -> QuantumChannel:
    """Amplitude damping at ``params.p_n`` followed by dephasing (the two commute)."""
    return gad_kraus(params.p_x, params.p_n).then(dephasing_kraus(params.p_z))


def apply_channel(ch: QuantumChannel, rho: np.ndarray, targets: Sequence[int],
                  dims: Sequence[int] | None = None) -> np.ndarray:
    """Apply ``ch`` to the listed subsystems of ``rho``.

    ``dims`` defaults to all qubits. A multi-target call applies the channel
    to each target in turn when ``ch`` is single-qubit, or jointly when its
    dimension matches the product of the target dimensions.
    """
    rho = np.asarray(rho, dtype=complex)
    if dims is None:
        n = int(round(math.log2(rho.shape[0])))
        if 2 ** n != rho.shape[0]:
            raise ChannelError("dims must be given for non-qubit registers")
        dims = [2] * n
    dims = list(dims)
    targets = list(targets)
    joint = int(np.prod([dims[t] for t in targets]))
    if ch.dim == joint:
        return apply_kraus(rho, ch.kraus, targets, dims)
    if all(dims[t] == ch.dim for t in targets):
        for t in targets:
            rho = apply_kraus(rho, ch.kraus, [t], dims)
        return rho
    raise ChannelError(f"channel of dim {ch.dim} cannot act on targets {targets} with dims {dims}")


def dephasing_probability(t: float, T1: float, T2: float) -> float:
    return 0.5 * (1.0 - math.exp(t / (2.0 * T1) - t / T2))


def dephasing_probability_alt(t: float, T1: float, T2: float) -> float:
    return 0.5 * (1.0 - math.exp(-t * (1.0 / (2.0 * T1) + 1.0 / T2)))


def decay_params(t: float, T1: float, T2: float, p_n: float = 1.0,
                 dephasing: Callable[[float, float, float], float] = dephasing_probability) -> DecayParams:
    """Damping and dephasing probabilities reproducing T1/T2 decay over time ``t``.

    ``T1``/``T2`` may be ``math.inf``.
    """
    t = float(t)
    if t < 0:
        raise ChannelError("t must be non-negative")
    if not (T1 > 0 and T2 > 0):
        raise ChannelError("relaxation times must be positive")
    if T2 > 2.0 * T1:
        raise ChannelError(f"unphysical relaxation times: T2={T2} > 2*T1={2 * T1}")
    if math.isinf(t):
        return DecayParams(1.0, 0.5, p_n)
    p_x = -math.expm1(-t / T1)
    p_z = dephasing(t, T1, T2)
    # T2 == 2*T1 gives p_z == 0 up to rounding
    p_z = min(max(p_z, 0.0), 0.5)
    return DecayParams(p_x, p_z, p_n)


def gaussian_dephasing_probability(t: float, sigma: float) -> float:
    """Z-flip probability whose coherence factor is ``exp(-sigma^2 t^2)``."""
    return -0.5 * math.expm1(-(sigma * t) ** 2)


def pair_relaxation(rho: np.ndarray, t: float, T1: float, T2: float, p_n: float = 0.5,
                    dims: Sequence[int] | None = None) -> np.ndarray:
    """Relax both electrons (subsystems 0 and 1) with pair-effective times ``T1``/``T2``.

    Each electron gets per-electron times ``2*T1``/``2*T2`` so that the pair
    decays with the supplied times. Other subsystems (nuclei) are untouched.
    """
    ch = relaxation_channel(decay_params(t, 2.0 * T1, 2.0 * T2, p_n))
    return apply_channel(ch, rho, [0, 1], dims)


def single_electron_relaxation(rho: np.ndarray, t: float, T1: float, T2: float, p_n: float = 1.0,
                               target: int = 0, dims: Sequence[int] | None = None) -> np.ndarray:
    """Relax a single electron with the pair-effective times (halved per-electron times)."""
    ch = relaxation_channel(decay_params(t, T1, T2, p_n))
    return apply_channel(ch, rho, [target], dims)


def commute_check(ch1: Callable[[np.ndarray], np.ndarray], ch2: Callable[[np.ndarray], np.ndarray],
                  dim: int, trials: int = 100, tol: float = 1e-12,
                  rng: np.random.Generator | int | None = 0,
                  states: Sequence[np.ndarray] | None = None):
    """Numerically test ``ch1(ch2(rho)) == ch2(ch1(rho))``.

    Returns ``(commutes, max_deviation)``, the deviation being the largest
    absolute entrywise difference over the sampled density matrices.
    """
    rng = np.random.default_rng(rng)
    if states is None:
        states = [random_density_matrix(dim, rng) for _ in range(trials)]
    worst = 0.0
    for rho in states:
        diff = ch1(ch2(rho)) - ch2(ch1(rho))
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst < tol, worst


def relaxed_closed_form(S, t, T1: float, T2: float):
    """Relaxed singlet probability ``(1 + e^{-t/T1} + e^{-t/T2} (4S - 2)) / 4``."""
    S = np.asarray(S, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any((S < -1e-12) | (S > 1 + 1e-12)):
        raise ValueError("S must lie in [0, 1]")
    out = 0.25 * (1.0 + np.exp(-t / T1) + np.exp(-t / T2) * (4.0 * S - 2.0))
    return float(out) if out.ndim == 0 else out


def relaxed_gaussian(S, t, T1: float, T2: float, sigma: float):
    """Closed form with additional Gaussian dephasing ``exp(-sigma^2 t^2)`` on the coherence."""
    S = np.asarray(S, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any((S < -1e-12) | (S > 1 + 1e-12)):
        raise ValueError("S must lie in [0, 1]")
    out = 0.25 * (1.0 + np.exp(-t / T1) + np.exp(-t / T2 - (sigma * t) ** 2) * (4.0 * S - 2.0))
    return float(out) if out.ndim == 0 else out
