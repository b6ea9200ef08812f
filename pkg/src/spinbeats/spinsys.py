"""Radical-pair Hamiltonians, initial states and singlet-probability dynamics.

Units: hbar = 1, time in ns, magnetic quantities in mT. A field ``B`` (mT)
acting on a spin with g-factor ``g`` precesses at ``GAMMA * g * B`` rad/ns.
Hilbert-space ordering is electron 1, electron 2, then nuclei in the order
they appear in ``SpinSystemSpec.hfc``. Electron basis index 0 is spin up.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .linalg import HermitianPropagator, embed, kron, partial_trace

GAMMA = 8.794e-2  # mu_B / hbar in rad ns^-1 mT^-1
G_FREE = 2.0023

SINGLET = np.array([0.0, 1.0, -1.0, 0.0]) / math.sqrt(2.0)
TRIPLET_0 = np.array([0.0, 1.0, 1.0, 0.0]) / math.sqrt(2.0)
TRIPLET_PLUS = np.array([1.0, 0.0, 0.0, 0.0])
TRIPLET_MINUS = np.array([0.0, 0.0, 0.0, 1.0])
ST_BASIS = (SINGLET, TRIPLET_0, TRIPLET_PLUS, TRIPLET_MINUS)
ST_LABELS = ("S", "T0", "Tplus", "Tminus")


class SpinSystemError(ValueError):
    pass


def _spin_value(s) -> Fraction:
    f = Fraction(s).limit_denominator(4)
    if f not in (Fraction(1, 2), Fraction(1)):
        raise SpinSystemError(f"unsupported spin quantum number {s!r}; only 1/2 and 1")
    return f


@dataclass(frozen=True)
class Coupling:
    """Isotropic hyperfine coupling ``a I.S`` between one electron and one nucleus."""

    electron: int
    spin: float
    a: float  # mT

    def __post_init__(self):
        if self.electron not in (1, 2):
            raise SpinSystemError(f"electron index must be 1 or 2, got {self.electron!r}")
        object.__setattr__(self, "spin", float(_spin_value(self.spin)))
        object.__setattr__(self, "a", float(self.a))


@dataclass(frozen=True)
class SpinSystemSpec:
    """Declarative radical pair.

    ``T1``/``T2`` are pair-effective relaxation times (ns); ``None`` means the
    value was not supplied and ``math.inf`` means no relaxation of that kind.
    ``sigma`` is the semiclassical Gaussian dephasing moment in rad/ns.
    """

    g1: float
    g2: float
    B: float
    hfc: tuple[Coupling, ...] = ()
    T1: float | None = None
    T2: float | None = None
    theta: float | None = None
    sigma: float = 0.0
    name: str = ""

    def __post_init__(self):
        hfc = tuple(c if isinstance(c, Coupling) else Coupling(*c) for c in self.hfc)
        object.__setattr__(self, "hfc", hfc)
        for attr in ("T1", "T2"):
            v = getattr(self, attr)
            if v is not None:
                v = float(v)
                if not v > 0:
                    raise SpinSystemError(f"{attr} must be positive, got {v!r}")
                object.__setattr__(self, attr, v)
        if self.T1 is not None and self.T2 is not None and self.T2 > 2.0 * self.T1:
            raise SpinSystemError(f"unphysical relaxation: T2={self.T2} > 2*T1={2 * self.T1}")
        if self.theta is not None and not 0.0 <= self.theta <= 1.0:
            raise SpinSystemError(f"theta must lie in [0, 1], got {self.theta!r}")
        if self.sigma < 0:
            raise SpinSystemError("sigma must be non-negative")

    @property
    def nuclear_dims(self) -> list[int]:
        return [int(round(2 * c.spin + 1)) for c in self.hfc]

    @property
    def dims(self) -> list[int]:
        return [2, 2] + self.nuclear_dims

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def has_hfc(self) -> bool:
        return bool(self.hfc)

    def relaxation_times(self) -> tuple[float, float]:
        if self.T1 is None or self.T2 is None:
            raise SpinSystemError(f"system {self.name or '<inline>'} has no relaxation times set")
        return self.T1, self.T2


def spin_operators(s) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Angular-momentum matrices ``(Sx, Sy, Sz)`` for spin 1/2 or 1 (basis m = s ... -s)."""
    s = _spin_value(s)
    m = np.arange(float(s), -float(s) - 1.0, -1.0)
    d = len(m)
    splus = np.zeros((d, d), dtype=complex)
    for k in range(1, d):
        splus[k - 1, k] = math.sqrt(float(s) * (float(s) + 1) - m[k] * (m[k] + 1))
    sminus = splus.conj().T
    sx = 0.5 * (splus + sminus)
    sy = -0.5j * (splus - sminus)
    sz = np.diag(m).astype(complex)
    return sx, sy, sz


def build_hamiltonian(spec: SpinSystemSpec) -> np.ndarray:
    """Zeeman plus isotropic hyperfine Hamiltonian in rad/ns, field along z."""
    dims = spec.dims
    _, _, sz = spin_operators(0.5)
    h = np.zeros((spec.dim, spec.dim), dtype=complex)
    for e, g in ((0, spec.g1), (1, spec.g2)):
        h += GAMMA * g * spec.B * embed(sz, e, dims)
    electron_ops = spin_operators(0.5)
    for k, c in enumerate(spec.hfc):
        nuc_ops = spin_operators(c.spin)
        scale = GAMMA * G_FREE * c.a
        for se, sn in zip(electron_ops, nuc_ops):
            h += scale * embed(se, c.electron - 1, dims) @ embed(sn, 2 + k, dims)
    return h


def initial_state(spec: SpinSystemSpec) -> np.ndarray:
    """Singlet electrons times the maximally mixed nuclear state."""
    n_nuc = int(np.prod(spec.nuclear_dims)) if spec.hfc else 1
    return kron(np.outer(SINGLET, SINGLET).astype(complex), np.eye(n_nuc) / n_nuc)


def electron_projector(vec: np.ndarray) -> np.ndarray:
    return np.outer(vec, np.conj(vec)).astype(complex)


class PairDynamics:
    """Coherent evolution of a radical pair, diagonalised once and reused for any t.

    Projector expectation values are evaluated in the energy eigenbasis as
    ``sum_jk P_kj rho_jk exp(-i (E_j - E_k) t)``.
    """

    def __init__(self, spec: SpinSystemSpec):
        self.spec = spec
        self.hamiltonian = build_hamiltonian(spec)
        self.propagator = HermitianPropagator(self.hamiltonian)
        v = self.propagator.vectors
        rho0 = initial_state(spec)
        self._rho0_eig = v.conj().T @ rho0 @ v
        n_nuc = spec.dim // 4
        self._weights = {}
        for label, vec in zip(ST_LABELS, ST_BASIS):
            p = kron(electron_projector(vec), np.eye(n_nuc))
            p_eig = v.conj().T @ p @ v
            self._weights[label] = p_eig.T * self._rho0_eig
        e = self.propagator.energies
        self._gaps = e[:, None] - e[None, :]

    def _expect(self, label: str, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        w = self._weights[label]
        phases = np.exp(-1j * self._gaps[None, :, :] * t[:, None, None])
        return np.real(np.einsum("jk,tjk->t", w, phases))

    def populations(self, t) -> dict[str, np.ndarray]:
        return {label: self._expect(label, t) for label in ST_LABELS}

    def singlet(self, t) -> np.ndarray:
        return self._expect("S", t)

    def electronic_state(self, t: float) -> np.ndarray:
        """Reduced electron density matrix ``Tr_I[U rho(0) U^H]`` at time ``t``."""
        u = self.propagator.unitary(t)
        rho = u @ initial_state(self.spec) @ u.conj().T
        return partial_trace(rho, self.spec.dims, [0, 1])


def _scalar_or_array(values: np.ndarray, t):
    return float(values[0]) if np.ndim(t) == 0 else values


def singlet_probability(spec: SpinSystemSpec, t):
    """Exact singlet probability ``<S| Tr_I[e^{-iHt} rho(0) e^{iHt}] |S>``."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("t must be non-negative")
    return _scalar_or_array(PairDynamics(spec).singlet(t_arr), t)


def analytic_two_g(spec: SpinSystemSpec, t):
    """``cos^2(dw t / 2)`` with ``dw = GAMMA (g1 - g2) B``; valid only without hyperfine terms."""
    if spec.has_hfc:
        raise SpinSystemError("analytic two-g expression requires a system with no hyperfine couplings")
    dw = GAMMA * (spec.g1 - spec.g2) * spec.B
    return np.cos(0.5 * dw * np.asarray(t, dtype=float)) ** 2 if np.ndim(t) else math.cos(0.5 * dw * t) ** 2


def larmor_frequencies(spec: SpinSystemSpec) -> tuple[float, float]:
    return GAMMA * spec.g1 * spec.B, GAMMA * spec.g2 * spec.B


def second_moment(hfc: Iterable) -> float:
    """Gaussian second moment ``GAMMA * sqrt(sum a^2 I(I+1) / 3)`` in rad/ns.

    Entries are ``(a, I)`` pairs or ``Coupling`` objects.
    """
    total = 0.0
    for item in hfc:
        if isinstance(item, Coupling):
            a, spin = item.a, item.spin
        else:
            a, spin = item
        total += a * a * spin * (spin + 1.0)
    return GAMMA * math.sqrt(total / 3.0)


def trotter_singlet(spec: SpinSystemSpec, t: float, steps: int = 10_000) -> float:
    """Independent singlet probability from a fourth-order split-operator product.

    The Hamiltonian is split into Zeeman + secular (zz) terms and flip-flop
    (xx + yy) terms; each factor is exponentiated with ``scipy.linalg.expm`` so
    this path shares nothing with the Jacobi propagator.
    """
    from scipy.linalg import expm

    dims = spec.dims
    sx, sy, sz = spin_operators(0.5)
    h_a = np.zeros((spec.dim, spec.dim), dtype=complex)
    h_b = np.zeros_like(h_a)
    for e, g in ((0, spec.g1), (1, spec.g2)):
        h_a += GAMMA * g * spec.B * embed(sz, e, dims)
    for k, c in enumerate(spec.hfc):
        nx, ny, nz = spin_operators(c.spin)
        scale = GAMMA * G_FREE * c.a
        h_a += scale * embed(sz, c.electron - 1, dims) @ embed(nz, 2 + k, dims)
        h_b += scale * (embed(sx, c.electron - 1, dims) @ embed(nx, 2 + k, dims)
                        + embed(sy, c.electron - 1, dims) @ embed(ny, 2 + k, dims))
    if t == 0:
        return 1.0
    dt = t / steps
    # Yoshida fourth-order coefficients
    w1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
    w0 = 1.0 - 2.0 * w1

    def strang(tau):
        half = expm(-0.5j * tau * h_a)
        return half @ expm(-1j * tau * h_b) @ half

    step = strang(w1 * dt) @ strang(w0 * dt) @ strang(w1 * dt)
    u = np.linalg.matrix_power(step, steps)
    rho = u @ initial_state(spec) @ u.conj().T
    red = partial_trace(rho, dims, [0, 1])
    return float(np.real(SINGLET @ red @ SINGLET))


def electronic_evolution(spec: SpinSystemSpec, t: float, propagator: HermitianPropagator | None = None):
    """The channel ``rho_e -> Tr_I[U (rho_e x I/N) U^H]`` acting on electron states only."""
    prop = propagator or HermitianPropagator(build_hamiltonian(spec))
    u = prop.unitary(t)
    n_nuc = spec.dim // 4
    mixed = np.eye(n_nuc) / n_nuc

    def channel(rho_e: np.ndarray) -> np.ndarray:
        full = u @ np.kron(rho_e, mixed) @ u.conj().T
        return partial_trace(full, spec.dims, [0, 1])

    return channel
