"""Density-matrix circuit simulator with a zero-temperature noisy qubit backend.

Qubit 0 is the most significant tensor factor and the leftmost character of
measured bitstrings. Noise is attached to gates: after a gate of duration
``d`` each of its target qubits undergoes residual ``Rz`` drift, amplitude
damping toward ``|0>`` and dephasing for time ``d``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channels import PAULI_X, PAULI_Z, decay_params, dephasing_kraus, gad_kraus
from .linalg import apply_kraus, dagger

PRNG_NAME = f"numpy.random.PCG64 (numpy {np.__version__})"

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def controlled(u: np.ndarray) -> np.ndarray:
    out = np.eye(4, dtype=complex)
    out[2:, 2:] = u
    return out


class CircuitError(ValueError):
    pass


_ARITY = {"H": 1, "X": 1, "Z": 1, "RX": 1, "RY": 1, "RZ": 1, "CX": 2, "CRY": 2}
_PARAMETRIC = {"RX", "RY", "RZ", "CRY"}


@dataclass(frozen=True)
class Gate:
    """One circuit instruction.

    ``kind`` is one of H, X, Z, CX, RX, RY, RZ, CRY, I, U. ``I`` may span any number
    of qubits and models a wait; ``U`` carries an explicit ``unitary``.
    ``duration`` of ``None`` means the backend default for that kind.
    """

    kind: str
    targets: tuple
    theta: float | None = None
    duration: float | None = None
    unitary: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        targets = tuple(int(q) for q in (self.targets if isinstance(self.targets, (tuple, list)) else (self.targets,)))
        object.__setattr__(self, "targets", targets)
        if len(set(targets)) != len(targets) or not targets:
            raise CircuitError(f"bad targets {targets} for {kind}")
        if kind in _ARITY:
            if len(targets) != _ARITY[kind]:
                raise CircuitError(f"{kind} acts on {_ARITY[kind]} qubit(s), got {targets}")
            if kind in _PARAMETRIC:
                if self.theta is None or not np.isfinite(self.theta):
                    raise CircuitError(f"{kind} needs a real angle")
        elif kind == "U":
            if self.unitary is None:
                raise CircuitError("U gate needs a unitary")
            u = np.asarray(self.unitary, dtype=complex)
            if u.shape != (2 ** len(targets),) * 2:
                raise CircuitError(f"unitary shape {u.shape} does not match {len(targets)} target(s)")
            if np.max(np.abs(u @ dagger(u) - np.eye(u.shape[0]))) > 1e-10:
                raise CircuitError("custom gate is not unitary")
            object.__setattr__(self, "unitary", u)
        elif kind != "I":
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if self.duration is not None and self.duration < 0:
            raise CircuitError("negative gate duration")

    def matrix(self) -> np.ndarray | None:
        k = self.kind
        if k == "I":
            return None
        if k == "H":
            return HADAMARD
        if k == "X":
            return PAULI_X
        if k == "Z":
            return PAULI_Z
        if k == "CX":
            return CNOT
        if k == "RX":
            return rx(self.theta)
        if k == "RY":
            return ry(self.theta)
        if k == "RZ":
            return rz(self.theta)
        if k == "CRY":
            return controlled(ry(self.theta))
        return self.unitary

    def dump(self) -> str:
        theta = "-" if self.theta is None else repr(float(self.theta))
        duration = "-" if self.duration is None else repr(float(self.duration))
        return f"{self.kind} {','.join(map(str, self.targets))} {theta} {duration}"


def dump_circuit(circuit: Sequence[Gate]) -> str:
    """Debug listing, one ``GATE targets theta duration`` line per gate."""
    return "\n".join(g.dump() for g in circuit)


def _per_qubit(value, n: int | None = None) -> tuple:
    if np.ndim(value) == 0:
        return (float(value),) if n is None else (float(value),) * n
    return tuple(float(v) for v in value)


@dataclass(frozen=True)
class NoiseModel:
    """Zero-temperature thermal relaxation of the emulated qubits.

    ``T1``/``T2``/``drift`` are scalars (shared) or per-qubit sequences.
    ``drift`` is the residual precession miscalibration in rad/ns.
    ``gate_duration`` is the default for non-identity gates.
    """

    T1: float | tuple = math.inf
    T2: float | tuple = math.inf
    t_id: float = 1.0
    drift: float | tuple = 0.0
    stochastic_dephasing: bool = False
    gate_duration: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "T1", _per_qubit(self.T1))
        object.__setattr__(self, "T2", _per_qubit(self.T2))
        object.__setattr__(self, "drift", _per_qubit(self.drift))
        if not self.t_id > 0:
            raise CircuitError("identity-gate duration must be positive")
        for t1, t2 in zip(self._cycle(self.T1), self._cycle(self.T2)):
            if not (t1 > 0 and t2 > 0):
                raise CircuitError("qubit relaxation times must be positive")
            if t2 > 2 * t1:
                raise CircuitError(f"unphysical qubit times T2={t2} > 2*T1={2 * t1}")

    @staticmethod
    def _cycle(values: tuple, n: int = 0):
        return values if len(values) > 1 else values * max(n, 1)

    def _pick(self, values: tuple, q: int) -> float:
        return values[0] if len(values) == 1 else values[q]

    def t1(self, q: int) -> float:
        return self._pick(self.T1, q)

    def t2(self, q: int) -> float:
        return self._pick(self.T2, q)

    def drift_rate(self, q: int) -> float:
        return self._pick(self.drift, q)

    def mean_time(self, nqubits: int) -> float:
        """Average of T1 and T2 over the register (``T_qu``)."""
        vals = [self.t1(q) for q in range(nqubits)] + [self.t2(q) for q in range(nqubits)]
        return float(np.mean(vals))

    def duration_of(self, gate: Gate) -> float:
        if gate.duration is not None:
            return gate.duration
        return self.t_id if gate.kind == "I" else self.gate_duration


@dataclass
class ShotResult:
    counts: dict
    shots: int
    seed: int
    prng: str = PRNG_NAME

    def probability(self, bitstring: str) -> float:
        return self.counts.get(bitstring, 0) / self.shots


def stochastic_rz_dephasing(p: float, rng: np.random.Generator, size: int | None = None):
    """Random ``Rz`` angle whose ensemble average reproduces Z-dephasing with probability ``p``.

    The angle is normal with variance ``log((1 - 2p)^-2)`` so that
    ``E[cos(angle)] = 1 - 2p``. ``size`` draws an array of independent angles.
    """
    if not 0.0 <= p < 0.5:
        raise CircuitError(f"stochastic Rz dephasing needs p in [0, 1/2), got {p!r}")
    var = -2.0 * math.log1p(-2.0 * p)
    if size is not None:
        return rng.normal(0.0, math.sqrt(var), size=size) if var else np.zeros(size)
    if var == 0.0:
        return 0.0
    return float(rng.normal(0.0, math.sqrt(var)))


def _idle_noise(rho, dims, q: int, d: float, noise: NoiseModel, rng: np.random.Generator | None):
    dw = noise.drift_rate(q)
    if dw:
        rho = apply_kraus(rho, [rz(dw * d)], [q], dims)
    params = decay_params(d, noise.t1(q), noise.t2(q))
    if params.p_x:
        rho = apply_kraus(rho, gad_kraus(params.p_x, 1.0).kraus, [q], dims)
    if params.p_z:
        if noise.stochastic_dephasing and rng is not None:
            angle = stochastic_rz_dephasing(params.p_z, rng)
            rho = apply_kraus(rho, [rz(angle)], [q], dims)
        else:
            rho = apply_kraus(rho, dephasing_kraus(params.p_z).kraus, [q], dims)
    return rho


def _fuse_waits(circuit: Sequence[Gate], noise: NoiseModel | None):
    """Merge runs of identity gates on identical targets into one wait (exact)."""
    out = []
    for g in circuit:
        if g.kind == "I" and out and out[-1][0] == "I" and out[-1][1] == g.targets:
            out[-1] = ("I", g.targets, out[-1][2] + (noise.duration_of(g) if noise else 0.0))
        elif g.kind == "I":
            out.append(("I", g.targets, noise.duration_of(g) if noise else 0.0))
        else:
            out.append((g, g.targets, noise.duration_of(g) if noise else 0.0))
    return out


def zero_state(nqubits: int) -> np.ndarray:
    rho = np.zeros((2 ** nqubits, 2 ** nqubits), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def run_density(circuit: Sequence[Gate], nqubits: int, noise: NoiseModel | None = None,
                initial: np.ndarray | None = None, rng: np.random.Generator | None = None) -> np.ndarray:
    """Execute ``circuit`` on ``nqubits`` starting from ``|0...0>`` (or ``initial``)."""
    dims = [2] * nqubits
    rho = zero_state(nqubits) if initial is None else np.array(initial, dtype=complex)
    for item, targets, d in _fuse_waits(circuit, noise):
        if any(q >= nqubits or q < 0 for q in targets):
            raise CircuitError(f"targets {targets} outside a {nqubits}-qubit register")
        if item != "I":
            rho = apply_kraus(rho, [item.matrix()], list(targets), dims)
        if noise is not None and d > 0:
            for q in targets:
                rho = _idle_noise(rho, dims, q, d, noise, rng)
    return rho


def probabilities(rho: np.ndarray) -> dict:
    n = int(round(math.log2(rho.shape[0])))
    diag = np.clip(np.real(np.diag(rho)), 0.0, None)
    diag = diag / diag.sum()
    return {format(i, f"0{n}b"): float(p) for i, p in enumerate(diag)}


def sample(circuit: Sequence[Gate], nqubits: int, noise: NoiseModel | None, shots: int, seed: int,
           measure: Sequence[int] | None = None) -> ShotResult:
    """Draw ``shots`` computational-basis outcomes (ideal readout) with a seeded PCG64 stream.

    ``measure`` restricts the recorded bitstring to those qubits (others are
    traced out).
    """
    if shots <= 0:
        raise CircuitError("shots must be positive")
    rng = np.random.default_rng(seed)
    keep = list(range(nqubits)) if measure is None else list(measure)
    labels = [format(i, f"0{nqubits}b") for i in range(2 ** nqubits)]

    def reduce_counts(full: np.ndarray) -> dict:
        counts: dict = {}
        for lab, c in zip(labels, full):
            if c:
                key = "".join(lab[q] for q in keep)
                counts[key] = counts.get(key, 0) + int(c)
        return counts

    if noise is not None and noise.stochastic_dephasing:
        full = np.zeros(2 ** nqubits, dtype=np.int64)
        for _ in range(shots):
            rho = run_density(circuit, nqubits, noise, rng=rng)
            p = np.clip(np.real(np.diag(rho)), 0.0, None)
            full[rng.choice(len(p), p=p / p.sum())] += 1
        return ShotResult(reduce_counts(full), shots, seed)

    rho = run_density(circuit, nqubits, noise)
    p = np.clip(np.real(np.diag(rho)), 0.0, None)
    full = rng.multinomial(shots, p / p.sum())
    return ShotResult(reduce_counts(full), shots, seed)


def echo_drift_operator(phase: float, n_echo: int) -> np.ndarray:
    """Net single-qubit operator of ``n_echo`` X pulses at ``(k + 1/2) t / n`` under Rz drift.

    ``phase`` is the total drift angle accumulated over the window. For even
    ``n_echo`` the result is exactly the identity.
    """
    if n_echo < 1:
        raise CircuitError("need at least one echo pulse")
    a = phase / n_echo
    op = rz(a / 2.0)
    for k in range(n_echo):
        op = PAULI_X @ op
        op = rz(a / 2.0 if k == n_echo - 1 else a) @ op
    return op
