"""Thermal-relaxation simulation protocols built on the circuit simulator.

Three routes to the relaxed singlet probability:

* :func:`kraus_method` injects amplitude damping and dephasing explicitly on
  one electron (with pair-effective times), dephasing realised as a
  weighted average of runs with and without a Z gate.
* :func:`inherent_method` lets the emulated zero-temperature qubits decay
  during identity-gate waits, interleaved with X echo pulses.
* correction circuits (:func:`correction_combine`, :func:`correction_undo`,
  :func:`double_correction`) add or remove relaxation classically.

Exact mode (``shots == 0``) reads probabilities off the density matrix.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import circuits as qc
from .channels import (
    apply_channel,
    decay_params,
    dephasing_probability,
    gad_kraus,
    gaussian_dephasing_probability,
    relaxed_closed_form,
    relaxed_gaussian,
)
from .circuits import Gate, NoiseModel
from .spinsys import ST_BASIS, PairDynamics, SpinSystemSpec, larmor_frequencies

SINGULAR_TOL = 1e-12


class ProtocolError(ValueError):
    pass


class SingularCorrectionError(ProtocolError):
    """The corrector carries no information left to invert (equilibrium)."""


def derive_seed(seed: int, *keys: int) -> int:
    """Independent 63-bit seed for a sub-task, stable across runs and platforms."""
    state = np.random.SeedSequence([int(seed) & (2 ** 64 - 1), *[int(k) for k in keys]]).generate_state(2, np.uint32)
    return int((int(state[0]) << 31) ^ int(state[1]))


@dataclass(frozen=True)
class Populations:
    S: float
    T0: float
    Tplus: float
    Tminus: float

    @classmethod
    def from_density(cls, rho: np.ndarray) -> "Populations":
        vals = [float(np.real(v @ rho @ v)) for v in ST_BASIS]
        return cls(*vals)

    @classmethod
    def from_bell_probabilities(cls, probs: dict) -> "Populations":
        """Populations from a Bell-basis readout (CX then H maps S -> 11, T0 -> 01).

        ``T+`` and ``T-`` both land on 00/10 and cannot be told apart, so each
        is assigned half of that weight.
        """
        tpm = 0.5 * (probs.get("00", 0.0) + probs.get("10", 0.0))
        return cls(probs.get("11", 0.0), probs.get("01", 0.0), tpm, tpm)

    @property
    def Tpm(self) -> float:
        return 0.5 * (self.Tplus + self.Tminus)

    def total(self) -> float:
        return self.S + self.T0 + self.Tplus + self.Tminus

    def as_tuple(self) -> tuple:
        return (self.S, self.T0, self.Tplus, self.Tminus)


SINGLET_POPULATIONS = Populations(1.0, 0.0, 0.0, 0.0)
EQUILIBRIUM_POPULATIONS = Populations(0.25, 0.25, 0.25, 0.25)


@dataclass
class Estimate:
    value: float
    stderr: float = 0.0
    shots: int = 0
    seed: int = 0
    populations: Populations | None = None
    info: dict = field(default_factory=dict)


# circuit fragments -----------------------------------------------------------

def singlet_preparation() -> list:
    return [Gate("X", 0), Gate("X", 1), Gate("H", 0), Gate("CX", (0, 1))]


def bell_readout() -> list:
    """Maps S -> |11>, T0 -> |01>."""
    return [Gate("CX", (0, 1)), Gate("H", 0)]


def encoding_angle(S: float) -> float:
    if not -1e-12 <= S <= 1 + 1e-12:
        raise ProtocolError(f"singlet probability {S!r} outside [0, 1]")
    return 2.0 * math.acos(math.sqrt(min(max(S, 0.0), 1.0)))


def singlet_encoding(S: float) -> list:
    """Prepare ``sqrt(S)|S> - i sqrt(1-S)|T0>`` from ``|00>`` via an Rx rotation.

    The relative phase of ``i`` is the one coherent S-T0 mixing produces; with
    a real superposition, damping of a single electron would leak population
    asymmetry into the singlet projection.
    """
    return [Gate("X", 1), Gate("RX", 0, theta=encoding_angle(S)), Gate("X", 0), Gate("H", 0), Gate("CX", (0, 1))]


def _readout(rho2: np.ndarray) -> tuple:
    """Populations and Bell-readout probabilities of a two-qubit state."""
    pops = Populations.from_density(rho2)
    mapped = qc.run_density(bell_readout(), 2, initial=rho2)
    return pops, qc.probabilities(mapped)


def _sample_probs(probs: dict, shots: int, seed: int) -> tuple:
    rng = np.random.default_rng(seed)
    keys = sorted(probs)
    p = np.array([probs[k] for k in keys])
    counts = rng.multinomial(shots, p / p.sum())
    return {k: c / shots for k, c in zip(keys, counts)}, dict(zip(keys, map(int, counts)))


def _split_shots(shots: int, w: float) -> tuple:
    """Shots for the with-Z and without-Z runs, proportional to their weights."""
    n_z = int(round(shots * w))
    if shots >= 2:
        if w > 0 and n_z == 0:
            n_z = 1
        if w < 1 and n_z == shots:
            n_z = shots - 1
    return n_z, shots - n_z


def _combine_weighted(w: float, pz: dict, pn: dict, nz: int, nn: int, key: str = "11") -> tuple:
    value = w * pz.get(key, 0.0) + (1 - w) * pn.get(key, 0.0)
    var = 0.0
    if nz:
        var += w * w * pz.get(key, 0.0) * (1 - pz.get(key, 0.0)) / nz
    if nn:
        var += (1 - w) ** 2 * pn.get(key, 0.0) * (1 - pn.get(key, 0.0)) / nn
    return value, math.sqrt(var)


def _mix(w: float, a: dict, b: dict) -> dict:
    keys = set(a) | set(b)
    return {k: w * a.get(k, 0.0) + (1 - w) * b.get(k, 0.0) for k in keys}


def combined_dephasing(t: float, T1: float, T2: float, sigma: float = 0.0,
                       pz_rule=dephasing_probability) -> float:
    """Z weight on one electron giving coherence ``exp(-t/T2 - sigma^2 t^2)`` with pair times."""
    pz = decay_params(t, T1, T2, dephasing=pz_rule).p_z
    pg = gaussian_dephasing_probability(t, sigma) if sigma else 0.0
    return 0.5 * (1.0 - (1.0 - 2.0 * pz) * (1.0 - 2.0 * pg))


# Kraus method ----------------------------------------------------------------

def kraus_circuit(S: float, p_x: float, with_z: bool) -> list:
    """Encoding, ancilla-assisted amplitude damping on qubit 0, optional Z, readout.

    Qubit 2 is the ancilla: CRy(2 asin sqrt(p_x)) from qubit 0 followed by a
    CX back onto qubit 0 damps |1> -> |0> with probability ``p_x``.
    """
    phi = 2.0 * math.asin(math.sqrt(p_x))
    gates = singlet_encoding(S) + [Gate("CRY", (0, 2), theta=phi), Gate("CX", (2, 0))]
    if with_z:
        gates.append(Gate("Z", 0))
    return gates + bell_readout()


def _kraus_state(S: float, p_x: float, with_z: bool) -> np.ndarray:
    rho = qc.run_density(singlet_encoding(S), 2)
    rho = apply_channel(gad_kraus(p_x, 1.0), rho, [0])
    if with_z:
        rho = qc.run_density([Gate("Z", 0)], 2, initial=rho)
    return rho


def kraus_method(S: float, t: float, T1: float, T2: float, shots: int = 0, seed: int = 0,
                 sigma: float = 0.0, circuit_mode: bool | None = None,
                 dephasing: str = "weighted", pz_rule=dephasing_probability) -> Estimate:
    """Relaxed singlet probability by explicit Kraus injection on one electron.

    ``T1``/``T2`` are pair-effective times. ``dephasing`` is ``"weighted"``
    (runs with and without Z, combined with weight ``p_z``) or
    ``"stochastic"`` (a normally distributed Rz angle per shot).
    ``circuit_mode`` defaults to ``shots > 0``: the ancilla circuit is used
    instead of applying the damping channel directly. ``pz_rule`` selects the
    dephasing-probability formula (swapped only by the mutation check).
    """
    if shots < 0:
        raise ProtocolError("shots must be non-negative")
    encoding_angle(S)
    if circuit_mode is None:
        circuit_mode = shots > 0
    params = decay_params(t, T1, T2)
    w_z = combined_dephasing(t, T1, T2, sigma, pz_rule)
    info = {"p_x": params.p_x, "w_z": w_z}

    if circuit_mode:
        def run(with_z):
            rho3 = qc.run_density(kraus_circuit(S, params.p_x, with_z), 3)
            return qc.probabilities(np.asarray(_reduce_ancilla(rho3)))
    else:
        def run(with_z):
            return _readout(_kraus_state(S, params.p_x, with_z))[1]

    if dephasing == "stochastic":
        return _kraus_stochastic(S, params.p_x, w_z, shots, seed, info)
    if dephasing != "weighted":
        raise ProtocolError(f"unknown dephasing mode {dephasing!r}")

    probs_z, probs_n = run(True), run(False)
    if shots == 0:
        rho = (w_z * _kraus_state(S, params.p_x, True) + (1 - w_z) * _kraus_state(S, params.p_x, False))
        pops = Populations.from_density(rho)
        value = w_z * probs_z["11"] + (1 - w_z) * probs_n["11"]
        return Estimate(value, 0.0, 0, seed, pops, info)

    n_z, n_n = _split_shots(shots, w_z)
    seed_z, seed_n = derive_seed(seed, 1), derive_seed(seed, 2)
    freq_z = _sample_probs(probs_z, n_z, seed_z)[0] if n_z else {}
    freq_n = _sample_probs(probs_n, n_n, seed_n)[0] if n_n else {}
    wz_eff = w_z if (n_z and n_n) else (1.0 if n_z else 0.0)
    value, stderr = _combine_weighted(wz_eff, freq_z, freq_n, n_z, n_n)
    pops = Populations.from_bell_probabilities(_mix(wz_eff, freq_z, freq_n))
    info.update(shots_z=n_z, shots_no_z=n_n)
    return Estimate(value, stderr, shots, seed, pops, info)


def _reduce_ancilla(rho3: np.ndarray) -> np.ndarray:
    from .linalg import partial_trace

    return partial_trace(rho3, [2, 2, 2], [0, 1])


def _kraus_stochastic(S, p_x, w_z, shots, seed, info) -> Estimate:
    if shots == 0:
        raise ProtocolError("stochastic dephasing needs shots > 0")
    rng = np.random.default_rng(seed)
    base = _kraus_state(S, p_x, False)
    hits = 0
    counts = {"00": 0, "01": 0, "10": 0, "11": 0}
    for _ in range(shots):
        angle = qc.stochastic_rz_dephasing(w_z, rng)
        rho = qc.run_density([Gate("RZ", 0, theta=angle)] + bell_readout(), 2, initial=base)
        p = np.clip(np.real(np.diag(rho)), 0, None)
        k = format(int(rng.choice(4, p=p / p.sum())), "02b")
        counts[k] += 1
    freq = {k: c / shots for k, c in counts.items()}
    hits = freq["11"]
    info = dict(info, dephasing="stochastic")
    return Estimate(hits, math.sqrt(hits * (1 - hits) / shots), shots, seed,
                    Populations.from_bell_probabilities(freq), info)


# inherent method -------------------------------------------------------------

def echo_deviation(t: float, T1: float, n_echo: int) -> float:
    """Residual of finite echo pulses relative to infinite-temperature relaxation.

    ``T1`` is the per-electron amplitude-damping time experienced by each
    qubit (in simulated time); ``n_echo`` is the even number of X pulses.
    The echo result sits *below* the target by this amount.
    """
    if n_echo < 2 or n_echo % 2:
        raise ProtocolError("n_echo must be even and >= 2")
    if t == 0 or math.isinf(T1):
        return 0.0
    x = t / (n_echo * T1)
    inner = math.expm1(-t / T1) * math.sinh(x / 4.0) ** 2 / math.cosh(x / 2.0)
    return inner * inner


@dataclass
class IdleSchedule:
    identity_count: int
    raw_count: float
    segments: tuple
    effective_T1: float
    effective_T2: float


def identity_schedule(t: float, pair_time: float, noise: NoiseModel, n_echo: int, nqubits: int = 2) -> IdleSchedule:
    """Number of identity gates and their split around ``n_echo`` echo pulses.

    The wait count is ``t * T_qu / (T_rad * t_id)`` with ``T_qu`` the mean
    qubit T1/T2 and ``T_rad = 2 * pair_time`` the per-electron decay time,
    rounded to a multiple of ``2 * n_echo`` so the pulses sit exactly at
    ``(k + 1/2) t / n``.
    """
    if n_echo < 2 or n_echo % 2:
        raise ProtocolError("n_echo must be even and >= 2")
    if not pair_time > 0:
        raise ProtocolError("pair decay time must be positive")
    t_qu = noise.mean_time(nqubits)
    if math.isinf(t_qu) or t == 0:
        return IdleSchedule(0, 0.0, (0,) * (n_echo + 1), math.inf, math.inf)
    raw = t * t_qu / (2.0 * pair_time * noise.t_id)
    unit = 2 * n_echo
    count = unit * int(round(raw / unit))
    half = count // unit
    segments = (half,) + (2 * half,) * (n_echo - 1) + (half,)
    if count == 0:
        return IdleSchedule(0, raw, segments, math.inf, math.inf)
    scale = t / (count * noise.t_id)
    t1 = np.mean([noise.t1(q) for q in range(nqubits)]) * scale
    t2 = np.mean([noise.t2(q) for q in range(nqubits)]) * scale
    return IdleSchedule(count, raw, segments, float(t1), float(t2))


def echo_idle_circuit(schedule: IdleSchedule) -> list:
    gates = []
    wait = Gate("I", (0, 1))
    for k, seg in enumerate(schedule.segments):
        gates.extend([wait] * seg)
        if k < len(schedule.segments) - 1:
            gates.extend([Gate("X", 0), Gate("X", 1)])
    return gates


def evolution_circuit(spec: SpinSystemSpec, t: float, dynamics: PairDynamics | None = None) -> list:
    """Coherent part: Rz rotations for g-only pairs, otherwise the encoded S(t)."""
    if not spec.has_hfc:
        w1, w2 = larmor_frequencies(spec)
        return singlet_preparation() + [Gate("RZ", 0, theta=w1 * t), Gate("RZ", 1, theta=w2 * t)]
    dyn = dynamics or PairDynamics(spec)
    return singlet_encoding(float(np.clip(dyn.singlet(t)[0], 0.0, 1.0)))


def inherent_method(spec: SpinSystemSpec, t: float, noise: NoiseModel | None, n_echo: int = 4,
                    shots: int = 0, seed: int = 0, pair_time: float | None = None,
                    correct_echo: bool = False, include_evolution: bool = True,
                    dynamics: PairDynamics | None = None) -> Estimate:
    """Relaxed singlet probability using the emulated qubits' own decay.

    ``pair_time`` is the pair-effective decay time to emulate (defaults to
    the system's T1 when T1 == T2). With ``correct_echo`` the known
    finite-echo residual is added back. ``include_evolution=False`` replaces
    the coherent evolution by nothing, which yields the correction-circuit run.
    """
    if noise is None:
        noise = NoiseModel()
    if pair_time is None:
        T1, T2 = spec.relaxation_times()
        if T1 != T2:
            raise ProtocolError("inherent method needs pair_time when T1 != T2")
        pair_time = T1
    sched = identity_schedule(t, pair_time, noise, n_echo)
    prep = evolution_circuit(spec, t, dynamics) if include_evolution else singlet_preparation()
    idle = echo_idle_circuit(sched)
    w_g = gaussian_dephasing_probability(t, spec.sigma) if spec.sigma else 0.0
    info = {"identity_count": sched.identity_count, "raw_identity_count": sched.raw_count,
            "effective_T1": sched.effective_T1, "w_gauss": w_g}

    def state(with_z: bool) -> np.ndarray:
        gates = prep + ([Gate("Z", 0)] if with_z else []) + idle
        return qc.run_density(gates, 2, noise)

    rho_n = state(False)
    rho = rho_n if w_g == 0 else w_g * state(True) + (1 - w_g) * rho_n
    deviation = echo_deviation(t, sched.effective_T1, n_echo) if sched.identity_count else 0.0
    info["echo_deviation"] = deviation
    shift = deviation if correct_echo else 0.0

    if shots == 0:
        pops, probs = _readout(rho)
        return Estimate(probs["11"] + shift, 0.0, 0, seed, pops, info)

    if w_g == 0:
        freq = _sample_probs(_readout(rho_n)[1], shots, seed)[0]
        value = freq.get("11", 0.0)
        stderr = math.sqrt(value * (1 - value) / shots)
    else:
        n_z, n_n = _split_shots(shots, w_g)
        fz = _sample_probs(_readout(state(True))[1], n_z, derive_seed(seed, 1))[0] if n_z else {}
        fn = _sample_probs(_readout(rho_n)[1], n_n, derive_seed(seed, 2))[0] if n_n else {}
        w_eff = w_g if (n_z and n_n) else (1.0 if n_z else 0.0)
        value, stderr = _combine_weighted(w_eff, fz, fn, n_z, n_n)
        freq = _mix(w_eff, fz, fn)
    return Estimate(value + shift, stderr, shots, seed, Populations.from_bell_probabilities(freq), info)


# correction circuits ---------------------------------------------------------

def correction_combine(run: Populations, corr: Populations) -> float:
    """Add relaxation to undamped populations using a decohered-singlet corrector."""
    return run.S * corr.S + run.T0 * corr.T0 + run.Tplus * corr.Tplus + run.Tminus * corr.Tminus


def correction_forward(run: Populations, corr: Populations) -> Populations:
    """Full damped populations (singlet, T0 and the symmetric T+-) from undamped ones."""
    tpm, cpm = run.Tpm, corr.Tpm
    s = correction_combine(run, corr)
    t0 = run.T0 * corr.S + run.S * corr.T0 + run.Tplus * corr.Tplus + run.Tminus * corr.Tminus
    t = tpm + cpm - 4.0 * tpm * cpm
    return Populations(s, t0, t, t)


def correction_undo(damped: Populations, corr: Populations, tol: float = SINGULAR_TOL) -> Populations:
    """Recover undamped populations from damped ones and the corrector.

    Solves the forward relations for ``T+-`` then for ``(S, T0)``. Raises
    :class:`SingularCorrectionError` when the corrector has reached the
    point where that inversion is impossible.
    """
    cpm = corr.Tpm
    denom = 1.0 - 4.0 * cpm
    det = corr.S * corr.S - corr.T0 * corr.T0
    if abs(denom) < tol or abs(det) < tol:
        raise SingularCorrectionError(
            f"corrector {corr.as_tuple()} is (near) equilibrium; relaxation cannot be undone")
    tpm = (damped.Tpm - cpm) / denom
    cross = 2.0 * tpm * cpm
    rhs_s = damped.S - cross
    rhs_t0 = damped.T0 - cross
    s = (corr.S * rhs_s - corr.T0 * rhs_t0) / det
    t0 = (corr.S * rhs_t0 - corr.T0 * rhs_s) / det
    return Populations(s, t0, tpm, tpm)


def double_correction(run_inherent: Populations, corr_inherent: Populations, corr_kraus: Populations) -> float:
    """Swap qubit relaxation for target relaxation: undo with one corrector, redo with another."""
    undamped = correction_undo(run_inherent, corr_inherent)
    return correction_combine(undamped, corr_kraus)


def simplified_double_correction(run_inherent: Populations, corr_inherent: Populations) -> float:
    """T1 -> infinity shortcut for encodings without T+- transitions.

    Any T+- weight in the corrector arose from amplitude damping, so it is
    returned to the singlet: ``P(S) + P(T-)``.
    """
    return run_inherent.S + corr_inherent.Tpm


def kraus_corrector(t: float, T1: float, T2: float, shots: int = 0, seed: int = 0, sigma: float = 0.0) -> Populations:
    """Populations of the decohered singlet (no coherent evolution) by the Kraus method."""
    return kraus_method(1.0, t, T1, T2, shots=shots, seed=seed, sigma=sigma).populations


# MFE -------------------------------------------------------------------------

def tr_mfe(S_B, S_0, theta: float):
    """Time-resolved magnetic field effect ``(4 theta S_B + 1 - theta) / (4 theta S_0 + 1 - theta)``."""
    if not 0.0 <= theta <= 1.0:
        raise ProtocolError("theta must lie in [0, 1]")
    S_B = np.asarray(S_B, dtype=float)
    S_0 = np.asarray(S_0, dtype=float)
    out = (4 * theta * S_B + (1 - theta)) / (4 * theta * S_0 + (1 - theta))
    return float(out) if out.ndim == 0 else out


def intensity(F, S, theta: float):
    """Recombination fluorescence ``F (theta S + (1 - theta)/4)``."""
    F = np.asarray(F, dtype=float)
    if np.any(F < 0):
        raise ProtocolError("recombination rate must be non-negative")
    out = F * (theta * np.asarray(S, dtype=float) + 0.25 * (1 - theta))
    return float(out) if out.ndim == 0 else out


# series ----------------------------------------------------------------------

METHODS = ("kraus", "inherent", "inherent+correction")


@dataclass(frozen=True)
class MethodConfig:
    method: str = "kraus"
    shots: int = 0
    n_echo: int = 4
    noise: NoiseModel = field(default_factory=NoiseModel)
    correct_echo: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ProtocolError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.shots < 0:
            raise ProtocolError("shots must be non-negative")
        if self.method != "kraus" and (self.n_echo < 2 or self.n_echo % 2):
            raise ProtocolError("n_echo must be even and >= 2 for the inherent method")


def exact_relaxed(spec: SpinSystemSpec, t, dynamics: PairDynamics | None = None):
    """Closed-form reference (with Gaussian dephasing when ``spec.sigma`` > 0)."""
    T1, T2 = spec.relaxation_times()
    dyn = dynamics or PairDynamics(spec)
    S = np.clip(dyn.singlet(t), 0.0, 1.0)
    if spec.sigma:
        return relaxed_gaussian(S, t, T1, T2, spec.sigma)
    return relaxed_closed_form(S, t, T1, T2)


def estimate_point(spec: SpinSystemSpec, cfg: MethodConfig, t: float, seed: int,
                   dynamics: PairDynamics | None = None) -> Estimate:
    """One time point of a relaxed-singlet series with the configured method."""
    T1, T2 = spec.relaxation_times()
    dyn = dynamics or PairDynamics(spec)
    if cfg.method == "kraus":
        S = float(np.clip(dyn.singlet(t)[0], 0.0, 1.0))
        return kraus_method(S, t, T1, T2, shots=cfg.shots, seed=seed, sigma=spec.sigma)
    if cfg.method == "inherent":
        return inherent_method(spec, t, cfg.noise, cfg.n_echo, cfg.shots, seed,
                               correct_echo=cfg.correct_echo, dynamics=dyn)
    # qubits emulate T1 = T2 = T2_target, then the correction swaps in the target T1
    run = inherent_method(spec, t, cfg.noise, cfg.n_echo, cfg.shots, derive_seed(seed, 10),
                          pair_time=T2, dynamics=dyn)
    corr = inherent_method(spec, t, cfg.noise, cfg.n_echo, cfg.shots, derive_seed(seed, 11),
                           pair_time=T2, include_evolution=False)
    target = kraus_corrector(t, T1, T2, cfg.shots, derive_seed(seed, 12), sigma=0.0)
    value = double_correction(run.populations, corr.populations, target)
    stderr = math.sqrt(run.stderr ** 2 + corr.stderr ** 2) if cfg.shots else 0.0
    return Estimate(value, stderr, cfg.shots, seed, None,
                    {"run_S": run.value, "corr": corr.populations, "target": target})


def worker_count(default: int | None = None) -> int:
    env = os.environ.get("SPINBEATS_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            raise ProtocolError(f"SPINBEATS_THREADS must be an integer, got {env!r}")
    return min(cap, default) if default else cap


def simulate_series(spec: SpinSystemSpec, cfg: MethodConfig, times: Sequence[float], seed: int,
                    workers: int | None = None) -> list:
    """Estimates for every time point; point ``i`` uses ``derive_seed(seed, i)``.

    Points are independent jobs; results come back in grid order regardless
    of the worker count.
    """
    dyn = PairDynamics(spec)
    seeds = [derive_seed(seed, i) for i in range(len(times))]
    n = worker_count(workers)

    def job(i):
        return estimate_point(spec, cfg, float(times[i]), seeds[i], dyn)

    if n <= 1 or len(times) < 2:
        return [job(i) for i in range(len(times))]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(job, range(len(times))))
