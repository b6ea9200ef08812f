"""Named system presets, the detector-noise study for reconstructed MFE curves, and error metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .protocols import exact_relaxed, intensity, tr_mfe
from .spinsys import Coupling, PairDynamics, SpinSystemSpec


class PresetError(ValueError):
    pass


DPS_G = (2.0028, 2.0082)
DPS_FIELDS = {"low": 17.0, "high": 960.0}
DPS_T_BARE = 50.0
DPS_T_SEMICLASSICAL = 60.0
DPS_THETA = 0.425

# g-factors for TMP/PTP are not tabulated alongside its couplings; both radicals
# are given the DPS low g value and may be overridden from the config file.
TMP_G = (2.0028, 2.0028)
TMP_FIELDS = {"low": 0.0, "high": 100.0}
TMP_HFC = (Coupling(1, 1, 1.8), Coupling(1, 0.5, -1.87))
TMP_THETA = 0.108

PRESET_NAMES = ("dps-low", "dps-high", "tmp-low", "tmp-high")


def dps(field: str = "low", sigma: float | None = None) -> SpinSystemSpec:
    """DPS/PTP pair. ``sigma`` (rad/ns) switches on the semiclassical nuclear dephasing."""
    if field not in DPS_FIELDS:
        raise PresetError(f"field must be 'low' or 'high', got {field!r}")
    T = DPS_T_BARE if not sigma else DPS_T_SEMICLASSICAL
    return SpinSystemSpec(DPS_G[0], DPS_G[1], DPS_FIELDS[field], (), T, T, DPS_THETA,
                          float(sigma or 0.0), f"dps-{field}")


def tmp(field: str = "low", tau: float | None = None, T2: float | None = None) -> SpinSystemSpec:
    """TMP/PTP pair; low field needs ``tau`` (= T1 = T2), high field needs ``T2`` (T1 is infinite)."""
    if field == "low":
        if tau is None:
            raise PresetError("tmp-low requires the relaxation time tau (no default is known)")
        T1 = T2_ = float(tau)
    elif field == "high":
        if T2 is None:
            raise PresetError("tmp-high requires T2 (no default is known)")
        T1, T2_ = math.inf, float(T2)
    else:
        raise PresetError(f"field must be 'low' or 'high', got {field!r}")
    return SpinSystemSpec(TMP_G[0], TMP_G[1], TMP_FIELDS[field], TMP_HFC, T1, T2_, TMP_THETA, 0.0,
                          f"tmp-{field}")


def preset(name: str, **kwargs) -> SpinSystemSpec:
    family, _, field_ = name.partition("-")
    if name not in PRESET_NAMES:
        raise PresetError(f"unknown preset {name!r}; choose from {', '.join(PRESET_NAMES)}")
    return dps(field_, **kwargs) if family == "dps" else tmp(field_, **kwargs)


def default_grid(family: str, points: int = 121) -> np.ndarray:
    stop = {"dps": 60.0, "tmp": 100.0}.get(family)
    if stop is None:
        raise PresetError(f"unknown system family {family!r}")
    return np.linspace(0.0, stop, points)


# recombination fluorescence -------------------------------------------------

@dataclass(frozen=True)
class FtParams:
    A: float
    B: float
    t1: float
    t2: float
    alpha: float

    def __post_init__(self):
        for name in ("A", "B", "t1", "t2", "alpha"):
            if not getattr(self, name) > 0:
                raise PresetError(f"F(t) parameter {name} must be positive")


FT_TMP = FtParams(3.12e6, 2.21e5, 3.47, 123.0, 6.11)
FT_DPS = FtParams(1.317e6, 6.658e5, 2.1432, 5.1549, 1.223)
DETECTOR_SIGMA = {"tmp": 75.0, "dps": 700.0}


def ft_model(t, p: FtParams):
    """Recombination rate ``A exp(-t/t1) + B (1 + t/t2)^-alpha``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    out = p.A * np.exp(-t / p.t1) + p.B * (1.0 + t / p.t2) ** (-p.alpha)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class NoiseStudyConfig:
    sigma: float
    mu: float = 0.0
    trials: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if self.trials < 1:
            raise ValueError("trials must be positive")


@dataclass
class NoiseStudyResult:
    times: np.ndarray
    theory: np.ndarray
    mean: np.ndarray
    std: np.ndarray
    predicted_std: np.ndarray
    I0: np.ndarray
    rejected: np.ndarray
    samples: np.ndarray = field(repr=False)


def noisy_mfe_study(high: SpinSystemSpec, low: SpinSystemSpec, ft: FtParams, cfg: NoiseStudyConfig,
                    times: Sequence[float], theta: float | None = None) -> NoiseStudyResult:
    """Add Gaussian detector noise to both fluorescence curves and rebuild the MFE from their ratio.

    Trials whose noisy low-field intensity is not positive are rejected and
    counted per time point (their entries are NaN in ``samples``).
    """
    theta = high.theta if theta is None else theta
    if theta is None:
        raise PresetError("theta must be given by the preset or the caller")
    times = np.asarray(times, dtype=float)
    S_B = exact_relaxed(high, times)
    S_0 = exact_relaxed(low, times)
    F = ft_model(times, ft)
    I_B = intensity(F, S_B, theta)
    I_0 = intensity(F, S_0, theta)
    theory = tr_mfe(S_B, S_0, theta)

    children = np.random.SeedSequence(cfg.seed).spawn(cfg.trials)
    samples = np.empty((cfg.trials, times.size))
    for k, child in enumerate(children):
        rng = np.random.default_rng(child)
        noise = rng.normal(cfg.mu, cfg.sigma, size=(2, times.size)) if cfg.sigma else np.full((2, times.size), cfg.mu)
        nb, n0 = I_B + noise[0], I_0 + noise[1]
        with np.errstate(divide="ignore", invalid="ignore"):
            samples[k] = np.where(n0 > 0, nb / n0, np.nan)
    rejected = np.sum(np.isnan(samples), axis=0)
    with np.errstate(invalid="ignore"):
        mean = np.nanmean(samples, axis=0)
        std = np.nanstd(samples, axis=0, ddof=1) if cfg.trials > 1 else np.zeros(times.size)
    predicted = cfg.sigma / I_0 * np.sqrt(1.0 + theory ** 2)
    return NoiseStudyResult(times, theory, mean, std, predicted, I_0, rejected, samples)


def mse(series, reference) -> float:
    """Mean squared difference as a percentage: ``100 * mean((x - ref)^2)``."""
    x = np.asarray(series, dtype=float)
    r = np.asarray(reference, dtype=float)
    if x.shape != r.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {r.shape}")
    if x.size == 0:
        raise ValueError("empty series")
    return float(np.mean((x - r) ** 2) * 100.0)


def theory_mfe(high: SpinSystemSpec, low: SpinSystemSpec, times, theta: float | None = None):
    theta = high.theta if theta is None else theta
    return tr_mfe(exact_relaxed(high, times), exact_relaxed(low, times), theta)
