"""Command-line entry point: ``spinbeats {simulate,mfe,noise-study,verify}``.

Exit codes: 0 success, 2 configuration error, 3 numerical verification failure.
Output files are written only after every computation has finished, each
prefixed by the resolved configuration as ``# `` comment lines.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import protocols as pr
from .config import ConfigError, RunConfig, comment_header, load_config
from .svg import line_plot
from .verify import MUTATIONS, report, run_checks

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERIFY = 3

log = logging.getLogger("spinbeats")


def fmt(x) -> str:
    return format(float(x), ".17g")


def _atomic_write(path: str, text: str) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _csv(header: str, columns: list, rows) -> str:
    lines = [",".join(columns)]
    lines.extend(",".join(v if isinstance(v, str) else (str(v) if isinstance(v, (int, np.integer)) else fmt(v))
                          for v in row) for row in rows)
    return header + "\n".join(lines) + "\n"


def _svg_path(cfg: RunConfig, args) -> str:
    if args.svg is True:
        if cfg.svg:
            return cfg.svg
        if not cfg.csv:
            raise ConfigError("--svg needs an output path (--out or output.csv)")
        return str(Path(cfg.csv).with_suffix(".svg"))
    if isinstance(args.svg, str):
        return args.svg
    return cfg.svg


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be non-negative")
        cfg = replace(cfg, seed=args.seed)
        if cfg.noise_study is not None:
            cfg = replace(cfg, noise_study=replace(cfg.noise_study, seed=args.seed))
    if args.shots is not None:
        if args.shots < 0:
            raise ConfigError("--shots must be non-negative")
        cfg = replace(cfg, method=replace(cfg.method, shots=args.shots))
    if args.out:
        cfg = replace(cfg, csv=args.out)
    return cfg


def _require(cfg: RunConfig, attr: str, what: str):
    value = getattr(cfg, attr)
    if value is None:
        raise ConfigError(f"this command needs a [{attr}] section ({what})")
    return value


def _series(spec, cfg: RunConfig, seed: int):
    try:
        return pr.simulate_series(spec, cfg.method, cfg.times(), seed)
    except (pr.ProtocolError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def simulate_rows(cfg: RunConfig) -> list:
    spec = _require(cfg, "system", "the radical pair to simulate")
    times = cfg.times()
    est = _series(spec, cfg, cfg.seed)
    exact = pr.exact_relaxed(spec, times)
    return [(t, e.value, x, e.stderr, e.shots, e.seed) for t, e, x in zip(times, est, np.atleast_1d(exact))]


def mfe_rows(cfg: RunConfig) -> tuple:
    high = _require(cfg, "system", "high-field pair")
    low = _require(cfg, "reference", "low-field pair")
    theta = high.theta
    if theta is None:
        raise ConfigError("system.theta is required for the MFE")
    times = cfg.times()
    s_b = [e.value for e in _series(high, cfg, pr.derive_seed(cfg.seed, 0))]
    s_0 = [e.value for e in _series(low, cfg, pr.derive_seed(cfg.seed, 1))]
    m_est = mfe_series(times, s_b, times, s_0, theta)
    m_th = np.atleast_1d(ex.theory_mfe(high, low, times, theta))
    return list(zip(times, m_est, m_th)), ex.mse(m_est, m_th)


def mfe_series(t_high, s_high, t_low, s_low, theta: float) -> np.ndarray:
    """MFE from two estimated singlet series that must share a time grid."""
    t_high, t_low = np.asarray(t_high, dtype=float), np.asarray(t_low, dtype=float)
    if t_high.shape != t_low.shape or not np.array_equal(t_high, t_low):
        raise ConfigError("high- and low-field runs must use identical time grids")
    return np.atleast_1d(pr.tr_mfe(np.asarray(s_high), np.asarray(s_low), theta))


def cmd_simulate(cfg: RunConfig, args) -> int:
    rows = simulate_rows(cfg)
    text = _csv(comment_header(cfg), ["t_ns", "S_tilde_est", "S_tilde_exact", "stderr_est", "shots", "seed"], rows)
    svg = _svg_path(cfg, args)
    _emit(cfg, text)
    if svg:
        t = [r[0] for r in rows]
        _atomic_write(svg, line_plot([("estimate", t, [r[1] for r in rows]), ("closed form", t, [r[2] for r in rows])],
                                     f"{cfg.system.name}: {cfg.method.method}", "t (ns)", "relaxed singlet probability"))
    return EXIT_OK


def cmd_mfe(cfg: RunConfig, args) -> int:
    rows, err = mfe_rows(cfg)
    text = _csv(comment_header(cfg), ["t_ns", "M_est", "M_theory"], rows) + f"# mse_percent={fmt(err)}\n"
    svg = _svg_path(cfg, args)
    _emit(cfg, text)
    if svg:
        t = [r[0] for r in rows]
        _atomic_write(svg, line_plot([("estimate", t, [r[1] for r in rows]), ("theory", t, [r[2] for r in rows])],
                                     "time-resolved MFE", "t (ns)", "M(t)"))
    return EXIT_OK


def cmd_noise_study(cfg: RunConfig, args) -> int:
    high = _require(cfg, "system", "high-field pair")
    low = _require(cfg, "reference", "low-field pair")
    study = _require(cfg, "noise_study", "detector noise parameters")
    try:
        res = ex.noisy_mfe_study(high, low, cfg.ft, study, cfg.times())
    except (ValueError, ex.PresetError) as exc:
        raise ConfigError(str(exc)) from None
    rows = [(t, th, m, s, p, i0, int(r)) for t, th, m, s, p, i0, r in
            zip(res.times, res.theory, res.mean, res.std, res.predicted_std, res.I0, res.rejected)]
    text = _csv(comment_header(cfg), ["t_ns", "M_theory", "M_mean", "M_std", "M_std_predicted", "I0", "rejected"], rows)
    svg = _svg_path(cfg, args)
    _emit(cfg, text)
    if svg:
        _atomic_write(svg, line_plot([("empirical std", res.times, res.std), ("delta method", res.times, res.predicted_std)],
                                     "reconstructed MFE noise", "t (ns)", "std of M"))
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_checks(seed=args.seed or 0, mutate=args.mutate)
    doc = report(results, args.mutate)
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        _atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    for r in results:
        log.info("%s %s (max deviation %.3e, %s %.1e)", "PASS" if r.passed else "FAIL", r.name,
                 r.max_deviation, r.expect, r.tolerance)
    return EXIT_OK if doc["passed"] else EXIT_VERIFY


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.csv:
        _atomic_write(cfg.csv, text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinbeats", description="Radical-pair quantum beats with thermal relaxation.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("simulate", "relaxed singlet probability series"),
                        ("mfe", "time-resolved magnetic field effect from a high/low field pair"),
                        ("noise-study", "detector-noise propagation into the reconstructed MFE")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="TOML config (or a CSV written by this tool)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--shots", type=int, help="override method.shots (0 = exact)")
        p.add_argument("--out", help="CSV output path (default: output.csv or stdout)")
        p.add_argument("--svg", nargs="?", const=True, default=None,
                       help="also write an SVG plot (optional path; default next to the CSV)")
    p = sub.add_parser("verify", help="run the numerical release gate")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--mutate", choices=sorted(MUTATIONS), help="inject a known-wrong formula (gate must fail)")
    return parser


COMMANDS = {"simulate": cmd_simulate, "mfe": cmd_mfe, "noise-study": cmd_noise_study}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "verify":
        return cmd_verify(args)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"spinbeats: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
