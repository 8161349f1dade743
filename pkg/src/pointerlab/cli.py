"""
Command-line front end.

    pointerlab ps          --config CFG --out DIR
    pointerlab pps         --config CFG --out DIR
    pointerlab sensitivity --config CFG --out DIR [--seed N]
    pointerlab verify      [--config CFG] [--out DIR] [--seed N]

Exit codes: 0 success, 1 configuration error, 2 verification failure,
3 runtime error (grid containment, orthogonal post-selection, ...).
"""
from __future__ import annotations

import argparse
import datetime
import math
import os
import sys
import warnings
from typing import List, Optional

import numpy as np

from . import __version__, exact, oracle
from .config import ExperimentConfig, config_hash, load_config
from .errors import (ConfigError, InvalidRegime, PointerLabError,
                     UndefinedSensitivity, WeakRegimeWarning)
from .hilbert import pps_context
from .io import file_sha256, write_json, write_manifest_atomic, write_table
from .montecarlo import mc_gamma, mc_mean_a, mc_re_weak_value
from .pointer import MOMENTUM, POSITION, moments_rows, observable_mean
from .verify import check_configured, run_suite
from .weak import sensitivity_ps, sensitivity_re_weak_value

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_RUNTIME = 0, 1, 2, 3


class Run:
    """Collects output files and writes the manifest last."""

    def __init__(self, command: str, cfg: Optional[ExperimentConfig], out_dir: str, fmt: str,
                 seed: int):
        self.command = command
        self.cfg = cfg
        self.out_dir = out_dir
        self.fmt = fmt
        self.seed = seed
        self.outputs: List[str] = []
        os.makedirs(out_dir, exist_ok=True)

    def path(self, stem: str, ext: Optional[str] = None) -> str:
        return os.path.join(self.out_dir, f"{stem}.{ext or self.fmt}")

    def table(self, stem, columns, rows, meta=None):
        p = write_table(self.path(stem), columns, rows, meta, self.fmt)
        self.outputs.append(p)
        return p

    def json(self, stem, doc):
        p = write_json(self.path(stem, "json"), doc)
        self.outputs.append(p)
        return p

    def finish(self):
        manifest = {
            "command": self.command,
            "config_sha256": config_hash(self.cfg.raw) if self.cfg else None,
            "tool_version": __version__,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "seed": self.seed,
            "outputs": [{"path": os.path.basename(p), "sha256": file_sha256(p)}
                        for p in self.outputs],
        }
        write_manifest_atomic(os.path.join(self.out_dir, "manifest.json"), manifest)


def _meta(cfg: ExperimentConfig, **extra):
    g = cfg.grid
    meta = {"config_sha256": cfg.sha256, "n_points": g.n_points, "q_min": g.q_min,
            "q_max": g.q_max, "hbar": g.hbar}
    meta.update(extra)
    return meta


def _extra_observables(cfg):
    return [m for m in cfg.observables if not (m.is_position or m.is_momentum)]


def _mean_columns(cfg):
    cols = ["gamma", "mean_q", "mean_p", "var_q", "var_p"]
    for m in _extra_observables(cfg):
        cols += [f"mean_{m.label}", f"var_{m.label}"]
    return cols


def _mean_row(gamma, mean_fn, rows_for_moments, grid, cfg):
    mq = moments_rows(grid, rows_for_moments, POSITION)
    row = [gamma, mean_fn(POSITION), mean_fn(MOMENTUM), mq.var_q, mq.var_p]
    for m in _extra_observables(cfg):
        row += [mean_fn(m), moments_rows(grid, rows_for_moments, m).var_m]
    return row


def cmd_ps(cfg: ExperimentConfig, run: Run) -> int:
    a = cfg.operator()
    projector = a.is_projector()
    phi, grid = cfg.phi, cfg.grid
    mean_rows_out = []
    for i, g in enumerate(cfg.gammas):
        if projector:
            joint = exact.interaction_apply(cfg.psi, phi, a, g)
            profile = exact.ps_profile(cfg.psi, phi, a, g)

            def mean_fn(m, g=g):
                return exact.ps_mean(m, cfg.psi, phi, a, g)
        else:
            joint = oracle.evolve_joint(cfg.psi, phi, a, g)
            profile = joint.marginal()

            def mean_fn(m, joint=joint):
                return oracle.oracle_ps_moments(joint, m).mean_m
        run.table(f"ps_profile_g{i:03d}", ["q", "ps_profile"], zip(grid.q, profile),
                  _meta(cfg, gamma=g, method="closed_form" if projector else "oracle"))
        mean_rows_out.append(_mean_row(g, mean_fn, joint.amplitudes, grid, cfg))
    run.table("ps_means", _mean_columns(cfg), mean_rows_out,
              _meta(cfg, method="closed_form" if projector else "oracle"))
    return EXIT_OK


def _require_psi_f(cfg):
    if cfg.psi_f is None:
        raise ConfigError("system.psi_f", "required for pre/post-selected runs")


def cmd_pps(cfg: ExperimentConfig, run: Run) -> int:
    _require_psi_f(cfg)
    a = cfg.operator()
    ctx = pps_context(cfg.psi, cfg.psi_f, a)
    projector = a.is_projector()
    phi, grid = cfg.phi, cfg.grid
    mean_rows_out, summary = [], []
    for i, g in enumerate(cfg.gammas):
        if projector:
            state = exact.pps_pointer_state(ctx, a, phi, g)
            pointer, n = state.pointer, state.normalization_n
            ps_prof = exact.ps_profile(cfg.psi, phi, a, g)
            pps_prof = exact.pps_profile(ctx, a, phi, g)

            def mean_fn(m, g=g):
                return exact.pps_mean(m, ctx, a, phi, g)
        else:
            joint = oracle.evolve_joint(cfg.psi, phi, a, g)
            pointer, raw = oracle.oracle_post_select(joint, cfg.psi_f)
            n = raw / abs(ctx.overlap)
            ps_prof = joint.marginal()
            pps_prof = pointer.density

            def mean_fn(m, pointer=pointer):
                return observable_mean(pointer, m)
        run.table(f"pps_profile_g{i:03d}", ["q", "ps_profile", "pps_profile"],
                  zip(grid.q, ps_prof, pps_prof), _meta(cfg, gamma=g))
        mean_rows_out.append(_mean_row(g, mean_fn, pointer.amplitudes, grid, cfg))
        summary.append({"gamma": g, "a_w": {"re": ctx.a_w.re, "im": ctx.a_w.im},
                        "chi": ctx.chi, "N": n})
    run.table("pps_means", _mean_columns(cfg), mean_rows_out, _meta(cfg))
    run.json("pps_summary", {"config_sha256": cfg.sha256,
                             "overlap": {"re": ctx.overlap.real, "im": ctx.overlap.imag},
                             "rows": summary})
    return EXIT_OK


def _im_effect(term):
    if term is None or math.isnan(term) or abs(term) <= 1e-12:
        return "none"
    return "improves" if term < 0 else "degrades"


def cmd_sensitivity(cfg: ExperimentConfig, run: Run) -> int:
    a = cfg.operator()
    phi = cfg.phi
    ctx = pps_context(cfg.psi, cfg.psi_f, a) if cfg.psi_f is not None else None
    columns = ["gamma", "observable", "delta_mean_a", "delta_gamma", "delta_re_aw",
               "b_mp_im", "c_mp", "im_accuracy_term", "status"]
    rows = []
    for g in cfg.gammas:
        for m in cfg.observables:
            try:
                ps = sensitivity_ps(m, cfg.psi, a, phi, g)
                dgamma, dre, im_term = ps.delta_gamma, math.nan, math.nan
                if ctx is not None:
                    pps = sensitivity_re_weak_value(m, ctx, a, phi, g)
                    dgamma, dre, im_term = pps.delta_gamma, pps.delta_re_aw, pps.im_accuracy_term
                rows.append([g, m.label, ps.delta_mean_a, dgamma, dre, ps.b_mp.imag, ps.c_mp,
                             im_term, "ok"])
            except (UndefinedSensitivity, InvalidRegime) as exc:
                rows.append([g, m.label] + [math.nan] * 6 + [f"{type(exc).__name__}: {exc}"])
    run.table("sensitivity", columns, rows, _meta(cfg))

    rng = np.random.default_rng(run.seed)
    mc = []
    for g in cfg.gammas:
        entry = {"gamma": g}
        entry["delta_mean_a"] = _mc_entry(mc_mean_a, (cfg.psi, a, phi, g), cfg, rng)
        entry["delta_gamma"] = _mc_entry(mc_gamma, (cfg.psi, a, phi, g), cfg, rng)
        if ctx is not None:
            entry["delta_re_aw"] = _mc_entry(mc_re_weak_value, (ctx, a, phi, g), cfg, rng)
            try:
                term = sensitivity_re_weak_value(POSITION, ctx, a, phi, g).im_accuracy_term
            except PointerLabError:
                term = math.nan
            entry["im_aw_accuracy_term"] = term
            entry["im_aw_effect_on_re_aw_accuracy"] = _im_effect(term)
        mc.append(entry)
    run.json("monte_carlo", {"config_sha256": cfg.sha256, "seed": run.seed,
                             "samples": cfg.mc_samples, "observable": "q", "rows": mc})
    return EXIT_OK


def _mc_entry(fn, args, cfg, rng):
    try:
        res = fn(*args, cfg.mc_samples, rng)
    except PointerLabError as exc:
        return {"status": f"{type(exc).__name__}: {exc}"}
    d = res.to_dict()
    d["status"] = "ok"
    return d


def cmd_verify(cfg: Optional[ExperimentConfig], run: Optional[Run], seed: int,
               instances: int) -> int:
    report = run_suite(instances, seed, monte_carlo=True,
                       mc_samples=cfg.mc_samples if cfg else 10_000)
    if cfg is not None:
        report.checks.extend(check_configured(cfg.psi, cfg.operator_factory, cfg.phi,
                                              cfg.gammas, cfg.psi_f))
    for line in report.lines():
        print(line)
    print("convergence probe (PPS, M = q): gamma, exact, weak, |error|, ratio")
    for row in report.convergence_rows["pps_q_projector"]:
        print("  " + "  ".join(f"{v:.6g}" for v in row))
    if run is not None:
        run.json("verify_report", report.to_dict())
    return EXIT_OK if report.passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pointerlab",
                                     description="Exact and weak-regime measurement pointers.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("ps", "pre-selected profiles and means"),
                        ("pps", "pre/post-selected profiles, means and weak values"),
                        ("sensitivity", "measurement sensitivities and Monte-Carlo check"),
                        ("verify", "oracle-equivalence and convergence suite")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=name != "verify", help="JSON experiment config")
        p.add_argument("--out", help="output directory (overrides outputs.directory)")
        p.add_argument("--seed", type=int, help="random seed (overrides config)")
        p.add_argument("--format", choices=("csv", "json"), help="table format")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    warnings.simplefilter("default", WeakRegimeWarning)
    try:
        cfg = load_config(args.config) if args.config else None
        seed = args.seed if args.seed is not None else (cfg.seed if cfg else 0)
        out = args.out or (cfg.output_dir if cfg else None)
        fmt = args.format or (cfg.formats[0] if cfg else "csv")
        if args.command == "verify":
            run = Run("verify", cfg, out, fmt, seed) if out else None
            code = cmd_verify(cfg, run, seed, cfg.verify_instances if cfg else 200)
            if run is not None:
                run.finish()
            return code
        if out is None:
            raise ConfigError("outputs.directory", "no output directory (use --out)")
        run = Run(args.command, cfg, out, fmt, seed)
        handler = {"ps": cmd_ps, "pps": cmd_pps, "sensitivity": cmd_sensitivity}[args.command]
        code = handler(cfg, run)
        run.finish()
        return code
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PointerLabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
