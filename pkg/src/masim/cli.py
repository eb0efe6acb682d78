"""``masim`` command line: one experiment per invocation, CSV out.

    masim <experiment> [--config PATH] [--seed N] [--out DIR] [--threads K]

Writes ``<experiment>.csv`` and ``<experiment>.meta.json`` into ``--out``,
plus ``<experiment>.analytic.csv`` for experiments with closed-form
overlays. Exit status: 0 success, 1 config error, 2 resource error, 3 I/O
error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .channel import ChannelField, PhysicalAngles, Region
from .config import EXPERIMENTS, ExperimentConfig, load_config, validate
from .deterministic import scan_gain_grid
from .exceptions import ConfigError, MasimError, ResourceError
from .montecarlo import (ChannelSampler, correlation_experiment, philox_stream,
                         quantization_period_experiment, run_sweep)
from .stochastic import (RayleighSumModel, RegionDiscretization, cdf_infinite_bounds,
                         cdf_multi_ub_approx, cdf_one, cdf_three_approx, cdf_two,
                         expected_max_gain, infinite_path_bounds, spatial_correlation)

EXIT_OK, EXIT_CONFIG, EXIT_RESOURCE, EXIT_IO = 0, 1, 2, 3


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    return format(float(v), ".17g")


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[tuple]) -> None:
    # rows are (sweep value, label, ...); sort by sweep value then label
    rows = sorted(rows, key=lambda r: (float(r[0]), r[1]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(_fmt(v) for v in r) + "\n")


def _t_grid(cfg: ExperimentConfig) -> np.ndarray:
    t_max = cfg.t_max or 5 * cfg.sigma2 * cfg.l_r
    return np.linspace(0.0, t_max, cfg.t_points)


def analytic_cdf(t, model: RayleighSumModel):
    """Best available closed form for the max-gain CDF with ``model.l_r`` paths."""
    return {1: cdf_one, 2: cdf_two, 3: cdf_three_approx}.get(model.l_r, cdf_multi_ub_approx)(t, model)


def _sweep_bound(variances: np.ndarray, sigma2: float) -> float:
    # E(sum |b_l|)^2 / sigma2 with E|b_l| = sqrt(pi p_l) / 2
    s = np.sqrt(variances)
    return float((variances.sum() + math.pi / 4 * (s.sum() ** 2 - variances.sum())) / sigma2)


def emit_analytic_curves(cfg: ExperimentConfig, out_dir: Path) -> Path | None:
    """Tabulate the closed forms matching ``cfg.experiment``; None when there are none."""
    path = Path(out_dir) / f"{cfg.experiment}.analytic.csv"
    model = RayleighSumModel(cfg.l_r, cfg.sigma2)
    exp = cfg.experiment
    if exp == "cdf":
        t = _t_grid(cfg)
        disc = RegionDiscretization(cfg.region_side, cfg.p)
        lb, ub = cdf_infinite_bounds(t, disc, cfg.sigma2)
        curves = {"analytic": analytic_cdf(t, model), "multi_ub": cdf_multi_ub_approx(t, model),
                  "inf_lb": lb, "inf_ub": ub}
        rows = [(tv, name, v[k]) for name, v in curves.items() for k, tv in enumerate(t)]
        _write_rows(path, ("t", "curve", "F"), rows)
    elif exp == "bounds":
        rows = []
        for a in cfg.region_sizes:
            lo, hi = infinite_path_bounds(RegionDiscretization(a, cfg.p), cfg.sigma2)
            rows += [(a, "lower", lo / cfg.sigma2), (a, "upper", hi / cfg.sigma2)]
        _write_rows(path, ("region_side", "curve", "value"), rows)
    elif exp == "correlation":
        d = np.linspace(0.0, max([2.0, *cfg.distances]), cfg.t_points)
        r = spatial_correlation(d, cfg.sigma2)
        _write_rows(path, ("d", "curve", "value"), [(dv, "sinc", rv) for dv, rv in zip(d, r)])
    elif exp == "sweep-paths":
        rows = [(L, "bound", expected_max_gain(RayleighSumModel(L, 1.0)).value)
                for L in cfg.path_counts]
        _write_rows(path, ("l_r", "curve", "value"), rows)
    elif exp == "sweep-region":
        eta = expected_max_gain(RayleighSumModel(cfg.l_r, 1.0)).value
        _write_rows(path, ("region_side", "curve", "value"),
                    [(a, "bound", eta) for a in cfg.region_sizes])
    elif exp == "power-ratio":
        rows = [(r, "bound", _sweep_bound(ChannelSampler(2, cfg.sigma2, (r, 1.0)).path_variances,
                                          cfg.sigma2)) for r in cfg.power_ratios]
        _write_rows(path, ("power_ratio", "curve", "value"), rows)
    else:
        return None
    return path


def _field_from_config(cfg: ExperimentConfig) -> ChannelField:
    if cfg.amplitudes:
        b = np.asarray(cfg.amplitudes) * np.exp(1j * np.asarray(cfg.phases))
        return ChannelField.from_angles(b, [PhysicalAngles(t, p) for t, p in zip(cfg.theta, cfg.phi)])
    return ChannelSampler(cfg.l_r, cfg.sigma2).sample(philox_stream(cfg.seed, 0, 0))


_SWEEP_HEADER = {
    "sweep-region": "region_side",
    "sweep-paths": "l_r",
    "power-ratio": "power_ratio",
    "bounds": "region_side",
    "period": "resolution",
    "correlation": "d",
}


def run_experiment(cfg: ExperimentConfig, out_dir: Path, threads: int = 1) -> list[Path]:
    """Run ``cfg`` and write its CSV files; returns the paths written (meta excluded)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    exp = cfg.experiment
    path = out_dir / f"{exp}.csv"
    if exp == "field-map":
        grid = scan_gain_grid(_field_from_config(cfg), Region.square(cfg.region_side),
                              cfg.grid_step, cfg.max_cells)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            grid.to_csv(fh)
    elif exp == "cdf":
        results = run_sweep(cfg, threads)
        t = _t_grid(cfg)
        model = RayleighSumModel(cfg.l_r, cfg.sigma2)
        rows = [(tv, "analytic", f) for tv, f in zip(t, analytic_cdf(t, model))]
        for res in results:
            # samples are relative gains; the t axis is absolute gain
            ecdf = res.empirical_cdf
            rows += [(tv, res.scheme, f) for tv, f in zip(t, ecdf(t / cfg.sigma2))]
        _write_rows(path, ("t", "curve", "F"), rows)
    else:
        if exp == "period":
            results = quantization_period_experiment(cfg.t_values, cfg.l_r, cfg.n_realizations,
                                                     cfg.grid_step, cfg.sigma2, cfg.seed, threads)
            extra = []
        elif exp == "correlation":
            results = correlation_experiment(cfg.distances, cfg.n_realizations, cfg.l_r,
                                             cfg.sigma2, cfg.seed, threads)
            extra = [(d, "analytic", spatial_correlation(d, cfg.sigma2), 0.0)
                     for d in cfg.distances]
        elif exp == "bounds":
            results = run_sweep(cfg, threads, schemes=["MA"])
            extra = []
            for a in cfg.region_sizes:
                lo, hi = infinite_path_bounds(RegionDiscretization(a, cfg.p), cfg.sigma2)
                extra += [(a, "lower", lo / cfg.sigma2, 0.0), (a, "upper", hi / cfg.sigma2, 0.0)]
        else:
            results = run_sweep(cfg, threads)
            extra = []
        rows = [(r.sweep_value, r.scheme, r.mean, r.stderr) for r in results] + extra
        _write_rows(path, (_SWEEP_HEADER[exp], "scheme", "mean", "stderr"), rows)
    written = [path]
    analytic = emit_analytic_curves(cfg, out_dir)
    if analytic is not None:
        written.append(analytic)
    return written


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError("", message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="masim", description="Movable-antenna channel experiments.")
    p.add_argument("experiment", choices=EXPERIMENTS)
    p.add_argument("--config", type=Path, help="flat TOML config or a previous .meta.json")
    p.add_argument("--seed", type=int, help="root seed (overrides the config)")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--threads", type=int, default=1, help="worker threads (does not change output)")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        try:
            cfg = load_config(args.config) if args.config else ExperimentConfig()
        except OSError as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc}") from exc
        changes = {"experiment": args.experiment}
        if args.seed is not None:
            changes["seed"] = args.seed
        cfg = validate(cfg.replace(**changes))
        if args.threads < 1:
            raise ConfigError("threads", "must be >= 1")
    except ConfigError as exc:
        print(f"masim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    start = time.perf_counter()
    try:
        written = run_experiment(cfg, args.out, args.threads)
        meta = {
            "experiment": cfg.experiment,
            "seed": cfg.seed,
            "config": cfg.to_dict(),
            "runtime_seconds": time.perf_counter() - start,
            "version": __version__,
            "outputs": [p.name for p in written],
        }
        meta_path = Path(args.out) / f"{cfg.experiment}.meta.json"
        meta_path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    except ResourceError as exc:
        print(f"masim: resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except MasimError as exc:
        # invalid parameter combinations the validator cannot see up front
        print(f"masim: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"masim: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
