"""Batch command line: simulate / fit / validate / diagnose / bench.

Every command takes ``--config PATH`` (flat ``section.key = value`` text,
schema in the README) plus ``--out DIR``, ``--seed N`` and ``--threads N``
overrides, and is deterministic given config and seed.  Exit codes:
0 success, 1 I/O error, 2 invalid parameters or config, 3 numerical
failure.
"""

import argparse
import os
import sys
import time

import numpy as np

from . import __version__, kernels
from .cl import cl_objective, enumerate_pairs
from .corrmodels import CorrelationSpec
from .diagnostics import (
    density_overlay,
    empirical_semivariogram,
    theoretical_semivariogram,
)
from .errors import (
    ConfigError,
    DegeneratePairError,
    DuplicateSiteError,
    NoValidStartError,
    NotPositiveDefiniteError,
    NumericalDegeneracyError,
    ParameterDomainError,
    ShapeError,
    SkewsphereError,
)
from .fit import FitOptions, godambe, maximize_cl
from .io import (
    as_float_list,
    config_get,
    load_config,
    params_from_dict,
    params_to_dict,
    read_json,
    read_observations_csv,
    read_sites_csv,
    write_json,
    write_observations_csv,
    write_sites_csv,
)
from .model import MultivariateObservations, ParameterVector
from .predict import drop_one_scores
from .simulate import simulate_field
from .sphere import lonlat_grid, random_sites

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _params_from_config(config) -> ParameterVector:
    family = config_get(config, "model.family", "exponential")
    sigma2 = as_float_list(config_get(config, "model.sigma2", required=True), "model.sigma2")
    eta = as_float_list(config_get(config, "model.eta", required=True), "model.eta")
    mu = as_float_list(config_get(config, "model.mu", required=True), "model.mu")
    scales = as_float_list(config_get(config, "model.scales", required=True), "model.scales")
    rho = float(config_get(config, "model.rho12", 0.0))
    return ParameterVector(sigma2, eta, mu, CorrelationSpec(family, scales, rho))


def _sites_from_config(config):
    path = config_get(config, "sites.csv_path")
    if path:
        return read_sites_csv(path)
    return lonlat_grid(
        int(config_get(config, "grid.n_lon", 17)),
        int(config_get(config, "grid.n_lat", 17)),
        float(config_get(config, "grid.lat_min", -80.0)),
        float(config_get(config, "grid.lat_max", 80.0)),
    )


def _threads(config, args):
    value = args.threads if args.threads is not None else int(config_get(config, "threads", 1))
    if value == 0:
        value = os.cpu_count() or 1
    return max(1, value)


def cmd_simulate(config, out_dir, args):
    params = _params_from_config(config)
    sites = _sites_from_config(config)
    n_reps = int(config_get(config, "simulate.n_reps", 1))
    seed = args.seed if args.seed is not None else int(config_get(config, "simulate.seed", 0))
    obs = simulate_field(params, sites, n_reps, seed=seed)
    os.makedirs(out_dir, exist_ok=True)
    sites_path = os.path.join(out_dir, "sites.csv")
    write_sites_csv(sites_path, sites)
    files = []
    for rep in range(n_reps):
        name = f"replicate_{rep:04d}.csv"
        rep_obs = MultivariateObservations(obs.values[rep : rep + 1])
        write_observations_csv(os.path.join(out_dir, name), sites, rep_obs,
                               replicate_ids=None)
        files.append(name)
    manifest = {
        "command": "simulate",
        "version": __version__,
        "backend": kernels.BACKEND_NAME,
        "seed": seed,
        "n_reps": n_reps,
        "n_sites": sites.n,
        "params": params_to_dict(params),
        "files": files,
        "config": {k: config[k] for k in sorted(config)},
    }
    write_json(os.path.join(out_dir, "manifest.json"), manifest)
    print(f"wrote {n_reps} replicate file(s) to {out_dir}")
    return EXIT_OK


def _data_paths(config, key):
    raw = config_get(config, key, required=True)
    if isinstance(raw, list):
        return [str(v) for v in raw]
    return [str(raw)]


def cmd_fit(config, out_dir, args):
    paths = _data_paths(config, "fit.data")
    sites, obs = read_observations_csv(paths)
    seed = args.seed if args.seed is not None else int(config_get(config, "fit.seed", 0))
    init_path = config_get(config, "fit.init_json")
    init = params_from_dict(read_json(init_path)) if init_path else None
    options = FitOptions(
        init=init,
        max_iters=int(config_get(config, "fit.max_iters", 5000)),
        tol=float(config_get(config, "fit.tol", 1e-8)),
        n_starts=int(config_get(config, "fit.n_starts", 1)),
        seed=seed,
        share_scale=bool(config_get(config, "fit.share_scale", False)),
        gaussian=bool(config_get(config, "fit.gaussian", False)),
        family=str(config_get(config, "fit.family", "exponential")),
    )
    cutoff = float(config_get(config, "fit.cutoff", 0.5))
    threads = _threads(config, args)
    result = maximize_cl(obs, sites, options, cutoff, n_threads=threads)
    payload = params_to_dict(result.estimate)
    payload.update(
        cl_value=result.cl_value,
        converged=result.converged,
        iters=result.iters,
        score_norm=result.score_norm,
        n_pairs=result.n_pairs,
        std_errors=None,
    )
    if bool(config_get(config, "fit.uncertainty", False)):
        report = godambe(
            obs, sites, result.estimate, cutoff,
            n_boot=int(config_get(config, "fit.n_boot", 100)),
            seed=seed,
            share_scale=options.share_scale,
            gaussian=options.gaussian,
            n_threads=threads,
        )
        if report.std_errors is not None:
            payload["std_errors"] = dict(zip(report.param_names, report.std_errors.tolist()))
        payload["uncertainty_singular"] = report.j_singular
    os.makedirs(out_dir, exist_ok=True)
    out_path = os.path.join(out_dir, "fit.json")
    write_json(out_path, payload)
    print(f"fit written to {out_path} (cl={result.cl_value:.6f}, "
          f"converged={result.converged})")
    return EXIT_OK


def cmd_validate(config, out_dir, args):
    paths = _data_paths(config, "validate.data")
    sites, obs = read_observations_csv(paths)
    params = params_from_dict(read_json(config_get(config, "validate.params", required=True)))
    result = drop_one_scores(params, sites, obs)
    os.makedirs(out_dir, exist_ok=True)
    table_path = os.path.join(out_dir, "predictions.csv")
    with open(table_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("site_id,component,observed,predicted,pred_variance\n")
        for site, comp, observed, predicted, var in result.table:
            fh.write(f"{int(site)},{int(comp) + 1},{observed!r},{predicted!r},{var!r}\n")
    write_json(
        os.path.join(out_dir, "validation.json"),
        {"rmspe": result.rmspe, "lscore": result.lscore, "n_points": len(result.table)},
    )
    print(f"rmspe={result.rmspe:.6f} lscore={result.lscore:.6f}")
    return EXIT_OK


def cmd_diagnose(config, out_dir, args):
    paths = _data_paths(config, "diagnose.data")
    sites, obs = read_observations_csv(paths)
    params = params_from_dict(read_json(config_get(config, "diagnose.params", required=True)))
    n_bins = int(config_get(config, "diagnose.n_bins", 12))
    max_dist = float(config_get(config, "diagnose.max_dist", 1.5))
    radius = float(config_get(config, "diagnose.radius", 1.0))
    grid_points = int(config_get(config, "diagnose.density_points", 200))
    os.makedirs(out_dir, exist_ok=True)
    for i in range(obs.m):
        for j in range(i, obs.m):
            table = empirical_semivariogram(obs, sites, i, j, n_bins, max_dist)
            gamma_model = theoretical_semivariogram(params, i, j, table.bin_center)
            path = os.path.join(out_dir, f"semivariogram_{i + 1}{j + 1}.csv")
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("bin_center_rad,bin_center_dist,gamma_emp,gamma_model,pair_count\n")
                for c, g, gm, cnt in zip(table.bin_center, table.gamma,
                                         gamma_model, table.count):
                    fh.write(f"{c!r},{c * radius!r},{g!r},{gm!r},{int(cnt)}\n")
    for i in range(obs.m):
        x = obs.values[:, i, :]
        lo, hi = float(np.min(x)), float(np.max(x))
        pad = 0.25 * (hi - lo + 1e-9)
        grid = np.linspace(lo - pad, hi + pad, grid_points)
        dens = density_overlay(params, i, grid)
        path = os.path.join(out_dir, f"density_{i + 1}.csv")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("z,fitted_pdf\n")
            for z, d in zip(grid, dens):
                fh.write(f"{z!r},{d!r}\n")
    print(f"diagnostic tables written to {out_dir}")
    return EXIT_OK


def cmd_bench(config, out_dir, args):
    n_values = [int(v) for v in as_float_list(config_get(config, "bench.n", [250, 500, 1000]), "bench.n")]
    d_values = as_float_list(config_get(config, "bench.d", [0.25, 0.5, 0.75, 1.0]), "bench.d")
    seed = args.seed if args.seed is not None else int(config_get(config, "bench.seed", 0))
    repeats = int(config_get(config, "bench.repeats", 3))
    requested = config_get(config, "bench.backends", "auto")
    if requested in ("auto", "both"):
        backends = kernels.available_backends() if requested == "both" else [kernels.BACKEND_NAME]
    elif isinstance(requested, list):
        backends = [str(b) for b in requested]
    else:
        backends = [str(requested)]
    threads = _threads(config, args)
    params = ParameterVector(
        [1.0, 1.0], [1.0, 2.0], [0.0, 0.0],
        CorrelationSpec("exponential", [0.3, 0.3], 0.5),
    )
    rows = []
    for n in n_values:
        sites = random_sites(n, seed=seed)
        obs = simulate_field(params, sites, 1, seed=seed) if n <= 3000 else None
        if obs is None:
            # beyond dense-Cholesky scale: synthetic values are fine to time
            rng = np.random.default_rng([seed, n])
            obs = MultivariateObservations(rng.standard_normal((1, 2, n)))
        for d in d_values:
            ps = enumerate_pairs(sites, 2, d)
            for backend_name in backends:
                backend = kernels.get_backend(backend_name)
                elapsed = _time_objective(obs, params, ps, backend, repeats, threads)
                rows.append((backend_name, n, d, ps.n_pairs, elapsed))
                print(f"backend={backend_name} n={n} d={d} pairs={ps.n_pairs} "
                      f"seconds={elapsed:.6f}")
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "bench.csv")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("backend,n,d,n_pairs,seconds\n")
        for backend_name, n, d, n_pairs, elapsed in rows:
            fh.write(f"{backend_name},{n},{d!r},{n_pairs},{elapsed!r}\n")
    print(f"benchmark table written to {path}")
    return EXIT_OK


def _time_objective(obs, params, ps, backend, repeats, threads):
    from .cl import pair_inputs

    si2, sj2, ei, ej, mui, muj, r = pair_inputs(params, ps)
    z1 = obs.values[0][ps.comp_i, ps.site_k]
    z2 = obs.values[0][ps.comp_j, ps.site_l]
    best = None
    for _ in range(max(1, repeats)):
        start = time.perf_counter()
        backend.cl_accumulate(z1 - mui, z2 - muj, si2, sj2, ei, ej, r, r,
                              n_threads=threads)
        elapsed = time.perf_counter() - start
        best = elapsed if best is None else min(best, elapsed)
    return best


_COMMANDS = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "validate": cmd_validate,
    "diagnose": cmd_diagnose,
    "bench": cmd_bench,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="skewsphere",
        description="Skew-Gaussian random fields on the sphere: batch tools",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="flat key=value config file")
        cmd.add_argument("--out", default=".", help="output directory")
        cmd.add_argument("--seed", type=int, default=None, help="override config seed")
        cmd.add_argument("--threads", type=int, default=None,
                         help="worker threads (0 = auto)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
        return _COMMANDS[args.command](config, args.out, args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ParameterDomainError, DuplicateSiteError, ShapeError,
            NotPositiveDefiniteError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NoValidStartError, NumericalDegeneracyError, DegeneratePairError,
            SkewsphereError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
