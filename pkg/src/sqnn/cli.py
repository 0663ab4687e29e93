"""Batch command-line front end for both engines.

Every subcommand reads one INI config file, writes data files only inside
the directory given by ``--out``, and reports progress on standard error.
Exit codes: 0 success, 2 config error, 3 numerical failure, 4 physics
precondition failure (no metastable gap, cutoff not converged).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .dataio import (
    REQUIRED,
    SectionSchema,
    Split,
    config_echo,
    henon_series,
    load_series,
    normalize_minmax01,
    read_config,
    write_csv,
    write_manifest,
)
from .errors import ConfigError, NumericsError, PhysicsError
from .fock import (
    FockSpace,
    ResonatorParams,
    choose_cutoff,
    fock_populations_converged,
    liouvillian,
    spectrum,
    squeezed_coherent,
    steady_state,
    wigner,
)
from .gaussian import squeezing_db
from .memory import (
    apriori_lobe,
    assign_lobe,
    basin_map,
    build_lobe_set,
    drive_for_mean_photons,
    lobe_amplitude,
    mc_trajectory,
    metastable_window,
    resolve_space,
    success_experiment,
)
from .reservoir import (
    ENCODINGS,
    ReservoirConfig,
    forecast_experiment,
    noise_squeezing_sweep,
    noise_variance_from_relative,
)

DATASET = SectionSchema("dataset", {
    "source": ("str", "synthetic"),
    "format": ("str", "plain"),
    "column": ("int", 0),
    "synthetic_length": ("int", 4100),
    "synthetic_seed": ("int", 7),
})
RESERVOIR = SectionSchema("reservoir", {
    "modes": ("int", 12),
    "input_squeezing": ("float", 0.75),
    "cavity_squeezing": ("float", 0.0),
    "encoding": ("str", "quarter-pi"),
    "network_seed": ("int", 42),
    "relative_noise": ("float", 0.0),
    "noise_seed": ("int", 1000),
    "washout": ("int", 300),
    "train": ("int", 3000),
    "test": ("int", 700),
    "ridge_lambda": ("float_or_auto", None),
})
SWEEP = SectionSchema("sweep", {
    "cavity_squeezing": ("float_list", [0.0, 1.5]),
    "relative_noise": ("float_list", [0.0, 0.002, 0.2]),
    "realizations": ("int", 20),
})
RESONATOR = SectionSchema("resonator", {
    "drive_order": ("int", 3),
    "dissipation_order": ("int", 4),
    "detuning": ("float", 0.4),
    "drive_strength": ("float", 13.02),
    "gamma_m": ("float", 0.2),
    "cutoff": ("int_or_auto", None),
    "max_cutoff": ("int", 256),
})
STEADY = SectionSchema("steady", {
    "wigner_extent": ("float", 6.0),
    "wigner_points": ("int", 101),
})
SPECTRUM = SectionSchema("spectrum", {
    "count": ("int", 6),
})
TRAJECTORIES = SectionSchema("trajectories", {
    "count": ("int", 3),
    "seed": ("int", 1),
    "time_points": ("int", 201),
    "t_max": ("float_or_auto", None),
    "amplitude_factor": ("float", 1.5),
    "phase": ("float", float(np.pi / 3)),
    "squeezing_modulus": ("float", 0.5),
    "squeezing_phase": ("float", float(-0.15 * np.pi)),
    "span": ("float", 5.0),
})
SUCCESS = SectionSchema("success", {
    "mean_photons": ("float_list", [8.0]),
    "dissipation_orders": ("int_list", []),
    "trajectories": ("int", 200),
    "seed": ("int", 9),
    "span": ("float", 5.0),
    "time_points": ("int", 161),
})
BASINS = SectionSchema("basins", {
    "mean_photon": ("float_or_auto", None),
    "radius_factors": ("float_list", [0.8, 1.2]),
    "angles": ("int", 18),
    "span": ("float", 5.0),
    "window_times": ("int", 5),
})
CONVERGENCE = SectionSchema("convergence", {
    "tolerance": ("float", 1e-6),
})

SCHEMAS_BY_COMMAND = {
    "qrc-run": [DATASET, RESERVOIR],
    "qrc-sweep": [DATASET, RESERVOIR, SWEEP],
    "qam-steady": [RESONATOR, STEADY],
    "qam-spectrum": [RESONATOR, SPECTRUM],
    "qam-trajectories": [RESONATOR, TRAJECTORIES],
    "qam-success": [RESONATOR, SUCCESS],
    "qam-basins": [RESONATOR, BASINS],
    "check-convergence": [RESONATOR, CONVERGENCE],
}


def _progress(message: str) -> None:
    print(message, file=sys.stderr)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_dataset(cfg: dict, split: Split):
    if cfg["source"] == "synthetic":
        series = henon_series(cfg["synthetic_length"], seed=cfg["synthetic_seed"])
    else:
        series = load_series(cfg["source"], fmt=cfg["format"], column=cfg["column"])
    fit = slice(0, split.washout + split.train)
    return normalize_minmax01(series, fit)


def _reservoir_config(res: dict, args) -> tuple[ReservoirConfig, Split]:
    if res["encoding"] not in ENCODINGS:
        raise ConfigError(f"unknown encoding {res['encoding']!r}")
    noise_seed = args.seed if args.seed is not None else res["noise_seed"]
    cfg = ReservoirConfig(
        n_modes=res["modes"],
        input_squeezing=res["input_squeezing"],
        cavity_squeezing=res["cavity_squeezing"],
        encoding=res["encoding"],
        network_seed=res["network_seed"],
        noise_variance=noise_variance_from_relative(res["relative_noise"]),
        noise_seed=noise_seed,
    )
    return cfg, Split(res["washout"], res["train"], res["test"])


def _resonator_params(res: dict) -> ResonatorParams:
    return ResonatorParams(
        drive_order=res["drive_order"],
        dissipation_order=res["dissipation_order"],
        detuning=res["detuning"],
        drive_strength=res["drive_strength"],
        gamma_m=res["gamma_m"],
    )


def _resonator_space(params: ResonatorParams, res: dict, force: bool,
                     probe_modulus: float = 1.0, squeezing_max: float = 0.0) -> FockSpace:
    """Cutoff from config: explicit values are convergence-checked, auto solves for one."""
    if res["cutoff"] is not None:
        ok, drift = fock_populations_converged(params, res["cutoff"])
        if not ok:
            message = (f"cutoff {res['cutoff']} not converged "
                       f"(population drift {drift:.2e} on doubling)")
            if not force:
                raise PhysicsError(message + "; rerun with --force to override")
            _progress(f"warning: {message}; continuing under --force")
        return FockSpace(res["cutoff"])
    return resolve_space(params, probe_modulus=probe_modulus,
                         squeezing_max=squeezing_max, max_cutoff=res["max_cutoff"])


def _seeds_echo(**kwargs) -> dict:
    return {k: v for k, v in kwargs.items() if v is not None}


def cmd_qrc_run(args, parser) -> int:
    res = RESERVOIR.parse(parser)
    data_cfg = DATASET.parse(parser)
    cfg, split = _reservoir_config(res, args)
    series = _load_dataset(data_cfg, split)
    _progress(f"qrc-run: {cfg.n_modes} modes, cavity {squeezing_db(cfg.cavity_squeezing):.2f} dB")
    result = forecast_experiment(cfg, series, split, ridge_lambda=res["ridge_lambda"])
    out = _out_dir(args)
    first_test_step = split.washout + split.train
    write_csv(out / "predictions.csv", ["k", "target", "prediction"],
              [(first_test_step + i, t, p)
               for i, (t, p) in enumerate(zip(result.targets, result.predictions))])
    write_manifest(out / "run_manifest.json",
                   config_echo=config_echo(parser),
                   seeds=_seeds_echo(network=cfg.network_seed, noise=cfg.noise_seed),
                   dataset_sha256=series.sha256,
                   extra={"train_nmse": result.train_nmse,
                          "test_nmse": result.test_nmse,
                          "constant_nmse": result.constant_nmse,
                          "ridge_lambda": result.ridge_lambda})
    _progress(f"qrc-run: train NMSE {result.train_nmse:.4g}, test NMSE {result.test_nmse:.4g}")
    return 0


def cmd_qrc_sweep(args, parser) -> int:
    res = RESERVOIR.parse(parser)
    data_cfg = DATASET.parse(parser)
    sweep = SWEEP.parse(parser)
    base, split = _reservoir_config(res, args)
    series = _load_dataset(data_cfg, split)
    first_seed = args.seed if args.seed is not None else res["noise_seed"]

    def run_one_squeezing(xi_c):
        return noise_squeezing_sweep(
            base, series, split,
            cavity_squeezings=[xi_c],
            relative_noises=sweep["relative_noise"],
            n_realizations=sweep["realizations"],
            ridge_lambda=res["ridge_lambda"],
            first_noise_seed=first_seed)

    _progress(f"qrc-sweep: grid {len(sweep['cavity_squeezing'])} squeezings x "
              f"{len(sweep['relative_noise'])} noise levels x {sweep['realizations']} seeds")
    with ThreadPoolExecutor(max_workers=args.threads or os.cpu_count()) as pool:
        blocks = list(pool.map(run_one_squeezing, sweep["cavity_squeezing"]))
    points = [p for block in blocks for p in block]
    points.sort(key=lambda p: (p.cavity_squeezing, p.relative_noise, p.noise_seed))
    out = _out_dir(args)
    write_csv(out / "sweep.csv",
              ["cavity_squeezing_db", "noise_relative_intensity", "seed",
               "train_nmse", "test_nmse"],
              [(squeezing_db(p.cavity_squeezing), p.relative_noise, p.noise_seed,
                p.train_nmse, p.test_nmse) for p in points])
    write_manifest(out / "sweep_manifest.json",
                   config_echo=config_echo(parser),
                   seeds=_seeds_echo(network=base.network_seed, first_noise=first_seed),
                   dataset_sha256=series.sha256,
                   extra={"rows": len(points)})
    return 0


def cmd_qam_steady(args, parser) -> int:
    res = RESONATOR.parse(parser)
    st = STEADY.parse(parser)
    params = _resonator_params(res)
    space = _resonator_space(params, res, args.force)
    _progress(f"qam-steady: (n={params.drive_order}, m={params.dissipation_order}), "
              f"cutoff {space.cutoff}")
    rho = steady_state(liouvillian(params, space), n_symmetry=params.drive_order)
    grid = np.linspace(-st["wigner_extent"], st["wigner_extent"], st["wigner_points"])
    w = wigner(rho, grid, grid)
    out = _out_dir(args)
    write_csv(out / "wigner.csv", ["x", "p", "w"],
              [(grid[i], grid[j], w[i, j])
               for i in range(len(grid)) for j in range(len(grid))])
    write_csv(out / "fock_distribution.csv", ["k", "p_k"],
              list(enumerate(rho.fock_populations())))
    with open(out / "steady_state.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump({"cutoff": space.cutoff,
                   "real": rho.data.real.tolist(),
                   "imag": rho.data.imag.tolist()}, fh, sort_keys=True)
        fh.write("\n")
    write_manifest(out / "steady_manifest.json", config_echo=config_echo(parser),
                   seeds={}, extra={"cutoff": space.cutoff,
                                    "mean_photons": rho.mean_photons})
    return 0


def cmd_qam_spectrum(args, parser) -> int:
    res = RESONATOR.parse(parser)
    spec_cfg = SPECTRUM.parse(parser)
    params = _resonator_params(res)
    count = max(spec_cfg["count"], params.drive_order + 2)
    space = _resonator_space(params, res, args.force)
    _progress(f"qam-spectrum: {count} eigenvalues at cutoff {space.cutoff}")
    pairs = spectrum(liouvillian(params, space), count=count,
                     n_symmetry=params.drive_order)
    window = metastable_window(params, space, pairs=pairs)
    out = _out_dir(args)
    write_csv(out / "spectrum.csv", ["index", "re", "im", "abs_re", "gap_ratio"],
              [(i, v[0].real, v[0].imag, abs(v[0].real), window.gap_ratio)
               for i, v in enumerate(pairs)])
    write_manifest(out / "spectrum_manifest.json", config_echo=config_echo(parser),
                   seeds={}, extra={"cutoff": space.cutoff,
                                    "gap_ratio": window.gap_ratio,
                                    "t_start": window.t_start,
                                    "t_end": window.t_end})
    return 0


def cmd_qam_trajectories(args, parser) -> int:
    res = RESONATOR.parse(parser)
    traj = TRAJECTORIES.parse(parser)
    params = _resonator_params(res)
    space = _resonator_space(params, res, args.force,
                             probe_modulus=traj["amplitude_factor"],
                             squeezing_max=traj["squeezing_modulus"])
    window = metastable_window(params, space)
    lobes = build_lobe_set(params, space, window)
    t_max = traj["t_max"] if traj["t_max"] is not None \
        else window.observed_end(traj["span"])
    if t_max < window.t_start:
        raise ConfigError(
            f"t_max {t_max} does not reach the metastable window "
            f"(t_start {window.t_start:.3g}); use t_max = auto")
    amplitude = traj["amplitude_factor"] * lobes.amplitude
    psi0 = squeezed_coherent(amplitude * np.exp(1j * traj["phase"]),
                             traj["squeezing_modulus"] * np.exp(1j * traj["squeezing_phase"]),
                             space)
    seed = args.seed if args.seed is not None else traj["seed"]
    out = _out_dir(args)
    _progress(f"qam-trajectories: {traj['count']} trajectories to t={t_max:.2f}")
    for index in range(traj["count"]):
        record = mc_trajectory(psi0, params, space, t_max, seed=seed,
                               n_times=traj["time_points"], lobes=lobes, index=index)
        record.assigned_lobe = assign_lobe(record, lobes, window, span=traj["span"])
        write_csv(out / f"trajectory_{index:03d}.csv",
                  ["t", "re_a", "im_a", "n", "mandel_q", "assigned_lobe"],
                  [(t, a.real, a.imag, nn, q, record.assigned_lobe)
                   for t, a, nn, q in zip(record.times, record.a_expect,
                                          record.n_expect, record.mandel_q)])
        write_csv(out / f"jumps_{index:03d}.csv", ["t", "operator"], record.jumps)
    write_manifest(out / "trajectories_manifest.json", config_echo=config_echo(parser),
                   seeds=_seeds_echo(trajectory=seed),
                   extra={"cutoff": space.cutoff, "t_start": window.t_start,
                          "t_end": window.t_end, "gap_ratio": window.gap_ratio,
                          "lobe_amplitude": lobes.amplitude,
                          "apriori_lobe": apriori_lobe(psi0, lobes)})
    return 0


def cmd_qam_success(args, parser) -> int:
    res = RESONATOR.parse(parser)
    suc = SUCCESS.parse(parser)
    params = _resonator_params(res)
    orders = suc["dissipation_orders"] or [params.dissipation_order]
    seed = args.seed if args.seed is not None else suc["seed"]
    rows = []
    for m in orders:
        params_m = replace(params, dissipation_order=int(m))
        _progress(f"qam-success: m={m}, targets {suc['mean_photons']}, "
                  f"{suc['trajectories']} trajectories")
        results = success_experiment(
            params_m, suc["mean_photons"], trajectories=suc["trajectories"],
            seed=seed, span=suc["span"], n_times=suc["time_points"],
            cutoff=res["cutoff"], max_cutoff=res["max_cutoff"])
        if not results:
            raise PhysicsError(
                f"no metastable window for any target at m={m}")
        rows.extend([(r.drive_order, r.dissipation_order, r.mean_photons,
                      r.trajectories, r.p_hat, r.stderr, r.baseline)
                     for r in results])
    rows.sort(key=lambda r: (r[1], r[2]))
    out = _out_dir(args)
    write_csv(out / "success.csv",
              ["n", "m", "mean_photon", "trajectories", "p_hat", "stderr", "baseline"],
              rows)
    write_manifest(out / "success_manifest.json", config_echo=config_echo(parser),
                   seeds=_seeds_echo(experiment=seed), extra={"rows": len(rows)})
    return 0


def cmd_qam_basins(args, parser) -> int:
    res = RESONATOR.parse(parser)
    bas = BASINS.parse(parser)
    params = _resonator_params(res)
    if bas["mean_photon"] is not None:
        params = drive_for_mean_photons(params, bas["mean_photon"])
    _progress(f"qam-basins: {len(bas['radius_factors'])} radii x {bas['angles']} angles")
    rows = basin_map(params, radius_factors=tuple(bas["radius_factors"]),
                     n_angles=bas["angles"], span=bas["span"],
                     n_window_times=bas["window_times"],
                     cutoff=res["cutoff"], max_cutoff=res["max_cutoff"])
    out = _out_dir(args)
    write_csv(out / "basins.csv", ["re_alpha", "im_alpha", "assigned_lobe"], rows)
    write_manifest(out / "basins_manifest.json", config_echo=config_echo(parser),
                   seeds={}, extra={"lobe_amplitude": lobe_amplitude(params),
                                    "rows": len(rows)})
    return 0


def cmd_check_convergence(args, parser) -> int:
    res = RESONATOR.parse(parser)
    conv = CONVERGENCE.parse(parser)
    params = _resonator_params(res)
    amp = lobe_amplitude(params)
    _progress(f"check-convergence: |beta|^2 estimate {amp ** 2:.2f}")
    accepted = choose_cutoff(params, mean_photons_estimate=amp ** 2,
                             max_cutoff=res["max_cutoff"], tol=conv["tolerance"])
    ok, drift = fock_populations_converged(params, accepted, tol=conv["tolerance"])
    out = _out_dir(args)
    with open(out / "convergence.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump({"accepted_cutoff": accepted, "population_drift_at_doubling": drift,
                   "tolerance": conv["tolerance"], "converged": ok},
                  fh, indent=2, sort_keys=True)
        fh.write("\n")
    _progress(f"check-convergence: accepted cutoff {accepted}, drift {drift:.2e}")
    return 0


COMMANDS = {
    "qrc-run": cmd_qrc_run,
    "qrc-sweep": cmd_qrc_sweep,
    "qam-steady": cmd_qam_steady,
    "qam-spectrum": cmd_qam_spectrum,
    "qam-trajectories": cmd_qam_trajectories,
    "qam-success": cmd_qam_success,
    "qam-basins": cmd_qam_basins,
    "check-convergence": cmd_check_convergence,
}


def _keys_epilog(command: str) -> str:
    lines = ["config keys:"]
    for schema in SCHEMAS_BY_COMMAND[command]:
        for key, (kind, default) in schema.keys.items():
            shown = "required" if default is REQUIRED else f"default {default}"
            lines.append(f"  [{schema.name}] {key} ({kind}, {shown})")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqnn",
        description="Batch experiments: Gaussian loop reservoir forecasting and "
                    "driven-dissipative associative memory.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func in COMMANDS.items():
        p = sub.add_parser(name, epilog=_keys_epilog(name),
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", required=True, help="INI experiment config")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the experiment seed from the config")
        p.add_argument("--threads", type=int, default=None,
                       help="worker pool size (default: available parallelism)")
        p.add_argument("--force", action="store_true",
                       help="continue past a failed cutoff convergence check")
        p.add_argument("--verbose", action="store_true", help="chattier progress")
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        parser = read_config(args.config)
        # one config file may serve several subcommands; tolerate sections
        # owned by other commands, reject unknown ones and unknown keys
        universe = {s.name for schemas in SCHEMAS_BY_COMMAND.values()
                    for s in schemas}
        for section in parser.sections():
            if section not in universe:
                raise ConfigError(f"unknown config section [{section}]")
        for schema in SCHEMAS_BY_COMMAND[args.command]:
            schema.parse(parser)
        return args.func(args, parser)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericsError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except PhysicsError as exc:
        print(f"physics precondition failed: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
