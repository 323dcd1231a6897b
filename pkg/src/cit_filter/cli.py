"""``cit-filter`` command line: run scenarios, validate, report conditions.

Exit codes: 0 ok, 2 configuration error, 3 numerical error, 4 validation failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time

import numpy as np

from . import config as cfgmod
from .darkstate import group_velocity_approx, group_velocity_exact
from .errors import CitFilterError, ConfigError, DomainError, NumericalError, SetupError
from .io import write_csv, write_json, write_manifest, write_with_sidecar
from .params import check_conditions, derive_quantities

log = logging.getLogger("cit_filter")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VALIDATION = 0, 2, 3, 4


def _apply_threads(cfg):
    if "CIT_FILTER_THREADS" not in os.environ and cfg.get("threads"):
        os.environ["CIT_FILTER_THREADS"] = str(cfg["threads"])


def _inputs(cfg):
    return dict(cfg.values, scenario=cfg.scenario)


# ---------------------------------------------------------------------------
# scenarios

def _velocity_table(cfg, out):
    ratios = cfg.get("ratios") or (cfg["ratio"],)
    n_max = cfg["n_max"]
    rows = [(N, *(group_velocity_exact(N, r) for r in ratios)) for N in range(1, n_max + 1)]
    header = ["N"] + [f"v_over_c_r={r:g}" for r in ratios]
    files = write_with_sidecar(out / "group_velocity.csv", header, rows,
                               {"ratios": list(ratios), "n_max": n_max})
    return files, {}


def _fig4(cfg, out):
    r, n_max = cfg["ratio"], cfg["n_max"]
    rows = [(N, group_velocity_exact(N, r)) for N in range(1, n_max + 1)]
    files = write_with_sidecar(out / "fig4_velocity.csv", ["N", "v_over_c"], rows,
                               {"ratio": r})
    return files, {"monotone": bool(np.all(np.diff([v for _, v in rows]) > 0))}


def _fig5(cfg, out):
    r, n_max = cfg["ratio"], cfg["n_max"]
    rows = []
    for N in range(1, n_max + 1):
        exact, approx = group_velocity_exact(N, r), group_velocity_approx(N, r)
        rows.append((N, exact, approx, abs(exact - approx) / exact))
    files = write_with_sidecar(out / "fig5_velocity.csv",
                               ["N", "v_exact", "v_approx", "rel_diff"], rows, {"ratio": r})
    return files, {"max_rel_diff": max(row[3] for row in rows)}


def _fig6(cfg, out):
    from .grid import Grid1D
    from .scenarios import single_photon_transport
    from .solver2 import Solver2, initial_pair

    p = cfgmod.system_params(cfg)
    pulse = cfgmod.pulse_spec(cfg)
    v = cfg.values
    snaps = tuple(v.get("snapshots", ()))
    grid = Grid1D(v["z_min"], v["z_max"], v["n_points"], v["z_in"], v["z_out"], v.get("w_ramp"))
    res = single_photon_transport(p, grid, pulse, dt=v.get("dt"), safety=v["safety"],
                                  record_every=v["record_every"], t_end=v.get("t_end"),
                                  extra_snapshots=snaps)
    tr = res.trajectory
    meta = {"params": p.as_dict(), "grid": grid.as_dict(), "dt": tr.dt}
    files = write_with_sidecar(out / "sector1_snapshots.csv",
                               ["t", "z", "re_f", "im_f", "abs2_f", "abs2_e", "abs2_s"],
                               tr.snapshot_rows(), meta)
    files += write_with_sidecar(out / "sector1_detector.csv", ["t", "abs2_f"],
                                zip(tr.times, np.abs(tr.detector(grid.detector)) ** 2),
                                dict(meta, z_d=grid.detector))
    summary = {k: getattr(res, k) for k in ("transmission", "transit", "expected_transit",
                                            "compression", "expected_compression", "norm_drift")}

    n2 = v.get("n_points_2d") or 0
    if n2 > 0:
        g2 = Grid1D(v["z_min"], v["z_max"], n2, v["z_in"], v["z_out"], v.get("w_ramp"))
        t_end = v.get("t_end") or float(tr.times[-1])
        solver = Solver2(g2, p)
        tr2 = solver.run(initial_pair(g2, pulse, p.c), t_end, dt=v.get("dt"), safety=v["safety"],
                         record_every=v["record_every"], snapshot_times=snaps,
                         detectors=[g2.detector])
        stride = max(1, v.get("snapshot_stride", 1))
        heat = (row for row in tr2.heatmap_rows()
                if _on_stride(row[1], g2, stride) and _on_stride(row[2], g2, stride))
        meta2 = {"params": p.as_dict(), "grid": g2.as_dict(), "dt": tr2.dt,
                 "snapshot_stride": stride}
        files += write_with_sidecar(out / "sector2_heatmap.csv", ["t", "z1", "z2", "abs2_ff"],
                                    heat, meta2)
        files += write_with_sidecar(out / "sector2_diagonal.csv", ["t", "z", "abs2_ff_diag"],
                                    tr2.diagonal_rows(), meta2)
        files += write_with_sidecar(out / "sector2_antidiagonal.csv",
                                    ["t", "offset", "z1", "z2", "abs2_ff"],
                                    tr2.antidiagonal_rows(), meta2)
        summary["sector2_norm_drift"] = tr2.norm_drift
        summary["sector2_final_norm"] = float(tr2.norms[-1])
    files.append(write_json(out / "summary.json", summary))
    return files, summary


def _on_stride(z, grid, stride):
    return int(round((z - grid.z_min) / grid.dz)) % stride == 0


def _fig7(cfg, out):
    from .scenarios import coherent_pulse_run

    phys = cfgmod.system_params(cfg)
    pulse = cfgmod.pulse_spec(cfg)
    report = check_conditions(phys, pulse)
    for msg in report.messages:
        log.warning(msg) if "FAILED" in msg else log.info(msg)
    v = cfg.values
    res = coherent_pulse_run(phys, pulse, v["light_speed_ratio"], v["points_per_width"],
                             kappa_in_dynamics=v["kappa_in_dynamics"], safety=v["safety"],
                             record_every=v["record_every"])
    s = res.series
    unit = res.time_unit
    meta = {"time_unit_s": unit, "sim_params": res.sim_params.as_dict(), "z_d": s.z_d,
            "mean_photons": pulse.mean_photons}
    files = write_with_sidecar(out / "fig7_traces.csv",
                               ["t", "t_us", "intensity", "g2_unnorm", "sector1_norm",
                                "sector2_norm"],
                               ((t, t * unit * 1e6, *rest) for t, *rest in s.rows()), meta)
    summary = {
        "advance_peak": res.advance_peak, "advance_centroid": res.advance_centroid,
        "advance_peak_us": res.advance_peak * unit * 1e6,
        "delta_tau_12_sim": res.delta_tau_model,
        "delta_tau_12_sim_us": res.delta_tau_model * unit * 1e6,
        "delta_tau_12_physical_us": res.delta_tau_physical * unit * 1e6,
        "sampling_uncertainty": res.uncertainty,
    }
    files.append(write_json(out / "summary.json", summary))
    return files, dict(summary, conditions=report.as_dict())


def _oracle_validate(cfg, out):
    from .validation import run_validation

    results = run_validation(quick=cfg.get("quick", False))
    for r in results:
        print(r.line())
    rows = [(r.name, r.passed, r.value, r.tolerance, r.seconds) for r in results]
    files = [write_csv(out / "validation.csv",
                       ["check", "passed", "value", "tolerance", "seconds"], rows)]
    return files, {"all_passed": all(r.passed for r in results)}


def _conditions(cfg, out):
    p = cfgmod.system_params(cfg)
    report = check_conditions(p, cfgmod.pulse_spec(cfg))
    for msg in report.messages:
        print(msg)
    d = derive_quantities(p)
    files = [write_json(out / "conditions.json",
                        {"report": report.as_dict(), "derived": d.as_dict()})]
    return files, {"conditions": report.as_dict()}


RUNNERS = {
    "group_velocity_table": _velocity_table,
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6": _fig6,
    "fig7": _fig7,
    "oracle_validate": _oracle_validate,
    "conditions": _conditions,
}


def _derived(cfg):
    try:
        p = cfgmod.system_params(cfg)
        return derive_quantities(p).as_dict()
    except (KeyError, DomainError):
        return {}


def run_scenario(cfg) -> tuple:
    """Run one scenario, write its files and manifest; return (files, summary)."""
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise ConfigError(f"output directory {out} is not writable", "output_dir")
    _apply_threads(cfg)
    t0 = time.perf_counter()
    files, summary = RUNNERS[cfg.scenario](cfg, out)
    write_manifest(out, cfg.scenario, _inputs(cfg), _derived(cfg), files,
                   time.perf_counter() - t0, {"summary": summary})
    return files, summary


# ---------------------------------------------------------------------------

def _parse_sets(items):
    values = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}", None)
        key, val = item.split("=", 1)
        values[key.strip()] = val.strip()
    return values


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cit-filter", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario from a config file or preset name")
    run.add_argument("config", help="config file or one of: " + ", ".join(cfgmod.SCENARIOS))
    run.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    run.add_argument("-o", "--output-dir")

    val = sub.add_parser("validate", help="oracle and conservation self-checks")
    val.add_argument("--quick", action="store_true", help="reduced sizes")
    val.add_argument("--override", action="append", metavar="LABEL=FACTOR",
                     help="replace a two-excitation coupling factor (negative control)")

    cond = sub.add_parser("conditions", help="print the operating-condition report")
    cond.add_argument("config")
    cond.add_argument("--set", action="append", metavar="KEY=VALUE")

    sub.add_parser("schema", help="list the config keys")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "schema":
            print(cfgmod.describe_schema())
            return EXIT_OK
        if args.command == "validate":
            from .validation import run_validation

            overrides = {k: float(v) for k, v in _parse_sets(args.override).items()}
            results = run_validation(quick=args.quick, overrides=overrides or None)
            for r in results:
                print(r.line())
            return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION
        overrides = _parse_sets(args.set)
        if args.command == "run" and args.output_dir:
            overrides["output_dir"] = args.output_dir
        cfg = cfgmod.load(args.config, overrides)
        if args.command == "conditions":
            p = cfgmod.system_params(cfg)
            for msg in check_conditions(p, cfgmod.pulse_spec(cfg)).messages:
                print(msg)
            return EXIT_OK
        files, summary = run_scenario(cfg)
        print(f"{cfg.scenario}: wrote {len(files) + 1} files to {cfg.output_dir}")
        if cfg.scenario == "oracle_validate" and not summary["all_passed"]:
            return EXIT_VALIDATION
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, SetupError, KeyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except CitFilterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
