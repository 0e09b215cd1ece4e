"""Command line: ``run``, ``verify`` and ``sweep``."""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .agent import make_controller, run_simulation
from .contracts import run_contract_suite
from .io import ConfigError, emit_metrics, emit_raster, emit_trajectory, load_config, output_dir_for
from .ratecode import default_encoder


def _parse_windows(text: str) -> list[int]:
    try:
        return sorted({int(t) for t in text.split(",") if t.strip()})
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated window indices, got {text!r}")


def run_scenario(config_path, out_dir=None, dump_rasters=None) -> Path:
    cfg = load_config(config_path)
    sim = cfg.sim
    windows = cfg.dump_rasters if dump_rasters is None else dump_rasters
    bad = [w for w in windows if not 0 <= w < sim.n_windows]
    if bad:
        raise ConfigError(f"--dump-rasters: windows out of range: {bad}")
    encoder = default_encoder(sim.window_steps, sim.table)
    controller = make_controller(sim, topology=cfg.topology(), encoder=encoder)
    record = run_simulation(sim, controller, record_windows=windows)
    out = output_dir_for(cfg, out_dir)
    emit_trajectory(record, out)
    emit_metrics(record, out, cfg.scenario)
    for w, raster in sorted(record.rasters.items()):
        emit_raster(raster, w, out)
    return out


def _sweep_one(args):
    path, out = args
    return str(run_scenario(path, out))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="klinokinesis",
                                     description="Spiking klinokinesis contour tracking in 3D fields")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one scenario")
    p_run.add_argument("--config", required=True, help="YAML scenario file or preset name")
    p_run.add_argument("--out", help="output directory")
    p_run.add_argument("--dump-rasters", type=_parse_windows, default=None,
                       help="comma-separated window indices to dump spike rasters for")

    p_verify = sub.add_parser("verify", help="run the network contract suite")
    p_verify.add_argument("--window-steps", type=int, default=1000)
    p_verify.add_argument("--json", action="store_true", help="print the full JSON report")

    p_sweep = sub.add_parser("sweep", help="run every *.yaml config in a directory")
    p_sweep.add_argument("--configs", required=True)
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--jobs", type=int, default=1)

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            out = run_scenario(args.config, args.out, args.dump_rasters)
            print(f"wrote {out}")
            return 0
        if args.command == "verify":
            from .network import build_default_network

            report = run_contract_suite(build_default_network(args.window_steps))
            if args.json:
                print(json.dumps(report.to_dict(), indent=2, default=str))
            else:
                for r in report.results:
                    print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}  ({r.checked} checks)")
                    for cex in r.counterexamples:
                        print(f"      counterexample: {cex}")
            return 0 if report.passed else 1
        if args.command == "sweep":
            paths = sorted(Path(args.configs).glob("*.yaml"))
            if not paths:
                raise ConfigError(f"no *.yaml configs in {args.configs}")
            jobs = [(p, Path(args.out) / p.stem) for p in paths]
            if args.jobs > 1:
                with ProcessPoolExecutor(args.jobs) as pool:
                    outs = list(pool.map(_sweep_one, jobs))
            else:
                outs = [_sweep_one(j) for j in jobs]
            for o in outs:
                print(f"wrote {o}")
            return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 1


if __name__ == "__main__":
    sys.exit(main())
