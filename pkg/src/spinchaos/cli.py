"""Command-line front end: run configs, reproduce figures, emit tables.

Subcommands::

    spinchaos run CONFIG [--out DIR] [--seed N] [--workers N] [--dump-spectra]
    spinchaos preset NAME [--full] [--show] [--out DIR] [--seed N] ...
    spinchaos validate CONFIG

All numeric output is full-precision, '.'-decimal, RFC-4180-style CSV.
A JSON sidecar records the plan (including the base seed) so any run
can be reproduced exactly.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import replace
from datetime import datetime, timezone
from importlib.metadata import version as _dist_version
from pathlib import Path

from .config import ExperimentConfig, parse_config, serialize_config
from .ensemble import ResultTable, run_sweep
from .errors import ConfigError
from .hamiltonian import ModelSpec1D
from .presets import PRESET_NAMES, preset

log = logging.getLogger("spinchaos")


def _fmt(x) -> str:
    """Full-precision decimal text for floats; plain text otherwise."""
    if isinstance(x, float):
        return repr(x)
    return "" if x is None else str(x)


def emit(table: ResultTable, formats, directory) -> list[Path]:
    """Write the results table and its side channels; returns the paths."""
    if not table.rows and not table.state_maps:
        raise ValueError("nothing to emit: the result table is empty")
    outdir = Path(directory)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    if "csv" in formats and table.rows:
        path = outdir / "results.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["measure", "J", "J_units", "value", "stderr", "n_samples", "L", "model", "l_c", "seed"]
            )
            for row in table.rows:
                writer.writerow(
                    [
                        row.measure, _fmt(row.j), row.j_units, _fmt(row.value), _fmt(row.stderr),
                        row.n_samples, row.L, row.model, _fmt(row.l_c), row.seed,
                    ]
                )
        written.append(path)

    for hist in table.histograms:
        lc = f"_lc{hist.l_c}" if hist.l_c is not None else ""
        path = outdir / f"hist_{hist.measure}_L{hist.L}{lc}_J{hist.j:g}.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["bin_left", "bin_right", "density"])
            for left, right, dens in zip(hist.bin_edges[:-1], hist.bin_edges[1:], hist.density):
                writer.writerow([_fmt(float(left)), _fmt(float(right)), _fmt(float(dens))])
        written.append(path)

    for smap in table.state_maps:
        lc = f"_lc{smap.l_c}" if smap.l_c is not None else ""
        path = outdir / f"map_{smap.measure}_L{smap.L}{lc}.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["state_index", "J", "value"])
            for ji, j in enumerate(smap.j_grid):
                for idx in range(smap.values.shape[0]):
                    writer.writerow([idx, _fmt(float(j)), _fmt(float(smap.values[idx, ji]))])
        written.append(path)

    if table.spectra:
        path = outdir / "spectra.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["model", "L", "l_c", "J", "realization", "level_index", "energy"])
            for meta, values in table.spectra:
                for idx, energy in enumerate(values):
                    writer.writerow(
                        [
                            meta["model"], meta["L"], _fmt(meta["l_c"]), _fmt(meta["j"]),
                            meta["realization"], idx, _fmt(float(energy)),
                        ]
                    )
        written.append(path)

    if "json" in formats:
        path = outdir / "run.json"
        plan = table.plan
        meta = {
            "version": _package_version(),
            "created": datetime.now(timezone.utc).isoformat(),
            "runtime_seconds": table.runtime_seconds,
            "base_seed": plan.base_seed,
            "units": plan.units,
            "j_grid": list(plan.j_grid),
            "realizations": plan.realizations,
            "measures": [m.token for m in plan.measures],
            "band_rule": plan.band_rule,
            "variants": [_variant_meta(spec) for spec in plan.variants],
            "n_rows": len(table.rows),
        }
        path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
        written.append(path)
    return written


def _variant_meta(spec) -> dict:
    if isinstance(spec, ModelSpec1D):
        return {"kind": "1d", "L": spec.L, "a": spec.a, "omega": spec.omega, "l_c": spec.l_c}
    return {
        "kind": "2d", "lx": spec.geometry.dims[0], "ly": spec.geometry.dims[1],
        "delta0": spec.delta0, "delta": spec.delta,
    }


def _package_version() -> str:
    try:
        return _dist_version("spinchaos")
    except Exception:
        return "unknown"


def _apply_overrides(config: ExperimentConfig, args) -> ExperimentConfig:
    if args.seed is not None:
        config = replace(config, base_seed=args.seed)
    if args.out is not None:
        config = replace(config, directory=args.out)
    if args.workers is not None:
        config = replace(config, workers=args.workers)
    return config


def _execute(config: ExperimentConfig, dump_spectra: bool) -> int:
    plan = config.plan()
    log.info(
        "running %d variant(s) x %d grid point(s) x %d realization(s)",
        len(plan.variants), len(plan.j_grid), plan.realizations,
    )
    table = run_sweep(plan, keep_spectra=dump_spectra)
    paths = emit(table, config.formats, config.directory)
    for path in paths:
        log.info("wrote %s", path)
    print(f"done in {table.runtime_seconds:.1f} s; {len(table.rows)} rows -> {config.directory}")
    return 0


def _cmd_run(args) -> int:
    try:
        config = parse_config(Path(args.config).read_text(encoding="utf-8"))
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"error: {problem}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: cannot read {args.config}: {exc}", file=sys.stderr)
        return 2
    return _execute(_apply_overrides(config, args), args.dump_spectra)


def _cmd_preset(args) -> int:
    try:
        config = preset(args.name, full=args.full)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    config = _apply_overrides(config, args)
    if args.show:
        print(serialize_config(config), end="")
        return 0
    return _execute(config, args.dump_spectra)


def _cmd_validate(args) -> int:
    try:
        parse_config(Path(args.config).read_text(encoding="utf-8"))
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"error: {problem}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: cannot read {args.config}: {exc}", file=sys.stderr)
        return 2
    print(f"{args.config}: OK")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinchaos",
        description="Disordered spin lattices: chaos and entanglement sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output directory (overrides the config)")
        p.add_argument("--seed", type=int, help="base seed override")
        p.add_argument("--workers", type=int, help="parallel worker processes")
        p.add_argument(
            "--dump-spectra", action="store_true",
            help="also write every realization's eigenvalues to spectra.csv",
        )

    p_run = sub.add_parser("run", help="run an experiment config file")
    p_run.add_argument("config")
    common(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_preset = sub.add_parser("preset", help="run a named figure-reproduction preset")
    p_preset.add_argument("name", help=f"one of: {', '.join(PRESET_NAMES)}")
    p_preset.add_argument("--full", action="store_true", help="publication-scale ensembles")
    p_preset.add_argument("--show", action="store_true", help="print the config instead of running")
    common(p_preset)
    p_preset.set_defaults(func=_cmd_preset)

    p_val = sub.add_parser("validate", help="check a config file and report every problem")
    p_val.add_argument("config")
    p_val.set_defaults(func=_cmd_validate)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
