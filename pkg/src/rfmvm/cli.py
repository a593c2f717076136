"""Batch experiment runner.

Each subcommand reads a flat key=value config (with command-line
overrides), runs its sweep through the library, and writes a fixed-header
report.csv plus a manifest.json echoing every parameter, the seed, and
the wall time.  Reruns with the same seed are byte-identical at any
thread count.

Exit codes: 0 success, 2 config error, 3 file I/O error, 4 simulation
error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import bench, energy as energy_model, inference
from .containers import read_vectors
from .errors import ContainerError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_SIM = 4

_SUBCOMMANDS = ("ip-bench", "mvm-bench", "classify", "energy", "sync-bench")


class ConfigError(ValueError):
    pass


def parse_config_file(path: str) -> dict:
    """Flat key=value lines; '#' starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, value = stripped.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def parse_snr_list(text: str) -> list[float]:
    """Either comma-separated values or start:stop:step (inclusive)."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"snr range must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ConfigError(f"snr step must be positive, got {step}")
        count = int(round((stop - start) / step)) + 1
        return [start + i * step for i in range(count)]
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad snr list {text!r}: {exc}") from exc


def _get(cfg: dict, key: str, default=None, cast=str):
    if key not in cfg or cfg[key] == "":
        if default is None:
            raise ConfigError(f"missing required config key {key!r}")
        return default
    try:
        if cast is bool:
            return str(cfg[key]).lower() in ("1", "true", "yes")
        return cast(cfg[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key!r}: {cfg[key]!r} ({exc})") from exc


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _run_ip_bench(cfg, executor, manifest):
    n = _get(cfg, "n", cast=int)
    trials = _get(cfg, "trials", 200, int)
    seed = _get(cfg, "seed", 0, int)
    scheme = _get(cfg, "scheme", "w-precode")
    snrs = parse_snr_list(_get(cfg, "snr_db", "5:30:2.5"))
    zero_pad = _get(cfg, "zero_pad", 1, int)
    cp_len = _get(cfg, "cp_len", 1, int)
    points = bench.ip_accuracy_sweep(
        n, snrs, trials, seed, scheme, zero_pad, cp_len, executor=executor
    )
    if len(points) >= 2:
        manifest["fitted_db_per_bit"] = bench.fit_db_per_bit(points)
    rows = ["scheme,n,snr_db,rmse,bits"]
    for p in points:
        rows.append(
            f"{scheme},{n},{_fmt(p.snr_db)},{_fmt(p.rmse)},{_fmt(p.bits)}"
        )
    return rows


def _run_mvm_bench(cfg, executor, manifest):
    n = _get(cfg, "n", cast=int)
    m = _get(cfg, "m", cast=int)
    trials = _get(cfg, "trials", 50, int)
    seed = _get(cfg, "seed", 0, int)
    scheme = _get(cfg, "scheme", "w-precode")
    block_output = _get(cfg, "block_output", 6, int)
    snrs = parse_snr_list(_get(cfg, "snr_db", "5:30:2.5"))
    points = bench.mvm_accuracy_sweep(
        n, m, snrs, trials, seed, scheme, block_output, executor=executor
    )
    if len(points) >= 2:
        manifest["fitted_db_per_bit"] = bench.fit_db_per_bit(points)
    rows = ["scheme,n,m,snr_db,rmse,bits"]
    for p in points:
        rows.append(
            f"{scheme},{n},{m},{_fmt(p.snr_db)},{_fmt(p.rmse)},{_fmt(p.bits)}"
        )
    return rows


def _run_classify(cfg, executor, manifest):
    model = inference.load_model(_get(cfg, "model"))
    vectors, labels = read_vectors(_get(cfg, "vectors"))
    scheme = _get(cfg, "scheme", "w-precode")
    fidelity = _get(cfg, "fidelity", "symbolic")
    seed = _get(cfg, "seed", 0, int)
    limit = _get(cfg, "limit", vectors.shape[0], int)
    snrs = parse_snr_list(_get(cfg, "snr_db", "25"))
    digital = bench.classify_accuracy(
        model, vectors, labels, digital=True, limit=limit
    )
    manifest["digital_accuracy"] = digital
    rows = ["scheme,fidelity,snr_db,accuracy,digital_accuracy,samples"]
    for s in snrs:
        acc = bench.classify_accuracy(
            model, vectors, labels, scheme=scheme, fidelity=fidelity,
            snr_db=s, seed=seed, limit=limit,
        )
        rows.append(
            f"{scheme},{fidelity},{_fmt(s)},{_fmt(acc)},{_fmt(digital)},{limit}"
        )
    return rows


def _run_energy(cfg, executor, manifest):
    scheme = _get(cfg, "scheme", "w-precode")
    m = _get(cfg, "m", 1, int)
    alpha = _get(cfg, "alpha", 1.0 / 3.0, float)
    beta = _get(cfg, "beta", 0.25, float)
    block_output = _get(cfg, "block_output", 6, int)
    decomposition = _get(cfg, "decomposition", "blocks")
    snr_db = _get(cfg, "snr_db", "25")
    n_list = [int(v) for v in _get(cfg, "n_list", "128,512,2048,8192,32768").split(",")]
    profile = energy_model.HardwareProfile(
        eta_radio=_get(cfg, "eta_radio", 0.1, float),
        eta_mixer=_get(cfg, "eta_mixer", energy_model.db_to_linear(-11.4), float),
        eta_nf=_get(cfg, "eta_nf", energy_model.db_to_linear(-16.9), float),
        e_adc=_get(cfg, "e_adc", 1e-12, float),
        e_dig=_get(cfg, "e_dig", 1e-12, float),
        snr_db=float(parse_snr_list(snr_db)[0]),
    )
    rows = [energy_model.ENERGY_CSV_HEADER]
    for n in n_list:
        b = energy_model.energy_breakdown(
            scheme, n, m if m > 0 else n, profile, alpha, beta,
            block_output, decomposition,
        )
        rows.append(
            energy_model.energy_csv_row(scheme, b, profile, alpha, beta, block_output)
        )
    return rows


def _run_sync_bench(cfg, executor, manifest):
    trials = _get(cfg, "trials", 1000, int)
    seed = _get(cfg, "seed", 0, int)
    l_pre = _get(cfg, "l_pre", 31, int)
    n_ratio = _get(cfg, "n_ratio", 16, int)
    cfo = _get(cfg, "cfo", 0.0, float)
    snrs = parse_snr_list(_get(cfg, "snr_db", "10"))
    rows = ["snr_db,detect_rate,timing_error_max,cfo_error_max,trials"]
    for s in snrs:
        st = bench.sync_statistics(
            s, trials=trials, seed=seed, l_pre=l_pre, n_ratio=n_ratio, cfo=cfo
        )
        rows.append(
            f"{_fmt(s)},{_fmt(st.detect_rate)},{st.timing_error_max},"
            f"{_fmt(st.cfo_error_max)},{st.trials}"
        )
    return rows


_RUNNERS = {
    "ip-bench": _run_ip_bench,
    "mvm-bench": _run_mvm_bench,
    "classify": _run_classify,
    "energy": _run_energy,
    "sync-bench": _run_sync_bench,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rfmvm",
        description="Frequency-encoded MVM experiment runner",
    )
    parser.add_argument("subcommand", choices=_SUBCOMMANDS)
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials per point")
    parser.add_argument("--snr-db", help="comma list or start:stop:step")
    parser.add_argument("--scheme", help="vanilla|basic|w-precode|x-precode")
    parser.add_argument("--fidelity", help="symbolic|waveform")
    parser.add_argument("--out-dir", default=".", help="report destination")
    parser.add_argument("--threads", type=int, default=1, help="worker threads")
    parser.add_argument(
        "--set", action="append", default=[], metavar="KEY=VALUE",
        help="extra config overrides",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.time()
    try:
        cfg = parse_config_file(args.config) if args.config else {}
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set needs KEY=VALUE, got {item!r}")
            key, value = item.split("=", 1)
            cfg[key.strip()] = value.strip()
        for key in ("seed", "trials", "scheme", "fidelity"):
            value = getattr(args, key)
            if value is not None:
                cfg[key] = str(value)
        if args.snr_db is not None:
            cfg["snr_db"] = args.snr_db
        runner = _RUNNERS[args.subcommand]
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    manifest = {
        "subcommand": args.subcommand,
        "config": dict(cfg),
        "seed": int(cfg.get("seed", 0)),
        "threads": args.threads,
        "version": _package_version(),
    }
    try:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.threads > 1:
            with ThreadPoolExecutor(max_workers=args.threads) as pool:
                rows = runner(cfg, pool, manifest)
        else:
            rows = runner(cfg, None, manifest)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ContainerError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # simulation failures keep a distinct code
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_SIM

    manifest["wall_time_s"] = round(time.time() - started, 3)
    try:
        (out_dir / "report.csv").write_text("\n".join(rows) + "\n")
        (out_dir / "manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n"
        )
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"{args.subcommand}: {len(rows) - 1} rows -> {out_dir / 'report.csv'}")
    return EXIT_OK


def _package_version() -> str:
    try:
        from importlib.metadata import version

        return version("rfmvm")
    except Exception:
        return "unknown"


if __name__ == "__main__":
    sys.exit(main())
