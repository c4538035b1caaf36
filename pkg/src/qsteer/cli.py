"""Command-line harness.

    qsteer run CONFIG [overrides]
    qsteer bound --d 2,4,8,16
    qsteer sweep --d 2,4,8,16 --visibility 0.976 --shots 10000 --seed 7

Exit status: 0 on success, 2 for configuration errors, 1 for runtime,
numeric or I/O failures.
"""
from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field

from . import __version__
from .channels import Channel
from .classical import lhs_bound_exact, lhs_search
from .noise import RNG_NAME, NoiseSpec, simulate
from .witness import WitnessReport, report

KINDS = ("epr", "ss", "lhs-bound", "lhs-search")
MAX_DIM = 256
MAX_SEARCH_DIM = 64
CSV_COLUMNS = ("kind", "d", "kernel", "stderr", "bound", "ratio", "steerable", "seed")

DEFAULT_CONFIG = {
    "kind": "epr",
    "d": [2, 4, 8, 16],
    "shots": "exact",
    "seed": 0,
    "z": 3.0,
    "noise": {"visibility": 1.0, "angle_jitter_deg": 0.0, "channel": {"type": "identity", "p": 0.0}},
    "ss": {"reduced_dim": None},
    "search": {"restarts": 32},
    "output": {"path": None, "format": "csv"},
}


class ConfigError(ValueError):
    """Invalid experiment configuration (exit status 2)."""


@dataclass
class ExperimentConfig:
    kind: str
    d: list
    shots: int | None
    seed: int
    z: float
    visibility: float
    angle_jitter: float
    channel: Channel
    reduced_dim: int | None
    restarts: int
    output_path: str | None
    output_format: str
    raw: dict = field(default_factory=dict)

    def noise(self) -> NoiseSpec:
        return NoiseSpec(self.visibility, self.angle_jitter, self.channel)


@dataclass
class RunManifest:
    config: dict
    artifact_version: str
    wall_time_s: float
    rng: str | None
    reports: list

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "artifact_version": self.artifact_version,
            "wall_time_s": self.wall_time_s,
            "rng": self.rng,
            "reports": [r.to_dict() for r in self.reports],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunManifest":
        return cls(
            config=data["config"],
            artifact_version=data["artifact_version"],
            wall_time_s=data["wall_time_s"],
            rng=data["rng"],
            reports=[WitnessReport(**r) for r in data["reports"]],
        )


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if key not in out:
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(out[key], dict) and isinstance(value, dict):
            for sub in value:
                if sub not in out[key]:
                    raise ConfigError(f"unknown config key {key}.{sub!r}")
            out[key] = {**out[key], **value}
        else:
            out[key] = value
    return out


def parse_dims(value) -> list:
    if isinstance(value, str):
        try:
            return [int(x) for x in value.replace(" ", "").split(",") if x]
        except ValueError:
            raise ConfigError(f"invalid d list {value!r}") from None
    if isinstance(value, int) and not isinstance(value, bool):
        return [value]
    if isinstance(value, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        return list(value)
    raise ConfigError(f"invalid d specification {value!r}")


def _is_power_of_two(d: int) -> bool:
    return d >= 2 and d & (d - 1) == 0


def build_config(raw: dict) -> ExperimentConfig:
    """Validate a merged config dictionary."""
    kind = raw["kind"]
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {', '.join(KINDS)}; got {kind!r}")
    dims = parse_dims(raw["d"])
    if not dims:
        raise ConfigError("no dimensions requested")
    if len(set(dims)) != len(dims):
        raise ConfigError(f"duplicate dimensions in {dims}")
    for d in dims:
        if d < 2 or d > MAX_DIM:
            raise ConfigError(f"invalid d={d}: must lie in [2, {MAX_DIM}]")
        if kind in ("epr", "ss") and not _is_power_of_two(d):
            raise ConfigError(f"invalid d={d}: {kind} runs need a power of 2")
        if kind == "lhs-search" and d > MAX_SEARCH_DIM:
            raise ConfigError(f"invalid d={d}: lhs-search is limited to d <= {MAX_SEARCH_DIM}")

    shots = raw["shots"]
    if shots == "exact" or shots is None:
        shots = None
    elif isinstance(shots, int) and not isinstance(shots, bool) and shots >= 1:
        pass
    elif isinstance(shots, str) and shots.isdigit() and int(shots) >= 1:
        shots = int(shots)
    else:
        raise ConfigError(f"shots must be 'exact' or an integer >= 1; got {shots!r}")

    seed = raw["seed"]
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise ConfigError(f"seed must be an integer in [0, 2**64); got {seed!r}")

    noise = raw["noise"]
    try:
        visibility = float(noise["visibility"])
        jitter_deg = float(noise["angle_jitter_deg"])
        channel = Channel.parse(noise["channel"])
        z = float(raw["z"])
        restarts = int(raw["search"]["restarts"])
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid noise/search settings: {exc}") from None
    if not 0.0 <= visibility <= 1.0:
        raise ConfigError(f"visibility must lie in [0, 1]; got {visibility}")
    if not (jitter_deg >= 0.0 and math.isfinite(jitter_deg)):
        raise ConfigError(f"angle_jitter_deg must be finite and >= 0; got {jitter_deg}")
    if jitter_deg > 0 and shots is None:
        raise ConfigError("angle jitter is random; use a finite number of shots")
    if not (z >= 0.0 and math.isfinite(z)):
        raise ConfigError(f"z must be finite and >= 0; got {z}")
    if restarts < 1:
        raise ConfigError(f"restarts must be >= 1; got {restarts}")

    reduced = raw["ss"]["reduced_dim"]
    if reduced is not None:
        if kind != "ss":
            raise ConfigError("ss.reduced_dim only applies to kind 'ss'")
        if not isinstance(reduced, int) or not (reduced == 1 or _is_power_of_two(reduced)):
            raise ConfigError(f"ss.reduced_dim must be a power of 2; got {reduced!r}")
        bad = [d for d in dims if reduced > d]
        if bad:
            raise ConfigError(f"ss.reduced_dim={reduced} exceeds d={bad[0]}")

    out = raw["output"]
    fmt = out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output format must be csv or json; got {fmt!r}")

    return ExperimentConfig(
        kind=kind,
        d=dims,
        shots=shots,
        seed=seed,
        z=z,
        visibility=visibility,
        angle_jitter=math.radians(jitter_deg),
        channel=channel,
        reduced_dim=reduced,
        restarts=restarts,
        output_path=out.get("path"),
        output_format=fmt,
        raw=raw,
    )


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"malformed config file {path}: top level must be an object")
    return data


def _run_one(cfg: ExperimentConfig, kind: str, d: int) -> WitnessReport:
    if kind in ("epr", "ss"):
        return simulate(kind, d, cfg.noise(), shots=cfg.shots, seed=cfg.seed, z=cfg.z, reduced_dim=cfg.reduced_dim)
    if kind == "lhs-bound":
        return report(kind, lhs_bound_exact(d), 0.0, d, z=cfg.z, seed=cfg.seed)
    result = lhs_search(d, restarts=cfg.restarts, seed=cfg.seed)
    return report(kind, result.value, 0.0, d, z=cfg.z, seed=cfg.seed)


def run(cfg: ExperimentConfig, kinds=None) -> RunManifest:
    """Execute the configured workflow for every requested dimension."""
    kinds = [cfg.kind] if kinds is None else list(kinds)
    start = time.perf_counter()
    reports = [_run_one(cfg, kind, d) for kind in kinds for d in cfg.d]
    reports.sort(key=lambda r: (r.kind, r.d))
    uses_rng = cfg.shots is not None or any(k == "lhs-search" for k in kinds)
    return RunManifest(
        config=cfg.raw,
        artifact_version=__version__,
        wall_time_s=time.perf_counter() - start,
        rng=RNG_NAME if uses_rng else None,
        reports=reports,
    )


def format_number(x: float) -> str:
    """Fixed-point text with at least 12 significant digits; exact zero is '0'."""
    if x == 0:
        return "0"
    decimals = max(12, 11 - math.floor(math.log10(abs(x))))
    return f"{x:.{decimals}f}"


def to_csv(manifest: RunManifest) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in manifest.reports:
        writer.writerow(
            [
                r.kind,
                r.d,
                format_number(r.kernel),
                format_number(r.stderr),
                format_number(r.bound),
                format_number(r.ratio),
                "true" if r.steerable else "false",
                "" if r.seed is None else r.seed,
            ]
        )
    return buf.getvalue()


def to_json(manifest: RunManifest) -> str:
    return json.dumps(manifest.to_dict(), indent=2, sort_keys=True) + "\n"


def emit(manifest: RunManifest, fmt: str, path: str | None, stream=None) -> None:
    """Write the manifest; a failed write leaves no partial file behind."""
    text = to_csv(manifest) if fmt == "csv" else to_json(manifest)
    if path is None or path == "-":
        (stream or sys.stdout).write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".qsteer-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise
        raise


def _add_output_args(p):
    p.add_argument("--output", help="result file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="result format (default csv)")


def _add_sim_args(p, required=False):
    p.add_argument("--visibility", type=float, required=required, help="Werner visibility of each photon pair")
    p.add_argument("--shots", required=required, help="shots per setting, or 'exact'")
    p.add_argument("--seed", type=int, required=required)
    p.add_argument("--angle-jitter", type=float, help="HWP angle jitter std-dev in degrees")
    p.add_argument("--z", type=float, help="standard errors required for a steering verdict")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsteer", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"qsteer {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment described by a JSON config file")
    p.add_argument("config")
    p.add_argument("--kind", choices=KINDS)
    p.add_argument("--d", help="comma-separated dimensions")
    p.add_argument("--restarts", type=int)
    _add_sim_args(p)
    _add_output_args(p)

    p = sub.add_parser("bound", help="classical (LHS) bound by exact eigenvalue analysis")
    p.add_argument("--d", required=True, help="comma-separated dimensions")
    _add_output_args(p)

    p = sub.add_parser("sweep", help="noisy witness runs over several dimensions")
    p.add_argument("--d", required=True, help="comma-separated dimensions")
    p.add_argument("--kind", default="epr,ss", help="comma-separated subset of epr,ss")
    _add_sim_args(p, required=True)
    _add_output_args(p)
    return parser


def _overrides(args) -> dict:
    over: dict = {}
    if getattr(args, "kind", None) and args.command == "run":
        over["kind"] = args.kind
    if getattr(args, "d", None) is not None:
        over["d"] = parse_dims(args.d)
    if getattr(args, "shots", None) is not None:
        over["shots"] = args.shots if args.shots == "exact" else _int_or_error(args.shots, "--shots")
    if getattr(args, "seed", None) is not None:
        over["seed"] = args.seed
    if getattr(args, "z", None) is not None:
        over["z"] = args.z
    noise = {}
    if getattr(args, "visibility", None) is not None:
        noise["visibility"] = args.visibility
    if getattr(args, "angle_jitter", None) is not None:
        noise["angle_jitter_deg"] = args.angle_jitter
    if noise:
        over["noise"] = noise
    if getattr(args, "restarts", None) is not None:
        over["search"] = {"restarts": args.restarts}
    output = {}
    if args.output is not None:
        output["path"] = args.output
    if args.format is not None:
        output["format"] = args.format
    if output:
        over["output"] = output
    return over


def _int_or_error(text: str, flag: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{flag} must be 'exact' or an integer; got {text!r}") from None


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        kinds = None
        if args.command == "run":
            raw = _merge(_merge(DEFAULT_CONFIG, load_config(args.config)), _overrides(args))
        elif args.command == "bound":
            raw = _merge(DEFAULT_CONFIG, {"kind": "lhs-bound", **_overrides(args)})
        else:
            kinds = [k for k in args.kind.split(",") if k]
            if not kinds or any(k not in ("epr", "ss") for k in kinds) or len(set(kinds)) != len(kinds):
                raise ConfigError(f"--kind must be a subset of epr,ss; got {args.kind!r}")
            raw = _merge(DEFAULT_CONFIG, {"kind": kinds[0], **_overrides(args)})
        cfg = build_config(raw)
    except ConfigError as exc:
        print(f"qsteer: config error: {exc}", file=sys.stderr)
        return 2

    try:
        manifest = run(cfg, kinds)
    except (ValueError, ArithmeticError, RuntimeError, MemoryError) as exc:
        print(f"qsteer: run failed: {exc}", file=sys.stderr)
        return 1
    try:
        emit(manifest, cfg.output_format, cfg.output_path)
    except OSError as exc:
        print(f"qsteer: cannot write output {cfg.output_path!r}: {exc.strerror or exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
