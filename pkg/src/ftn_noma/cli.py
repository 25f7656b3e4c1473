"""Command-line front end.

Subcommands ``sc-sweep``, ``mimo-sweep``, ``user-sweep`` and ``outage``
write CSV series; ``verify`` runs the invariant suites.  Exit codes: 0 on
success, 1 on an invariant violation, 2 on a configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__, verify
from .errors import ConfigError
from .sim import (ExperimentConfig, SweepResult, run_asr_sweep, run_outage,
                  run_user_count_sweep)

log = logging.getLogger(__name__)

ASR_COLUMNS = ("axis", "scheme", "signaling", "mean_asr_bps_hz", "trials", "seed")
OUTAGE_COLUMNS = ("snr_db", "scheme", "signaling", "op_strong", "op_weak", "trials", "seed")

# config-file key -> parser
_KEYS = {
    "scenario": str,
    "scheme": lambda s: _split(s, str),
    "signaling": lambda s: _split(s, str),
    "snr": lambda s: _split(s, float),
    "users": lambda s: _split(s, int),
    "n_rx": int,
    "n_tx": int,
    "beta": float,
    "alpha": float,
    "trials": int,
    "seed": int,
    "threshold_strong": float,
    "threshold_weak": float,
    "policy_strong": str,
    "policy_weak": str,
    "cell_radius": float,
    "reference_distance": float,
}


def _split(text, conv):
    items = [t.strip() for t in str(text).split(",") if t.strip()]
    return tuple(conv(t) for t in items)


@dataclass
class RunManifest:
    subcommand: str
    config: ExperimentConfig
    seed: int
    output: str
    version: str = __version__
    extra: dict = field(default_factory=dict)

    def header_lines(self) -> list[str]:
        lines = [f"ftn-noma {self.version}", f"subcommand = {self.subcommand}",
                 f"output = {self.output}"]
        for key, value in asdict(self.config).items():
            # repr round-trips floats exactly
            if isinstance(value, (tuple, list)):
                value = ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{key} = {value}")
        for key, value in self.extra.items():
            lines.append(f"{key} = {value}")
        return lines


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; ``#`` comments allowed, no sections."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}", "config")
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string("[run]\n" + path.read_text())
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}", "config") from exc
    return dict(parser["run"])


def _parse_values(path=None, overrides=None, scenario=None) -> dict:
    raw = read_config_file(path) if path else {}
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    if scenario is not None:
        raw["scenario"] = scenario
    values = {}
    for key, text in raw.items():
        if key not in _KEYS:
            raise ConfigError(f"unknown config key {key!r}", key)
        try:
            values[key] = _KEYS[key](text) if isinstance(text, str) else text
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {text!r}", key) from exc
    return values


def user_counts(path=None, overrides=None) -> tuple[int, ...]:
    """The ``users`` entry read as a list of counts (for user-count sweeps)."""
    users = _parse_values(path, overrides).get("users", ())
    return tuple(users) if isinstance(users, (tuple, list)) else (int(users),)


def parse_config(path=None, overrides=None, scenario=None, allow_user_list=False) -> ExperimentConfig:
    """Merge a config file with flag overrides and validate.

    Overrides take precedence over file values.  Unknown keys, unparseable
    values and out-of-range values raise ``ConfigError`` naming the key.
    When ``alpha`` is not given it defaults to ``1 / (1 + beta)``.
    """
    values = _parse_values(path, overrides, scenario)
    scen = values.pop("scenario", "sc")
    beta = values.pop("beta", 0.5)
    kw = {"scenario": scen, "beta": beta}
    kw["alpha"] = values.pop("alpha", 1.0 / (1.0 + beta) if 0 <= beta <= 1 else 1.0)
    users = values.pop("users", None)
    if users is None:
        kw["users"] = 32 if scen == "sc" else 2 * values.get("n_tx", 8)
    else:
        users = tuple(users) if isinstance(users, (tuple, list)) else (int(users),)
        if len(users) != 1 and not allow_user_list or not users:
            raise ConfigError("users must be a single count", "users")
        kw["users"] = users[0]
    for key, field_name in (("scheme", "schemes"), ("signaling", "signalings"), ("snr", "snr_grid")):
        if key in values:
            kw[field_name] = values.pop(key)
    kw["outage_thresholds"] = (values.pop("threshold_strong", 1.0), values.pop("threshold_weak", 0.5))
    kw.update(values)
    return ExperimentConfig(**kw)


def write_csv(result: SweepResult, fh, manifest: RunManifest | None = None) -> None:
    """Write ``result`` to an open text stream; see ``emit_csv``."""
    if manifest is not None:
        for line in manifest.header_lines():
            fh.write(f"# {line}\n")
    writer = csv.writer(fh, lineterminator="\n")
    if result.kind == "asr":
        writer.writerow(ASR_COLUMNS)
        for r in result.rows:
            writer.writerow([_fmt(r.axis), r.scheme, r.signaling, _fmt(r.mean_asr), r.trials, r.seed])
    else:
        writer.writerow(OUTAGE_COLUMNS)
        for r in result.rows:
            writer.writerow([_fmt(r.snr_db), r.scheme, r.signaling, _fmt(r.op_strong),
                             _fmt(r.op_weak), r.trials, r.seed])


def emit_csv(result: SweepResult, path, manifest: RunManifest | None = None) -> None:
    """Write ``result`` as CSV with a ``#`` comment header, LF line endings.

    Floats carry 12 significant digits.
    """
    with Path(path).open("w", newline="") as fh:
        write_csv(result, fh, manifest)


def read_csv(path):
    """Parse a file written by ``emit_csv`` into a list of dicts (strings)."""
    with Path(path).open(newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def _add_run_flags(p, sweep_users=False):
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--out", default=None, help="output CSV path (default: stdout)")
    p.add_argument("--seed")
    p.add_argument("--trials")
    p.add_argument("--snr", help="comma-separated SNR values in dB")
    p.add_argument("--beta")
    p.add_argument("--alpha")
    p.add_argument("--users", help="comma list of user counts" if sweep_users else "user count 2K")
    p.add_argument("--scheme", help="comma list of noma-proposed, noma-random, oma")
    p.add_argument("--signaling", help="comma list of ftn, nyquist")
    p.add_argument("--policy-strong", dest="policy_strong")
    p.add_argument("--policy-weak", dest="policy_weak")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ftn-noma", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run_flags(sub.add_parser("sc-sweep", help="SC sum rate versus SNR"))
    _add_run_flags(sub.add_parser("mimo-sweep", help="MIMO sum rate versus SNR"))
    _add_run_flags(sub.add_parser("user-sweep", help="SC sum rate versus user count"), sweep_users=True)
    p = sub.add_parser("outage", help="outage probability versus SNR")
    _add_run_flags(p)
    p.add_argument("--scenario", choices=("sc", "mimo"))
    p = sub.add_parser("verify", help="run the invariant suites")
    p.add_argument("--level", choices=tuple(verify.LEVELS), default="quick")
    p.add_argument("--seed", type=int, default=0)
    return parser


_SCENARIO = {"sc-sweep": "sc", "mimo-sweep": "mimo", "user-sweep": "sc"}
_FLAG_KEYS = ("seed", "trials", "snr", "beta", "alpha", "users", "scheme", "signaling",
              "policy_strong", "policy_weak")


def _run(args) -> int:
    overrides = {k: getattr(args, k) for k in _FLAG_KEYS}
    scenario = _SCENARIO.get(args.command, getattr(args, "scenario", None))
    extra = {}
    if args.command == "user-sweep":
        if args.snr is None:
            overrides["snr"] = "20"
        counts = user_counts(args.config, overrides) or (4, 8, 16, 32)
        cfg = parse_config(args.config, overrides, scenario, allow_user_list=True)
        result = run_user_count_sweep(cfg, counts)
        extra["counts"] = ",".join(str(c) for c in counts)
    else:
        cfg = parse_config(args.config, overrides, scenario)
        result = run_outage(cfg) if args.command == "outage" else run_asr_sweep(cfg)
    manifest = RunManifest(args.command, cfg, cfg.seed, args.out or "-", extra=extra)
    if args.out:
        emit_csv(result, args.out, manifest)
    else:
        write_csv(result, sys.stdout, manifest)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "verify":
            results = verify.run_all(args.level, args.seed)
            for r in results:
                print(r.line())
            return 0 if all(r.passed for r in results) else 1
        return _run(args)
    except ConfigError as exc:
        key = f" [{exc.key}]" if exc.key else ""
        print(f"config error{key}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
