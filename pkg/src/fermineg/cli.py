"""Command-line experiment runner.

Usage::

    fermineg <experiment> [--key value ...] [--config FILE] [--format csv|json] [--output PATH]

``FILE`` holds flat ``key = value`` lines (``#`` starts a comment).  Keys are
the flag names with dashes or underscores; an ``experiment`` key may replace
the positional experiment name.  A key given both in the file and on the
command line must agree, otherwise the configuration is rejected as
contradictory.

Exit codes: 0 success, 2 configuration error, 3 numerical-contract error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__, experiments
from .asymptotic import CONVENTIONS
from .errors import (
    AccuracyError,
    CapacityError,
    ConfigError,
    ContractError,
    DomainError,
    GeometryError,
)
from .model import RandomModelSpec
from .report import EntanglementReport, emit_report

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

# ------------------------------------------------------------ value parsers


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _optional_int(text: str) -> int | None:
    return None if text.strip().lower() in ("auto", "none") else int(text)


def _int_list(text: str) -> tuple[int, ...]:
    """``"0,3,5"`` or an inclusive range ``"0..19"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    return tuple(out)


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _render(value: Any) -> str:
    if isinstance(value, tuple):
        return ",".join(str(v) for v in value)
    return "auto" if value is None else str(value)


@dataclass(frozen=True)
class Param:
    name: str
    parse: Callable[[str], Any]
    default: Any
    help: str = ""

    @property
    def flag(self) -> str:
        return "--" + self.name.replace("_", "-")


def _model_params(model: str, L: int, mu: float) -> list[Param]:
    return [
        Param("model", str, model, "chain, honeycomb or random"),
        Param("L", int, L, "sites (chain, random) or cells per side (honeycomb)"),
        Param("t", float, 1.0, "hopping amplitude"),
        Param("mu", float, mu, "chemical potential"),
        Param("pbc", _bool, True, "periodic boundary conditions (chain)"),
        Param("range", float, 1.0, "uniform half-width of random hoppings"),
        Param("n_particles", _optional_int, None, "particle number, or auto for the negative-energy rule"),
    ]


SCHEMAS: dict[str, list[Param]] = {
    "chain-scan": [
        Param("L", int, 1000), Param("t", float, 1.0), Param("mu", float, 1.0), Param("pbc", _bool, True),
        Param("l_min", int, 10), Param("l_max", int, 100), Param("l_step", int, 1),
        Param("convention", str, "chord", "logarithm argument of the asymptotic prediction"),
    ],
    "honeycomb-scan": [
        Param("L_min", int, 9), Param("L_max", int, 30), Param("t", float, 1.0),
        Param("mu_list", _float_list, (1.0, 0.5), "comma-separated chemical potentials"),
    ],
    "verify-partial-trace": _model_params("chain", 12, 1.0) + [
        Param("seed", int, 0), Param("geometry", str, "adjacent", "adjacent, disjoint or a site pattern"),
    ],
    "verify-upt": _model_params("random", 12, 1.0) + [
        Param("seeds", _int_list, tuple(range(20)), "seed list, e.g. 0..19"),
        Param("geometry", str, "adjacent"),
    ],
    "tripartite-audit": _model_params("chain", 12, 1.0) + [
        Param("seeds", _int_list, (0,)), Param("geometry", str, "tripartite", "tripartite or a 1/2/B pattern"),
    ],
    "asymptotic-compare": [
        Param("L", int, 1000), Param("t", float, 1.0), Param("mu", float, 0.0),
        Param("l_min", int, 10), Param("l_max", int, 500), Param("l_step", int, 10),
        Param("conventions", _str_list, tuple(CONVENTIONS)),
    ],
}

_RUN_KEYS = {"format", "output", "workers"}


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict[str, Any]
    format: str = "csv"
    output: str = "-"
    workers: int = 1
    defaulted: tuple[str, ...] = field(default_factory=tuple)

    def echo(self) -> dict[str, Any]:
        out = {"experiment": self.experiment}
        out.update({k: list(v) if isinstance(v, tuple) else v for k, v in self.params.items()})
        out["defaults_applied"] = list(self.defaulted)
        return out


# ----------------------------------------------------------------- parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


class _Record(argparse.Action):
    """Store a flag value, rejecting repeats with a different value."""

    def __call__(self, parser, namespace, values, option_string=None):
        prev = getattr(namespace, self.dest, None)
        if prev is not None and prev != values:
            raise ConfigError(f"contradictory flags: {option_string} given as {prev!r} and {values!r}")
        setattr(namespace, self.dest, values)


def read_config_file(path: str | Path) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if not value:
            raise ConfigError(f"{path}:{lineno}: missing required value for key {key!r}")
        if key in out and out[key] != value:
            raise ConfigError(f"{path}:{lineno}: contradictory values for {key!r}: {out[key]!r} and {value!r}")
        out[key] = value
    return out


def _build_parser(experiment: str) -> _Parser:
    p = _Parser(prog=f"fermineg {experiment}", allow_abbrev=False)
    for prm in SCHEMAS[experiment]:
        p.add_argument(prm.flag, dest=prm.name, action=_Record, default=None,
                       help=f"{prm.help} (default {_render(prm.default)})".strip())
    p.add_argument("--config", action=_Record, default=None)
    p.add_argument("--format", action=_Record, default=None, help="csv or json (default csv)")
    p.add_argument("--output", action=_Record, default=None, help="report path, - for stdout")
    p.add_argument("--workers", action=_Record, default=None, help="worker processes (default 1)")
    return p


def _usage() -> str:
    return "usage: fermineg {" + ",".join(SCHEMAS) + "} [options] | fermineg --config FILE"


def parse_config(argv: Sequence[str]) -> ExperimentConfig:
    """Flags and optional config file to a validated :class:`ExperimentConfig`."""
    argv = list(argv)
    experiment = argv.pop(0) if argv and not argv[0].startswith("-") else None
    if experiment is not None and experiment not in SCHEMAS:
        raise ConfigError(f"unknown experiment {experiment!r}; choose from {', '.join(SCHEMAS)}")

    # a bare --config needs its experiment key before the flag schema is known
    pre = _Parser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    file_vals = read_config_file(known.config) if known.config else {}
    file_exp = file_vals.pop("experiment", None)
    if experiment is None:
        if file_exp is None:
            raise ConfigError("missing required experiment name. " + _usage())
        if file_exp not in SCHEMAS:
            raise ConfigError(f"unknown experiment {file_exp!r} in {known.config}")
        experiment = file_exp
    elif file_exp is not None and file_exp != experiment:
        raise ConfigError(f"contradictory experiment: {experiment!r} on the command line, {file_exp!r} in {known.config}")

    schema = {p.name: p for p in SCHEMAS[experiment]}
    unknown = sorted(set(file_vals) - set(schema) - _RUN_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key(s) for {experiment}: {', '.join(unknown)}")
    flags = vars(_build_parser(experiment).parse_args(argv))
    flags.pop("config")

    raw: dict[str, str] = {}
    for key in set(file_vals) | {k for k, v in flags.items() if v is not None}:
        a, b = file_vals.get(key), flags.get(key)
        if a is not None and b is not None and a != b:
            raise ConfigError(f"contradictory values for {key!r}: {a!r} in config file, {b!r} on the command line")
        raw[key] = b if b is not None else a

    params, defaulted = {}, []
    for name, prm in schema.items():
        if name in raw:
            try:
                params[name] = prm.parse(raw[name])
            except ValueError as exc:
                raise ConfigError(f"bad value for {name!r}: {raw[name]!r} ({exc})") from exc
        else:
            params[name] = prm.default
            defaulted.append(name)
    fmt = raw.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown report format {fmt!r}")
    try:
        workers = int(raw.get("workers", "1"))
    except ValueError as exc:
        raise ConfigError(f"bad value for 'workers': {raw['workers']!r}") from exc
    if workers < 1:
        raise ConfigError(f"workers must be at least 1, got {workers}")
    cfg = ExperimentConfig(experiment, params, fmt, raw.get("output", "-"), workers, tuple(defaulted))
    validate(cfg)
    return cfg


# -------------------------------------------------------------- validation


def _check(cond: bool, msg: str):
    if not cond:
        raise GeometryError(msg)


def _validate_model(p: dict[str, Any]) -> int:
    model, L = p["model"], p["L"]
    _check(model in ("chain", "honeycomb", "random"), f"unknown model {model!r}")
    _check(p["t"] > 0, f"hopping amplitude must be positive, got {p['t']}")
    if model == "random":
        for s in p.get("seeds", (p.get("seed", 0),)):
            RandomModelSpec(L, s, p["range"])
        n = L
    elif model == "honeycomb":
        _check(L >= 3 and L % 3 == 0, f"honeycomb L must be a positive multiple of 3, got {L}")
        n = 2 * L * L
    else:
        _check(L >= 2, f"chain needs at least 2 sites, got {L}")
        n = L
    m = p["n_particles"]
    _check(m is None or 0 <= m <= n, f"n_particles must be in 0..{n}, got {m}")
    return n


def validate(cfg: ExperimentConfig) -> None:
    """Geometry checks that must fail before any computation starts."""
    p, exp = cfg.params, cfg.experiment
    if exp in ("chain-scan", "asymptotic-compare"):
        _check(p["L"] >= 2, f"chain needs at least 2 sites, got {p['L']}")
        _check(p["t"] > 0, f"hopping amplitude must be positive, got {p['t']}")
        _check(1 <= p["l_min"] <= p["l_max"] < p["L"],
               f"need 1 <= l_min <= l_max < L, got l_min={p['l_min']}, l_max={p['l_max']}, L={p['L']}")
        _check(p["l_step"] >= 1, f"l_step must be positive, got {p['l_step']}")
        convs = (p["convention"],) if exp == "chain-scan" else p["conventions"]
        for c in convs:
            _check(c in CONVENTIONS, f"unknown convention {c!r}; choose from {', '.join(CONVENTIONS)}")
    elif exp == "honeycomb-scan":
        for key in ("L_min", "L_max"):
            _check(p[key] >= 3 and p[key] % 3 == 0, f"honeycomb {key} must be a positive multiple of 3, got {p[key]}")
        _check(p["L_min"] <= p["L_max"], f"L_min {p['L_min']} exceeds L_max {p['L_max']}")
        _check(p["t"] > 0, f"hopping amplitude must be positive, got {p['t']}")
        _check(len(p["mu_list"]) > 0, "mu_list is empty")
    else:
        n = _validate_model(p)
        part = experiments.chain_partition(n, p["geometry"])
        if exp == "tripartite-audit":
            _check({"A1", "A2"} <= set(part.labels), f"geometry {p['geometry']!r} lacks A1 or A2")
        else:
            _check("A" in part.labels, f"geometry {p['geometry']!r} has no A region")
        if exp == "verify-upt":
            _check(len(p["seeds"]) > 0, "seed list is empty")


# ------------------------------------------------------------------ running


def run_experiment(cfg: ExperimentConfig) -> EntanglementReport:
    func = experiments.EXPERIMENTS[cfg.experiment]
    log.info("running %s with %s", cfg.experiment, cfg.params)
    rep = func(**cfg.params, workers=cfg.workers)
    rep.config = cfg.echo()
    return rep


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if argv and argv[0] in ("-h", "--help"):
        print(__doc__.strip())
        return EXIT_OK
    if argv == ["--version"]:
        print(__version__)
        return EXIT_OK
    try:
        cfg = parse_config(argv)
    except (ConfigError, GeometryError) as exc:
        print(f"fermineg: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        rep = run_experiment(cfg)
        text = emit_report(rep, cfg.format, cfg.output, __version__)
    except GeometryError as exc:
        print(f"fermineg {cfg.experiment}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ContractError, CapacityError, AccuracyError, DomainError) as exc:
        print(f"fermineg {cfg.experiment}: numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"fermineg {cfg.experiment}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if cfg.output in (None, "-"):
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
