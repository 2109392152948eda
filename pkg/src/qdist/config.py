"""
Configuration

Resource caps shared by every module, and the flat key=value configuration
format used by the CLI and the sweep runner:

    # phase.cfg
    p=7 ell=1 d=2
    sizes_e=5,10,20
    sizes_f=5,10
    trials=10 seed=3
    checks=proof-chain,product-energy

Lists are comma-separated; integer ranges are written a..b (inclusive). For p,
a range keeps only the odd primes it contains.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from pathlib import Path

from qdist.errors import ConfigError

logger = logging.getLogger(__name__)

MAX_P = 10_000
MAX_Q = 1_000_000
MAX_ELL = 3
MAX_POINTS = 10_000_000
MAX_PAIRS = 100_000_000
MAX_TRIPLES = 1_000_000_000
MUL_TABLE_MAX_Q = 1024
DFT_MATRIX_MAX_Q = 2048
# Pairwise norms are computed in blocks of about PAIR_BLOCK**2 pairs.
PAIR_BLOCK = 1024

# tau = TAU_UNIT * (number of summed terms)
TAU_UNIT = 1e-10

CHECK_NAMES = (
    "gauss",
    "gauss-power",
    "characters",
    "kloosterman",
    "complete-square",
    "sphere-ft",
    "restriction",
    "zero-sphere",
    "v0",
    "energy-bound",
    "proof-chain",
    "cs-bound",
    "sumset",
    "product-energy",
    "triples",
    "shparlinski",
    "iosevich-rudnev",
    "isotropic",
)

# Older check names still accepted on the command line and in config files.
CHECK_ALIASES = {
    "lemma2.3": "sphere-ft",
    "lemma33": "energy-bound",
    "prop41": "product-energy",
}

RANDOMIZED_CHECKS = frozenset(
    {
        "restriction",
        "energy-bound",
        "proof-chain",
        "cs-bound",
        "sumset",
        "product-energy",
        "triples",
        "shparlinski",
        "iosevich-rudnev",
        "sweep",
    }
)

FAMILIES = ("random", "full", "isotropic", "point")
FORMATS = ("jsonl", "csv")


@dataclass(frozen=True)
class Config:
    """A validated run configuration."""

    checks: tuple[str, ...] = ()
    p: tuple[int, ...] = (3,)
    ell: tuple[int, ...] = (1,)
    d: tuple[int, ...] = (2,)
    j: int | None = None
    size: int | None = None
    sizes_e: tuple[int, ...] = ()
    sizes_f: tuple[int, ...] = ()
    trials: int | None = None
    seed: int | None = None
    family_e: str = "random"
    family_f: str = "random"
    workers: int = 0
    format: str = "jsonl"
    out: str | None = None

    @property
    def randomized(self):
        return any(name in RANDOMIZED_CHECKS for name in self.checks)


def _int(key, text):
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {text!r}") from None


def _int_list(key, text):
    values = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            values.extend(range(_int(key, lo), _int(key, hi) + 1))
        else:
            values.append(_int(key, part))
    if not values:
        raise ConfigError(f"{key}: empty value")
    return tuple(values)


def _primes(text):
    from qdist.field import is_prime

    ranged = ".." in str(text)
    values = _int_list("p", text)
    if ranged:
        values = tuple(v for v in values if v > 2 and is_prime(v))
        if not values:
            raise ConfigError(f"p: range {text!r} holds no odd prime")
    for v in values:
        if not is_prime(v):
            raise ConfigError(f"p: {v} is not prime")
        if v == 2:
            raise ConfigError("p: characteristic 2 is not supported")
        if v > MAX_P:
            raise ConfigError(f"p: {v} exceeds the cap {MAX_P}")
    return values


def canonical_check(name):
    """The check name behind name or one of its aliases; raises ConfigError."""
    name = CHECK_ALIASES.get(name, name)
    if name not in CHECK_NAMES and name != "sweep":
        raise ConfigError(f"check: unknown check {name!r}")
    return name


def _checks(text):
    return tuple(canonical_check(n.strip()) for n in str(text).split(",") if n.strip())


def _choice(key, choices):
    def parse(text):
        if text not in choices:
            raise ConfigError(f"{key}: {text!r} is not one of {', '.join(choices)}")
        return text

    return parse


_PARSERS = {
    "check": _checks,
    "checks": _checks,
    "p": _primes,
    "ell": lambda t: _int_list("ell", t),
    "d": lambda t: _int_list("d", t),
    "j": lambda t: _int("j", t),
    "size": lambda t: _int("size", t),
    "sizes_e": lambda t: _int_list("sizes_e", t),
    "sizes_f": lambda t: _int_list("sizes_f", t),
    "trials": lambda t: _int("trials", t),
    "seed": lambda t: _int("seed", t),
    "family_e": _choice("family_e", FAMILIES),
    "family_f": _choice("family_f", FAMILIES),
    "workers": lambda t: _int("workers", t),
    "format": _choice("format", FORMATS),
    "out": str,
}


def parse_pairs(text):
    """Split config text into (key, value) pairs; '#' starts a comment."""
    pairs = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        for token in line.split():
            if "=" not in token:
                raise ConfigError(f"malformed token {token!r}, expected key=value")
            key, value = token.split("=", 1)
            pairs.append((key.strip(), value.strip()))
    return pairs


def parse_config(path=None, tokens=(), overrides=None):
    """
    Build a validated Config.

    Args:
        path: Optional config file in the flat key=value format
        tokens: Inline "key=value" strings, applied after the file
        overrides: Mapping of key -> raw value from CLI flags, applied last;
            None values are ignored

    Raises:
        ConfigError: Unknown keys, malformed values, or a randomized check
            without a seed
    """
    pairs = []
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file {path} does not exist")
        pairs.extend(parse_pairs(path.read_text(encoding="utf-8")))
    pairs.extend(parse_pairs(" ".join(tokens)))
    for key, value in (overrides or {}).items():
        if value is not None:
            pairs.append((key, str(value)))

    values = {}
    for key, raw in pairs:
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r}")
        field_name = "checks" if key == "check" else key
        values[field_name] = _PARSERS[key](raw)

    config = Config(**values)
    validate(config)
    logger.debug("parsed config %s", config)
    return config


def validate(config):
    """Cross-field checks; raises ConfigError."""
    for ell in config.ell:
        if not 1 <= ell <= MAX_ELL:
            raise ConfigError(f"ell: {ell} outside [1, {MAX_ELL}]")
    for p in config.p:
        for ell in config.ell:
            if p**ell > MAX_Q:
                raise ConfigError(f"q = {p}^{ell} exceeds the cap {MAX_Q}")
    if any(d < 1 for d in config.d):
        raise ConfigError("d: dimensions must be positive")
    if config.trials is not None and config.trials < 0:
        raise ConfigError("trials: must be non-negative")
    if config.workers < 0:
        raise ConfigError("workers: must be non-negative")
    if any(s < 0 for s in config.sizes_e + config.sizes_f):
        raise ConfigError("sizes: must be non-negative")
    if config.size is not None and config.size < 0:
        raise ConfigError("size: must be non-negative")
    if config.randomized and config.seed is None:
        raise ConfigError("seed: randomized checks require an explicit seed")


def with_checks(config, *checks):
    return replace(config, checks=tuple(checks))
