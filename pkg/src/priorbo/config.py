"""Experiment config files: INI sections of ``key = value`` pairs.

Layout::

    [experiment]
    benchmark = branin
    strategy = pibo
    repetitions = 20
    master_seed = 1234
    output_dir = results/branin

    [optimizer]
    m_init = 3
    n_iterations = 50
    beta = 10.0
    surrogate = gp
    acquisition = ei

    [prior]
    quality = strong

Explicit beliefs replace the quality line with one ``[prior.<dim>]`` section
per dimension (``kind``, ``mu``, ``sigma`` or ``sigma_pct``; working scale).
Every value can be overridden on the command line with ``section.key=value``
tokens; the dotted path splits on the last dot.
"""

from __future__ import annotations

import configparser
from pathlib import Path

from .benchmarks import get_benchmark
from .errors import ConfigError
from .experiments import BeliefSpec, ExperimentConfig


def _to_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {raw!r}")


# (config key, ExperimentConfig field, parser)
_EXPERIMENT_KEYS = {
    "benchmark": ("benchmark", str),
    "strategy": ("strategy", str),
    "repetitions": ("repetitions", int),
    "master_seed": ("master_seed", int),
    "output_dir": ("output_dir", str),
    "label": ("label", str),
    "record_timing": ("record_timing", _to_bool),
    "workers": ("workers", int),
}
_OPTIMIZER_KEYS = {
    "m_init": ("m_init", int),
    "n_iterations": ("n_iter", int),
    "beta": ("beta", float),
    "surrogate": ("surrogate", str),
    "acquisition": ("acquisition", str),
    "init_mode": ("init_mode", str),
    "ucb_kappa": ("ucb_kappa", float),
    "ts_candidate_count": ("ts_candidate_count", int),
}
_BELIEF_KEYS = {"kind": str, "mu": float, "sigma": float, "sigma_pct": float}


def _parse_value(section: str, key: str, raw: str, fields: dict) -> tuple[str, object]:
    if key not in fields:
        raise ConfigError(f"unknown key {key!r} in section [{section}]")
    name, parse = fields[key]
    try:
        return name, parse(raw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from exc


def load_config(path: str | Path, overrides: list[str] | None = None) -> ExperimentConfig:
    """Read a config file, apply dotted overrides, and validate."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(path.read_text())
    except (configparser.Error, OSError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    for token in overrides or []:
        if "=" not in token:
            raise ConfigError(f"override {token!r} is not of the form section.key=value")
        dotted, value = token.split("=", 1)
        if "." not in dotted:
            raise ConfigError(f"override key {dotted!r} needs a section prefix")
        section, key = dotted.rsplit(".", 1)
        section, key, value = section.strip(), key.strip(), value.strip()
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, key, value)
    return _build(parser)


def _build(parser: configparser.ConfigParser) -> ExperimentConfig:
    kwargs: dict[str, object] = {}
    belief_sections: dict[str, dict[str, object]] = {}
    prior_quality = None
    for section in parser.sections():
        items = dict(parser.items(section))
        if section == "experiment":
            for key, raw in items.items():
                name, value = _parse_value(section, raw=raw, key=key, fields=_EXPERIMENT_KEYS)
                kwargs[name] = value
        elif section == "optimizer":
            for key, raw in items.items():
                name, value = _parse_value(section, raw=raw, key=key, fields=_OPTIMIZER_KEYS)
                kwargs[name] = value
        elif section == "prior":
            for key, raw in items.items():
                if key != "quality":
                    raise ConfigError(f"unknown key {key!r} in section [prior]")
                prior_quality = raw.strip()
        elif section.startswith("prior."):
            dim = section[len("prior.") :]
            spec: dict[str, object] = {}
            for key, raw in items.items():
                if key not in _BELIEF_KEYS:
                    raise ConfigError(f"unknown key {key!r} in section [{section}]")
                parse = _BELIEF_KEYS[key]
                try:
                    spec[key] = parse(raw)
                except ValueError as exc:
                    raise ConfigError(f"[{section}] {key} = {raw!r}: {exc}") from exc
            belief_sections[dim] = spec
        else:
            raise ConfigError(f"unknown section [{section}]")
    if "benchmark" not in kwargs:
        raise ConfigError("the [experiment] section needs a benchmark")
    if "strategy" not in kwargs:
        raise ConfigError("the [experiment] section needs a strategy")
    if prior_quality is not None and belief_sections:
        raise ConfigError("give either a prior quality or explicit [prior.*] sections")
    if belief_sections:
        bench = get_benchmark(str(kwargs["benchmark"]))
        names = bench.space.names
        missing = [n for n in names if n not in belief_sections]
        extra = [n for n in belief_sections if n not in names]
        if missing or extra:
            raise ConfigError(
                f"prior sections must cover the benchmark dimensions exactly; "
                f"missing {missing}, unknown {extra}"
            )
        kwargs["beliefs"] = tuple(
            BeliefSpec(
                kind=str(belief_sections[n].get("kind", "gaussian")),
                mu=belief_sections[n].get("mu"),
                sigma=belief_sections[n].get("sigma"),
                sigma_pct=belief_sections[n].get("sigma_pct"),
            )
            for n in names
        )
    if prior_quality is not None:
        kwargs["prior_quality"] = prior_quality
    try:
        return ExperimentConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
