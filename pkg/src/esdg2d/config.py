"""Plain-text key=value run configuration.

Grammar per line: ``key = value`` (or ``key=value``), ``#`` comments, blank
lines.  Keys may carry a dotted section prefix (``run.N``); the prefix is
ignored.  Unknown keys and malformed values are reported with the offending
line number.
"""

from __future__ import annotations

from dataclasses import fields

from .errors import ConfigError
from .solver import RunConfig

__all__ = ["parse_config_text", "parse_config_file", "config_from_dict", "config_to_text"]


def _parse_domain(text: str):
    parts = [p for p in text.replace("(", "").replace(")", "").split(",") if p.strip()]
    if len(parts) != 4:
        raise ValueError("domain needs four comma-separated numbers: x0,x1,y0,y1")
    return tuple(float(p) for p in parts)


_PARSERS = {
    "N": int,
    "Ngeo": int,
    "option": int,
    "element_kind": str,
    "nx": int,
    "ny": int,
    "domain": _parse_domain,
    "alpha": float,
    "cfl": float,
    "T": float,
    "flux": str,
    "gamma": float,
    "out_dir": str,
    "threads": int,
    "seed": int,
}


def parse_config_text(text: str) -> dict:
    """Parse config text into a {key: parsed value} dict with line-numbered errors."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, _, value = line.partition("=")
        key = key.strip().split(".")[-1]
        value = value.strip()
        if key not in _PARSERS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        try:
            out[key] = _PARSERS[key](value)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}", lineno) from None
    return out


def parse_config_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def config_from_dict(values: dict) -> RunConfig:
    try:
        return RunConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def config_to_text(config: RunConfig) -> str:
    lines = []
    for f in fields(config):
        v = getattr(config, f.name)
        if f.name == "domain":
            v = ",".join(f"{x:g}" for x in v)
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"
