"""INI configuration files.

Every command-line flag has a key in ``[run]``; each parameter block has its
own section whose keys are the field names of the matching dataclass::

    [run]
    input = lesmis.txt
    output = lesmis.svg
    format = both
    mode = adamotif
    seed = 42
    canvas = 1600x1200
    label_threshold = 5
    dump = partition, clusters

    [community]
    resolution = 1.0

    [motif]
    base_area = auto
    alpha = auto

Values given on the command line take precedence over the file.
"""

from __future__ import annotations

import configparser
import dataclasses
from typing import Any

from .errors import DomainError
from .pipeline import DUMPS, PipelineConfig

BLOCKS = {
    "embedding": "embedding",
    "clustering": "clustering",
    "alignment": "alignment",
    "layout": "layout",
    "motif": "motif",
    "assembly": "assembly",
    "bundling": "bundling",
}

RUN_KEYS = {
    "input": str,
    "input_format": str,
    "output": str,
    "format": str,
    "mode": str,
    "seed": int,
    "report": str,
    "workers": int,
    "label_threshold": int,
    "canvas": "canvas",
    "dump": "dump",
    "dump_dir": str,
}


def parse_canvas(text: str) -> tuple[float, float]:
    try:
        w, h = text.lower().split("x")
        canvas = (float(w), float(h))
    except ValueError:
        raise DomainError(f"canvas must look like WIDTHxHEIGHT, got {text!r}") from None
    if min(canvas) <= 0:
        raise DomainError("canvas dimensions must be positive")
    return canvas


def parse_dumps(text: str) -> frozenset[str]:
    kinds = frozenset(k.strip() for k in text.split(",") if k.strip())
    unknown = kinds - set(DUMPS)
    if unknown:
        raise DomainError(f"unknown dump kinds {sorted(unknown)}; choose from {DUMPS}")
    return kinds


def _coerce(text: str, default: Any, name: str):
    text = text.strip()
    try:
        if isinstance(default, bool):
            return text.lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        if isinstance(default, tuple):
            items = [x.strip() for x in text.split(",") if x.strip()]
            if default and isinstance(default[0], (int, float)):
                kind = type(default[0])
                return tuple(kind(x) for x in items)
            return tuple(items)
    except ValueError:
        raise DomainError(f"bad value for {name}: {text!r}") from None
    # optional or mixed number/keyword fields
    if text.lower() == "none":
        return None
    try:
        return float(text)
    except ValueError:
        return text


def _block(cls_instance, section, prefix: str):
    fields = {f.name: f for f in dataclasses.fields(cls_instance)}
    updates = {}
    for key, value in section.items():
        if key not in fields:
            raise DomainError(f"unknown config key {prefix}.{key}")
        updates[key] = _coerce(value, getattr(cls_instance, key), f"{prefix}.{key}")
    return dataclasses.replace(cls_instance, **updates)


def read_config(path: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keep key case (e.g. bundling.K)
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    return parser


def build_config(parser: configparser.ConfigParser | None = None, overrides: dict | None = None) -> PipelineConfig:
    """Merge an INI file with command-line overrides (``None`` values are
    treated as absent) into a validated ``PipelineConfig``."""
    cfg = PipelineConfig()
    run: dict[str, Any] = {}
    if parser is not None:
        known = set(BLOCKS) | {"run", "community"}
        for name in parser.sections():
            if name not in known:
                raise DomainError(f"unknown config section [{name}]")
        if parser.has_section("run"):
            for key, value in parser.items("run"):
                if key not in RUN_KEYS:
                    raise DomainError(f"unknown config key run.{key}")
                run[key] = value
        if parser.has_section("community"):
            for key, value in parser.items("community"):
                if key != "resolution":
                    raise DomainError(f"unknown config key community.{key}")
                run["resolution"] = value
        blocks = {}
        for section, attr in BLOCKS.items():
            if parser.has_section(section):
                blocks[attr] = _block(getattr(cfg, attr), dict(parser.items(section)), section)
        cfg = dataclasses.replace(cfg, **blocks)

    for key, value in (overrides or {}).items():
        if value is not None:
            run[key] = value

    kwargs: dict[str, Any] = {}
    for key, value in run.items():
        if isinstance(value, str):
            kind = RUN_KEYS.get(key, float if key == "resolution" else str)
            if kind == "canvas":
                value = parse_canvas(value)
            elif kind == "dump":
                value = parse_dumps(value)
            else:
                try:
                    value = kind(value)
                except ValueError:
                    raise DomainError(f"bad value for run.{key}: {value!r}") from None
        kwargs[key] = value

    if "canvas" in kwargs:
        cfg = dataclasses.replace(cfg, assembly=dataclasses.replace(cfg.assembly, canvas=tuple(kwargs.pop("canvas"))))
    if "format" in kwargs:
        kwargs["output_format"] = kwargs.pop("format")
    if "dump" in kwargs:
        kwargs["dumps"] = frozenset(kwargs.pop("dump"))
    return dataclasses.replace(cfg, **kwargs)
