"""Sectioned ``key = value`` run configuration with strict key checking."""
from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from .errors import ConfigurationError


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt(conv):
    def parse(text: str):
        t = text.strip()
        return None if t.lower() in ("", "none") else conv(t)
    return parse


def _list(conv):
    def parse(text: str):
        t = text.strip()
        if t.lower() in ("", "none"):
            return None
        return [conv(v) for v in t.replace(";", ",").split(",") if v.strip()]
    return parse


def _int(text: str) -> int:
    v = float(text)
    if v != int(v):
        raise ValueError(f"not an integer: {text!r}")
    return int(v)


# section -> key -> (parser, default text)
SCHEMA: Dict[str, Dict[str, Tuple[Callable[[str], Any], str]]] = {
    "grid": {
        "n_points": (_int, "512"),
        "length": (float, "9.3"),
    },
    "cycle": {
        "mode": (str, "heat_pump"),
        "K": (float, "5"),
        "T": (float, "0.1"),
        "M": (_opt(_int), "2500"),
        "Omega": (_opt(float), "none"),
        "dt": (float, "1e-5"),
        "n_cycles": (_int, "10"),
        "renorm_mode": (str, "bare"),
        "ladder_renorm": (_bool, "false"),
        "unit": (str, "per_f"),
        "n_max": (_int, "32"),
    },
    "sweep": {
        "K_values": (_list(float), "2, 5, 10"),
        "T_values": (_list(float), "0.01, 0.02, 0.05, 0.1, 0.2, 0.5"),
        "M_values": (_list(_int), "10, 20, 50, 100, 200, 500"),
        "OmegaT_values": (_list(float), "none"),
        "cycles_per_point": (_int, "20"),
    },
    "predict": {
        "level": (_int, "1"),
        "K": (float, "5"),
        "T": (float, "0.05"),
        "ramp": (str, "up"),
        "M_values": (_list(_int), "10, 100, 1000"),
        "simulate": (_bool, "false"),
    },
    "output": {
        "out_dir": (str, "."),
        "populations": (_bool, "true"),
        "densities": (_bool, "false"),
        "population_stride": (_int, "100"),
        "density_stride": (_int, "100"),
        "compact_density": (_bool, "false"),
    },
    "run": {
        "threads": (_int, "1"),
        "reference_cutoff": (_opt(float), "none"),
    },
}

_KEY_LOOKUP = {(sec, key.lower()): key for sec, keys in SCHEMA.items() for key in keys}


@dataclass
class RunConfig:
    """Parsed configuration: ``values[section][key]`` plus the raw text of each entry."""

    values: Dict[str, Dict[str, Any]] = field(default_factory=dict)
    text: Dict[str, Dict[str, str]] = field(default_factory=dict)
    explicit: set = field(default_factory=set)

    @classmethod
    def defaults(cls) -> "RunConfig":
        cfg = cls()
        for sec, keys in SCHEMA.items():
            for key, (_, default) in keys.items():
                cfg._set(sec, key, default, explicit=False)
        return cfg

    def _set(self, section: str, key: str, raw: str, explicit: bool = True) -> None:
        canon = _KEY_LOOKUP.get((section.lower(), key.lower()))
        if canon is None:
            raise ConfigurationError(f"unknown configuration key {section}.{key}",
                                     key=f"{section}.{key}")
        sec = section.lower()
        conv = SCHEMA[sec][canon][0]
        try:
            value = conv(raw)
        except ValueError as exc:
            raise ConfigurationError(f"bad value for {sec}.{canon}: {exc}",
                                     key=f"{sec}.{canon}") from None
        self.values.setdefault(sec, {})[canon] = value
        self.text.setdefault(sec, {})[canon] = raw.strip()
        if explicit:
            self.explicit.add((sec, canon))

    def set(self, assignment: str) -> None:
        """Apply one ``section.key=value`` override.

        A bare ``key`` is accepted when one section owns it; keys shared with
        ``[cycle]`` resolve there.
        """
        if "=" not in assignment:
            raise ConfigurationError(f"override must look like section.key=value: {assignment!r}",
                                     key=assignment)
        lhs, raw = assignment.split("=", 1)
        lhs = lhs.strip()
        if "." in lhs:
            sec, key = lhs.split(".", 1)
        else:
            owners = [s for (s, k) in _KEY_LOOKUP if k == lhs.lower()]
            if len(owners) > 1 and "cycle" in owners:
                owners = ["cycle"]
            if len(owners) != 1:
                raise ConfigurationError(
                    f"key {lhs!r} is {'ambiguous' if owners else 'unknown'}; use section.key",
                    key=lhs)
            sec, key = owners[0], lhs
        self._set(sec, key, raw)

    def load_text(self, text: str) -> None:
        parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        parser.optionxform = str
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigurationError(f"cannot parse configuration: {exc}") from None
        for sec in parser.sections():
            if sec.lower() not in SCHEMA:
                raise ConfigurationError(f"unknown configuration section [{sec}]", key=sec)
            for key, raw in parser.items(sec):
                self._set(sec, key, raw)

    def get(self, section: str, key: str):
        return self.values[section][key]

    def was_set(self, section: str, key: str) -> bool:
        return (section, key) in self.explicit

    def dump(self) -> str:
        buf = io.StringIO()
        for sec, keys in SCHEMA.items():
            buf.write(f"[{sec}]\n")
            for key in keys:
                buf.write(f"{key} = {self.text[sec][key]}\n")
            buf.write("\n")
        return buf.getvalue()


def load_config(path: Optional[str] = None, overrides: List[str] = ()) -> RunConfig:
    cfg = RunConfig.defaults()
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                cfg.load_text(fh.read())
        except OSError as exc:
            raise ConfigurationError(f"cannot read config file {path}: {exc.strerror}",
                                     key="--config") from None
    for item in overrides:
        cfg.set(item)
    return cfg
