"""Experiment configuration: INI-style ``key = value`` files with one section per subcommand.

Keys in ``[scenario]`` apply to every subcommand; a subcommand section overrides
them. Unknown keys are rejected so typos surface as errors rather than silently
falling back to defaults.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass

from .errors import DsminError

COMMANDS = ("weights", "sweep-spread", "select", "simulate", "moments-dump")

# key -> (type, default); types: int, float, bool, str, floats, ints
_SCENARIO = {
    "m_antennas": ("int", 64),
    "spacing": ("float", 0.45),
    "theta_l_deg": ("float", 85.0),
    "theta_r_deg": ("float", 95.0),
    "f_d": ("float", 5000.0),
    "q_count": ("int", 64),
    "seed": ("int", 0),
    "quad_nodes": ("int", 32),
    "workers": ("int", 1),
}

_COMMAND_KEYS = {
    "weights": {
        "epsilon": ("float", 0.5),
        "pattern_step_deg": ("float", 0.1),
        "single_branch": ("int", -1),
        "max_iters": ("int", 200),
        "tol": ("float", 1e-8),
    },
    "sweep-spread": {
        "spreads_deg": ("floats", [5.0, 10.0, 15.0, 20.0, 25.0, 30.0]),
        "center_deg": ("float", 90.0),
        "epsilons": ("floats", [0.5, 0.9]),
        "max_iters": ("int", 200),
        "tol": ("float", 1e-8),
    },
    "select": {
        "budgets": ("ints", [4, 6, 8, 12, 16]),
        "epsilon": ("optfloat", None),
        "zero_tol": ("float", 1e-6),
        "n_element_baseline": ("str", "contiguous"),
    },
    "simulate": {
        "weights": ("str", "aw-mini-ds"),
        "weight_values": ("str", ""),
        "epsilon": ("float", 0.5),
        "n_paths": ("int", 512),
        "n_realizations": ("int", 10000),
        "block_len": ("int", 1024),
        "oversample": ("float", 1.1),
        "t_s": ("optfloat", None),
        "random_angles": ("bool", False),
    },
    "moments-dump": {},
}

# selection runs default to their own geometry
_COMMAND_SCENARIO_DEFAULTS = {
    "select": {"m_antennas": 16, "theta_l_deg": 30.0, "theta_r_deg": 60.0},
}


class ConfigError(DsminError, ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass(frozen=True)
class Settings:
    """Resolved, typed settings for one subcommand."""

    command: str
    values: dict

    def __getattr__(self, key):
        try:
            return self.values[key]
        except KeyError:
            raise AttributeError(key) from None

    def header_items(self):
        return [("command", self.command)] + sorted(self.values.items())


def _parse(kind, raw, field):
    raw = raw.strip()
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "optfloat":
            return None if raw.lower() in ("", "none") else float(raw)
        if kind == "bool":
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "floats":
            return [float(x) for x in raw.replace(",", " ").split()]
        if kind == "ints":
            return [int(x) for x in raw.replace(",", " ").split()]
        return raw
    except ValueError:
        raise ConfigError(f"{field}: cannot parse {raw!r} as {kind}") from None


def load_settings(command: str, path=None, overrides=None) -> Settings:
    """Read ``path`` (optional) and return validated settings for ``command``.

    Parameters
    ----------
    command : str
        One of ``COMMANDS``.
    path : str or Path, optional
        Configuration file. Built-in defaults are used when omitted.
    overrides : dict, optional
        Values that take precedence over the file (from command-line flags).
    """
    if command not in COMMANDS:
        raise ConfigError(f"command: unknown subcommand {command!r}")
    schema = dict(_SCENARIO)
    schema.update(_COMMAND_KEYS[command])
    values = {k: v for k, (_, v) in schema.items()}
    values.update(_COMMAND_SCENARIO_DEFAULTS.get(command, {}))

    if path is not None:
        cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
        try:
            with open(path, encoding="utf-8") as fh:
                cp.read_file(fh)
        except configparser.Error as exc:
            raise ConfigError(f"config: {exc}") from None
        for section in cp.sections():
            if section != "scenario" and section not in COMMANDS:
                raise ConfigError(f"[{section}]: unknown section")
        for section in ("scenario", command):
            if not cp.has_section(section):
                continue
            allowed = _SCENARIO if section == "scenario" else schema
            for key, raw in cp.items(section):
                if key not in allowed:
                    raise ConfigError(f"{section}.{key}: unknown key")
                values[key] = _parse(allowed[key][0], raw, f"{section}.{key}")
    for key, val in (overrides or {}).items():
        if val is not None:
            values[key] = val
    _validate(command, values)
    return Settings(command, values)


def _validate(command, v):
    def need(cond, field, msg):
        if not cond:
            raise ConfigError(f"{field}: {msg}")

    need(v["m_antennas"] >= 1, "m_antennas", "must be >= 1")
    need(v["spacing"] > 0, "spacing", "must be positive")
    need(0 < v["theta_l_deg"] < v["theta_r_deg"] < 180, "theta_l_deg/theta_r_deg",
         "need 0 < theta_l_deg < theta_r_deg < 180")
    need(v["f_d"] > 0, "f_d", "must be positive")
    need(v["q_count"] >= 1, "q_count", "must be >= 1")
    need(v["quad_nodes"] >= 2, "quad_nodes", "must be >= 2")
    need(v["workers"] >= 1, "workers", "must be >= 1")
    if "epsilon" in v and v["epsilon"] is not None:
        need(0 < v["epsilon"] < 1, "epsilon", "must lie in (0, 1)")
    if command == "weights":
        need(v["pattern_step_deg"] > 0, "pattern_step_deg", "must be positive")
        need(v["single_branch"] < v["q_count"], "single_branch", "must be < q_count")
    if command == "sweep-spread":
        need(len(v["spreads_deg"]) > 0, "spreads_deg", "must be nonempty")
        for s in v["spreads_deg"]:
            need(0 < s < 2 * min(v["center_deg"], 180 - v["center_deg"]), "spreads_deg",
                 f"spread {s} does not fit around center {v['center_deg']}")
        need(len(v["epsilons"]) > 0, "epsilons", "must be nonempty")
        for e in v["epsilons"]:
            need(0 < e < 1, "epsilons", "every value must lie in (0, 1)")
    if command == "select":
        need(len(v["budgets"]) > 0, "budgets", "must be nonempty")
        for n in v["budgets"]:
            need(1 <= n <= v["m_antennas"], "budgets", f"budget {n} outside [1, m_antennas]")
        need(v["zero_tol"] > 0, "zero_tol", "must be positive")
        need(v["n_element_baseline"] in ("contiguous", "spread"), "n_element_baseline",
             "must be 'contiguous' or 'spread'")
    if command == "simulate":
        need(v["weights"] in ("aw-mini-ds", "proposed", "uniform", "values"), "weights",
             "must be aw-mini-ds, proposed, uniform or values")
        need(v["n_paths"] >= 1, "n_paths", "must be >= 1")
        need(v["n_realizations"] >= 1, "n_realizations", "must be >= 1")
        need(v["block_len"] >= 2, "block_len", "must be >= 2")
        need(v["oversample"] >= 1, "oversample", "must be >= 1")
        if v["t_s"] is not None:
            need(v["t_s"] > 0, "t_s", "must be positive")
