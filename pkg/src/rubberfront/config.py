"""Plain-text run configuration.

An INI file with fixed section names::

    [model]    a0, alpha, beta, gamma, s0, T
    [drive]    times, values        (or: constant)
    [initial]  z, u                 (or: constant; z defaults to a uniform grid on [0, s0])
    [run]      mode, N, dt, stop_time, window, picard_tol, picard_max_iters, epsilon
    [output]   dir
    [sweep]    <any scalar from [model] or [run]> = comma-separated values

Every diagnostic is prefixed with ``file:line`` of the offending entry.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .coupler import RunConfig
from .errors import ParameterError
from .model import BoundaryDrive, InitialProfile, ModelParams

MODEL_KEYS = ("a0", "alpha", "beta", "gamma", "s0", "T")
RUN_KEYS = ("mode", "N", "dt", "stop_time", "window", "picard_tol", "picard_max_iters", "epsilon")
INT_KEYS = {"N", "picard_max_iters"}
SECTIONS = ("model", "drive", "initial", "run", "output", "sweep")
SWEEPABLE = tuple(k for k in MODEL_KEYS + RUN_KEYS if k != "mode")


class ConfigError(ParameterError):
    """Invalid configuration, with a ``file:line`` prefix when known."""


@dataclass(frozen=True)
class Config:
    params: ModelParams
    drive: BoundaryDrive
    initial: InitialProfile
    run: RunConfig
    output_dir: str | None = None
    sweep: tuple[tuple[str, tuple[float, ...]], ...] = ()

    def with_values(self, **values) -> "Config":
        """Copy with scalar model/run parameters replaced."""
        model = {k: v for k, v in values.items() if k in MODEL_KEYS}
        run = {k: (int(v) if k in INT_KEYS else v) for k, v in values.items() if k in RUN_KEYS}
        unknown = set(values) - set(model) - set(run)
        if unknown:
            raise ConfigError(f"unknown parameter(s): {', '.join(sorted(unknown))}")
        return replace(self, params=replace(self.params, **model), run=replace(self.run, **run), sweep=())


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


def _fmt_list(values) -> str:
    return ", ".join(_fmt(v) for v in values)


def to_text(cfg: Config) -> str:
    """Canonical serialization; ``parse_text(to_text(c)) == c``."""
    p = cfg.params
    lines = ["[model]"]
    lines += [f"{k} = {_fmt(getattr(p, k))}" for k in MODEL_KEYS]
    lines += ["", "[drive]", f"times = {_fmt_list(cfg.drive.times)}", f"values = {_fmt_list(cfg.drive.values)}"]
    lines += ["", "[initial]", f"z = {_fmt_list(cfg.initial.z)}", f"u = {_fmt_list(cfg.initial.values)}"]
    lines += ["", "[run]", f"mode = {cfg.run.mode}"]
    for k in RUN_KEYS[1:]:
        v = getattr(cfg.run, k)
        if v is not None:
            lines.append(f"{k} = {_fmt(v)}")
    if cfg.output_dir is not None:
        lines += ["", "[output]", f"dir = {cfg.output_dir}"]
    if cfg.sweep:
        lines += ["", "[sweep]"]
        lines += [f"{name} = {_fmt_list(vals)}" for name, vals in cfg.sweep]
    return "\n".join(lines) + "\n"


def _line_index(text: str) -> dict[tuple[str, str | None], int]:
    """Map (section, key) and (section, None) to 1-based line numbers."""
    index: dict[tuple[str, str | None], int] = {}
    section = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        m = re.match(r"^\[([^\]]+)\]$", line)
        if m:
            section = m.group(1).strip()
            index.setdefault((section, None), no)
            continue
        m = re.match(r"^([^=:]+?)\s*[=:]", line)
        if m and section is not None:
            index.setdefault((section, m.group(1).strip()), no)
    return index


class _Reader:
    def __init__(self, text: str, source: str):
        self.source = source
        self.lines = _line_index(text)
        self.cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        self.cp.optionxform = str
        try:
            self.cp.read_string(text, source=source)
        except configparser.Error as exc:
            lineno = getattr(exc, "lineno", None)
            where = f"{source}:{lineno}" if lineno else source
            raise ConfigError(f"{where}: {exc.message.splitlines()[0]}") from exc
        for section in self.cp.sections():
            if section not in SECTIONS:
                self.fail(section, None, f"unknown section [{section}]")

    def where(self, section: str, key: str | None) -> str:
        no = self.lines.get((section, key)) or self.lines.get((section, None))
        return f"{self.source}:{no}" if no else self.source

    def fail(self, section: str, key: str | None, msg: str):
        raise ConfigError(f"{self.where(section, key)}: [{section}] {msg}")

    def has(self, section: str, key: str) -> bool:
        return self.cp.has_option(section, key)

    def raw(self, section: str, key: str) -> str:
        if not self.has(section, key):
            self.fail(section, None, f"missing key '{key}'")
        return self.cp.get(section, key).strip()

    def number(self, section: str, key: str, integer: bool = False):
        text = self.raw(section, key)
        try:
            if integer:
                return int(text)
            return float(text)
        except ValueError:
            kind = "an integer" if integer else "a number"
            self.fail(section, key, f"{key} = {text!r} is not {kind}")

    def numbers(self, section: str, key: str) -> np.ndarray:
        text = self.raw(section, key)
        try:
            return np.array([float(x) for x in text.replace(",", " ").split()])
        except ValueError:
            self.fail(section, key, f"{key} = {text!r} is not a list of numbers")

    def check_keys(self, section: str, allowed) -> None:
        if not self.cp.has_section(section):
            return
        for key in self.cp.options(section):
            if key not in allowed:
                self.fail(section, key, f"unknown key '{key}'")


_CONSTRAINT_KEY = re.compile(r"^(\w+) = ")


def parse_text(text: str, source: str = "<config>") -> Config:
    r = _Reader(text, source)
    for section in ("model", "drive", "initial", "run"):
        if not r.cp.has_section(section):
            raise ConfigError(f"{source}: missing section [{section}]")
    r.check_keys("model", MODEL_KEYS)
    r.check_keys("drive", ("times", "values", "constant"))
    r.check_keys("initial", ("z", "u", "constant"))
    r.check_keys("run", RUN_KEYS)
    r.check_keys("output", ("dir",))
    r.check_keys("sweep", SWEEPABLE)

    values = {k: r.number("model", k) for k in MODEL_KEYS}
    try:
        params = ModelParams(**values)
    except ParameterError as exc:
        m = _CONSTRAINT_KEY.match(str(exc))
        r.fail("model", m.group(1) if m else None, str(exc))

    try:
        if r.has("drive", "constant"):
            drive = BoundaryDrive.constant(r.number("drive", "constant"), params.T)
        else:
            drive = BoundaryDrive(r.numbers("drive", "times"), r.numbers("drive", "values"))
    except ParameterError as exc:
        r.fail("drive", "values" if r.has("drive", "values") else "constant", str(exc))

    try:
        if r.has("initial", "constant"):
            initial = InitialProfile.constant(r.number("initial", "constant"), params.s0)
        else:
            u = r.numbers("initial", "u")
            z = r.numbers("initial", "z") if r.has("initial", "z") else np.linspace(0.0, params.s0, u.size)
            initial = InitialProfile(z, u)
    except ParameterError as exc:
        r.fail("initial", "u" if r.has("initial", "u") else "constant", str(exc))

    run_kwargs = {}
    for k in RUN_KEYS:
        if not r.has("run", k):
            continue
        run_kwargs[k] = r.raw("run", k) if k == "mode" else r.number("run", k, integer=k in INT_KEYS)
    try:
        run = RunConfig(**run_kwargs)
    except ParameterError as exc:
        key = next((k for k in run_kwargs if k in str(exc)), None)
        r.fail("run", key, str(exc))

    output_dir = r.raw("output", "dir") if r.has("output", "dir") else None

    sweep = []
    if r.cp.has_section("sweep"):
        for key in r.cp.options("sweep"):
            vals = r.numbers("sweep", key)
            if vals.size == 0:
                r.fail("sweep", key, f"axis '{key}' is empty")
            if key in INT_KEYS:
                vals = vals.astype(int)
            sweep.append((key, tuple(v.item() for v in vals)))
    cfg = Config(params, drive, initial, run, output_dir, tuple(sweep))
    for key, vals in cfg.sweep:
        for v in vals:
            try:
                cfg.with_values(**{key: v})
            except ParameterError as exc:
                r.fail("sweep", key, f"{key} = {v!r}: {exc}")
    return cfg


def load(path) -> Config:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    return parse_text(text, str(path))
