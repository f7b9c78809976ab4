"""Declarative experiment configuration.

The on-disk format is a flat sectioned text file: ``[section]``
headers, ``key = value`` lines, ``#`` comments.  Parsing is strict:
unknown sections or keys are errors, every problem is reported with its
line number, and a parsed config serializes back to a canonical text
that parses to an identical structure.

Sections and keys::

    [model]     kind (1d|2d);
                1d: L (int or list), a, omega, l_c (ints or "max", list ok)
                2d: lx, ly, delta0, delta
    [sweep]     units (native|JL_over_delta|J_over_Jc);
                j_values (list)  or  j_min, j_max, j_points, j_scale (log|linear)
    [ensemble]  realizations, base_seed, workers
    [measures]  list (measure tokens, e.g. gamma, pn:central, c1, sn2, shalf),
                band_n_up (optional), band_rule (count|window),
                s_bin_width, clambda_bin_width
    [output]    directory, formats (csv, json)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import MAX_QUBITS
from .ensemble import SweepPlan, UNITS, measure_from_token
from .errors import ConfigError
from .hamiltonian import ModelSpec1D, ModelSpec2D
from .basis import torus

_SECTIONS = {
    "model": {"kind", "L", "a", "omega", "l_c", "lx", "ly", "delta0", "delta"},
    "sweep": {"units", "j_values", "j_min", "j_max", "j_points", "j_scale"},
    "ensemble": {"realizations", "base_seed", "workers"},
    "measures": {"list", "band_n_up", "band_rule", "unfold_window", "s_bin_width", "clambda_bin_width"},
    "output": {"directory", "formats"},
}
_1D_KEYS = {"L", "a", "omega", "l_c"}
_2D_KEYS = {"lx", "ly", "delta0", "delta"}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description; see the module docstring."""

    kind: str
    # 1d
    L_values: tuple[int, ...] = (12,)
    a: float = 1.0
    omega: float = 100.0
    l_c_values: tuple[object, ...] = ("max",)  # ints or "max" (= L - 1)
    # 2d
    lx: int = 3
    ly: int = 3
    delta0: float = 1.0
    delta: float = 0.09
    # sweep
    units: str = "native"
    j_values: tuple[float, ...] | None = None
    j_min: float | None = None
    j_max: float | None = None
    j_points: int | None = None
    j_scale: str = "log"
    # ensemble
    realizations: int = 200
    base_seed: int = 1234
    workers: int = 1
    # measures
    measures: tuple[str, ...] = ()
    band_n_up: int | None = None
    band_rule: str = "count"
    unfold_window: int | None = 16
    s_bin_width: float = 0.1
    clambda_bin_width: float = 0.025
    # output
    directory: str = "results"
    formats: tuple[str, ...] = ("csv", "json")

    def grid(self) -> tuple[float, ...]:
        if self.j_values is not None:
            return self.j_values
        if self.j_scale == "log":
            values = np.geomspace(self.j_min, self.j_max, self.j_points)
        else:
            values = np.linspace(self.j_min, self.j_max, self.j_points)
        return tuple(float(v) for v in values)

    def variants(self):
        if self.kind == "2d":
            return (ModelSpec2D(torus(self.lx, self.ly), self.delta0, self.delta, 0.0),)
        specs = []
        for L in self.L_values:
            for lc in self.l_c_values:
                resolved = L - 1 if lc == "max" else int(lc)
                specs.append(ModelSpec1D(L, self.a, self.omega, 0.0, resolved))
        return tuple(specs)

    def plan(self) -> SweepPlan:
        return SweepPlan(
            variants=self.variants(),
            j_grid=self.grid(),
            units=self.units,
            realizations=self.realizations,
            base_seed=self.base_seed,
            measures=tuple(measure_from_token(t) for t in self.measures),
            band_n_up=self.band_n_up,
            band_rule=self.band_rule,
            unfold_window=self.unfold_window,
            s_bin_width=self.s_bin_width,
            clambda_bin_width=self.clambda_bin_width,
            workers=self.workers,
        )


@dataclass
class _Parser:
    problems: list[str] = field(default_factory=list)
    entries: dict[tuple[str, str], tuple[str, int]] = field(default_factory=dict)

    def fail(self, line: int | None, message: str) -> None:
        where = f"line {line}: " if line is not None else ""
        self.problems.append(where + message)

    def read(self, text: str) -> None:
        section = None
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip()
                if section not in _SECTIONS:
                    self.fail(lineno, f"unknown section [{section}]")
                    section = None
                continue
            if "=" not in line:
                self.fail(lineno, f"expected 'key = value', got {line!r}")
                continue
            if section is None:
                self.fail(lineno, "key outside of any known section")
                continue
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _SECTIONS[section]:
                self.fail(lineno, f"unknown key {key!r} in [{section}]")
                continue
            if (section, key) in self.entries:
                self.fail(lineno, f"duplicate key {key!r} in [{section}]")
                continue
            self.entries[(section, key)] = (value, lineno)

    def take(self, section: str, key: str):
        return self.entries.pop((section, key), (None, None))

    def take_typed(self, section, key, convert, typename, default=None):
        value, line = self.take(section, key)
        if value is None:
            return default
        try:
            return convert(value)
        except (ValueError, TypeError):
            self.fail(line, f"{key} must be {typename}, got {value!r}")
            return default


def _to_int(text: str) -> int:
    return int(text, 10)


def _to_float(text: str) -> float:
    return float(text)


def _to_list(text: str) -> list[str]:
    items = [item.strip() for item in text.split(",")]
    if any(not item for item in items):
        raise ValueError("empty list item")
    return items


def parse_config(text: str) -> ExperimentConfig:
    """Parse and fully validate; raises ConfigError listing every problem."""
    p = _Parser()
    p.read(text)

    kind_value, kind_line = p.take("model", "kind")
    kind = (kind_value or "").strip()
    if kind not in ("1d", "2d"):
        p.fail(kind_line, f"model kind must be 1d or 2d, got {kind_value!r}")
        kind = "1d"

    fields: dict = {"kind": kind}
    for key in _1D_KEYS | _2D_KEYS:
        if key in (_2D_KEYS if kind == "1d" else _1D_KEYS):
            _, line = p.take("model", key)
            if line is not None:
                p.fail(line, f"key {key!r} does not apply to the {kind} model")

    if kind == "1d":
        L_items = p.take_typed("model", "L", _to_list, "a list of ints", default=["12"])
        value, line = (L_items, None)
        try:
            fields["L_values"] = tuple(int(item) for item in value)
        except ValueError:
            p.fail(line, f"L must be integers, got {value}")
            fields["L_values"] = (12,)
        fields["a"] = p.take_typed("model", "a", _to_float, "a number", default=1.0)
        fields["omega"] = p.take_typed("model", "omega", _to_float, "a number", default=100.0)
        lc_items = p.take_typed("model", "l_c", _to_list, "a list", default=["max"])
        lcs: list[object] = []
        for item in lc_items:
            if item == "max":
                lcs.append("max")
            else:
                try:
                    lcs.append(int(item))
                except ValueError:
                    p.fail(None, f"l_c entries must be integers or 'max', got {item!r}")
        fields["l_c_values"] = tuple(lcs)
    else:
        fields["lx"] = p.take_typed("model", "lx", _to_int, "an integer", default=3)
        fields["ly"] = p.take_typed("model", "ly", _to_int, "an integer", default=3)
        fields["delta0"] = p.take_typed("model", "delta0", _to_float, "a number", default=1.0)
        fields["delta"] = p.take_typed("model", "delta", _to_float, "a number", default=0.09)

    units_value, units_line = p.take("sweep", "units")
    units = units_value or "native"
    if units not in UNITS:
        p.fail(units_line, f"units must be one of {', '.join(UNITS)}")
        units = "native"
    fields["units"] = units

    jv_value, jv_line = p.take("sweep", "j_values")
    j_min = p.take_typed("sweep", "j_min", _to_float, "a number")
    j_max = p.take_typed("sweep", "j_max", _to_float, "a number")
    j_points = p.take_typed("sweep", "j_points", _to_int, "an integer")
    scale_value, scale_line = p.take("sweep", "j_scale")
    scale = scale_value or "log"
    if scale not in ("log", "linear"):
        p.fail(scale_line, "j_scale must be log or linear")
        scale = "log"
    fields["j_scale"] = scale
    has_range = any(v is not None for v in (j_min, j_max, j_points))
    if jv_value is not None and has_range:
        p.fail(jv_line, "give either j_values or a j_min/j_max/j_points range, not both")
    elif jv_value is not None:
        try:
            fields["j_values"] = tuple(float(item) for item in _to_list(jv_value))
        except ValueError:
            p.fail(jv_line, f"j_values must be numbers, got {jv_value!r}")
    elif has_range:
        if None in (j_min, j_max, j_points):
            p.fail(None, "a coupling range needs all of j_min, j_max, j_points")
        else:
            fields["j_min"], fields["j_max"], fields["j_points"] = j_min, j_max, j_points
            if j_points < 1:
                p.fail(None, "j_points must be >= 1")
            if scale == "log" and (j_min <= 0 or j_max <= 0):
                p.fail(None, "log-spaced grids need positive j_min and j_max")
            if j_max < j_min:
                p.fail(None, "j_max must be >= j_min")
    else:
        p.fail(None, "the [sweep] section needs j_values or j_min/j_max/j_points")

    fields["realizations"] = p.take_typed("ensemble", "realizations", _to_int, "an integer", default=200)
    fields["base_seed"] = p.take_typed("ensemble", "base_seed", _to_int, "an integer", default=1234)
    fields["workers"] = p.take_typed("ensemble", "workers", _to_int, "an integer", default=1)

    measures_value, measures_line = p.take("measures", "list")
    if measures_value is None:
        p.fail(measures_line, "the [measures] section needs a nonempty 'list'")
        fields["measures"] = ()
    else:
        tokens = []
        for token in _to_list(measures_value):
            try:
                measure_from_token(token)
                tokens.append(token)
            except ValueError as exc:
                p.fail(measures_line, str(exc))
        fields["measures"] = tuple(tokens)
    fields["band_n_up"] = p.take_typed("measures", "band_n_up", _to_int, "an integer")
    rule_value, rule_line = p.take("measures", "band_rule")
    rule = rule_value or "count"
    if rule not in ("count", "window"):
        p.fail(rule_line, "band_rule must be count or window")
        rule = "count"
    fields["band_rule"] = rule
    window_value, window_line = p.take("measures", "unfold_window")
    if window_value is None or window_value == "none":
        fields["unfold_window"] = None if window_value == "none" else 16
    else:
        try:
            fields["unfold_window"] = int(window_value)
        except ValueError:
            p.fail(window_line, f"unfold_window must be an integer or 'none', got {window_value!r}")
    fields["s_bin_width"] = p.take_typed("measures", "s_bin_width", _to_float, "a number", default=0.1)
    fields["clambda_bin_width"] = p.take_typed(
        "measures", "clambda_bin_width", _to_float, "a number", default=0.025
    )

    directory_value, _ = p.take("output", "directory")
    fields["directory"] = directory_value or "results"
    formats_value, formats_line = p.take("output", "formats")
    formats = tuple(_to_list(formats_value)) if formats_value else ("csv", "json")
    for fmt in formats:
        if fmt not in ("csv", "json"):
            p.fail(formats_line, f"unknown output format {fmt!r}")
    fields["formats"] = formats

    config = ExperimentConfig(**fields)
    _validate_semantics(config, p)
    if p.problems:
        raise ConfigError(p.problems)
    return config


def _validate_semantics(config: ExperimentConfig, p: _Parser) -> None:
    if config.kind == "1d":
        for L in config.L_values:
            if not 2 <= L <= MAX_QUBITS:
                p.fail(None, f"L={L} outside [2, {MAX_QUBITS}]")
                return
        if config.a <= 0 or config.omega <= 0:
            p.fail(None, "a and omega must be positive")
            return
        max_L = max(config.L_values)
        if config.omega < 2 * config.a * max_L:
            p.fail(None, f"omega={config.omega} must be at least twice a*L={config.a * max_L}")
        for lc in config.l_c_values:
            if lc == "max":
                continue
            for L in config.L_values:
                if not 1 <= lc <= L - 1:
                    p.fail(None, f"l_c={lc} outside [1, L-1] for L={L}")
    else:
        if config.lx < 3 or config.ly < 3:
            p.fail(None, "the torus needs lx, ly >= 3")
            return
        if config.lx * config.ly > MAX_QUBITS:
            p.fail(None, f"lx*ly={config.lx * config.ly} exceeds {MAX_QUBITS} qubits")
            return
        if config.delta < 0 or config.delta0 <= 0:
            p.fail(None, "need delta >= 0 and delta0 > 0")
    if config.units == "JL_over_delta" and config.kind != "2d":
        p.fail(None, "JL_over_delta units apply to the 2d model only")
    if config.units == "J_over_Jc" and config.kind != "1d":
        p.fail(None, "J_over_Jc units apply to the 1d model only")
    if config.realizations < 1:
        p.fail(None, "realizations must be >= 1")
    if config.base_seed < 0:
        p.fail(None, "base_seed must be >= 0")
    if config.workers < 1:
        p.fail(None, "workers must be >= 1")
    if not config.measures:
        p.fail(None, "at least one measure is required")
    min_L = min(config.L_values) if config.kind == "1d" else config.lx * config.ly
    for token in config.measures:
        try:
            measure = measure_from_token(token)
        except ValueError:
            continue
        if measure.kind == "c":
            if config.kind == "2d" and measure.n not in (1, 2):
                p.fail(None, f"torus concurrence distance must be 1 or 2, got {measure.n}")
            if config.kind == "1d" and measure.n > min_L - 1:
                p.fail(None, f"concurrence distance {measure.n} too large for L={min_L}")
        if measure.kind == "sn" and measure.n > min_L - 1:
            p.fail(None, f"block size {measure.n} too large for L={min_L}")
    if config.band_n_up is not None and not 0 <= config.band_n_up <= min_L:
        p.fail(None, f"band_n_up={config.band_n_up} outside [0, {min_L}]")
    if config.s_bin_width <= 0 or config.clambda_bin_width <= 0:
        p.fail(None, "histogram bin widths must be positive")
    if config.unfold_window is not None and config.unfold_window < 1:
        p.fail(None, "unfold_window must be >= 1 or 'none'")


def serialize_config(config: ExperimentConfig) -> str:
    """Canonical text form; parse(serialize(c)) == c."""
    lines = ["[model]", f"kind = {config.kind}"]
    if config.kind == "1d":
        lines.append("L = " + ", ".join(str(L) for L in config.L_values))
        lines.append(f"a = {config.a!r}")
        lines.append(f"omega = {config.omega!r}")
        lines.append("l_c = " + ", ".join(str(lc) for lc in config.l_c_values))
    else:
        lines.append(f"lx = {config.lx}")
        lines.append(f"ly = {config.ly}")
        lines.append(f"delta0 = {config.delta0!r}")
        lines.append(f"delta = {config.delta!r}")
    lines += ["", "[sweep]", f"units = {config.units}"]
    if config.j_values is not None:
        lines.append("j_values = " + ", ".join(repr(j) for j in config.j_values))
    else:
        lines.append(f"j_min = {config.j_min!r}")
        lines.append(f"j_max = {config.j_max!r}")
        lines.append(f"j_points = {config.j_points}")
    lines.append(f"j_scale = {config.j_scale}")
    lines += [
        "",
        "[ensemble]",
        f"realizations = {config.realizations}",
        f"base_seed = {config.base_seed}",
        f"workers = {config.workers}",
        "",
        "[measures]",
        "list = " + ", ".join(config.measures),
    ]
    if config.band_n_up is not None:
        lines.append(f"band_n_up = {config.band_n_up}")
    lines.append(f"band_rule = {config.band_rule}")
    window = "none" if config.unfold_window is None else config.unfold_window
    lines.append(f"unfold_window = {window}")
    lines.append(f"s_bin_width = {config.s_bin_width!r}")
    lines.append(f"clambda_bin_width = {config.clambda_bin_width!r}")
    lines += [
        "",
        "[output]",
        f"directory = {config.directory}",
        "formats = " + ", ".join(config.formats),
        "",
    ]
    return "\n".join(lines)
