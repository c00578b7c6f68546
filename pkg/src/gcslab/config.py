"""JSON run configuration for the command-line front end."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import constants

from .core import PhysicalSetup, SeedCoefficients
from .errors import ConfigError
from .semiclassical import SemiclassicalInput
from .states import GcsState, cs_specialize

MODES = ("eval", "moments", "regime", "map", "verify")
SWEEPABLE = {
    "E": ("field", "E"),
    "alpha": ("field", "alpha"),
    "sigma_z": ("state", "sigma_z"),
    "sigma_pz": ("state", "sigma_pz"),
    "p_z": ("state", "p_z"),
}
MAX_CELLS = 10**6
SUITES = ("rs-identity", "norm", "propagate", "residual", "critical-times")

UNIT_DEFAULTS = {
    "si": {
        "mass": constants.m_e,
        "charge": -constants.e,
        "c": constants.c,
        "hbar": constants.hbar,
        "l": 1e-9,
    },
    "natural": {
        "mass": 1.0,
        "charge": -math.sqrt(4 * math.pi * constants.fine_structure),
        "c": 1.0,
        "hbar": 1.0,
        "l": 1.0,
    },
}


def load_document(text, source="<config>"):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, where=f"{source}:{exc.lineno}:{exc.colno}") from None
    if not isinstance(doc, dict):
        raise ConfigError("top level must be a JSON object", where=source)
    return doc


def _parse_scalar(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(doc, overrides):
    """Apply ``[("field.E", "1e5"), ...]`` to a config document (returns a copy)."""
    doc = copy.deepcopy(doc)
    for key, raw in overrides:
        parts = key.split(".")
        if not all(parts):
            raise ConfigError("malformed override", where=f"--{key}")
        node = doc
        for part in parts[:-1]:
            child = node.setdefault(part, {})
            if not isinstance(child, dict):
                raise ConfigError("cannot override inside a non-object", where=f"--{key}")
            node = child
        node[parts[-1]] = _parse_scalar(raw)
    return doc


def _number(block, key, where, default=None, positive=False, nonnegative=False):
    value = block.get(key, default)
    if value is None:
        raise ConfigError("required number missing", where=f"{where}.{key}")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", where=f"{where}.{key}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError("must be finite", where=f"{where}.{key}")
    if positive and value <= 0:
        raise ConfigError("must be positive", where=f"{where}.{key}")
    if nonnegative and value < 0:
        raise ConfigError("must be non-negative", where=f"{where}.{key}")
    return value


def _complex(value, where):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, list) and len(value) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
    ):
        return complex(value[0], value[1])
    if isinstance(value, dict) and set(value) <= {"re", "im"}:
        return complex(value.get("re", 0.0), value.get("im", 0.0))
    raise ConfigError(f"expected a number, [re, im] or {{re, im}}, got {value!r}", where=where)


def _block(doc, name):
    block = doc.get(name, {})
    if not isinstance(block, dict):
        raise ConfigError("expected an object", where=name)
    return block


def _values(spec, where):
    """A list of numbers, or {min, max, count[, spacing]}."""
    if isinstance(spec, list):
        if not spec:
            raise ConfigError("empty list", where=where)
        return [_number({"v": v}, "v", where) for v in spec]
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return [float(spec)]
    if not isinstance(spec, dict):
        raise ConfigError("expected a list or {min, max, count}", where=where)
    lo = _number(spec, "min", where)
    hi = _number(spec, "max", where)
    count = spec.get("count")
    if not isinstance(count, int) or isinstance(count, bool) or count < 1:
        raise ConfigError("count must be a positive integer", where=f"{where}.count")
    if count > MAX_CELLS:
        raise ConfigError(f"count exceeds {MAX_CELLS}", where=f"{where}.count")
    spacing = spec.get("spacing", "linear")
    if spacing == "linear":
        return np.linspace(lo, hi, count).tolist()
    if spacing == "log":
        if lo <= 0 or hi <= 0:
            raise ConfigError("log spacing needs positive bounds", where=where)
        return np.geomspace(lo, hi, count).tolist()
    raise ConfigError(f"spacing must be 'linear' or 'log', got {spacing!r}", where=f"{where}.spacing")


@dataclass(frozen=True)
class OutputSpec:
    path: str | None
    format: str
    precision: int


@dataclass
class RunConfig:
    mode: str
    doc: dict
    units: str
    setup: PhysicalSetup
    output: OutputSpec

    def section(self, name):
        return _block(self.doc, name)

    def gcs_state(self):
        """Dimensionless state from the ``state`` block."""
        state = self.section("state")
        if "f0" in state or "g0" in state:
            try:
                seed = SeedCoefficients(
                    _complex(state.get("f0"), "state.f0"), _complex(state.get("g0"), "state.g0")
                )
            except ValueError as exc:
                raise ConfigError(str(exc), where="state.f0/g0") from None
        elif state.get("kind", "gcs") == "cs":
            seed = cs_specialize(_number(state, "sigma_q", "state", default=1 / math.sqrt(2), positive=True))
        elif "sigma_q" in state or "sigma_p" in state:
            sq = _number(state, "sigma_q", "state", positive=True)
            sp = _number(state, "sigma_p", "state", positive=True)
            branch = state.get("branch", 1)
            if branch not in (1, -1):
                raise ConfigError("branch must be 1 or -1", where="state.branch")
            seed = SeedCoefficients.from_deviations(sq, sp, branch=branch)
        else:
            seed = SeedCoefficients(1.0, 1.0)
        if "zeta" in state:
            zeta = _complex(state["zeta"], "state.zeta")
        else:
            q0 = _number(state, "q0", "state", default=0.0)
            p0 = _number(state, "p0", "state", default=0.0)
            zeta = (seed.f0 * q0 + 1j * seed.g0 * p0) / math.sqrt(2)
        Xi = _number(state, "Xi", "state", default=self.setup.Xi)
        return GcsState(seed, Xi, self.setup.alpha, zeta)

    def state_kind(self):
        kind = self.section("state").get("kind", "gcs")
        if kind not in ("gcs", "cs"):
            raise ConfigError(f"kind must be 'gcs' or 'cs', got {kind!r}", where="state.kind")
        return kind

    def semiclassical_input(self):
        state = self.section("state")
        kind = self.state_kind()
        sigma_z = _number(state, "sigma_z", "state", positive=True)
        p_z = _number(state, "p_z", "state", default=0.0)
        if kind == "cs":
            if "sigma_pz" in state:
                raise ConfigError("a coherent state fixes sigma_pz = hbar/(2 sigma_z)", where="state.sigma_pz")
            return SemiclassicalInput.coherent(sigma_z, p_z, self.setup)
        sigma_pz = _number(state, "sigma_pz", "state", positive=True)
        return SemiclassicalInput(sigma_z, sigma_pz, p_z, self.setup)

    def with_values(self, assignments):
        """Copy with sweep values written into the document (``{"E": 1.0}``)."""
        doc = copy.deepcopy(self.doc)
        for name, value in assignments.items():
            block, key = SWEEPABLE[name]
            doc.setdefault(block, {})[key] = value
        return build_config(doc, self.mode)

    def sweep_axes(self):
        sweep = self.section("sweep")
        axes = sweep.get("axes")
        if not isinstance(axes, list) or len(axes) != 2:
            raise ConfigError("map mode needs exactly two axes", where="sweep.axes")
        out = []
        cells = 1
        for i, axis in enumerate(axes):
            where = f"sweep.axes[{i}]"
            if not isinstance(axis, dict):
                raise ConfigError("expected an object", where=where)
            name = axis.get("name")
            if name not in SWEEPABLE:
                raise ConfigError(
                    f"not sweepable: {name!r} (choose from {', '.join(SWEEPABLE)})", where=f"{where}.name"
                )
            if name == "sigma_pz" and self.state_kind() == "cs":
                raise ConfigError("sigma_pz is fixed for coherent states", where=f"{where}.name")
            values = _values(axis["values"], f"{where}.values") if "values" in axis else _values(axis, where)
            cells *= len(values)
            out.append((name, values))
        if out[0][0] == out[1][0]:
            raise ConfigError("axes must differ", where="sweep.axes")
        if cells > MAX_CELLS:
            raise ConfigError(f"{cells} cells exceed the limit of {MAX_CELLS}", where="sweep.axes")
        return out

    def values(self, block, key, default=None):
        spec = self.section(block).get(key, default)
        if spec is None:
            raise ConfigError("required", where=f"{block}.{key}")
        return _values(spec, f"{block}.{key}")


def build_config(doc, mode=None):
    """Validate a config document. ``mode`` (from the command line) must agree
    with ``doc["mode"]`` when both are given."""
    doc_mode = doc.get("mode")
    if mode is None:
        mode = doc_mode
    elif doc_mode is not None and doc_mode != mode:
        raise ConfigError(f"config says {doc_mode!r} but {mode!r} was requested", where="mode")
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {mode!r}", where="mode")

    units = doc.get("units", "si")
    if units not in UNIT_DEFAULTS:
        raise ConfigError(f"units must be 'si' or 'natural', got {units!r}", where="units")
    defaults = UNIT_DEFAULTS[units]
    particle = _block(doc, "particle")
    consts = _block(doc, "constants")
    field = _block(doc, "field")
    scale = _block(doc, "scale")
    try:
        setup = PhysicalSetup(
            mass=_number(particle, "mass", "particle", defaults["mass"], positive=True),
            charge=_number(particle, "charge", "particle", defaults["charge"]),
            light_speed=_number(consts, "c", "constants", defaults["c"], positive=True),
            hbar=_number(consts, "hbar", "constants", defaults["hbar"], positive=True),
            field_amplitude=_number(field, "E", "field", 0.0, nonnegative=True),
            alpha=_number(field, "alpha", "field", math.pi / 2),
            length_scale=_number(scale, "l", "scale", defaults["l"], positive=True),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc), where="field") from None

    out = _block(doc, "out")
    fmt = out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be 'csv' or 'json', got {fmt!r}", where="out.format")
    precision = out.get("precision", 12)
    if not isinstance(precision, int) or isinstance(precision, bool) or not 1 <= precision <= 17:
        raise ConfigError("precision must be an integer in [1, 17]", where="out.precision")
    path = out.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("path must be a string", where="out.path")
    return RunConfig(mode, doc, units, setup, OutputSpec(path, fmt, precision))
