"""Scenario configuration: INI files and named presets.

A scenario fixes the field, the initial state, the integration grid,
and the pass/fail tolerances used by the command-line tools.  Example:

    [scenario]
    name = free-boosted
    formulation = all

    [field]
    variant = free

    [initial]
    mode = rest_spin
    theta = pi/3
    phi = 0.4
    velocity = 0.6 0 0

    [run]
    steps_per_period = 1000
    periods = 10
    record_every = 10

    [tolerances]
    oracle = 1e-8
    drift = 1e-8
    compare = 1e-6

Angles accept plain floats or simple multiples of pi ("pi/3", "2*pi/3",
"-pi/2").  Initial states come from a rest-frame spin axis plus optional
zitter phase and boost (mode rest_spin) or raw four-vectors x, u, y, pi
(mode raw, which supports the position and spin-tensor formulations
only).  ``phase`` rotates the starting point on the zitter circle; the
default 0 starts with the internal velocity along the first axis.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .constants import Q_ELECTRON, T0
from .dynamics import map_states, matched_initial_states
from .emfield import CoulombField, FieldModel, FreeField, UniformEB
from .states import DynState, FORMULATIONS, PositionState


class ScenarioError(Exception):
    """Invalid scenario configuration (maps to CLI exit code 2)."""


_PI_FORM = re.compile(
    r"^\s*(-?)\s*(?:(\d+(?:\.\d*)?)\s*\*\s*)?pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$"
)

_DEFAULTS = {
    "scenario": {"name": "unnamed", "formulation": "position"},
    "field": {"variant": "free", "e0": "0 0 0", "b0": "0 0 0", "z": "1.0",
              "center": "0 0 0"},
    "initial": {"mode": "rest_spin", "theta": "0.0", "phi": "0.0",
                "phase": "0.0", "velocity": "0 0 0", "origin": "0 0 0 0"},
    "run": {"steps_per_period": "1000", "periods": "10", "record_every": "10",
            "charge": str(Q_ELECTRON)},
    "tolerances": {"oracle": "1e-8", "drift": "1e-8", "compare": "1e-6"},
}


def parse_angle(text: str) -> float:
    """Float literal or a simple multiple of pi such as '2*pi/3'."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _PI_FORM.match(text)
    if not m:
        raise ScenarioError(f"cannot parse angle {text!r}")
    sign = -1.0 if m.group(1) == "-" else 1.0
    num = float(m.group(2)) if m.group(2) else 1.0
    den = float(m.group(3)) if m.group(3) else 1.0
    return sign * num * math.pi / den


def _parse_vector(text: str, length: int, what: str) -> np.ndarray:
    parts = text.replace(",", " ").split()
    if len(parts) != length:
        raise ScenarioError(f"{what} needs {length} components, got {text!r}")
    try:
        return np.array([float(p) for p in parts])
    except ValueError as exc:
        raise ScenarioError(f"bad number in {what}: {exc}") from None


@dataclass(frozen=True)
class Scenario:
    name: str
    formulation: str
    field_variant: str
    e0: np.ndarray
    b0: np.ndarray
    z_charge: float
    center: np.ndarray
    mode: str
    theta: float
    phi: float
    phase: float
    velocity: np.ndarray
    origin: np.ndarray
    raw_vectors: dict[str, np.ndarray] | None
    steps_per_period: int
    periods: float
    record_every: int
    charge: float
    tolerances: dict[str, float]

    @property
    def dt(self) -> float:
        return T0 / self.steps_per_period

    @property
    def n_steps(self) -> int:
        steps = round(self.periods * self.steps_per_period)
        # keep recording aligned with the final step
        return int(steps - steps % self.record_every)

    def build_field(self) -> FieldModel:
        if self.field_variant == "free":
            return FreeField()
        if self.field_variant == "uniform":
            return UniformEB(e0=self.e0, b0=self.b0)
        if self.field_variant == "coulomb":
            return CoulombField(z_charge=self.z_charge, center=self.center)
        raise ScenarioError(f"unknown field variant {self.field_variant!r}")

    def build_states(self) -> dict[str, DynState]:
        """Initial states for every formulation this scenario can express."""
        if self.mode == "rest_spin":
            vel = self.velocity if float(np.linalg.norm(self.velocity)) > 0 else None
            return matched_initial_states(self.theta, self.phi, velocity=vel,
                                          origin=self.origin, phase=self.phase)
        assert self.raw_vectors is not None
        pos = PositionState(**self.raw_vectors)
        return {"position": pos, "spintensor": map_states(pos, "spintensor")}

    def initial_state(self, formulation: str | None = None) -> DynState:
        name = formulation or self.formulation
        states = self.build_states()
        if name not in states:
            raise ScenarioError(
                f"scenario {self.name!r} cannot build a {name!r} state "
                f"(mode {self.mode!r})"
            )
        return states[name]


def _scenario_from_parser(cp: configparser.ConfigParser) -> Scenario:
    formulation = cp.get("scenario", "formulation").strip()
    if formulation not in FORMULATIONS + ("all",):
        raise ScenarioError(f"unknown formulation {formulation!r}")
    mode = cp.get("initial", "mode").strip()
    raw = None
    if mode == "raw":
        missing = [k for k in ("x", "u", "y", "pi") if not cp.has_option("initial", k)]
        if missing:
            raise ScenarioError(f"raw initial mode needs vectors {missing}")
        raw = {k: _parse_vector(cp.get("initial", k), 4, f"initial.{k}")
               for k in ("x", "u", "y", "pi")}
    elif mode != "rest_spin":
        raise ScenarioError(f"unknown initial mode {mode!r}")
    try:
        steps_per_period = cp.getint("run", "steps_per_period")
        record_every = cp.getint("run", "record_every")
        periods = cp.getfloat("run", "periods")
        charge = cp.getfloat("run", "charge")
        tolerances = {k: float(v) for k, v in cp.items("tolerances")}
        z_charge = cp.getfloat("field", "z")
    except ValueError as exc:
        raise ScenarioError(f"bad numeric value: {exc}") from None
    if steps_per_period <= 0 or record_every <= 0 or periods <= 0:
        raise ScenarioError("run parameters must be positive")
    return Scenario(
        name=cp.get("scenario", "name"),
        formulation=formulation,
        field_variant=cp.get("field", "variant").strip(),
        e0=_parse_vector(cp.get("field", "e0"), 3, "field.e0"),
        b0=_parse_vector(cp.get("field", "b0"), 3, "field.b0"),
        z_charge=z_charge,
        center=_parse_vector(cp.get("field", "center"), 3, "field.center"),
        mode=mode,
        theta=parse_angle(cp.get("initial", "theta")),
        phi=parse_angle(cp.get("initial", "phi")),
        phase=parse_angle(cp.get("initial", "phase")),
        velocity=_parse_vector(cp.get("initial", "velocity"), 3, "initial.velocity"),
        origin=_parse_vector(cp.get("initial", "origin"), 4, "initial.origin"),
        raw_vectors=raw,
        steps_per_period=steps_per_period,
        periods=periods,
        record_every=record_every,
        charge=charge,
        tolerances=tolerances,
    )


PRESETS: dict[str, str] = {
    "free-rest": """
[scenario]
name = free-rest
formulation = all
[initial]
theta = 0
phi = 0
""",
    "free-boosted": """
[scenario]
name = free-boosted
formulation = all
[initial]
theta = pi/3
phi = 0.4
velocity = 0.6 0 0
[tolerances]
compare = 1e-6
""",
    "uniform-b-weak": """
[scenario]
name = uniform-b-weak
formulation = all
[field]
variant = uniform
b0 = 0 0 5e-7
[initial]
theta = pi/3
phi = 0.4
[tolerances]
compare = 1e-5
drift = 1e-5
""",
    "uniform-b-cyclotron": """
[scenario]
name = uniform-b-cyclotron
formulation = spintensor
[field]
variant = uniform
b0 = 0 0 1e-3
[initial]
theta = 0
phi = 0
velocity = 0.25 0 0
[run]
periods = 400
record_every = 200
""",
    "uniform-b-precession": """
[scenario]
name = uniform-b-precession
formulation = spintensor
[field]
variant = uniform
b0 = 0 0 1e-3
[initial]
theta = pi/3
phi = 0
[run]
periods = 400
record_every = 200
""",
    "coulomb-orbit": """
[scenario]
name = coulomb-orbit
formulation = spintensor
[field]
variant = coulomb
z = 1.0
center = 0 0 0
[initial]
theta = 0
phi = 0
velocity = 0 0.05 0
origin = 0 30 0 0
[run]
periods = 50
record_every = 100
[tolerances]
drift = 1e-6
""",
}


def preset_names() -> list[str]:
    return sorted(PRESETS)


def load_scenario(source: str) -> Scenario:
    """Load from a preset name or an INI file path."""
    cp = configparser.ConfigParser()
    cp.read_dict(_DEFAULTS)
    if source in PRESETS:
        cp.read_string(PRESETS[source])
    else:
        path = Path(source)
        if not path.is_file():
            raise ScenarioError(
                f"{source!r} is neither a preset ({', '.join(preset_names())}) "
                "nor a readable file"
            )
        try:
            cp.read_string(path.read_text())
        except configparser.Error as exc:
            raise ScenarioError(f"bad INI syntax in {source}: {exc}") from None
    return _scenario_from_parser(cp)
