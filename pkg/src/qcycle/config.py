"""Run configuration: JSON parsing, strict validation, serialization.

A run config names one substance, one cycle with its parameters, optional
numerics overrides and optional output settings.  Unknown fields anywhere
are rejected with the offending field path; ordering rules (F1 > F0,
r_C < r_E, ...) are enforced here so the CLI can fail fast with exit
code 2.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

from .cycles import CycleSpec, build_brayton, build_carnot, build_diesel, build_otto
from .errors import ConfigError
from .numerics import DEFAULT_POLICY, NumericsPolicy
from .substances import KINDS, SpectrumModel

_CYCLE_FIELDS = {
    "brayton": ("F1", "F0", "L_A", "L_B"),
    "diesel": ("F1", "L1", "r_C", "r_E"),
    "otto": ("L0", "L1", "beta_hot", "beta_cold"),
    "carnot": ("T_H", "T_C", "L_A", "L_B"),
}

_POLICY_FIELDS = (
    "series_tol",
    "level_cap",
    "quad_tol",
    "quad_max_depth",
    "root_tol",
    "root_max_iter",
    "fd_step_rel",
)

_MASS_KINDS = ("box1d", "box2d", "box3d")
_MODE_KINDS = ("harmonic1d", "harmonic2d", "harmonic3d", "cavity")


@dataclass(frozen=True)
class OutputConfig:
    report_path: str = "report.json"
    diagram_path: str = "diagram.csv"
    samples_per_segment: int = 64


@dataclass(frozen=True)
class RunConfig:
    substance_kind: str
    cycle_kind: str
    cycle_params: dict[str, float]
    mass: float = 1.0
    mode_constant: float = 1.0
    policy: NumericsPolicy = DEFAULT_POLICY
    output: OutputConfig = field(default_factory=OutputConfig)

    def model(self) -> SpectrumModel:
        return SpectrumModel(
            kind=self.substance_kind, mass=self.mass, mode_constant=self.mode_constant
        )

    def build_cycle(self) -> CycleSpec:
        builder = {
            "brayton": build_brayton,
            "diesel": build_diesel,
            "otto": build_otto,
            "carnot": build_carnot,
        }[self.cycle_kind]
        return builder(self.model(), policy=self.policy, **self.cycle_params)


def _require_mapping(node, path: str) -> dict:
    if not isinstance(node, dict):
        raise ConfigError(f"{path}: expected an object")
    return node


def _positive_number(node, path: str) -> float:
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        raise ConfigError(f"{path}: expected a number")
    value = float(node)
    if not math.isfinite(value) or value <= 0.0:
        raise ConfigError(f"{path}: must be a positive finite number, got {node}")
    return value


def _reject_unknown(node: dict, allowed: tuple[str, ...], path: str) -> None:
    for key in node:
        if key not in allowed:
            raise ConfigError(f"{path}.{key}: unknown field")


def _validate_substance(node: dict) -> tuple[str, float, float]:
    node = _require_mapping(node, "substance")
    if "kind" not in node:
        raise ConfigError("substance.kind: required")
    kind = node["kind"]
    if kind not in KINDS:
        raise ConfigError(
            f"substance.kind: unknown kind {kind!r}; expected one of {', '.join(KINDS)}"
        )
    allowed = ("kind",)
    if kind in _MASS_KINDS:
        allowed += ("mass",)
    if kind in _MODE_KINDS:
        allowed += ("mode_constant",)
    _reject_unknown(node, allowed, "substance")
    mass = _positive_number(node.get("mass", 1.0), "substance.mass")
    mode = _positive_number(node.get("mode_constant", 1.0), "substance.mode_constant")
    return kind, mass, mode


def _validate_cycle(node: dict) -> tuple[str, dict[str, float]]:
    node = _require_mapping(node, "cycle")
    if "kind" not in node:
        raise ConfigError("cycle.kind: required")
    kind = node["kind"]
    if kind not in _CYCLE_FIELDS:
        raise ConfigError(
            f"cycle.kind: unknown kind {kind!r}; expected one of "
            f"{', '.join(_CYCLE_FIELDS)}"
        )
    fields = _CYCLE_FIELDS[kind]
    _reject_unknown(node, ("kind",) + fields, "cycle")
    params = {}
    for name in fields:
        if name not in node:
            raise ConfigError(f"cycle.{name}: required for {kind}")
        params[name] = _positive_number(node[name], f"cycle.{name}")

    if kind == "brayton":
        if params["F1"] <= params["F0"]:
            raise ConfigError("cycle.F0: must satisfy F1 > F0 > 0")
        if params["L_B"] <= params["L_A"]:
            raise ConfigError("cycle.L_B: must satisfy L_B > L_A > 0")
    elif kind == "diesel":
        if not params["r_C"] < params["r_E"] < 1.0:
            raise ConfigError(
                "cycle.r_C: must satisfy 0 < r_C < r_E < 1 "
                "(ratios relative to the largest coordinate L1)"
            )
    elif kind == "otto":
        if params["L1"] <= params["L0"]:
            raise ConfigError("cycle.L1: must satisfy L1 > L0 > 0")
        if params["beta_cold"] <= params["beta_hot"]:
            raise ConfigError(
                "cycle.beta_cold: must exceed beta_hot (T_hot > T_cold)"
            )
    elif kind == "carnot":
        if params["T_H"] <= params["T_C"]:
            raise ConfigError("cycle.T_H: must satisfy T_H > T_C > 0")
        if params["L_B"] <= params["L_A"]:
            raise ConfigError("cycle.L_B: must satisfy L_B > L_A > 0")
    return kind, params


_POLICY_COUNT_FIELDS = ("level_cap", "quad_max_depth", "root_max_iter")


def _validate_numerics(node) -> NumericsPolicy:
    node = _require_mapping(node, "numerics")
    _reject_unknown(node, _POLICY_FIELDS, "numerics")
    for name in _POLICY_COUNT_FIELDS:
        if name in node and (isinstance(node[name], bool) or not isinstance(node[name], int)):
            raise ConfigError(f"numerics.{name}: expected an integer")
    merged = {**{k: getattr(DEFAULT_POLICY, k) for k in _POLICY_FIELDS}, **node}
    try:
        return NumericsPolicy(**merged)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"numerics: {err}") from err


def _validate_output(node) -> OutputConfig:
    node = _require_mapping(node, "output")
    _reject_unknown(
        node, ("report_path", "diagram_path", "samples_per_segment"), "output"
    )
    report = node.get("report_path", "report.json")
    diagram = node.get("diagram_path", "diagram.csv")
    for name, value in (("report_path", report), ("diagram_path", diagram)):
        if not isinstance(value, str) or not value:
            raise ConfigError(f"output.{name}: expected a non-empty string")
    samples = node.get("samples_per_segment", 64)
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 2:
        raise ConfigError("output.samples_per_segment: expected an integer >= 2")
    return OutputConfig(
        report_path=report, diagram_path=diagram, samples_per_segment=samples
    )


def validate_config(document) -> RunConfig:
    """Validate a decoded JSON document into a RunConfig."""
    document = _require_mapping(document, "config")
    _reject_unknown(document, ("substance", "cycle", "numerics", "output"), "config")
    for section in ("substance", "cycle"):
        if section not in document:
            raise ConfigError(f"{section}: required section")
    kind, mass, mode = _validate_substance(document["substance"])
    cycle_kind, params = _validate_cycle(document["cycle"])
    policy = (
        _validate_numerics(document["numerics"])
        if "numerics" in document
        else DEFAULT_POLICY
    )
    output = (
        _validate_output(document["output"]) if "output" in document else OutputConfig()
    )
    return RunConfig(
        substance_kind=kind,
        cycle_kind=cycle_kind,
        cycle_params=params,
        mass=mass,
        mode_constant=mode,
        policy=policy,
        output=output,
    )


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON config document."""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"config is not valid JSON: {err}") from err
    return validate_config(document)


def serialize_config(config: RunConfig) -> str:
    """JSON document that parses back into an equivalent RunConfig."""
    substance: dict = {"kind": config.substance_kind}
    if config.substance_kind in _MASS_KINDS:
        substance["mass"] = config.mass
    if config.substance_kind in _MODE_KINDS:
        substance["mode_constant"] = config.mode_constant
    document = {
        "substance": substance,
        "cycle": {"kind": config.cycle_kind, **config.cycle_params},
        "numerics": {k: getattr(config.policy, k) for k in _POLICY_FIELDS},
        "output": asdict(config.output),
    }
    return json.dumps(document, indent=2)
