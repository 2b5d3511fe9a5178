"""Declarative scenario execution: JSON configs in, CSV time series out.

A probe scenario bundles the model parameters, the qubit preparation, one
oscillator-state family, a time grid and an optional brute-force block.
Running it evaluates both protocol copies on the shared grid and reports the
conservation and matching residuals; output is deterministic byte-for-byte
for identical configs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import oracle as fock
from .bell import BellProbe, QubitPreparation
from .fidelity import FidelityProbe, SingleDephasingModel, match_residual, wigner_snapshot
from .phase_space import ModelParams
from .states import CharFnState, make_state

SCHEMA_VERSION = 1

_BASE_COLUMNS = (
    "t",
    "C",
    "I",
    "cons_resid",
    "F1_raw",
    "F2_raw",
    "F1_norm",
    "F2_norm",
    "sqrtF1F2",
    "match_resid",
)
_ORACLE_COLUMNS = ("C_oracle", "F1_oracle", "F2_oracle", "dC", "dF1", "dF2")


class ScenarioValidationError(ValueError):
    """Config rejected; the message names the offending field path."""


def _format_float(value: float) -> str:
    return f"{float(value):.17g}"


def _fail(path: str, message: str):
    raise ScenarioValidationError(f"{path}: {message}")


def _require(mapping, key, path, kind=None):
    if not isinstance(mapping, dict):
        _fail(path.rsplit(".", 1)[0] if "." in path else path, "expected an object")
    if key not in mapping:
        _fail(path, "missing required field")
    value = mapping[key]
    if kind is not None and not isinstance(value, kind):
        _fail(path, f"expected {getattr(kind, '__name__', kind)}")
    return value


def _number(mapping, key, path, default=None):
    if default is not None and key not in mapping:
        return default
    value = _require(mapping, key, path)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, "expected a number")
    return float(value)


def _complex_field(raw, path) -> complex:
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        return complex(raw)
    if isinstance(raw, (list, tuple)) and len(raw) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw
    ):
        return complex(raw[0], raw[1])
    _fail(path, "expected a number or a [re, im] pair")


def _integer(mapping, key, path, default=None):
    if default is not None and key not in mapping:
        return default
    value = _require(mapping, key, path)
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, "expected an integer")
    return int(value)


@dataclass(frozen=True)
class TimeGrid:
    t_max: float
    steps: int

    def __post_init__(self):
        if self.t_max <= 0.0:
            raise ScenarioValidationError("time.t_max: must be positive")
        if self.steps < 2:
            raise ScenarioValidationError("time.steps: need at least 2 steps")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.steps + 1)


@dataclass(frozen=True)
class OracleBlock:
    enabled: bool = False
    n1: int = 40
    n2: int = 40
    tolerance: float = 1.0e-6

    @property
    def config(self) -> fock.FockConfig:
        return fock.FockConfig(n1=self.n1, n2=self.n2, tolerance=self.tolerance)


@dataclass(frozen=True)
class Scenario:
    name: str
    model: ModelParams
    prep: QubitPreparation
    state: CharFnState
    grid: TimeGrid
    oracle: OracleBlock = field(default_factory=OracleBlock)
    normalized_fidelity: bool = True
    output: str | None = None


def _parse_model(raw) -> ModelParams:
    path = "model"
    values = {}
    for key in ("delta1", "delta2", "omega2", "g1", "g2"):
        values[key] = _number(raw, key, f"{path}.{key}")
    try:
        return ModelParams(**values)
    except ValueError as exc:
        _fail(path, str(exc))


def _parse_qubits(raw) -> QubitPreparation:
    if raw is None or raw == "maximal":
        return QubitPreparation.maximal()
    if not isinstance(raw, dict):
        _fail("qubits", 'expected "maximal" or an object with a1, b1, a2, b2')
    amps = {}
    for key in ("a1", "b1", "a2", "b2"):
        amps[key] = _complex_field(_require(raw, key, f"qubits.{key}"), f"qubits.{key}")
    try:
        return QubitPreparation(**amps)
    except ValueError as exc:
        _fail("qubits", str(exc))


def _parse_state(raw) -> CharFnState:
    family = _require(raw, "family", "state.family", str)
    path = "state"
    try:
        if family == "separable_gaussian":
            centroids = _require(raw, "centroids", f"{path}.centroids", list)
            if len(centroids) != 4 or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in centroids
            ):
                _fail(f"{path}.centroids", "expected four numbers [x1, p1, x2, p2]")
            return make_state(family, x_o1=centroids[0], p_o1=centroids[1],
                              x_o2=centroids[2], p_o2=centroids[3])
        if family == "entangled_coherent":
            kwargs = {
                key: _complex_field(_require(raw, key, f"{path}.{key}"), f"{path}.{key}")
                for key in ("alpha1", "beta1", "alpha2", "beta2")
            }
            for key in ("c1", "c2"):
                if key in raw:
                    kwargs[key] = _complex_field(raw[key], f"{path}.{key}")
            return make_state(family, **kwargs)
        if family == "separable_number":
            kwargs = {key: _integer(raw, key, f"{path}.{key}") for key in ("n1", "m1", "n2", "m2")}
            for key in ("alpha1", "beta1", "alpha2", "beta2"):
                if key in raw:
                    kwargs[key] = _complex_field(raw[key], f"{path}.{key}")
            return make_state(family, **kwargs)
        if family == "entangled_number":
            kwargs = {key: _integer(raw, key, f"{path}.{key}") for key in ("n1", "m1", "n2", "m2")}
            for key in ("p1", "p2"):
                if key in raw:
                    kwargs[key] = _complex_field(raw[key], f"{path}.{key}")
            return make_state(family, **kwargs)
    except ScenarioValidationError:
        raise
    except ValueError as exc:
        _fail(path, str(exc))
    _fail(f"{path}.family", f"unknown family {family!r}")


def parse_scenario(raw: dict, name: str = "scenario") -> Scenario:
    """Validate a decoded config object and build the scenario."""
    if not isinstance(raw, dict):
        raise ScenarioValidationError("top level: expected an object")
    schema = raw.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        _fail("schema", f"unsupported version {schema!r} (supported: {SCHEMA_VERSION})")
    model = _parse_model(_require(raw, "model", "model"))
    prep = _parse_qubits(raw.get("qubits"))
    state = _parse_state(_require(raw, "state", "state"))
    time_raw = _require(raw, "time", "time")
    try:
        grid = TimeGrid(
            t_max=_number(time_raw, "t_max", "time.t_max"),
            steps=_integer(time_raw, "steps", "time.steps"),
        )
    except ScenarioValidationError:
        raise
    oracle_raw = raw.get("oracle", {})
    if not isinstance(oracle_raw, dict):
        _fail("oracle", "expected an object")
    enabled = oracle_raw.get("enabled", False)
    if not isinstance(enabled, bool):
        _fail("oracle.enabled", "expected a boolean")
    oracle = OracleBlock(
        enabled=enabled,
        n1=_integer(oracle_raw, "n1", "oracle.n1", default=40),
        n2=_integer(oracle_raw, "n2", "oracle.n2", default=40),
        tolerance=_number(oracle_raw, "tolerance", "oracle.tolerance", default=1.0e-6),
    )
    mode = raw.get("fidelity_normalization", "normalized")
    if mode not in ("normalized", "raw"):
        _fail("fidelity_normalization", 'expected "normalized" or "raw"')
    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        _fail("output", "expected a string path")
    return Scenario(
        name=name,
        model=model,
        prep=prep,
        state=state,
        grid=grid,
        oracle=oracle,
        normalized_fidelity=(mode == "normalized"),
        output=output,
    )


def load_scenario(path) -> Scenario:
    """Read and validate a JSON scenario file."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ScenarioValidationError(f"{path}: cannot read ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioValidationError(f"{path}: invalid JSON ({exc})") from exc
    return parse_scenario(raw, name=path.stem)


@dataclass(frozen=True)
class ProbeSeries:
    """Time-gridded probe record with a fixed column order."""

    columns: tuple
    data: dict
    summary: dict

    def to_csv(self, path):
        rows = len(self.data[self.columns[0]])
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(self.columns) + "\n")
            for idx in range(rows):
                fh.write(
                    ",".join(_format_float(self.data[col][idx]) for col in self.columns) + "\n"
                )


def run_scenario(scenario: Scenario) -> ProbeSeries:
    """Evaluate both protocol copies (and optionally the brute force) on the grid."""
    ts = scenario.grid.times
    bell = BellProbe(scenario.prep, scenario.state, scenario.model)
    fid = FidelityProbe(scenario.prep, scenario.state, scenario.model)

    conc = bell.concurrence(ts)
    icon = bell.i_concurrence(ts)
    cons_resid = np.abs(conc**2 + icon**2 - 1.0)
    f1_raw = fid.fidelity(1, ts, normalized=False)
    f2_raw = fid.fidelity(2, ts, normalized=False)
    f1_norm = fid.fidelity(1, ts, normalized=True)
    f2_norm = fid.fidelity(2, ts, normalized=True)
    if scenario.normalized_fidelity:
        sqrt_f1f2 = np.sqrt(f1_norm * f2_norm)
    else:
        sqrt_f1f2 = np.sqrt(f1_raw * f2_raw)
    resid = np.abs(conc - sqrt_f1f2)

    data = {
        "t": ts,
        "C": conc,
        "I": icon,
        "cons_resid": cons_resid,
        "F1_raw": f1_raw,
        "F2_raw": f2_raw,
        "F1_norm": f1_norm,
        "F2_norm": f2_norm,
        "sqrtF1F2": sqrt_f1f2,
        "match_resid": resid,
    }
    columns = _BASE_COLUMNS
    summary = {
        "max_match_residual": float(np.max(resid)),
        "max_conservation_residual": float(np.max(cons_resid)),
    }

    if scenario.oracle.enabled:
        cfg = scenario.oracle.config
        bell_curves = fock.bell_probe_curves(scenario.model, scenario.state, ts, cfg)
        amps = (scenario.prep.a1, scenario.prep.b1, scenario.prep.a2, scenario.prep.b2)
        fid_curves = fock.fidelity_probe_curves(amps, scenario.model, scenario.state, ts, cfg)
        data["C_oracle"] = bell_curves["C"]
        data["F1_oracle"] = fid_curves["F1_raw"]
        data["F2_oracle"] = fid_curves["F2_raw"]
        data["dC"] = np.abs(conc - bell_curves["C"])
        data["dF1"] = np.abs(f1_raw - fid_curves["F1_raw"])
        data["dF2"] = np.abs(f2_raw - fid_curves["F2_raw"])
        columns = _BASE_COLUMNS + _ORACLE_COLUMNS
        summary["max_oracle_dC"] = float(np.max(data["dC"]))
        summary["max_oracle_dF1"] = float(np.max(data["dF1"]))
        summary["max_oracle_dF2"] = float(np.max(data["dF2"]))
        summary["max_oracle_conservation"] = float(
            np.max(np.abs(bell_curves["C"] ** 2 + bell_curves["I"] ** 2 - 1.0))
        )
    return ProbeSeries(columns=columns, data=data, summary=summary)


# ---------------------------------------------------------------------------
# single-model (echo / Wigner) scenarios

@dataclass(frozen=True)
class WignerScenario:
    name: str
    model: SingleDephasingModel
    grid_min: float
    grid_max: float
    grid_step: float
    times: tuple
    echo_grid: TimeGrid


def parse_wigner_scenario(raw: dict, name: str = "wigner") -> WignerScenario:
    if not isinstance(raw, dict):
        raise ScenarioValidationError("top level: expected an object")
    schema = raw.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        _fail("schema", f"unsupported version {schema!r} (supported: {SCHEMA_VERSION})")
    model_raw = _require(raw, "model", "model")
    delta = _number(model_raw, "delta", "model.delta", default=0.0)
    g = _number(model_raw, "g", "model.g")
    qubit_raw = raw.get("qubit", {})
    if not isinstance(qubit_raw, dict):
        _fail("qubit", "expected an object")
    population = _number(qubit_raw, "excited_population", "qubit.excited_population", default=0.5)
    coherence = (
        _complex_field(qubit_raw["coherence"], "qubit.coherence")
        if "coherence" in qubit_raw
        else 0.5
    )
    try:
        model = SingleDephasingModel(
            delta=delta, g=g, excited_population=population, coherence=coherence
        )
    except ValueError as exc:
        _fail("qubit", str(exc))
    grid_raw = raw.get("grid", {})
    if not isinstance(grid_raw, dict):
        _fail("grid", "expected an object")
    gmin = _number(grid_raw, "min", "grid.min", default=-6.0)
    gmax = _number(grid_raw, "max", "grid.max", default=6.0)
    gstep = _number(grid_raw, "step", "grid.step", default=0.05)
    if gmax <= gmin or gstep <= 0:
        _fail("grid", "need min < max and step > 0")
    times = raw.get("times", [0.0, math.pi / 2.0, math.pi])
    if not isinstance(times, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in times
    ):
        _fail("times", "expected a list of numbers")
    echo_raw = raw.get("echo_time", {})
    if not isinstance(echo_raw, dict):
        _fail("echo_time", "expected an object")
    echo_grid = TimeGrid(
        t_max=_number(echo_raw, "t_max", "echo_time.t_max", default=5.0 * math.pi),
        steps=_integer(echo_raw, "steps", "echo_time.steps", default=400),
    )
    return WignerScenario(
        name=name,
        model=model,
        grid_min=gmin,
        grid_max=gmax,
        grid_step=gstep,
        times=tuple(float(v) for v in times),
        echo_grid=echo_grid,
    )


def load_wigner_scenario(path) -> WignerScenario:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ScenarioValidationError(f"{path}: cannot read ({exc})") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioValidationError(f"{path}: invalid JSON ({exc})") from exc
    return parse_wigner_scenario(raw, name=path.stem)


def run_wigner_scenario(scenario: WignerScenario, out_dir) -> list:
    """Emit Wigner grids and the echo series; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for idx, t in enumerate(scenario.times):
        snap = wigner_snapshot(
            scenario.model,
            t,
            x_min=scenario.grid_min,
            x_max=scenario.grid_max,
            step=scenario.grid_step,
        )
        path = out_dir / f"{scenario.name}_w{idx:02d}.csv"
        snap.to_csv(path)
        written.append(path)
    ts = scenario.echo_grid.times
    echo = scenario.model.echo(ts, normalized=True)
    sep = scenario.model.packet_separation(ts)
    sep_sq = np.sum(sep**2, axis=-1)
    path = out_dir / f"{scenario.name}_echo.csv"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,echo,Fq,dsq\n")
        for i in range(len(ts)):
            fh.write(
                ",".join(
                    _format_float(v) for v in (ts[i], echo[i], echo[i] ** 2, sep_sq[i])
                )
                + "\n"
            )
    written.append(path)
    return written


# ---------------------------------------------------------------------------
# bundled scenarios

def bundled_scenario_names() -> list:
    root = resources.files("oscprobe").joinpath("scenarios")
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def load_bundled(name: str):
    """Load one bundled config; returns a Scenario or WignerScenario."""
    root = resources.files("oscprobe").joinpath("scenarios")
    raw = json.loads(root.joinpath(f"{name}.json").read_text(encoding="utf-8"))
    if raw.get("kind") == "wigner":
        return parse_wigner_scenario(raw, name=name)
    return parse_scenario(raw, name=name)


def bundled_probe_scenarios() -> list:
    out = []
    for name in bundled_scenario_names():
        sc = load_bundled(name)
        if isinstance(sc, Scenario):
            out.append(sc)
    return out
