"""JSON model configuration.

Example::

    {
      "energies": {"eps0": 0.0, "eps1": 1.0, "eps2": 2.0},
      "degenerate_dim": 2,
      "chi": [[1.0, 0.0], [1.0, 0.0]],
      "psi": [[1.0, 0.0], [0.0, 0.0]],
      "reservoirs": {
        "em":   {"beta": 0.2, "gamma0_re": 1.0, "lamb_plus": 0.0, "lamb_minus": 0.0},
        "ph":   {"beta": 2.0, "gamma0_re": 1.0},
        "sink": {"beta": 2.0, "gamma0_re": 1.0}
      },
      "solver": {"dt": 0.01, "t_end": 50.0},
      "sweep": {"parameter": "alpha", "grid": [0.0, 0.5, 1.0]}
    }

Complex entries are [re, im] pairs.  Unknown keys are rejected everywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, QTransportError
from .model import RESERVOIRS, ReservoirSpec, SystemSpec
from .transport import SWEEP_PARAMETERS

TOP_KEYS = {"energies", "degenerate_dim", "chi", "psi", "reservoirs", "solver", "sweep"}
REQUIRED_KEYS = {"energies", "degenerate_dim", "chi", "psi", "reservoirs"}
ENERGY_KEYS = ("eps0", "eps1", "eps2")
RESERVOIR_KEYS = {"beta", "gamma0_re", "lamb_plus", "lamb_minus"}


@dataclass
class SolverOptions:
    dt: float | None = None
    t_end: float | None = None
    residual_tol: float = 1e-8
    deviation_tol: float = 1e-9
    sample_every: int = 1


@dataclass
class SweepSpec:
    parameter: str
    grid: list[float]


@dataclass
class ModelConfig:
    system: SystemSpec
    reservoirs: dict[str, ReservoirSpec]
    solver: SolverOptions = field(default_factory=SolverOptions)
    sweep: SweepSpec | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        if not isinstance(data, dict):
            raise ConfigError("config: top level must be an object")
        _check_keys(data, TOP_KEYS, "config", required=REQUIRED_KEYS)

        energies = data["energies"]
        if not isinstance(energies, dict):
            raise ConfigError("energies: must be an object with eps0, eps1, eps2")
        _check_keys(energies, set(ENERGY_KEYS), "energies", required=set(ENERGY_KEYS))
        eps = [_number(energies[k], f"energies.{k}") for k in ENERGY_KEYS]

        M = data["degenerate_dim"]
        if isinstance(M, bool) or not isinstance(M, int) or M < 1:
            raise ConfigError(f"degenerate_dim: must be a positive integer, got {M!r}")
        chi = _complex_vector(data["chi"], "chi", M)
        psi = _complex_vector(data["psi"], "psi", M)
        try:
            system = SystemSpec(*eps, M=M, chi=chi, psi=psi)
        except QTransportError as exc:
            raise ConfigError(f"energies/chi/psi: {exc}") from exc

        raw_res = data["reservoirs"]
        if not isinstance(raw_res, dict):
            raise ConfigError("reservoirs: must be an object keyed by em, ph, sink")
        _check_keys(raw_res, set(RESERVOIRS), "reservoirs", required=set(RESERVOIRS))
        reservoirs = {}
        for label in RESERVOIRS:
            entry = raw_res[label]
            where = f"reservoirs.{label}"
            if not isinstance(entry, dict):
                raise ConfigError(f"{where}: must be an object")
            _check_keys(entry, RESERVOIR_KEYS, where, required={"beta", "gamma0_re"})
            values = {k: _number(v, f"{where}.{k}") for k, v in entry.items()}
            try:
                reservoirs[label] = ReservoirSpec(label=label, **values)
            except QTransportError as exc:
                raise ConfigError(f"{where}: {exc}") from exc

        solver = SolverOptions()
        if "solver" in data:
            raw = data["solver"]
            if not isinstance(raw, dict):
                raise ConfigError("solver: must be an object")
            _check_keys(raw, set(SolverOptions.__dataclass_fields__), "solver")
            for key, value in raw.items():
                if value is None and key in ("dt", "t_end"):
                    continue
                if key == "sample_every":
                    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                        raise ConfigError(f"solver.sample_every: must be a positive integer, got {value!r}")
                else:
                    value = _number(value, f"solver.{key}")
                    if not value > 0.0:
                        raise ConfigError(f"solver.{key}: must be positive, got {value!r}")
                setattr(solver, key, value)

        sweep = None
        if "sweep" in data and data["sweep"] is not None:
            raw = data["sweep"]
            if not isinstance(raw, dict):
                raise ConfigError("sweep: must be an object")
            _check_keys(raw, {"parameter", "grid"}, "sweep", required={"parameter", "grid"})
            if raw["parameter"] not in SWEEP_PARAMETERS:
                raise ConfigError(f"sweep.parameter: must be one of {SWEEP_PARAMETERS}, got {raw['parameter']!r}")
            if not isinstance(raw["grid"], list) or not raw["grid"]:
                raise ConfigError("sweep.grid: must be a nonempty list of numbers")
            grid = [_number(v, "sweep.grid") for v in raw["grid"]]
            d = np.diff(grid)
            if not (np.all(d > 0) or np.all(d < 0)):
                raise ConfigError("sweep.grid: must be strictly monotone")
            if raw["parameter"] == "alpha" and M < 2 and any(g != 0.0 for g in grid):
                raise ConfigError("sweep.grid: an angle sweep needs degenerate_dim >= 2")
            if raw["parameter"] != "alpha" and any(g <= 0.0 for g in grid):
                raise ConfigError(f"sweep.grid: {raw['parameter']} values must be positive")
            sweep = SweepSpec(raw["parameter"], grid)

        return cls(system=system, reservoirs=reservoirs, solver=solver, sweep=sweep)

    def to_dict(self) -> dict:
        s = self.system
        out = {
            "energies": {"eps0": s.eps0, "eps1": s.eps1, "eps2": s.eps2},
            "degenerate_dim": s.M,
            "chi": [[float(z.real), float(z.imag)] for z in s.chi],
            "psi": [[float(z.real), float(z.imag)] for z in s.psi],
            "reservoirs": {
                label: {
                    "beta": r.beta,
                    "gamma0_re": r.gamma0_re,
                    "lamb_plus": r.lamb_plus,
                    "lamb_minus": r.lamb_minus,
                }
                for label, r in self.reservoirs.items()
            },
            "solver": dict(vars(self.solver)),
        }
        if self.sweep is not None:
            out["sweep"] = {"parameter": self.sweep.parameter, "grid": list(self.sweep.grid)}
        return out


def load_config(path: str | Path) -> ModelConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return ModelConfig.from_dict(data)


def dump_config(cfg: ModelConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2) + "\n"


def _check_keys(obj: dict, allowed: set, where: str, required: set = frozenset()):
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(map(repr, unknown))}")
    missing = sorted(required - set(obj))
    if missing:
        raise ConfigError(f"{where}: missing key(s) {', '.join(map(repr, missing))}")


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise ConfigError(f"{where}: must be finite")
    return value


def _complex_vector(raw, where: str, M: int) -> np.ndarray:
    if not isinstance(raw, list) or len(raw) != M:
        raise ConfigError(f"{where}: expected a list of {M} [re, im] pairs")
    out = np.empty(M, dtype=complex)
    for k, pair in enumerate(raw):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ConfigError(f"{where}[{k}]: expected an [re, im] pair, got {pair!r}")
        out[k] = complex(_number(pair[0], f"{where}[{k}]"), _number(pair[1], f"{where}[{k}]"))
    return out


def complex_matrix_from_pairs(raw, where: str = "matrix") -> np.ndarray:
    """Parse a square matrix given as rows of [re, im] pairs."""
    if not isinstance(raw, list) or not raw:
        raise ConfigError(f"{where}: expected a list of rows")
    rows = [_complex_vector(row, f"{where}[{i}]", len(raw)) for i, row in enumerate(raw)]
    return np.array(rows)
