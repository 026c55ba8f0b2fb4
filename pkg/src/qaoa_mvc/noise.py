"""Gate-level noise model and calibration file handling.

Calibration files are YAML key/value text with exactly these fields (each a
scalar, or a per-qubit list for p1, t1_us, t2_us, readout_p01, readout_p10):

    p1          single-qubit depolarizing probability per gate
    p2          two-qubit depolarizing probability per gate
    t1_us       relaxation time per qubit, microseconds
    t2_us       dephasing time per qubit, microseconds (t2 <= 2*t1)
    dur_1q_ns   single-qubit gate duration, nanoseconds
    dur_2q_ns   two-qubit gate duration, nanoseconds
    readout_p01 P(read 1 | prepared 0) per qubit
    readout_p10 P(read 0 | prepared 1) per qubit
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np
import yaml

from .errors import CalibrationError, ContractViolation

CALIBRATION_FIELDS = (
    "p1",
    "p2",
    "t1_us",
    "t2_us",
    "dur_1q_ns",
    "dur_2q_ns",
    "readout_p01",
    "readout_p10",
)


def _as_array(value, n: int) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        return np.full(n, float(arr))
    if arr.shape == (n,):
        return arr.copy()
    raise ContractViolation(f"per-qubit field needs a scalar or length-{n} list, got shape {arr.shape}")


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing rates, relaxation times, gate durations, readout confusion.

    Per-qubit fields may be scalars (broadcast) or tuples of per-qubit values.
    """

    p1: float | tuple[float, ...] = 0.0
    p2: float = 0.0
    t1_us: float | tuple[float, ...] = math.inf
    t2_us: float | tuple[float, ...] = math.inf
    dur_1q_ns: float = 0.0
    dur_2q_ns: float = 0.0
    readout_p01: float | tuple[float, ...] = 0.0
    readout_p10: float | tuple[float, ...] = 0.0

    def __post_init__(self):
        for name in ("p1", "p2", "readout_p01", "readout_p10"):
            vals = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            if np.any(vals < 0) or np.any(vals > 1):
                raise ContractViolation(f"{name} must lie in [0, 1]")
        t1 = np.atleast_1d(np.asarray(self.t1_us, dtype=float))
        t2 = np.atleast_1d(np.asarray(self.t2_us, dtype=float))
        if np.any(t1 <= 0) or np.any(t2 <= 0):
            raise ContractViolation("t1_us and t2_us must be positive")
        if t1.size != t2.size and 1 not in (t1.size, t2.size):
            raise ContractViolation("t1_us and t2_us per-qubit lists must have equal length")
        if np.any(t2 > 2 * t1 + 1e-12):
            raise ContractViolation("t2_us must satisfy t2 <= 2*t1")
        if self.dur_1q_ns < 0 or self.dur_2q_ns < 0:
            raise ContractViolation("gate durations must be nonnegative")

    @classmethod
    def zero(cls) -> "NoiseModel":
        """Identity channels everywhere; the noisy backend then matches the exact one."""
        return cls()

    @classmethod
    def default(cls) -> "NoiseModel":
        """Device-class defaults shipped with the package."""
        text = resources.files("qaoa_mvc.data").joinpath("default_calibration.yaml").read_text()
        return parse_calibration(text)

    def channel_arrays(self, n: int) -> dict[str, np.ndarray | float]:
        """Per-qubit channel parameters for an n-qubit circuit.

        gad = 1 - exp(-dur/t1) is the amplitude-damping population transfer;
        decay = exp(-dur/t2) is the total off-diagonal factor (valid because
        t2 <= 2*t1 guarantees complete positivity).
        """
        t1 = _as_array(self.t1_us, n)
        t2 = _as_array(self.t2_us, n)
        d1 = self.dur_1q_ns / 1000.0
        d2 = self.dur_2q_ns / 1000.0
        return {
            "p1q": _as_array(self.p1, n),
            "gad1": 1.0 - np.exp(-d1 / t1),
            "f1": np.exp(-d1 / t2),
            "p2": float(self.p2),
            "gad2": 1.0 - np.exp(-d2 / t1),
            "f2": np.exp(-d2 / t2),
        }

    def confusion(self, n: int) -> np.ndarray:
        """(n, 2, 2) readout matrices, rows [P(read 0|b), P(read 1|b)] for b = 0, 1."""
        p01 = _as_array(self.readout_p01, n)
        p10 = _as_array(self.readout_p10, n)
        out = np.empty((n, 2, 2), dtype=float)
        out[:, 0, 0] = 1.0 - p01
        out[:, 0, 1] = p01
        out[:, 1, 0] = p10
        out[:, 1, 1] = 1.0 - p10
        rowsums = out.sum(axis=2)
        if np.any(np.abs(rowsums - 1.0) > 1e-9):
            raise ContractViolation("confusion matrix rows must sum to 1")
        return out


def _field_value(raw: dict, name: str, errors: list[str]):
    value = raw[name]
    scalar_only = name in ("p2", "dur_1q_ns", "dur_2q_ns")
    if isinstance(value, (list, tuple)):
        if scalar_only:
            errors.append(f"{name}: must be a scalar")
            return None
        try:
            return tuple(float(v) for v in value)
        except (TypeError, ValueError):
            errors.append(f"{name}: list entries must be numbers")
            return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append(f"{name}: must be a number")
        return None
    return float(value)


def parse_calibration(text: str) -> NoiseModel:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise CalibrationError(f"calibration is not valid YAML: {exc}") from None
    if not isinstance(raw, dict):
        raise CalibrationError("calibration must be a mapping of fields to values")
    errors = [f"unknown field {key!r}" for key in sorted(set(raw) - set(CALIBRATION_FIELDS))]
    errors += [f"missing field {name!r}" for name in CALIBRATION_FIELDS if name not in raw]
    values = {}
    for name in CALIBRATION_FIELDS:
        if name in raw:
            parsed = _field_value(raw, name, errors)
            if parsed is not None:
                values[name] = parsed
    if errors:
        raise CalibrationError("; ".join(errors))
    try:
        return NoiseModel(**values)
    except ContractViolation as exc:
        raise CalibrationError(str(exc)) from None


def load_calibration(path) -> NoiseModel:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_calibration(text)
    except CalibrationError as exc:
        raise CalibrationError(f"{path}: {exc}") from None
