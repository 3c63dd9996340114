"""JSON and CSV interchange for the command line."""

import csv
import io
import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from .errors import DomainError, InputError
from .lattice_core import build_lattice
from .narain_momenta import HeteroticTriplet
from .parabolic_group import ParabolicElement
from .stable_family import SpecialFamily, psi_values
from .theta_characters import QExpansion

logger = logging.getLogger(__name__)


def _default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"{type(obj).__name__} is not JSON serializable")


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_default)


def read_json(path: str | Path) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InputError(f"cannot read file ({e.strerror})", str(path)) from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(e.msg, f"{path}:{e.lineno}:{e.colno}") from e


def decode_complex(value, location: str = "") -> complex:
    """[re, im], a bare number or the string "re,im"."""
    try:
        if isinstance(value, str):
            parts = [float(p) for p in value.split(",")]
            if len(parts) == 1:
                return complex(parts[0])
            re, im = parts
            return complex(re, im)
        if isinstance(value, (list, tuple)):
            re, im = value
            return complex(float(re), float(im))
        return complex(float(value))
    except (TypeError, ValueError) as e:
        raise InputError(f"expected a complex number as [re, im], got {value!r}", location) from e


def decode_vector(value, length: int, location: str = "", dtype=float) -> np.ndarray:
    if not isinstance(value, list) or len(value) != length:
        raise InputError(f"expected a list of {length} numbers", location)
    try:
        if dtype is complex:
            return np.array([decode_complex(v, f"{location}[{i}]") for i, v in enumerate(value)])
        return np.array(value, dtype=dtype)
    except (TypeError, ValueError) as e:
        raise InputError(str(e), location) from e


def _require(data, keys: tuple[str, ...], location: str):
    if not isinstance(data, dict):
        raise InputError("expected a JSON object", location)
    missing = [k for k in keys if k not in data]
    if missing:
        raise InputError(f"missing key(s) {', '.join(missing)}", location)


def load_element(path: str | Path) -> ParabolicElement:
    data = read_json(path)
    _require(data, ("m", "Q", "R", "f"), str(path))
    try:
        return ParabolicElement.from_dict(data)
    except (TypeError, ValueError) as e:
        if isinstance(e, DomainError):
            raise InputError(str(e), str(path)) from e
        raise InputError(f"malformed element ({e})", str(path)) from e


def load_family(path: str | Path) -> SpecialFamily:
    data = read_json(path)
    _require(data, ("category", "t", "tau", "p0", "q0", "points"), str(path))
    try:
        return SpecialFamily.from_dict(data)
    except (TypeError, ValueError) as e:
        raise InputError(f"malformed family ({e})", str(path)) from e


def load_psi(path: str | Path, tau: complex, lattice_name: str) -> list[complex]:
    """Sixteen ψ values, given directly ({"psi": [...]}) or through z ({"z": [...]})."""
    data = read_json(path)
    loc = str(path)
    if isinstance(data, list):
        data = {"psi": data}
    if isinstance(data, dict) and "z" in data:
        rank = build_lattice(lattice_name).rank
        z = decode_vector(data["z"], rank, f"{loc}:z", complex)
        return [p.value for p in psi_values(lattice_name, tau, z)]
    _require(data, ("psi",), loc)
    values = data["psi"]
    if not isinstance(values, list) or len(values) != 16:
        raise InputError("expected sixteen ψ values", f"{loc}:psi")
    return [decode_complex(v, f"{loc}:psi[{i}]") for i, v in enumerate(values)]


def load_wilson(path: str | Path, rank: int) -> tuple[np.ndarray, np.ndarray]:
    data = read_json(path)
    loc = str(path)
    _require(data, ("z1", "z2"), loc)
    return decode_vector(data["z1"], rank, f"{loc}:z1"), decode_vector(data["z2"], rank, f"{loc}:z2")


def triplet_from_args(metric: str, b_field: float, wilson: str | None, lattice_name: str) -> HeteroticTriplet:
    try:
        g11, g12, g22 = (float(x) for x in metric.split(","))
    except ValueError as e:
        raise InputError("metric must be g11,g12,g22", "--metric") from e
    lattice = build_lattice(lattice_name)
    if wilson is None:
        z1 = z2 = np.zeros(lattice.rank)
    else:
        z1, z2 = load_wilson(wilson, lattice.rank)
    return HeteroticTriplet([[g11, g12], [g12, g22]], b_field, z1, z2, lattice)


def expansion_to_csv(expansion: QExpansion, with_exponents: bool = False) -> str:
    """One row of coefficients, or exponent,coefficient rows."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if with_exponents:
        writer.writerow(["exponent", "coefficient"])
        writer.writerows([str(e), v] for e, v in expansion.coefficients)
    else:
        writer.writerow(expansion.values)
    return buf.getvalue()
