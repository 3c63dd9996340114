"""JSON-based persistent run configuration."""

import json
import logging
from dataclasses import dataclass, field, fields, asdict, replace
from pathlib import Path

from .errors import DomainError
from .platform_utils import get_config_dir

logger = logging.getLogger(__name__)

LATTICES = ("e8e8", "gamma16")
CONVENTIONS = ("body", "appendix")


@dataclass
class RunConfig:
    seed: int = 20240521
    lattice: str = "e8e8"
    convention: str = "body"
    samples: int = 1000
    structural_tol: float = 1e-12
    automorphy_tol: float = 1e-9
    character_tol: float = 1e-8
    equality_tol: float = 1e-7
    family_tol: float = 1e-9
    theta_max_norm: int = 8
    theta_min_im_tau: float = 0.05
    threads: int = 0

    _path: Path = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self._path is None:
            self._path = get_config_dir() / "config.json"

    @classmethod
    def load(cls, path: Path | None = None, create: bool = False) -> "RunConfig":
        path = Path(path) if path is not None else get_config_dir() / "config.json"
        if path.exists():
            try:
                data = json.loads(path.read_text())
                data.pop("_path", None)
                cfg = cls(**{k: v for k, v in data.items()
                             if k in cls.__dataclass_fields__})
                cfg._path = path
                return cfg
            except (json.JSONDecodeError, TypeError):
                logger.warning("Ignoring unreadable config %s, using defaults", path)
        cfg = cls()
        cfg._path = path
        if create:
            cfg.save()
        return cfg

    def save(self):
        self._path.parent.mkdir(parents=True, exist_ok=True)
        self._path.write_text(json.dumps(self.to_dict(), indent=2))

    def to_dict(self) -> dict:
        data = asdict(self)
        data.pop("_path", None)
        return data

    def override(self, **changes) -> "RunConfig":
        """Copy with the non-None `changes` applied."""
        cfg = replace(self, **{k: v for k, v in changes.items() if v is not None})
        cfg._path = self._path
        return cfg

    def _check_types(self):
        for f in fields(self):
            if f.name.startswith("_"):
                continue
            value = getattr(self, f.name)
            if f.type is float and isinstance(value, int) and not isinstance(value, bool):
                value = float(value)
                setattr(self, f.name, value)
            if isinstance(value, bool) or not isinstance(value, f.type):
                raise DomainError(f"{f.name} must be {f.type.__name__}, got {value!r}")

    def validate(self) -> "RunConfig":
        self._check_types()
        if self.samples < 1:
            raise DomainError(f"samples must be >= 1, got {self.samples}")
        if self.lattice not in LATTICES:
            raise DomainError(f"unknown lattice {self.lattice!r}")
        if self.convention not in CONVENTIONS:
            raise DomainError(f"unknown convention {self.convention!r}")
        for name in ("structural_tol", "automorphy_tol", "character_tol",
                     "equality_tol", "family_tol", "theta_min_im_tau"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.theta_max_norm < 2 or self.theta_max_norm % 2:
            raise DomainError("theta_max_norm must be an even integer >= 2")
        return self
