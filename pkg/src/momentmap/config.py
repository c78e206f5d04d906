"""Scenario configuration: a single JSON document with row-major matrices."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .basis import HermitianBasis, LambdaParam, build_basis, lambda_from_factor
from .errors import ConfigError
from .filters import make_grid, shift_filter
from .maps import MomentProblem, PriorFactor

FULL_GRID_DELTA_THETA = 1e-4


@dataclass
class Tolerances:
    tol_t: float = 1e-8
    residual_tol: float = 1e-8
    rank_threshold: float = 1e-8
    cond_max: float = 1e10


@dataclass
class ScenarioConfig:
    m: int
    p: int
    delta_theta: float
    K: np.ndarray | None
    factors: dict[str, np.ndarray]
    path: tuple[str, str]
    continuation_start: str
    continuation_target: str
    tolerances: Tolerances = field(default_factory=Tolerances)
    scan_samples: int = 11
    seed: int = 0
    name: str = ""
    golden: dict = field(default_factory=dict)
    digest: str = ""

    @property
    def n(self) -> int:
        return self.m * (self.p + 1)

    def basis(self) -> HermitianBasis:
        return build_basis(self.m, self.p)

    def problem(self, summation: str = "sequential") -> MomentProblem:
        return MomentProblem(
            shift_filter(self.m, self.p),
            PriorFactor(self.K),
            self.basis(),
            make_grid(self.delta_theta),
            summation,
        )

    def lambda_for(self, name: str, basis: HermitianBasis | None = None) -> LambdaParam:
        basis = basis or self.basis()
        if name == "identity":
            return LambdaParam.from_coords(basis.coords(np.eye(self.n)), basis)
        return lambda_from_factor(self.factors[name], basis)


def _matrix(entry, what: str) -> np.ndarray:
    try:
        shape = tuple(int(s) for s in entry["shape"])
        data = np.asarray(entry["data"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{what}: expected {{'shape': [r, c], 'data': [...]}}") from exc
    if len(shape) != 2 or data.size != shape[0] * shape[1]:
        raise ConfigError(f"{what}: {data.size} entries do not fill shape {shape}")
    return data.reshape(shape)


def parse_config(doc: dict, digest: str = "") -> ScenarioConfig:
    try:
        m, p = int(doc["m"]), int(doc["p"])
        delta_theta = float(doc.get("delta_theta", 1e-3))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"missing or malformed field: {exc}") from exc
    if m < 1 or p < 1:
        raise ConfigError(f"need m >= 1 and p >= 1, got m={m}, p={p}")
    if not 0 < delta_theta <= 2 * np.pi:
        raise ConfigError(f"delta_theta must lie in (0, 2pi], got {delta_theta}")
    n = m * (p + 1)

    K = None
    if doc.get("K") is not None:
        K = _matrix(doc["K"], "K")
        if K.shape != (m, n):
            raise ConfigError(f"K must be {m}x{n}, got {K.shape}")

    factors: dict[str, np.ndarray] = {}
    for i, entry in enumerate(doc.get("C_list", [])):
        name = str(entry.get("name", f"C{i}"))
        C = _matrix(entry, f"C_list[{i}] ({name})")
        if C.shape != (m, n):
            raise ConfigError(f"factor {name} must be {m}x{n}, got {C.shape}")
        if name in factors or name == "identity":
            raise ConfigError(f"duplicate or reserved factor name {name!r}")
        factors[name] = C

    known = set(factors) | {"identity"}
    names = list(factors)
    path = tuple(doc.get("path", names[:2]))
    if len(path) != 2 or not set(path) <= known:
        raise ConfigError(f"path must name two factors from {sorted(known)}, got {list(path)}")
    cont = doc.get("continuation", {})
    start = cont.get("start", path[0])
    target = cont.get("target", path[1])
    if start not in known or target not in known:
        raise ConfigError(f"continuation start/target must be among {sorted(known)}")

    tol_doc = doc.get("tolerances", {})
    tolerances = Tolerances(**{k: float(v) for k, v in tol_doc.items()
                               if k in Tolerances.__dataclass_fields__})
    unknown = set(tol_doc) - set(Tolerances.__dataclass_fields__)
    if unknown:
        raise ConfigError(f"unknown tolerance fields {sorted(unknown)}")
    for key, value in vars(tolerances).items():
        if not value > 0:
            raise ConfigError(f"tolerance {key} must be positive, got {value}")
    scan_samples = int(doc.get("scan_samples", 11))
    if scan_samples < 2:
        raise ConfigError("scan_samples must be at least 2")

    return ScenarioConfig(
        m=m, p=p, delta_theta=delta_theta, K=K, factors=factors, path=path,
        continuation_start=start, continuation_target=target,
        tolerances=tolerances, scan_samples=scan_samples,
        seed=int(doc.get("seed", 0)), name=str(doc.get("name", "")),
        golden=doc.get("golden", {}), digest=digest,
    )


def load_config(path: str | Path) -> ScenarioConfig:
    try:
        raw = Path(path).read_bytes()
        doc = json.loads(raw)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return parse_config(doc, hashlib.sha256(raw).hexdigest())


def bundled_config_path() -> Path:
    return Path(str(resources.files("momentmap") / "data" / "paper.json"))


def bundled_config() -> ScenarioConfig:
    """The bundled counterexample scenario."""
    return load_config(bundled_config_path())
