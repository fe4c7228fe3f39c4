"""Config documents: JSON files describing a risk, an investor and an operator."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from .allocation import PortfolioModel
from .errors import ConfigError, PossallocError
from .fuzzy import FuzzyNumber, WeightingFunction, fuzzy_from_dict, weighting_from_dict
from .operators import EUOperator
from .oracle import FocSolverConfig
from .utility import UtilityModel, utility_from_dict

FORMATS = ("table", "csv", "json")


def load_document(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"{path}: no such config file")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return doc


def _section(doc: dict, key: str, required: bool = True):
    if key not in doc:
        if required:
            raise ConfigError(f"{key}: missing required field")
        return None
    value = doc[key]
    if not isinstance(value, dict):
        raise ConfigError(f"{key}: expected an object")
    return value


def _number(doc: dict, key: str, default=None, where: str = "") -> float:
    name = f"{where}{key}"
    if key not in doc or doc[key] is None:
        if default is None:
            raise ConfigError(f"{name}: missing required number")
        return default
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{name}: expected a number, got {v!r}")
    return float(v)


def _build(what: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except KeyError as e:
        raise ConfigError(f"{what}: missing field {e.args[0]!r}") from None
    except (TypeError, ValueError, PossallocError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"{what}: {e}") from None


def parse_weighting(doc: dict) -> WeightingFunction:
    return _build("weighting", weighting_from_dict, _section(doc, "weighting", required=False))


def parse_operator(doc: dict, nodes: int | None = None) -> EUOperator:
    spec = _section(doc, "operator", required=False) or {}
    weighting = parse_weighting(doc)
    outer = int(_number(spec, "outer_nodes", 64, "operator."))
    inner = int(_number(spec, "inner_nodes", 32, "operator."))
    if nodes is not None:
        outer = nodes
    return _build("operator", EUOperator, spec.get("kind", "T1"), weighting, outer, inner)


def parse_fuzzy(doc: dict, key: str) -> FuzzyNumber:
    return _build(key, fuzzy_from_dict, _section(doc, key))


def parse_utility(doc: dict, validate: bool = True) -> UtilityModel:
    spec = dict(_section(doc, "utility"))
    if "domain" in spec:
        spec["domain"] = [math.inf if v is None and i else -math.inf if v is None else v
                          for i, v in enumerate(spec["domain"])]
    return _build("utility", utility_from_dict, spec, validate=validate)


def parse_solver(doc: dict) -> FocSolverConfig:
    spec = _section(doc, "solver", required=False) or {}
    known = {f.name for f in fields(FocSolverConfig)}
    unknown = set(spec) - known
    if unknown:
        raise ConfigError(f"solver: unknown field(s) {sorted(unknown)}")
    return _build("solver", FocSolverConfig, **spec)


def risk_for_moments(doc: dict) -> FuzzyNumber:
    if "risk" in doc:
        return parse_fuzzy(doc, "risk")
    if "return" in doc:
        return parse_fuzzy(doc, "return")
    raise ConfigError("risk: missing required field (or give 'return')")


def parse_model(doc: dict, k: float | None = None, nodes: int | None = None,
                validate_utility: bool = True) -> PortfolioModel:
    """Build the portfolio model; ``k`` overrides the document value."""
    operator = parse_operator(doc, nodes)
    utility = parse_utility(doc, validate_utility)
    w0 = _number(doc, "w0")
    r = _number(doc, "r", 0.0)
    if "return" in doc and "risk" not in doc:
        B0 = parse_fuzzy(doc, "return")
        mu = doc.get("mu")
        kk = k if k is not None else doc.get("k")
        return _build("model", PortfolioModel.from_return, B0, r, w0, utility, operator,
                      k=kk, mu=mu)
    A = parse_fuzzy(doc, "risk")
    mu = _number(doc, "mu", 1.0)
    kk = k if k is not None else _number(doc, "k", 0.0)
    return _build("model", PortfolioModel, w0, r, kk, mu, A, utility, operator)


@dataclass
class RunConfig:
    """Resolved settings for one CLI invocation (flags > file > defaults)."""

    command: str
    document: dict = field(default_factory=dict)
    k: float | None = None
    order: int = 3
    nodes: int | None = None
    output_format: str = "table"
    k_min: float | None = None
    k_max: float | None = None
    steps: int | None = None
    verbose: bool = False

    def __post_init__(self):
        if self.output_format not in FORMATS:
            raise ConfigError(f"format: expected one of {FORMATS}, got {self.output_format!r}")
        if self.order not in (2, 3):
            raise ConfigError(f"order: expected 2 or 3, got {self.order}")
        if self.nodes is not None and self.nodes < 8:
            raise ConfigError("nodes: at least 8 quadrature nodes required")

    def sweep_range(self) -> tuple[float, float, int]:
        spec = self.document.get("sweep") or {}
        k_min = self.k_min if self.k_min is not None else _number(spec, "k_min", where="sweep.")
        k_max = self.k_max if self.k_max is not None else _number(spec, "k_max", where="sweep.")
        steps = self.steps if self.steps is not None else int(_number(spec, "steps", where="sweep."))
        if k_min < 0:
            raise ConfigError(f"sweep.k_min: must be >= 0, got {k_min}")
        if k_max < k_min:
            raise ConfigError("sweep.k_max: must be >= k_min")
        if steps < 2:
            raise ConfigError(f"sweep.steps: must be >= 2, got {steps}")
        return k_min, k_max, steps
