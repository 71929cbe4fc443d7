"""Experiment configuration: JSON in, validated dataclasses out.

Coefficient specs take one of four forms:

``"identity"``
    H = 1.
``"scalar:<c>"``
    H = c * 1 for a real c.
``"random:<band>,<magnitude>"``
    identity plus a seeded random perturbation whose entries are supported
    on exponents |s| <= band and have norm ``magnitude``.
``{"table": [[cell, ...], ...]}``
    an explicit d x d table; each cell is a list of ``[m, n, re, im]`` terms
    giving the Fourier coefficients of that entry.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields

MODES = ("axioms", "bound", "converge", "mk", "sandwich")
Q_RANGE = (2, 8)
U64_MAX = 2**64 - 1


class ConfigError(ValueError):
    """Invalid configuration; ``errors`` holds one ``field: message`` string per problem."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class CoefficientSpec:
    kind: str  # identity | scalar | random | table
    scalar: float = 1.0
    band: int = 1
    magnitude: float = 0.3
    table: tuple = ()

    def to_json(self):
        if self.kind == "identity":
            return "identity"
        if self.kind == "scalar":
            return f"scalar:{self.scalar!r}"
        if self.kind == "random":
            return f"random:{self.band},{self.magnitude!r}"
        return {"table": [[[list(t) for t in cell] for cell in row] for row in self.table]}


@dataclass(frozen=True)
class Schedule:
    length: int = 8
    decay: float = 0.5


@dataclass(frozen=True)
class Budgets:
    restarts: int = 64
    iterations: int = 100
    samples: int = 32


@dataclass(frozen=True)
class ExperimentConfig:
    q: int = 3
    p: int = 1
    d: int = 2
    seed: int = 0
    mode: str = "bound"
    H_spec: CoefficientSpec = field(default_factory=lambda: CoefficientSpec("identity"))
    Hprime_spec: CoefficientSpec = field(default_factory=lambda: CoefficientSpec("identity"))
    schedule: Schedule = field(default_factory=Schedule)
    budgets: Budgets = field(default_factory=Budgets)
    out: str = "results"
    workers: int = 1

    def replace(self, **changes) -> "ExperimentConfig":
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update(changes)
        return ExperimentConfig(**data)


DEFAULTS_HELP = """\
config keys (JSON object, all optional):
  q            matrix size, 2..8                         (default 3)
  p            numerator of theta = p/q, gcd(p, q) = 1   (default 1)
  d            number of derivations / Clifford dim      (default 2)
  seed         master seed, 0..2^64-1                    (default 0)
  mode         axioms | bound | converge | mk | sandwich  (default bound)
  H_spec       identity | scalar:<c> | random:<band>,<magnitude> | {"table": ...}
  Hprime_spec  same forms                                (both default identity)
  schedule     {"length": 8, "decay": 0.5}; H_n = H + decay^n (H' - H), n = 1..length
  budgets      {"restarts": 64, "iterations": 100, "samples": 32}
  out          output directory                          (default results)
  workers      thread count for restarts and rows        (default 1)
"""


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_real(x) -> bool:
    return (isinstance(x, (int, float)) and not isinstance(x, bool)) and math.isfinite(x)


def _parse_spec(value, name: str, d, errors: list[str]) -> CoefficientSpec | None:
    if isinstance(value, str):
        kind, _, arg = value.partition(":")
        kind = kind.strip()
        if kind == "identity" and not arg:
            return CoefficientSpec("identity")
        if kind == "scalar":
            try:
                c = float(arg)
            except ValueError:
                errors.append(f"{name}: malformed number in {value!r}")
                return None
            if not math.isfinite(c) or c == 0:
                errors.append(f"{name}: scalar must be finite and nonzero")
                return None
            return CoefficientSpec("scalar", scalar=c)
        if kind == "random":
            parts = arg.split(",")
            if len(parts) != 2:
                errors.append(f"{name}: expected random:<band>,<magnitude>, got {value!r}")
                return None
            try:
                band, mag = int(parts[0]), float(parts[1])
            except ValueError:
                errors.append(f"{name}: malformed number in {value!r}")
                return None
            if band < 0 or not math.isfinite(mag) or mag < 0:
                errors.append(f"{name}: band and magnitude must be nonnegative")
                return None
            return CoefficientSpec("random", band=band, magnitude=mag)
        errors.append(f"{name}: unknown spec {value!r}")
        return None
    if isinstance(value, dict):
        extra = set(value) - {"table"}
        if extra or "table" not in value:
            errors.append(f"{name}: table spec must be {{'table': [...]}} (unknown keys {sorted(extra)})")
            return None
        rows = value["table"]
        ok = isinstance(rows, list) and all(isinstance(r, list) for r in rows)
        if ok and _is_int(d) and (len(rows) != d or any(len(r) != d for r in rows)):
            errors.append(f"{name}: table must be {d} x {d}")
            return None
        table = []
        for row in rows if ok else []:
            trow = []
            for cell in row:
                if not isinstance(cell, list):
                    ok = False
                    break
                terms = []
                for term in cell:
                    if not (
                        isinstance(term, list)
                        and len(term) == 4
                        and _is_int(term[0])
                        and _is_int(term[1])
                        and _is_real(term[2])
                        and _is_real(term[3])
                    ):
                        ok = False
                        break
                    terms.append((term[0], term[1], float(term[2]), float(term[3])))
                trow.append(tuple(terms))
            table.append(tuple(trow))
        if not ok:
            errors.append(f"{name}: table cells must be lists of [m, n, re, im] terms")
            return None
        return CoefficientSpec("table", table=tuple(table))
    errors.append(f"{name}: expected a string or a table object")
    return None


def _parse_section(value, name: str, cls, checks, errors: list[str]):
    if not isinstance(value, dict):
        errors.append(f"{name}: expected an object")
        return None
    known = {f.name for f in fields(cls)}
    for key in sorted(set(value) - known):
        errors.append(f"{name}.{key}: unknown key")
    kwargs = {}
    for key in known & set(value):
        v = value[key]
        check, msg = checks[key]
        if not check(v):
            errors.append(f"{name}.{key}: {msg}, got {v!r}")
        else:
            kwargs[key] = v
    return cls(**kwargs)


def config_from_dict(data) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError(["<root>: expected a JSON object"])
    errors: list[str] = []
    known = {f.name for f in fields(ExperimentConfig)}
    for key in sorted(set(data) - known):
        errors.append(f"{key}: unknown key")
    kw = {}

    def scalar(key, check, msg):
        if key in data:
            if check(data[key]):
                kw[key] = data[key]
            else:
                errors.append(f"{key}: {msg}, got {data[key]!r}")

    scalar("q", lambda v: _is_int(v) and Q_RANGE[0] <= v <= Q_RANGE[1], f"must be an integer in {Q_RANGE[0]}..{Q_RANGE[1]}")
    scalar("p", _is_int, "must be an integer")
    scalar("d", lambda v: _is_int(v) and v >= 1, "must be an integer >= 1")
    scalar("seed", lambda v: _is_int(v) and 0 <= v <= U64_MAX, "must be an unsigned 64-bit integer")
    scalar("mode", lambda v: v in MODES, f"must be one of {', '.join(MODES)}")
    scalar("out", lambda v: isinstance(v, str) and v != "", "must be a nonempty string")
    scalar("workers", lambda v: _is_int(v) and v >= 1, "must be an integer >= 1")
    q, p = kw.get("q", ExperimentConfig.q), kw.get("p", ExperimentConfig.p)
    if ("q" in kw or "q" not in data) and ("p" in kw or "p" not in data):
        if math.gcd(p, q) != 1:
            errors.append(f"p: gcd(p, q) must be 1 (coprimality rule), got p={p}, q={q}")
    d = data.get("d", ExperimentConfig.d)
    for key in ("H_spec", "Hprime_spec"):
        if key in data:
            spec = _parse_spec(data[key], key, d, errors)
            if spec is not None:
                kw[key] = spec
    if "schedule" in data:
        sched = _parse_section(
            data["schedule"],
            "schedule",
            Schedule,
            {
                "length": (lambda v: _is_int(v) and v >= 1, "must be an integer >= 1"),
                "decay": (lambda v: _is_real(v) and 0 < v < 1, "must lie in (0, 1)"),
            },
            errors,
        )
        if sched is not None:
            kw["schedule"] = sched
    if "budgets" in data:
        positive = (lambda v: _is_int(v) and v >= 1, "must be an integer >= 1")
        budgets = _parse_section(
            data["budgets"],
            "budgets",
            Budgets,
            {"restarts": positive, "iterations": positive, "samples": positive},
            errors,
        )
        if budgets is not None:
            kw["budgets"] = budgets
    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(**kw)


def parse_config(text: str) -> ExperimentConfig:
    """Parse JSON text into a validated config; raises ConfigError listing every problem."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"<json>: {exc.msg} at line {exc.lineno} column {exc.colno}"]) from None
    return config_from_dict(data)


def config_to_dict(cfg: ExperimentConfig) -> dict:
    out = asdict(cfg)
    out["H_spec"] = cfg.H_spec.to_json()
    out["Hprime_spec"] = cfg.Hprime_spec.to_json()
    return out


def serialize_config(cfg: ExperimentConfig) -> str:
    """Canonical JSON: sorted keys, every field present, specs in normalized form."""
    return json.dumps(config_to_dict(cfg), sort_keys=True, indent=2) + "\n"
