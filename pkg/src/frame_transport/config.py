"""Flat ``key=value`` run configuration.

One assignment per line; ``#`` starts a comment.  Required keys are
``scenario`` and ``dt``; the remaining keys depend on the scenario::

    scenario=su2_cone
    theta=1.0471975512
    omega=1.0
    dt=0.001

Generator pairs are written one-based (``1,2;4,5``) as in the CSV output
and converted to zero-based indices on parsing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

REQUIRED = ("scenario", "dt")
FORMATS = ("csv", "json")
MAX_N = 8

# key -> (type, default); None default means "required"
COMMON_KEYS = {
    "scenario": (str, None),
    "dt": (float, None),
    "pairs": (str, "cartan"),
    "mix": (str, "none"),
    "corrector_iterations": (int, 2),
    "convergence_tol": (float, 1e-2),
    "out": (str, "out"),
    "format": (str, "csv,json"),
}
SCENARIO_KEYS = {
    "su2_cone": {
        "theta": (float, math.pi / 3),
        "omega": (float, 1.0),
    },
    "random_horizontal": {
        "n": (int, 2),
        "seed": (int, 0),
        "K": (int, 3),
        "T": (float, 10.0),
    },
}


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending field."""

    def __init__(self, key, msg):
        super().__init__(f"{key}: {msg}")
        self.key = key


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    dt: float
    params: dict
    pairs: str = "cartan"
    mix: str = "none"
    corrector_iterations: int = 2
    convergence_tol: float = 1e-2
    out: str = "out"
    formats: tuple = FORMATS
    raw: dict = field(default_factory=dict, compare=False)

    def echo(self) -> dict:
        """Canonical key=value mapping that reproduces this config."""
        d = {
            "scenario": self.scenario,
            "dt": repr(self.dt),
            "pairs": self.pairs,
            "mix": self.mix,
            "corrector_iterations": str(self.corrector_iterations),
            "convergence_tol": repr(self.convergence_tol),
        }
        d.update({k: repr(v) for k, v in sorted(self.params.items())})
        return d

    def to_text(self) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.echo().items())

    def with_overrides(self, **kw) -> "RunConfig":
        """Copy with some fields replaced and re-validated."""
        raw = dict(self.raw)
        raw.update({k: str(v) for k, v in kw.items() if v is not None})
        return parse_mapping(raw)


def _convert(key, value, typ):
    try:
        if typ is int:
            if value.strip().lstrip("+-").isdigit():
                return int(value)
            raise ValueError
        if typ is float:
            x = float(value)
            if not math.isfinite(x):
                raise ValueError
            return x
    except ValueError:
        raise ConfigError(key, f"expected {typ.__name__}, got {value!r}") from None
    return value.strip()


def _tokenize(text):
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected key=value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}", "empty key")
        if key in raw:
            raise ConfigError(key, "duplicate key")
        raw[key] = value
    return raw


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document."""
    return parse_mapping(_tokenize(text))


def parse_mapping(raw: dict) -> RunConfig:
    missing = [k for k in REQUIRED if k not in raw]
    if missing:
        raise ConfigError(missing[0], f"missing required keys: {', '.join(missing)}")
    scenario = raw["scenario"].strip()
    if scenario not in SCENARIO_KEYS:
        raise ConfigError(
            "scenario", f"unknown scenario {scenario!r}; choose from {sorted(SCENARIO_KEYS)}"
        )
    allowed = {**COMMON_KEYS, **SCENARIO_KEYS[scenario]}
    for key in raw:
        if key not in allowed:
            raise ConfigError(key, f"unknown key for scenario {scenario!r}")
    vals = {}
    for key, (typ, default) in allowed.items():
        vals[key] = _convert(key, raw[key], typ) if key in raw else default

    _check_ranges(scenario, vals)
    params = {k: vals[k] for k in SCENARIO_KEYS[scenario]}
    formats = tuple(f.strip() for f in vals["format"].split(",") if f.strip())
    bad = [f for f in formats if f not in FORMATS]
    if bad or not formats:
        raise ConfigError("format", f"formats must be a subset of {FORMATS}, got {vals['format']!r}")
    d = params["n"] ** 2 - 1 if scenario == "random_horizontal" else 3
    n = params.get("n", 2)
    parse_pair_spec(vals["pairs"], d)
    parse_mix_spec(vals["mix"], n)
    return RunConfig(
        scenario=scenario,
        dt=vals["dt"],
        params=params,
        pairs=vals["pairs"],
        mix=vals["mix"],
        corrector_iterations=vals["corrector_iterations"],
        convergence_tol=vals["convergence_tol"],
        out=vals["out"],
        formats=formats,
        raw=dict(raw),
    )


def _check_ranges(scenario, v):
    def need(key, ok, what):
        if not ok:
            raise ConfigError(key, f"{what}, got {v[key]!r}")

    need("dt", v["dt"] > 0, "must be > 0")
    need("corrector_iterations", v["corrector_iterations"] >= 1, "must be >= 1")
    need("convergence_tol", v["convergence_tol"] > 0, "must be > 0")
    if scenario == "su2_cone":
        need("theta", 0 < v["theta"] < math.pi, "must lie in (0, pi)")
        need("omega", v["omega"] > 0, "must be > 0")
        need("dt", v["dt"] <= 2 * math.pi / v["omega"], "must not exceed the period")
    else:
        need("n", 2 <= v["n"] <= MAX_N, f"must lie in [2, {MAX_N}]")
        need("K", v["K"] >= 1, "must be >= 1")
        need("T", v["T"] > 0, "must be > 0")
        need("seed", v["seed"] >= 0, "must be >= 0")
        need("dt", v["dt"] <= v["T"], "must not exceed T")


def parse_pair_spec(spec: str, d: int):
    """``'cartan'``, ``'non-cartan'``, ``'all'`` or explicit one-based pairs.

    Explicit pairs are returned as zero-based tuples; keywords are returned
    unchanged for the caller to resolve against a basis.
    """
    spec = spec.strip()
    if spec in ("cartan", "non-cartan", "all"):
        return spec
    pairs = []
    for chunk in spec.split(";"):
        parts = chunk.split(",")
        try:
            a, b = (int(p) for p in parts)
        except ValueError:
            raise ConfigError("pairs", f"cannot parse pair {chunk!r}") from None
        if not (1 <= a <= d and 1 <= b <= d) or a == b:
            raise ConfigError("pairs", f"pair {chunk!r} out of range 1..{d} or repeated")
        pairs.append((a - 1, b - 1))
    return pairs


def parse_mix_spec(spec: str, n: int):
    """Return ``None`` or a ``(kind, values)`` tuple for a mixing matrix.

    Kinds: ``identity``, ``phases:p1,...,pn``, ``rotation:angle`` (rotation
    of the first two basis states by ``angle``), ``haar:seed``.
    """
    spec = spec.strip()
    if spec == "none":
        return None
    kind, _, arg = spec.partition(":")
    try:
        if kind == "identity" and not arg:
            return ("identity", ())
        if kind == "phases":
            vals = tuple(float(x) for x in arg.split(","))
            if len(vals) == n:
                return ("phases", vals)
            raise ConfigError("mix", f"phases needs {n} values, got {len(vals)}")
        if kind == "rotation":
            return ("rotation", (float(arg) if arg else math.pi / 2,))
        if kind == "haar":
            seed = int(arg)
            if seed < 0:
                raise ValueError
            return ("haar", (seed,))
    except ConfigError:
        raise
    except ValueError:
        raise ConfigError("mix", f"cannot parse {spec!r}") from None
    raise ConfigError("mix", f"unknown mixing spec {spec!r}")
