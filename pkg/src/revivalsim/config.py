"""Run configuration: TOML loading, defaults, overrides, validation.

One structured text file drives every mode; any scalar key can be
overridden from the command line as ``--set section.key=value``. The fully
resolved dictionary is what the manifest records, so a rerun consumes it
without touching the original file.
"""

from __future__ import annotations

import copy
import math
import sys
from dataclasses import dataclass

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from .errors import ConfigError
from .params import DimensionlessParams, PhysicalParams, reduce
from .quantum import suggest_dim

MODES = ("curve", "compare", "entanglement-scan", "decompose", "headline-check")

# Auto-chosen truncations beyond this are a desk-scale guard violation:
# almost certainly an SI parameter set meant for the analytic engines only.
DIM_GUARD = 4096
_DIM_WARN = 1024

_TWO_PI = 2.0 * math.pi

DEFAULTS: dict = {
    "mode": "curve",
    "grid": {"start": 0.0, "stop": 2.0 * _TWO_PI, "steps": 201},
    "engines": {
        "semiclassical": True,
        "quantum_analytic": True,
        "quantum_numeric": False,
        "mc": False,
        "negativity": False,
        "entropy": False,
        "weight_separable": True,
    },
    "mc": {"samples": 100_000},
    "truncation": {"dim": 0, "pad": 16, "tail_tol": 1e-10},
    "scan": {"nbars": [0.0, 1.0, 2.0, 4.0, 8.0], "omega_t": math.pi},
    "point": {"omega_t": math.pi},
    "headline": {"nbar": 1e15, "dip_ground_target": 1e-24, "reference_thermal_dip": 1e-10},
    "output": {"directory": "out", "svg": False},
}

_PARAM_SECTIONS = ("dimensionless", "physical")
_KNOWN_SECTIONS = set(DEFAULTS) | set(_PARAM_SECTIONS)


@dataclass(frozen=True)
class Diagnostic:
    level: str  # "error" | "warning" | "info"
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.level}: [{self.code}] {self.message}"


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def load_config(path: str) -> dict:
    """Parse the TOML file and merge it over the defaults."""
    with open(path, "rb") as handle:
        try:
            user = _toml.load(handle)
        except _toml.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return _merge(DEFAULTS, user)


def resolve_config(user: dict) -> dict:
    """Merge an already-parsed dictionary (e.g. from a manifest) over defaults."""
    return _merge(DEFAULTS, user)


def parse_override(text: str) -> tuple[list[str], object]:
    """Parse one ``section.key=value`` override; values use TOML scalar syntax."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} must look like section.key=value")
    raw_key, raw_value = text.split("=", 1)
    path = [part.strip() for part in raw_key.strip().split(".")]
    if not all(path):
        raise ConfigError(f"override {text!r} has an empty key component")
    try:
        value = _toml.loads(f"v = {raw_value.strip()}")["v"]
    except _toml.TOMLDecodeError:
        value = raw_value.strip()  # bare word: keep as string
    if isinstance(value, (dict, list)):
        raise ConfigError(f"override {text!r} must set a scalar key")
    return path, value


def apply_overrides(config: dict, overrides: list[str]) -> dict:
    out = copy.deepcopy(config)
    for text in overrides:
        path, value = parse_override(text)
        cursor = out
        for part in path[:-1]:
            cursor = cursor.setdefault(part, {})
            if not isinstance(cursor, dict):
                raise ConfigError(f"override {text!r} descends through a scalar")
        cursor[path[-1]] = value
    return out


def resolve_params(config: dict) -> DimensionlessParams:
    """Build the reduced parameters from whichever parameter section is present."""
    has_dimless = "dimensionless" in config
    has_physical = "physical" in config
    if has_dimless == has_physical:
        raise ConfigError("exactly one of [dimensionless] or [physical] must be given")
    if has_dimless:
        section = config["dimensionless"]
        return DimensionlessParams.from_reduced(
            coupling=float(section["coupling"]), nbar=float(section["nbar"])
        )
    return reduce(PhysicalParams(**config["physical"]))


def _needs_numeric(engines: dict) -> bool:
    return bool(engines.get("quantum_numeric") or engines.get("negativity") or engines.get("entropy"))


def validate(config: dict) -> list[Diagnostic]:
    """Full static validation; errors make the config unrunnable."""
    diags: list[Diagnostic] = []

    def error(code: str, message: str) -> None:
        diags.append(Diagnostic("error", code, message))

    def warning(code: str, message: str) -> None:
        diags.append(Diagnostic("warning", code, message))

    def info(code: str, message: str) -> None:
        diags.append(Diagnostic("info", code, message))

    for section in config:
        if section not in _KNOWN_SECTIONS and section != "mode":
            warning("unknown-section", f"section [{section}] is not recognized")

    mode = config.get("mode")
    if mode not in MODES:
        error("bad-mode", f"mode must be one of {', '.join(MODES)}, got {mode!r}")
        return diags

    dp: DimensionlessParams | None = None
    if mode == "headline-check":
        headline = config.get("headline", {})
        if float(headline.get("nbar", -1.0)) < 0.0:
            error("bad-headline", "headline.nbar must be >= 0")
        if float(headline.get("dip_ground_target", 0.0)) <= 0.0:
            error("bad-headline", "headline.dip_ground_target must be > 0")
    else:
        try:
            dp = resolve_params(config)
        except (ConfigError, ValueError, TypeError, KeyError) as exc:
            error("bad-params", str(exc))
    if dp is not None and dp.nbar_clamped:
        warning("nbar-clamped", "thermal occupancy underflowed to 0 (hbar*omega >> k_B*T)")

    engines = config.get("engines", {})
    mc_enabled = bool(engines.get("mc"))
    if mode in ("curve", "compare"):
        grid = config.get("grid", {})
        steps = grid.get("steps", 0)
        if not isinstance(steps, int) or steps < 2:
            error("bad-grid", f"grid.steps must be an integer >= 2, got {steps!r}")
        if not (math.isfinite(float(grid.get("start", math.nan))) and math.isfinite(float(grid.get("stop", math.nan)))):
            error("bad-grid", "grid.start and grid.stop must be finite")
        if mc_enabled and config.get("mc", {}).get("seed") is None:
            error("mc-seed", "mc.seed is mandatory when the mc engine is enabled")
        if mc_enabled and int(config.get("mc", {}).get("samples", 0)) < 100:
            error("mc-samples", "mc.samples must be >= 100")

    numeric = _needs_numeric(engines) or mode in ("entanglement-scan", "decompose")
    if numeric and dp is not None:
        trunc = config.get("truncation", {})
        explicit = int(trunc.get("dim", 0))
        nbar_max = dp.nbar
        if mode == "entanglement-scan":
            nbars = config.get("scan", {}).get("nbars", [])
            nbar_max = max([dp.nbar, *map(float, nbars)], default=dp.nbar)
        suggested = suggest_dim(
            nbar=nbar_max, coupling=dp.coupling, tail_tol=float(trunc.get("tail_tol", 1e-10))
        )
        if explicit <= 0:
            if suggested > DIM_GUARD:
                warning(
                    "dim-guard",
                    f"auto truncation needs dim={suggested} > {DIM_GUARD} (desk-scale guard); "
                    "pin truncation.dim explicitly to proceed",
                )
            elif suggested > _DIM_WARN:
                warning("dim-large", f"auto truncation picks dim={suggested}; this run will be slow")
            else:
                info("dim-auto", f"truncation dim auto-chosen as {suggested}")
        elif explicit < suggested:
            warning(
                "dim-small",
                f"truncation.dim={explicit} is below the suggested {suggested}; tail checks may fail",
            )

    if engines.get("entropy") and dp is not None and dp.nbar > 0.0:
        warning(
            "entropy-mixed",
            "entropy is defined for pure joint states; with nbar > 0 the purity guard will trip",
        )

    if mode == "compare" and not (
        engines.get("semiclassical") and engines.get("quantum_analytic") and engines.get("quantum_numeric")
    ):
        info("compare-engines", "compare mode runs semiclassical, quantum_analytic and quantum_numeric")

    return diags


def has_errors(diags: list[Diagnostic]) -> bool:
    return any(d.level == "error" for d in diags)
