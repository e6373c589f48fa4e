"""Run manifest: everything needed to reproduce and audit a run.

The manifest embeds the fully resolved configuration, the resolved
dimensionless parameters, truncation diagnostics, tolerances, engine
versions and wall-clock time. Rerunning from a manifest reproduces every
non-MC output byte for byte (the MC engines are deterministic too, given
their recorded seeds).
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict

from . import __version__
from . import analysis, quantum, semiclassical
from .errors import ConfigError
from .params import DimensionlessParams

MANIFEST_NAME = "manifest.json"
MANIFEST_VERSION = 1

TOLERANCES = {
    "thermal_tail": quantum.DEFAULT_TAIL_TOL,
    "coherent_deficit_warn": quantum.COHERENT_DEFICIT_WARN,
    "coherent_deficit_error": quantum.COHERENT_DEFICIT_ERROR,
    "evolve_trace_drift": 1e-9,
    "negativity_clamp": analysis.DEFAULT_NEGATIVITY_CLAMP,
    "purity_guard": analysis.DEFAULT_PURITY_TOL,
    "degenerate_weight": analysis.DEGENERATE_WEIGHT_CUTOFF,
    "mc_stderr_warn": analysis.MC_STDERR_WARN,
}


def engine_versions() -> dict:
    return {
        "semiclassical": semiclassical.ENGINE_VERSION,
        "quantum": quantum.ENGINE_VERSION,
        "analysis": analysis.ENGINE_VERSION,
    }


def build_manifest(
    config: dict,
    dp: DimensionlessParams | None,
    outputs: list[str],
    diagnostics: dict,
    wall_clock_s: float,
) -> dict:
    resolved = None
    if dp is not None:
        resolved = asdict(dp)
    return {
        "manifest_version": MANIFEST_VERSION,
        "package_version": __version__,
        "engine_versions": engine_versions(),
        "mode": config.get("mode"),
        "resolved_params": resolved,
        "tolerances": dict(TOLERANCES),
        "outputs": list(outputs),
        "diagnostics": diagnostics,
        "wall_clock_s": wall_clock_s,
        "config": config,
    }


def manifest_path(out_dir: str) -> str:
    return os.path.join(out_dir, MANIFEST_NAME)


def write_manifest(out_dir: str, manifest: dict) -> str:
    path = manifest_path(out_dir)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path


def load_manifest(path: str) -> dict:
    if os.path.isdir(path):
        path = manifest_path(path)
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except FileNotFoundError as exc:
        raise ConfigError(f"no manifest at {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or "config" not in data:
        raise ConfigError(f"{path} does not look like a run manifest (missing 'config')")
    return data
