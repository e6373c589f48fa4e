"""Mode orchestration: resolve config, run engines, write outputs + manifest."""

from __future__ import annotations

import json
import os
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import analysis, config as config_mod, manifest as manifest_mod, output, quantum
from .errors import ConfigError
from .params import DimensionlessParams

ENV_OUTPUT_ROOT = "REVIVALSIM_OUT"


@dataclass
class RunResult:
    exit_code: int
    out_dir: str
    files: list[str]
    manifest: dict
    summary: list[str] = field(default_factory=list)


def _resolve_out_dir(config: dict, out_dir: str | None) -> str:
    directory = out_dir or config.get("output", {}).get("directory", "out")
    if not os.path.isabs(directory):
        directory = os.path.join(os.environ.get(ENV_OUTPUT_ROOT, "."), directory)
    return directory


def _complex_json(value: complex) -> dict:
    return {"real": float(np.real(value)), "imag": float(np.imag(value))}


def _engine_flags(config: dict, mode: str) -> analysis.EngineFlags:
    engines = dict(config.get("engines", {}))
    if mode == "compare":
        # compare exists to cross-check the closed forms against the numeric engine.
        engines["semiclassical"] = True
        engines["quantum_analytic"] = True
        engines["quantum_numeric"] = True
    return analysis.EngineFlags(**engines)


def _truncation(config: dict) -> tuple[int | None, int, float]:
    trunc = config.get("truncation", {})
    explicit = int(trunc.get("dim", 0))
    return (explicit if explicit > 0 else None), int(trunc.get("pad", 16)), float(
        trunc.get("tail_tol", 1e-10)
    )


def _guard_dim(dp: DimensionlessParams, dim: int | None, nbar: float, tail_tol: float) -> int:
    if dim is not None:
        return dim
    suggested = quantum.suggest_dim(nbar=nbar, coupling=dp.coupling, tail_tol=tail_tol)
    if suggested > config_mod.DIM_GUARD:
        raise ConfigError(
            f"auto truncation needs dim={suggested} > {config_mod.DIM_GUARD}; "
            "pin truncation.dim explicitly for runs this large"
        )
    return suggested


def _run_curve(config: dict, dp: DimensionlessParams, out_dir: str) -> tuple[list[str], dict, int, list[str]]:
    mode = config["mode"]
    engines = _engine_flags(config, mode)
    grid_cfg = config["grid"]
    grid = np.linspace(float(grid_cfg["start"]), float(grid_cfg["stop"]), int(grid_cfg["steps"]))
    dim, pad, tail_tol = _truncation(config)
    if engines.quantum_numeric or engines.negativity or engines.entropy:
        dim = _guard_dim(dp, dim, dp.nbar, tail_tol)
    mc_cfg = config.get("mc", {})
    curve = analysis.compare_models(
        dp,
        grid,
        engines,
        dim=dim,
        pad=pad,
        tail_tol=tail_tol,
        mc_samples=int(mc_cfg.get("samples", 100_000)),
        seed=mc_cfg.get("seed"),
    )
    files = []
    csv_path = os.path.join(out_dir, "curve.csv")
    output.write_curve_csv(csv_path, curve)
    files.append("curve.csv")
    if config.get("output", {}).get("svg"):
        svg_path = os.path.join(out_dir, "curve.svg")
        output.render_curve_svg(svg_path, curve)
        files.append("curve.svg")

    n_points = len(curve.points)
    diagnostics = {
        "n_points": n_points,
        "dim": curve.dim,
        "pad": curve.pad,
        "thermal_tail": curve.thermal_tail,
        "max_trace_drift": curve.max_trace_drift,
        "max_ratio_deviation": curve.max_ratio_deviation,
        "failure_counts": curve.failure_counts,
    }
    if mode == "compare":
        deltas = [
            abs(p.v_quantum_numeric - p.v_quantum_analytic)
            for p in curve.points
            if p.v_quantum_numeric is not None and p.v_quantum_analytic is not None
        ]
        diagnostics["max_abs_delta_numeric_vs_analytic"] = max(deltas) if deltas else None
    exit_code = 1 if any(count >= n_points for count in curve.failure_counts.values()) else 0
    summary = [f"{mode}: {n_points} grid points -> {', '.join(files)}"]
    if curve.failure_counts:
        summary.append(f"engine failures: {curve.failure_counts}")
    return files, diagnostics, exit_code, summary


def _run_scan(config: dict, dp: DimensionlessParams, out_dir: str) -> tuple[list[str], dict, int, list[str]]:
    scan_cfg = config["scan"]
    omega_t = float(scan_cfg["omega_t"])
    nbars = [float(v) for v in scan_cfg["nbars"]]
    if not nbars:
        raise ConfigError("scan.nbars must not be empty")
    explicit_dim, pad, tail_tol = _truncation(config)
    rows: list[dict] = []
    dims: list[int] = []
    numeric_failures = 0
    for nbar in nbars:
        row: dict = {"nbar": nbar, "flags": []}
        row["weight_separable"] = analysis.separable_weight(dp.coupling, omega_t)
        row["v_quantum_analytic"] = float(
            2.0 * quantum.quantum_coherence_oracle(dp.coupling, nbar, omega_t)
        )
        try:
            dim = explicit_dim or _guard_dim(dp, None, nbar, tail_tol)
            space = quantum.FockSpace(dim)
            evolved = quantum.evolve(
                quantum.product_state(quantum.thermal_state(nbar, space, tail_tol)),
                omega_t,
                dp.coupling,
                pad,
            )
            dims.append(dim)
            row["v_quantum_numeric"] = float(2.0 * abs(quantum.coherence(evolved)))
            row["dip_quantum"] = 1.0 - row["v_quantum_numeric"]
            row["negativity"] = analysis.negativity(evolved)
        except Exception as exc:  # noqa: BLE001 - per-row isolation
            row["flags"].append(f"quantum_numeric:{type(exc).__name__}")
            numeric_failures += 1
        row["flags"] = tuple(row["flags"])
        rows.append(row)
    csv_path = os.path.join(out_dir, "scan.csv")
    output.write_scan_csv(csv_path, rows)
    diagnostics = {
        "omega_t": omega_t,
        "nbars": nbars,
        "dims": dims,
        "numeric_failures": numeric_failures,
    }
    exit_code = 1 if numeric_failures >= len(nbars) else 0
    return ["scan.csv"], diagnostics, exit_code, [f"entanglement-scan: {len(nbars)} occupancies -> scan.csv"]


def _run_decompose(config: dict, dp: DimensionlessParams, out_dir: str) -> tuple[list[str], dict, int, list[str]]:
    point = config["point"]
    omega_t = float(point["omega_t"])
    explicit_dim, pad, tail_tol = _truncation(config)
    dim = explicit_dim or _guard_dim(dp, None, dp.nbar, tail_tol)
    space = quantum.FockSpace(dim)
    full = quantum.evolve(
        quantum.product_state(quantum.thermal_state(dp.nbar, space, tail_tol)),
        omega_t,
        dp.coupling,
        pad,
    )
    report = analysis.decompose(full, dp.nbar, dp.coupling, omega_t, space)
    payload = asdict(report)
    payload["coherence_sep"] = _complex_json(report.coherence_sep)
    payload["coherence_full"] = _complex_json(report.coherence_full)
    payload.update({"omega_t": omega_t, "nbar": dp.nbar, "coupling": dp.coupling, "dim": dim})
    path = os.path.join(out_dir, "decomposition.json")
    _write_json(path, payload)
    diagnostics = {"dim": dim, "degenerate": report.degenerate}
    summary = [
        f"decompose: weight_separable={report.weight_separable:.6g}, "
        f"|c_full|={abs(report.coherence_full):.6g}, |c_sep|={abs(report.coherence_sep):.6g}"
    ]
    return ["decomposition.json"], diagnostics, 0, summary


def _run_headline(config: dict, out_dir: str) -> tuple[list[str], dict, int, list[str]]:
    headline = config["headline"]
    report = analysis.headline_check(
        nbar=float(headline["nbar"]),
        dip_ground_target=float(headline["dip_ground_target"]),
        reference_thermal_dip=float(headline.get("reference_thermal_dip", 1e-10)),
    )
    payload = asdict(report)
    path = os.path.join(out_dir, "headline.json")
    _write_json(path, payload)
    summary = [
        f"coupling fixed to {report.coupling:.6g} by the ground-state dip target",
        f"dip_ground = {report.dip_ground:.6g}",
        f"dip_thermal_quantum = {report.dip_thermal_quantum:.6g}",
        f"dip_thermal_semiclassical = {report.dip_thermal_semiclassical:.6g}",
        f"quantum_excess = {report.quantum_excess:.6g}",
        f"gap vs reference thermal dip {report.reference_thermal_dip:g}: "
        f"factor {report.thermal_gap_factor:.3g}",
    ]
    return ["headline.json"], payload, 0, summary


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def run_config(config: dict, *, out_dir: str | None = None, force: bool = False) -> RunResult:
    """Validate, execute the configured mode, and write outputs + manifest."""
    diags = config_mod.validate(config)
    errors = [d for d in diags if d.level == "error"]
    if errors:
        raise ConfigError("; ".join(d.message for d in errors))

    final_dir = _resolve_out_dir(config, out_dir)
    os.makedirs(final_dir, exist_ok=True)
    existing = manifest_mod.manifest_path(final_dir)
    if os.path.exists(existing) and not force:
        raise ConfigError(f"{final_dir} already holds a manifest; pass --force to overwrite")

    mode = config["mode"]
    dp = None if mode == "headline-check" else config_mod.resolve_params(config)

    start = time.perf_counter()
    if mode in ("curve", "compare"):
        files, diagnostics, exit_code, summary = _run_curve(config, dp, final_dir)
    elif mode == "entanglement-scan":
        files, diagnostics, exit_code, summary = _run_scan(config, dp, final_dir)
    elif mode == "decompose":
        files, diagnostics, exit_code, summary = _run_decompose(config, dp, final_dir)
    elif mode == "headline-check":
        files, diagnostics, exit_code, summary = _run_headline(config, final_dir)
    else:  # pragma: no cover - validate() already rejects unknown modes
        raise ConfigError(f"unknown mode {mode!r}")
    wall = time.perf_counter() - start

    data = manifest_mod.build_manifest(config, dp, files, diagnostics, wall)
    manifest_file = manifest_mod.write_manifest(final_dir, data)
    files = [*files, os.path.basename(manifest_file)]
    summary.append(f"manifest: {manifest_file}")
    for d in diags:
        if d.level != "error":
            summary.append(str(d))
    return RunResult(exit_code=exit_code, out_dir=final_dir, files=files, manifest=data, summary=summary)


def rerun_manifest(path: str, *, out_dir: str | None = None, force: bool = False) -> RunResult:
    """Re-execute a recorded run; non-MC outputs reproduce byte-identically."""
    data = manifest_mod.load_manifest(path)
    config = config_mod.resolve_config(data["config"])
    return run_config(config, out_dir=out_dir, force=force)
