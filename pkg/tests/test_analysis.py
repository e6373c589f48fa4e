"""Tests for the decomposition, entanglement, and comparison layer."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from revivalsim.analysis import (
    EngineFlags,
    build_separable_component,
    compare_models,
    decompose,
    entanglement_entropy_pure,
    headline_check,
    mc_full_state,
    negativity,
    separable_component_exact,
    separable_weight,
)
from revivalsim.errors import PurityGuardError
from revivalsim.params import DimensionlessParams
from revivalsim.quantum import (
    FockSpace,
    coherence,
    displacement_offset,
    evolve,
    product_state,
    suggest_dim,
    thermal_state,
)


def evolved_thermal(nbar: float, coupling: float, omega_t: float, dim: int):
    space = FockSpace(dim)
    initial = product_state(thermal_state(nbar, space))
    return evolve(initial, omega_t, coupling, 16), space


def semiclassical_coherence_magnitude(nbar: float, coupling: float, omega_t: float) -> float:
    return 0.5 * math.exp(-16.0 * coupling**2 * nbar * math.sin(omega_t / 2.0) ** 2)


# ---------------------------------------------------------------- weights


def test_separable_weight_value():
    # |delta|^2 = 4 * 0.05^2 at half period
    assert separable_weight(0.05, math.pi) == pytest.approx(math.exp(-0.01), rel=1e-12)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_separable_weight_is_one_at_revivals(k):
    assert separable_weight(0.2, 2.0 * math.pi * k) == pytest.approx(1.0, abs=1e-12)


# ------------------------------------------------- exact separable component


def test_exact_component_coherence_is_semiclassical():
    """The cross-block trace must reproduce the classical-field result exactly."""
    for nbar, coupling, omega_t in [(1.0, 0.1, 1.3), (4.0, 0.1, math.pi), (2.5, 0.05, 2.0)]:
        dim = suggest_dim(nbar=nbar, coupling=coupling)
        sep = separable_component_exact(nbar, coupling, omega_t, FockSpace(dim))
        expected = semiclassical_coherence_magnitude(nbar, coupling, omega_t)
        assert coherence(sep) == pytest.approx(expected, rel=1e-10)
        assert sep.trace() == pytest.approx(1.0, abs=1e-12)


def test_exact_component_ground_state_cross_block():
    # nbar = 0 holds only the vacuum: cross block is the vacuum projector
    space = FockSpace(32)
    sep = separable_component_exact(0.0, 0.1, math.pi, space)
    vacuum = np.zeros((32, 32), dtype=complex)
    vacuum[0, 0] = 1.0
    np.testing.assert_allclose(sep.pm, 0.5 * vacuum, atol=1e-15)
    np.testing.assert_allclose(sep.pp, 0.5 * vacuum, atol=1e-15)


def test_exact_component_is_ppt():
    for nbar in (0.0, 2.0, 6.0):
        dim = suggest_dim(nbar=nbar, coupling=0.1)
        sep = separable_component_exact(nbar, 0.1, math.pi, FockSpace(dim))
        assert negativity(sep) == 0.0


@settings(max_examples=25, deadline=None)
@given(
    nbar=st.floats(min_value=0.0, max_value=3.0),
    coupling=st.floats(min_value=0.01, max_value=0.2),
    omega_t=st.floats(min_value=0.1, max_value=2.0 * math.pi - 0.1),
)
def test_exact_component_coherence_property(nbar, coupling, omega_t):
    sep = separable_component_exact(nbar, coupling, omega_t, FockSpace(96))
    expected = semiclassical_coherence_magnitude(nbar, coupling, omega_t)
    assert abs(coherence(sep) - expected) < 1e-10


# --------------------------------------------------- MC separable component


def test_mc_builder_ground_state_is_exact():
    sep = build_separable_component(0.0, 0.1, math.pi, FockSpace(32), 500, seed=3)
    assert sep.coherence == pytest.approx(0.5, abs=1e-12)
    assert sep.stderr == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(sep.state.pm, sep.state.pp, atol=1e-15)


def test_mc_builder_coherence_matches_semiclassical():
    # 30k samples sit just above the stderr warning threshold here
    with pytest.warns(UserWarning, match="stderr"):
        sep = build_separable_component(4.0, 0.1, math.pi, FockSpace(128), 30_000, seed=11)
    expected = 0.5 * math.exp(-0.64)
    assert abs(sep.coherence - expected) <= 4.0 * sep.stderr
    assert sep.n_samples == 30_000
    assert sep.convergence_warning


def test_mc_builder_matches_exact_blocks():
    space = FockSpace(80)
    mc = build_separable_component(2.0, 0.05, math.pi, space, 200_000, seed=7)
    exact = separable_component_exact(2.0, 0.05, math.pi, space)
    for name in ("pp", "pm", "mm"):
        gap = np.abs(getattr(mc.state, name) - getattr(exact, name)).max()
        assert gap < 1e-3, f"{name} block off by {gap:.2e}"


def test_mc_builder_state_is_ppt():
    # every sample is a product state with a PSD probe part, so the
    # mixture is PPT exactly, not just within sampling noise
    with pytest.warns(UserWarning, match="stderr"):
        sep = build_separable_component(2.0, 0.1, math.pi / 2.0, FockSpace(64), 5_000, seed=5)
    assert negativity(sep.state) == 0.0


def test_mc_builder_rejects_empty_sample():
    with pytest.raises(ValueError):
        build_separable_component(1.0, 0.1, math.pi, FockSpace(32), 0, seed=1)


def test_mc_full_state_matches_evolve():
    nbar, coupling, omega_t = 2.0, 0.05, math.pi
    full, space = evolved_thermal(nbar, coupling, omega_t, 80)
    mc = mc_full_state(nbar, coupling, omega_t, space, 200_000, seed=7)
    assert mc.trace() == pytest.approx(1.0, abs=1e-12)
    for name in ("pp", "pm", "mm"):
        gap = np.abs(getattr(mc, name) - getattr(full, name)).max()
        assert gap < 1.2e-3, f"{name} block off by {gap:.2e}"


# ------------------------------------------------------------- decomposition


def test_decompose_degenerate_at_revival():
    full, space = evolved_thermal(2.0, 0.05, 2.0 * math.pi, 69)
    report = decompose(full, 2.0, 0.05, 2.0 * math.pi, space)
    assert report.degenerate
    assert report.weight_separable == 1.0
    assert report.residual_weight == 0.0
    assert report.trace_norm_residual == 0.0
    assert report.residual_min_eigenvalue == 0.0
    assert report.coherence_sep == report.coherence_full


def test_decompose_traces_and_coherences():
    nbar, coupling, omega_t = 4.0, 0.05, math.pi
    dim = suggest_dim(nbar=nbar, coupling=coupling)
    full, space = evolved_thermal(nbar, coupling, omega_t, dim)
    report = decompose(full, nbar, coupling, omega_t, space)
    assert not report.degenerate
    assert report.trace_sep == pytest.approx(1.0, abs=1e-12)
    assert report.trace_residual == pytest.approx(1.0, abs=1e-9)
    assert report.weight_separable == pytest.approx(math.exp(-0.01), rel=1e-12)
    expected_sep = semiclassical_coherence_magnitude(nbar, coupling, omega_t)
    assert report.coherence_sep == pytest.approx(expected_sep, rel=1e-10)
    assert abs(report.coherence_full) == pytest.approx(
        0.5 * math.exp(-8.0 * coupling**2 * (2.0 * nbar + 1.0)), rel=1e-6
    )


def test_decompose_coherence_gap_oracle():
    """Exact gap: |c - c0| = c0 * (1 - exp(-2|delta|^2))."""
    nbar, coupling, omega_t = 8.0, 0.05, math.pi
    dim = suggest_dim(nbar=nbar, coupling=coupling)
    full, space = evolved_thermal(nbar, coupling, omega_t, dim)
    report = decompose(full, nbar, coupling, omega_t, space)
    delta_sq = abs(displacement_offset(coupling, omega_t)) ** 2
    expected_gap = 0.5 * math.exp(-4.0 * nbar * delta_sq) * (-math.expm1(-2.0 * delta_sq))
    gap = abs(report.coherence_full - report.coherence_sep)
    assert gap == pytest.approx(expected_gap, rel=1e-5)
    # the coherence gap sits inside the residual-weight style bound
    assert gap <= -math.expm1(-delta_sq)


def test_residual_is_not_a_state():
    # the unit-trace residual has a strongly negative eigenvalue; the
    # split is exact but not a convex mixture of states
    nbar, coupling, omega_t = 4.0, 0.05, math.pi
    dim = suggest_dim(nbar=nbar, coupling=coupling)
    full, space = evolved_thermal(nbar, coupling, omega_t, dim)
    report = decompose(full, nbar, coupling, omega_t, space)
    assert report.residual_min_eigenvalue < -0.1
    assert report.trace_norm_residual > report.residual_weight


@pytest.mark.parametrize(
    "nbar,omega_t,frozen",
    [
        (0.0, math.pi / 2.0, 0.070622),
        (0.0, math.pi, 0.099751),
        (2.0, math.pi, 0.055278),
        (4.0, math.pi, 0.042553),
        (8.0, math.pi, 0.032063),
    ],
)
def test_trace_distance_to_separable_component(nbar, omega_t, frozen):
    """Distance scales as |delta| and is largest for the ground state."""
    coupling = 0.05
    dim = max(48, suggest_dim(nbar=nbar, coupling=coupling))
    full, space = evolved_thermal(nbar, coupling, omega_t, dim)
    sep = separable_component_exact(nbar, coupling, omega_t, space)
    diff = full.as_matrix() - sep.as_matrix()
    distance = 0.5 * np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))).sum()
    assert distance == pytest.approx(frozen, abs=1e-5)
    envelope = math.sqrt(-math.expm1(-abs(displacement_offset(coupling, omega_t)) ** 2))
    assert distance <= envelope + 1e-9


# --------------------------------------------------------------- negativity


def test_pure_state_negativity_matches_schmidt_oracle():
    # rank-2 pure state: negativity = sqrt(p1 p2) = sqrt(1/4 - |c|^2)
    full, _ = evolved_thermal(0.0, 0.3, math.pi, 48)
    c = abs(coherence(full))
    expected = math.sqrt(0.25 - c**2)
    assert negativity(full) == pytest.approx(expected, abs=1e-8)
    assert expected == pytest.approx(0.436774, abs=1e-4)


def test_thermal_negativity_below_pure():
    pure, _ = evolved_thermal(0.0, 0.3, math.pi, 48)
    mixed, _ = evolved_thermal(2.0, 0.3, math.pi, 96)
    assert 0.0 < negativity(mixed) < negativity(pure)


def test_negativity_clamp_ignores_truncation_noise():
    space = FockSpace(48)
    sep = separable_component_exact(1.0, 0.05, math.pi, space)
    assert negativity(sep, clamp_tol=1e-8) == 0.0


# ------------------------------------------------------------------ entropy


@pytest.mark.parametrize("omega_t", [0.0, 2.0 * math.pi])
def test_entropy_vanishes_at_revivals(omega_t):
    full, _ = evolved_thermal(0.0, 0.25, omega_t, 48)
    assert entanglement_entropy_pure(full) < 1e-8


def test_entropy_matches_eigenvalue_oracle():
    full, _ = evolved_thermal(0.0, 0.25, 1.3, 48)
    c = abs(coherence(full))
    expected = 0.0
    for p in (0.5 + c, 0.5 - c):
        expected -= p * math.log(p)
    assert entanglement_entropy_pure(full) == pytest.approx(expected, abs=1e-8)


def test_entropy_guards_against_mixed_states():
    full, _ = evolved_thermal(1.0, 0.1, math.pi / 2.0, 48)
    with pytest.raises(PurityGuardError):
        entanglement_entropy_pure(full)


# ------------------------------------------------------------ model compare


def test_compare_models_zero_coupling_keeps_full_visibility():
    dp = DimensionlessParams.from_reduced(coupling=0.0, nbar=3.0)
    engines = EngineFlags(quantum_numeric=True, negativity=True)
    curve = compare_models(dp, np.linspace(0.0, 2.0 * math.pi, 5), engines)
    for point in curve.points:
        assert point.v_semiclassical == pytest.approx(1.0, abs=1e-12)
        assert point.v_quantum_analytic == pytest.approx(1.0, abs=1e-12)
        assert point.v_quantum_numeric == pytest.approx(1.0, abs=1e-9)
        assert point.negativity == 0.0
        assert point.weight_separable == pytest.approx(1.0, abs=1e-12)
        assert point.flags == ()
    assert curve.failure_counts == {}
    assert curve.max_ratio_deviation < 1e-12


def test_compare_models_thermal_dip_amplification():
    """At weak coupling the visibility dip grows by 2*nbar + 1 over ground."""
    grid = [math.pi]
    dips = {}
    for nbar in (0.0, 10.0):
        dp = DimensionlessParams.from_reduced(coupling=0.01, nbar=nbar)
        curve = compare_models(dp, grid, EngineFlags())
        dips[nbar] = 1.0 - curve.points[0].v_quantum_analytic
    assert dips[10.0] / dips[0.0] == pytest.approx(21.0, rel=0.02)


def test_compare_models_mc_tracks_semiclassical():
    dp = DimensionlessParams.from_reduced(coupling=0.2, nbar=1.0)
    engines = EngineFlags(mc=True)
    curve = compare_models(dp, [math.pi / 2.0, math.pi], engines, mc_samples=20_000, seed=13)
    assert curve.mc_samples == 20_000
    for point in curve.points:
        assert point.v_mc_stderr > 0.0
        assert abs(point.v_mc - point.v_semiclassical) <= 2.0 * point.v_mc_stderr


def test_compare_models_requires_seed_for_mc():
    dp = DimensionlessParams.from_reduced(coupling=0.1, nbar=1.0)
    with pytest.raises(ValueError):
        compare_models(dp, [math.pi], EngineFlags(mc=True))


def test_compare_models_marks_failures_per_point():
    # dim far below the thermal tail requirement: the numeric engine fails
    # at every point, the analytic engines keep going
    dp = DimensionlessParams.from_reduced(coupling=0.05, nbar=8.0)
    grid = np.linspace(0.5, 2.0, 4)
    curve = compare_models(dp, grid, EngineFlags(quantum_numeric=True), dim=48)
    assert curve.failure_counts == {"quantum_numeric": len(grid)}
    for point in curve.points:
        assert point.flags == ("quantum_numeric:TailOverflowError",)
        assert point.v_quantum_numeric is None
        assert point.v_semiclassical is not None
        assert point.v_quantum_analytic is not None


def test_compare_models_reports_truncation_metadata():
    dp = DimensionlessParams.from_reduced(coupling=0.1, nbar=1.0)
    curve = compare_models(dp, [math.pi], EngineFlags(quantum_numeric=True))
    assert curve.dim is not None and curve.dim >= 32
    assert curve.thermal_tail < 1e-10
    assert curve.max_trace_drift < 1e-9


# ------------------------------------------------------------ headline check


def test_headline_benchmark_values():
    report = headline_check(nbar=1e15)
    assert report.coupling == pytest.approx(2.5e-13, rel=1e-12)
    assert report.dip_ground == pytest.approx(5e-25, rel=1e-9)
    assert 2e-10 < report.dip_thermal_quantum < 2e-8
    assert report.dip_thermal_quantum == pytest.approx(1e-9, rel=1e-6)
    assert report.thermal_gap_factor == pytest.approx(10.0, rel=1e-6)
    assert report.quantum_excess == pytest.approx(5e-25, rel=1e-6)
    # thermal semiclassical dip sits one unit of x_ground below the quantum one
    assert report.dip_thermal_quantum > report.dip_thermal_semiclassical


def test_headline_ground_state_limit():
    report = headline_check(nbar=0.0)
    assert report.dip_thermal_semiclassical == 0.0
    assert report.dip_thermal_quantum == pytest.approx(report.dip_ground, rel=1e-12)
