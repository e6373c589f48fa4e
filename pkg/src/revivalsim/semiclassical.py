"""Semi-classical engine: classical thermal oscillator, quantum probe phase.

The oscillator follows its free classical trajectory
``x(t) = x0 cos(omega t) + p0 sin(omega t) / (M omega)`` while the probe,
prepared in an equal superposition of two position eigenstates, accumulates
the conditional phase

    phi(t) = (chi / omega) * [x0 sin(omega t) + (p0 / (M omega)) * (1 - cos(omega t))]

so a single realization contributes coherence c = (1/2) exp(2i phi). Averaged
over the thermal Gaussian ensemble this damps to

    c(t) = (1/2) exp[-8 coupling^2 * 2 nbar * sin^2(omega t / 2)]

which revives fully at every integer multiple of the oscillator period.
Visibility is V = 2 |c|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import DimensionlessParams

ENGINE_VERSION = "semiclassical-1"

# Below this the MC variance estimate itself is untrustworthy.
_MIN_MC_SAMPLES = 100


@dataclass(frozen=True)
class OscillatorSample:
    """Initial phase-space point(s) of the oscillator, SI units.

    Fields are scalars or equal-shape ndarrays; every function in this
    module broadcasts over them, so a batch of draws is one instance.
    """

    x0: float | np.ndarray
    p0: float | np.ndarray


@dataclass(frozen=True)
class McCoherence:
    """Monte-Carlo coherence estimate with its standard error."""

    coherence: complex
    stderr: float
    n_samples: int


def _to_omega_t(dp: DimensionlessParams, omega_t, t):
    # Engines are canonical in the dimensionless phase omega*t; seconds are
    # accepted as a keyword alternative and converted once, here.
    if (omega_t is None) == (t is None):
        raise ValueError("pass exactly one of omega_t or t")
    return omega_t if omega_t is not None else dp.omega * np.asarray(t)


def classical_trajectory(sample: OscillatorSample, dp: DimensionlessParams, omega_t=None, *, t=None):
    """Free harmonic position at phase omega*t for the given initial point."""
    theta = _to_omega_t(dp, omega_t, t)
    return sample.x0 * np.cos(theta) + sample.p0 * np.sin(theta) / (dp.mass * dp.omega)


def accumulated_phase(sample: OscillatorSample, dp: DimensionlessParams, omega_t=None, *, t=None):
    """Conditional probe phase chi * integral of x(t') dt' from 0 to t."""
    theta = _to_omega_t(dp, omega_t, t)
    chi_over_omega = dp.chi / dp.omega
    return chi_over_omega * (
        sample.x0 * np.sin(theta) + sample.p0 * (1.0 - np.cos(theta)) / (dp.mass * dp.omega)
    )


def sample_thermal(dp: DimensionlessParams, seed: int, count: int) -> OscillatorSample:
    """Draw ``count`` thermal phase-space points, batched as arrays.

    x0 and p0 are independent zero-mean Gaussians with the widths stored in
    ``dp`` (sigma_x, sigma_p). Fixed seed gives a bit-identical stream.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    draws = rng.standard_normal((2, count))
    return OscillatorSample(x0=dp.sigma_x * draws[0], p0=dp.sigma_p * draws[1])


def analytic_coherence(dp: DimensionlessParams, omega_t=None, *, t=None):
    """Thermal-ensemble coherence, closed form (real and positive).

    c = (1/2) exp[-8 coupling^2 * 2 nbar * sin^2(omega t / 2)]. The nbar
    form is exact for parameters built with DimensionlessParams.from_reduced;
    for SI-reduced parameters it is the standard high-temperature reduction
    of the Gaussian average over (sigma_x, sigma_p).
    """
    theta = _to_omega_t(dp, omega_t, t)
    envelope = 8.0 * dp.coupling**2 * (2.0 * dp.nbar) * np.sin(theta / 2.0) ** 2
    return 0.5 * np.exp(-envelope)


def mc_coherence(
    dp: DimensionlessParams,
    omega_t=None,
    *,
    t=None,
    n_samples: int,
    seed: int,
) -> McCoherence:
    """Monte-Carlo estimate of the thermal coherence at one time point.

    Deterministic for fixed (seed, n_samples): the sample stream never
    depends on evaluation order or worker count.
    """
    if n_samples < _MIN_MC_SAMPLES:
        raise ValueError(f"n_samples must be >= {_MIN_MC_SAMPLES}, got {n_samples}")
    theta = _to_omega_t(dp, omega_t, t)
    batch = sample_thermal(dp, seed, n_samples)
    phase = accumulated_phase(batch, dp, theta)
    values = 0.5 * np.exp(2.0j * phase)
    estimate = complex(values.mean())
    spread = values.real.var(ddof=1) + values.imag.var(ddof=1)
    return McCoherence(
        coherence=estimate,
        stderr=float(np.sqrt(spread / n_samples)),
        n_samples=n_samples,
    )


def visibility(coherence) -> float:
    """Interferometer fringe visibility V = 2 |c|."""
    return 2.0 * abs(coherence)


def atom_density_matrix(coherence: complex) -> np.ndarray:
    """Probe density matrix for equal populations and off-diagonal c."""
    c = complex(coherence)
    return np.array([[0.5, c], [np.conj(c), 0.5]], dtype=complex)
