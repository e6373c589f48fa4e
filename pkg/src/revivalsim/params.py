"""Physical inputs and their reduction to the dimensionless engine parameters.

Every engine in this package consumes the reduced pair (coupling, nbar):

* ``coupling`` is the dimensionless ratio g / omega, where
  g = chi * x_zp is the coupling rate, chi = G * M * m / (hbar * d**2) is
  the phase-accumulation rate per unit oscillator displacement, and
  x_zp = sqrt(hbar / (2 * M * omega)) is the zero-point spread.
* ``nbar`` is the thermal occupancy of the oscillator mode, computed with
  the exact Bose-Einstein form 1 / (exp(hbar*omega / (k_B*T)) - 1) so the
  ground-state and thermal regimes share one code path.

The oscillator mass M enters every oscillator formula (trajectory, thermal
widths, zero-point spread); the probe mass m enters only through chi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

# CODATA 2018 (hbar and k_B exact in the 2019 SI).
GRAVITATIONAL_CONSTANT = 6.67430e-11  # m^3 kg^-1 s^-2
HBAR = 1.054571817e-34  # J s
BOLTZMANN_K = 1.380649e-23  # J / K

# exp(x) overflows a double near x = 709; beyond this nbar is identically 0.
_BE_OVERFLOW_EXPONENT = 700.0


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory-frame inputs, SI units throughout.

    Attributes:
        mass_oscillator: oscillator mass M [kg].
        mass_probe: probe (interferometer) mass m [kg].
        distance: probe-oscillator separation d [m].
        omega: oscillator angular frequency [rad/s].
        temperature: oscillator bath temperature [K].
    """

    mass_oscillator: float
    mass_probe: float
    distance: float
    omega: float
    temperature: float
    gravitational_constant: float = GRAVITATIONAL_CONSTANT
    hbar: float = HBAR
    boltzmann_k: float = BOLTZMANN_K

    def __post_init__(self) -> None:
        for name in (
            "mass_oscillator",
            "mass_probe",
            "distance",
            "omega",
            "temperature",
            "gravitational_constant",
            "hbar",
            "boltzmann_k",
        ):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"{name} must be finite and strictly positive, got {value!r}")


@dataclass(frozen=True)
class DimensionlessParams:
    """Reduced model parameters plus the derived SI intermediates.

    ``coupling`` and ``nbar`` are what the engines consume. The remaining
    fields back the SI-facing helpers: chi [rad m^-1 s^-1], g [rad/s],
    x_zp [m], sigma_x [m], sigma_p [kg m/s], and the carriers mass [kg]
    and omega [rad/s] needed to evaluate trajectories.

    Instances built with :meth:`from_reduced` carry natural-unit
    intermediates (M = omega = hbar = k_B = 1, effective temperature
    k_B T = nbar * hbar * omega), which makes sigma_x / x_zp equal to
    sqrt(2 * nbar) exactly; instances reduced from SI inputs carry the
    literal classical widths, which match sqrt(2 * nbar) * x_zp only in
    the high-temperature regime the thermal model targets.
    """

    coupling: float
    nbar: float
    chi: float
    g: float
    x_zp: float
    sigma_x: float
    sigma_p: float
    mass: float
    omega: float
    nbar_clamped: bool = field(default=False, compare=False)

    def __post_init__(self) -> None:
        if not math.isfinite(self.coupling) or self.coupling < 0.0:
            raise ValueError(f"coupling must be finite and >= 0, got {self.coupling!r}")
        if not math.isfinite(self.nbar) or self.nbar < 0.0:
            raise ValueError(f"nbar must be finite and >= 0, got {self.nbar!r}")

    @classmethod
    def from_reduced(cls, coupling: float, nbar: float) -> "DimensionlessParams":
        """Build directly from (coupling, nbar) with natural-unit backing."""
        x_zp = math.sqrt(0.5)  # sqrt(hbar / (2 M omega)) at hbar = M = omega = 1
        sigma = math.sqrt(nbar)  # sqrt(k_B T_eff / (M omega^2)) with k_B T_eff = nbar
        return cls(
            coupling=float(coupling),
            nbar=float(nbar),
            chi=float(coupling) / x_zp,
            g=float(coupling),
            x_zp=x_zp,
            sigma_x=sigma,
            sigma_p=sigma,
            mass=1.0,
            omega=1.0,
        )


def bose_einstein_occupancy(omega: float, temperature: float, *, hbar: float = HBAR, boltzmann_k: float = BOLTZMANN_K) -> tuple[float, bool]:
    """Exact thermal occupancy and whether the overflow clamp fired."""
    exponent = hbar * omega / (boltzmann_k * temperature)
    if exponent > _BE_OVERFLOW_EXPONENT:
        return 0.0, True
    return 1.0 / math.expm1(exponent), False


def reduce(physical: PhysicalParams) -> DimensionlessParams:
    """Collapse SI inputs to the dimensionless pair plus derived intermediates."""
    p = physical
    chi = p.gravitational_constant * p.mass_oscillator * p.mass_probe / (p.hbar * p.distance**2)
    x_zp = math.sqrt(p.hbar / (2.0 * p.mass_oscillator * p.omega))
    g = chi * x_zp
    coupling = g / p.omega
    nbar, clamped = bose_einstein_occupancy(
        p.omega, p.temperature, hbar=p.hbar, boltzmann_k=p.boltzmann_k
    )
    sigma_x = math.sqrt(p.boltzmann_k * p.temperature / (p.mass_oscillator * p.omega**2))
    sigma_p = math.sqrt(p.mass_oscillator * p.boltzmann_k * p.temperature)
    return DimensionlessParams(
        coupling=coupling,
        nbar=nbar,
        chi=chi,
        g=g,
        x_zp=x_zp,
        sigma_x=sigma_x,
        sigma_p=sigma_p,
        mass=p.mass_oscillator,
        omega=p.omega,
        nbar_clamped=clamped,
    )
