"""Tissue and pulse-train parameter containers.

Units are mixed on purpose: geometry and transport use millimetres,
pore-density quantities and thermal properties stay in SI, matching the
sources the values were taken from.  All unit conversions happen at the
point of use and are covered by a dedicated unit-audit test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .errors import DomainError

# Field strength above which the sub-critical transmembrane-potential model
# no longer applies (reversible-electroporation operating limit).
MAX_FIELD_V_PER_MM = 28.0

# Onset of thermal cell damage: 42 degC.
CELL_DAMAGE_T_K = 315.15

# Transmembrane potentials beyond this are outside the reversible regime;
# the pore-density formula would be extrapolated far past its calibration.
MAX_TRANSMEMBRANE_V = 1.5

# Intracellular concentration regarded as a delivered dose.
DOSE_THRESHOLD_M = 0.025


@dataclass(frozen=True)
class TissueParams:
    """Physical constants of the electroporated tissue.

    Defaults are the baseline simulation parameter set.  ``tau`` (the
    membrane resealing time constant) has no literature value here and is
    a calibration knob; the shipped default equals one rest interval.
    """

    sigma: float = 0.241      # electrical conductivity, S/m
    r_c: float = 0.025        # cell radius, mm
    alpha: float = 1.0e9      # pore creation coefficient, 1/(m^2 s)
    V_ep: float = 0.258       # characteristic electroporation voltage, V
    N0: float = 1.5e9         # equilibrium pore density, 1/m^2
    q: float = 2.46           # pore-creation exponent, dimensionless
    D: float = 1.0e-4         # effective drug diffusivity, mm^2/s
    R_P: float = 0.8e-6       # pore radius, mm (0.8 nm)
    eps: float = 0.18         # porosity (extracellular volume fraction)
    P: float = 5.0e-4         # membrane drug permeability, mm/s
    rho: float = 1060.0       # tissue density, kg/m^3
    c: float = 3600.0         # specific heat, J/(kg K)
    k: float = 0.502          # thermal conductivity, W/(m K)
    h: float = 50.0           # surface heat transfer coefficient, W/(m^2 K)
    T_b: float = 310.15       # body temperature, K
    tau: float = 600.0        # pore resealing time constant, s (assumed)
    L: float = 1.0            # tissue side length, mm
    C2: float = 1.0           # boundary drug concentration, M

    def __post_init__(self):
        positive = (
            "sigma", "r_c", "alpha", "V_ep", "N0", "D", "R_P", "P",
            "rho", "c", "k", "h", "T_b", "tau", "L", "C2",
        )
        for name in positive:
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be a positive finite number, got {value!r}")
        if not 0.0 < self.eps < 1.0:
            raise DomainError(f"eps must lie in (0, 1), got {self.eps!r}")
        if not self.q > 1.0:
            raise DomainError(f"q must exceed 1, got {self.q!r}")

    @property
    def V0(self) -> float:
        """Volume of the cube circumscribing one cell, mm^3."""
        return (2.0 * self.r_c) ** 3

    @property
    def thermal_diffusivity_mm2_s(self) -> float:
        """k / (rho c), converted from m^2/s to mm^2/s."""
        return self.k / (self.rho * self.c) * 1.0e6


@dataclass(frozen=True)
class PulseProtocol:
    """Electrode potentials and pulse-train timing.

    A cycle is a short ON phase (field applied, pores created, tissue
    heated) followed by a long OFF phase during which drug exchange and
    cooling take place.
    """

    phi0: float = 28.0   # potential at x=0, V
    phiL: float = 0.0    # potential at x=L, V
    t_ep: float = 0.08   # pulse length (ON time), s
    t_M: float = 600.0   # rest time between pulses (OFF time), s
    PN: int = 10         # pulse count

    def __post_init__(self):
        if self.phi0 < self.phiL:
            raise DomainError(f"phi0 must be >= phiL, got {self.phi0!r} < {self.phiL!r}")
        if not self.t_ep > 0:
            raise DomainError(f"t_ep must be positive, got {self.t_ep!r}")
        if not self.t_M > 0:
            raise DomainError(f"t_M must be positive, got {self.t_M!r}")
        if not (isinstance(self.PN, int) and self.PN >= 1):
            raise DomainError(f"PN must be an integer >= 1, got {self.PN!r}")

    def field_strength(self, L: float) -> float:
        """Uniform field magnitude (phi0 - phiL)/L in V/mm."""
        from .physics import uniform_electric_field

        return uniform_electric_field(self.phi0, self.phiL, L)


def tissue_param_names() -> tuple[str, ...]:
    """Names of the configurable tissue constants, in declaration order."""
    return tuple(f.name for f in fields(TissueParams))
