"""Closed-form electroporation physics.

Potential and field
    phi(x) = (phiL - phi0) x / L + phi0  inside the parallel-electrode
    tissue, so the induced field is uniform with magnitude
    E = (phi0 - phiL) / L.

Transmembrane potential
    V_m = 1.5 E r_c cos(psi), psi the angle from the field direction.
    Pore creation peaks at the poles psi = 0, pi and vanishes at
    psi = pi/2, 3pi/2.

Pore density
    dN/dt = alpha A (1 - (N/N0) A^-q),  A = exp((V_m/V_ep)^2),  N(0) = 0,
    whose closed form is
    N(t) = N0 A^q (1 - exp(-alpha t / (N0 A^(q-1)))).
    `pore_density_ode` integrates the rate equation directly with fixed
    explicit-Euler steps and is kept deliberately independent of the
    closed form so the two can cross-check each other.

Resealing and mass transfer
    After a pulse the total pore area decays like exp(-t/tau), so the
    extracellular -> intracellular mass-transfer coefficient is
    mu(t) = (4 pi^2 R_P^2 r_c^2 / V0) P N(t_ep) exp(-t/tau),
    with V0 the volume of the cube containing one cell.  The dual-porosity
    literature coefficient (`kalamiza_mtc`) is carried alongside as a
    comparison route.
"""

from __future__ import annotations

import math

from .errors import DomainError
from .params import MAX_TRANSMEMBRANE_V, TissueParams

# 1/m^2 -> 1/mm^2
PER_M2_TO_PER_MM2 = 1.0e-6

# Dual-porosity comparison coefficient: pore surface fraction and membrane
# thickness (mm).
KALAMIZA_F_P = 3.4e-8
KALAMIZA_D_M_MM = 5.0e-6


def uniform_electric_field(phi0: float, phiL: float, L: float) -> float:
    """Uniform field magnitude (phi0 - phiL)/L in V/mm for a tissue of side L mm."""
    if not L > 0:
        raise DomainError(f"tissue side length must be positive, got {L!r}")
    return (phi0 - phiL) / L


def transmembrane_potential(E: float, r_c: float, psi: float) -> float:
    """Induced membrane voltage 1.5 E r_c cos(psi) for a spherical cell, V.

    E in V/mm, r_c in mm.
    """
    return 1.5 * E * r_c * math.cos(psi)


def _pore_exponent(V_m: float, V_ep: float) -> float:
    """(V_m / V_ep)^2, guarded against super-critical membrane voltages."""
    if abs(V_m) > MAX_TRANSMEMBRANE_V:
        raise DomainError(
            f"|V_m| = {abs(V_m):g} V exceeds the reversible-electroporation "
            f"limit {MAX_TRANSMEMBRANE_V:g} V; the pore-creation factor "
            "A^q would be extrapolated far outside its calibrated range"
        )
    return (V_m / V_ep) ** 2


def pore_density_analytic(t: float, V_m: float, params: TissueParams) -> float:
    """Pore density N(t) in 1/m^2 from the closed-form solution.

    Exponentials are assembled from the exponent q*(V_m/V_ep)^2 directly
    (never via A**q) so the guarded range cannot overflow, and expm1 keeps
    the small-time linear regime exact.
    """
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t!r}")
    s = _pore_exponent(V_m, params.V_ep)
    A_pow_q = math.exp(params.q * s)
    A_pow_qm1 = math.exp((params.q - 1.0) * s)
    rate = params.alpha / (params.N0 * A_pow_qm1)
    return params.N0 * A_pow_q * -math.expm1(-rate * t)


def pore_density_ode(t_end: float, V_m: float, params: TissueParams, dt: float) -> float:
    """Pore density at t_end by fixed-step explicit Euler on the rate equation.

    Serves as the independent oracle for `pore_density_analytic`; with
    dt <= 1e-6 s the two agree to better than 1e-6 relative over the
    reversible operating range.
    """
    if t_end < 0:
        raise DomainError(f"t_end must be nonnegative, got {t_end!r}")
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt!r}")
    if t_end == 0.0:
        return 0.0
    if dt >= t_end:
        raise DomainError(f"dt = {dt!r} must be smaller than t_end = {t_end!r}")

    s = _pore_exponent(V_m, params.V_ep)
    A = math.exp(s)
    inv_sat = math.exp(-params.q * s) / params.N0  # 1 / (N0 A^q)
    creation = params.alpha * A

    n_steps = int(t_end / dt)
    remainder = t_end - n_steps * dt
    N = 0.0
    for _ in range(n_steps):
        N += dt * creation * (1.0 - N * inv_sat)
    if remainder > 1e-12 * dt:
        N += remainder * creation * (1.0 - N * inv_sat)
    return N


def pore_count(N: float, r_c: float) -> float:
    """Total pores on one cell: density (1/m^2) times membrane area 4 pi r_c^2."""
    return N * PER_M2_TO_PER_MM2 * 4.0 * math.pi * r_c * r_c


def pore_area(t: float, N_ep: float, params: TissueParams) -> float:
    """Total open pore area of one cell in mm^2, t seconds after the pulse.

    N_ep is the end-of-pulse pore density in 1/m^2; the area decays
    exponentially with the resealing time constant tau.
    """
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t!r}")
    if N_ep < 0:
        raise DomainError(f"pore density must be nonnegative, got {N_ep!r}")
    n_pores = pore_count(N_ep, params.r_c)
    return math.pi * params.R_P ** 2 * n_pores * math.exp(-t / params.tau)


def mass_transfer_coefficient(t_since_pulse: float, N_ep: float, params: TissueParams) -> float:
    """Resealing-limited mass-transfer coefficient mu in 1/s.

    mu(t) = (4 pi^2 R_P^2 r_c^2 / V0) P N_ep exp(-t/tau); linear in both
    the permeability P and the end-of-pulse pore density N_ep, and
    monotone decreasing in the time since the pulse.
    """
    if t_since_pulse < 0:
        raise DomainError(f"time since pulse must be nonnegative, got {t_since_pulse!r}")
    N_mm = N_ep * PER_M2_TO_PER_MM2
    prefactor = 4.0 * math.pi ** 2 * params.R_P ** 2 * params.r_c ** 2 / params.V0
    return prefactor * params.P * N_mm * math.exp(-t_since_pulse / params.tau)


def kalamiza_mtc(
    t: float,
    params: TissueParams,
    f_p: float = KALAMIZA_F_P,
    d_m: float = KALAMIZA_D_M_MM,
) -> float:
    """Dual-porosity mass-transfer coefficient 3 D f_p / (d_m r_c) exp(-t/tau), 1/s.

    With the default constants and baseline parameters this is
    8.16e-5 exp(-t/tau).
    """
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t!r}")
    return 3.0 * params.D * f_p / (d_m * params.r_c) * math.exp(-t / params.tau)
