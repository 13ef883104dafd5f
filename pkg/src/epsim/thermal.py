"""Explicit tissue-temperature solver with Joule heating and Robin cooling.

During a pulse the temperature obeys

    rho c dT/dt = k lap(T) + Q_J,      Q_J = sigma |grad phi|^2,

and after the pulse the same equation with Q_J = 0.  All four faces
exchange heat with the surroundings at body temperature:

    dT/dn = -(h/k) (T - T_b)   (outward normal n),

realized with second-order ghost nodes.  The update is forward-time
centred-space with the bound dt < (dx^2 dy^2) / (2 kappa (dx^2 + dy^2)),
kappa = k/(rho c).  Below the bound the update is a convex combination
of neighbour values and T_b, so a discrete maximum principle holds: with
the source off, the grid maximum never increases and T never drops below
T_b when started there.

Lengths are in mm (kappa converted once), temperatures in K; Q_J is
evaluated in SI (E in V/m) so the per-step rise is Q_J dt / (rho c).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, SafetyAbort, StabilityError
from .grid import Grid2D
from .params import CELL_DAMAGE_T_K, PulseProtocol, TissueParams

V_PER_MM_TO_V_PER_M = 1.0e3


class ThermalPhase(enum.Enum):
    PULSE_ON = "pulse_on"
    COOLING = "cooling"


@dataclass
class ThermalState:
    T: np.ndarray
    t: float = 0.0
    phase: ThermalPhase = ThermalPhase.COOLING

    def copy(self) -> "ThermalState":
        return ThermalState(T=self.T.copy(), t=self.t, phase=self.phase)


def initial_state(grid: Grid2D, params: TissueParams) -> ThermalState:
    return ThermalState(T=grid.full(params.T_b))


def joule_heating(sigma: float, E: float) -> float:
    """Volumetric heat source sigma E^2 in W/m^3; E in V/m."""
    return sigma * E * E


def thermal_stability_dt(grid: Grid2D, params: TissueParams) -> float:
    """Strict upper bound on dt for the explicit temperature update."""
    for name in ("k", "rho", "c"):
        if not getattr(params, name) > 0:
            raise DomainError(f"{name} must be positive, got {getattr(params, name)!r}")
    kappa = params.thermal_diffusivity_mm2_s
    dx2 = grid.dx * grid.dx
    dy2 = grid.dy * grid.dy
    return 0.5 * dx2 * dy2 / (kappa * (dx2 + dy2))


def _robin_ghosts(pad: np.ndarray, T: np.ndarray, bx: float, by: float, T_b: float) -> None:
    """Ghost nodes for dT/dn = -(h/k)(T - T_b) on every face.

    bx = 2 dx h/k and by = 2 dy h/k (dimensionless, h/k converted to 1/mm).
    """
    pad[1:-1, 1:-1] = T
    pad[1:-1, 0] = pad[1:-1, 2] - bx * (pad[1:-1, 1] - T_b)
    pad[1:-1, -1] = pad[1:-1, -3] - bx * (pad[1:-1, -2] - T_b)
    pad[0, 1:-1] = pad[2, 1:-1] - by * (pad[1, 1:-1] - T_b)
    pad[-1, 1:-1] = pad[-3, 1:-1] - by * (pad[-2, 1:-1] - T_b)


class _ThermalStepper:
    """Precomputed coefficients plus workspace for repeated stable steps."""

    def __init__(self, grid: Grid2D, params: TissueParams, dt: float, Q_J: float):
        bound = thermal_stability_dt(grid, params)
        if not dt > 0:
            raise DomainError(f"dt must be positive, got {dt!r}")
        if dt >= bound:
            raise StabilityError(
                f"thermal dt = {dt!r} violates the stability bound {bound!r}",
                dt=dt,
                bound=bound,
            )
        kappa = params.thermal_diffusivity_mm2_s
        self.e = kappa * dt / (grid.dx * grid.dx)
        self.g = kappa * dt / (grid.dy * grid.dy)
        h_over_k_mm = params.h / params.k * 1.0e-3  # 1/m -> 1/mm
        self.bx = 2.0 * grid.dx * h_over_k_mm
        self.by = 2.0 * grid.dy * h_over_k_mm
        self.T_b = params.T_b
        self.source_rise = Q_J * dt / (params.rho * params.c)  # K per step
        self.pad = np.zeros((grid.M2 + 2, grid.M1 + 2), dtype=np.float64)

    def step(self, T: np.ndarray, out: np.ndarray, source_on: bool) -> None:
        pad = self.pad
        _robin_ghosts(pad, T, self.bx, self.by, self.T_b)
        np.multiply(T, -2.0, out=out)
        out += pad[1:-1, 2:]
        out += pad[1:-1, :-2]
        out *= self.e
        lap_y = pad[2:, 1:-1] - 2.0 * T + pad[:-2, 1:-1]
        lap_y *= self.g
        out += lap_y
        out += T
        if source_on:
            out += self.source_rise


def thermal_step(
    state: ThermalState,
    dt: float,
    grid: Grid2D,
    params: TissueParams,
    source_on: bool,
    Q_J: float = 0.0,
) -> ThermalState:
    """Advance the temperature field by one stable explicit step."""
    stepper = _ThermalStepper(grid, params, dt, Q_J)
    out = np.empty_like(state.T)
    stepper.step(state.T, out, source_on)
    phase = ThermalPhase.PULSE_ON if source_on else ThermalPhase.COOLING
    return ThermalState(T=out, t=state.t + dt, phase=phase)


def _run(
    state: ThermalState,
    duration: float,
    dt: float,
    grid: Grid2D,
    params: TissueParams,
    Q_J: float,
    source_on: bool,
    phase: ThermalPhase,
    safety_limit: float | None,
    on_step: Callable[[float, np.ndarray], None] | None,
    track_peak: bool,
) -> tuple[ThermalState, float]:
    if duration < 0:
        raise DomainError(f"duration must be nonnegative, got {duration!r}")
    stepper = _ThermalStepper(grid, params, dt, Q_J)
    cur = state.T.copy()
    out = np.empty_like(cur)
    t0 = state.t
    peak = float(cur.max())

    n_steps = int(round(duration / dt))
    if abs(n_steps * dt - duration) > 1e-9 * max(duration, dt):
        n_steps = int(duration / dt)
    remainder = duration - n_steps * dt
    if remainder <= 1e-9 * dt:
        remainder = 0.0

    def advance(active: _ThermalStepper, buf_in, buf_out, t_now):
        nonlocal peak
        active.step(buf_in, buf_out, source_on)
        if track_peak or safety_limit is not None:
            m = float(buf_out.max())
            if m > peak:
                peak = m
            if safety_limit is not None and m >= safety_limit:
                raise SafetyAbort(
                    f"temperature reached {m:.3f} K >= damage threshold "
                    f"{safety_limit:.2f} K at t = {t_now:.6f} s",
                    peak_T=m,
                    time=t_now,
                )
        if on_step is not None:
            on_step(t_now, buf_out)

    for n in range(n_steps):
        advance(stepper, cur, out, t0 + (n + 1) * dt)
        cur, out = out, cur
    if remainder > 0.0:
        advance(_ThermalStepper(grid, params, remainder, Q_J), cur, out, t0 + duration)
        cur, out = out, cur
    return ThermalState(T=cur, t=t0 + duration, phase=phase), peak


def run_pulse_heating(
    state: ThermalState,
    protocol: PulseProtocol,
    dt: float,
    grid: Grid2D,
    params: TissueParams,
    safety_limit: float | None = CELL_DAMAGE_T_K,
    on_step: Callable[[float, np.ndarray], None] | None = None,
) -> tuple[ThermalState, float]:
    """Integrate one ON phase of length t_ep; returns (state, peak T seen).

    With ``safety_limit`` set (strict mode), crossing the threshold raises
    SafetyAbort immediately.  The returned state's field is the end-of-pulse
    temperature distribution.
    """
    E_mm = protocol.field_strength(grid.L)
    Q_J = joule_heating(params.sigma, E_mm * V_PER_MM_TO_V_PER_M)
    return _run(
        state, protocol.t_ep, dt, grid, params, Q_J,
        source_on=True, phase=ThermalPhase.PULSE_ON,
        safety_limit=safety_limit, on_step=on_step, track_peak=True,
    )


def run_cooling(
    state: ThermalState,
    duration: float,
    dt: float,
    grid: Grid2D,
    params: TissueParams,
    on_step: Callable[[float, np.ndarray], None] | None = None,
) -> tuple[ThermalState, float]:
    """Integrate a source-free rest phase; returns (state, peak T seen).

    Under the maximum principle the grid maximum cannot grow during
    cooling, so the peak equals the starting maximum; it is not re-scanned
    every step.
    """
    start_peak = float(state.T.max())
    end_state, _ = _run(
        state, duration, dt, grid, params, 0.0,
        source_on=False, phase=ThermalPhase.COOLING,
        safety_limit=None, on_step=on_step, track_peak=False,
    )
    return end_state, start_peak


def heat_content_above_body(state: ThermalState, grid: Grid2D, params: TissueParams) -> float:
    """rho c integral of (T - T_b) over the domain, J per metre of depth."""
    excess = grid.integrate(state.T - params.T_b)  # K mm^2
    return params.rho * params.c * excess * 1.0e-6  # mm^2 -> m^2
