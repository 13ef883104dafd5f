"""Explicit two-compartment drug-transport solver.

Governing equations on the square tissue (concentrations in M, lengths
in mm, time in s):

    dC_E/dt  = div(D grad C_E) - ((1-eps)/eps) mu(t) (C_E - C_RE)
    dC_RE/dt = mu(t) (C_E - C_RE)

with C_E the extracellular and C_RE the intracellular (reversibly
electroporated cell) concentration.  Boundary conditions: a Dirichlet
drug source C_E = C2 on the x=0 face and zero normal gradient on the
other three faces, realized with second-order ghost-node reflection.

Discretization is forward-time centred-space on a uniform grid, subject
to the usual bound dt < (dx^2 dy^2) / (2 D (dx^2 + dy^2)).  Each step
applies the diffusion stencil to C_E first and then exchanges mass
between the compartments using the diffused extracellular field:

    C*      = C_E + a (E + W - 2 C_E) + c (N + S - 2 C_E)
    C_E'    = C* - ((1-eps)/eps) mu dt (C* - C_RE)
    C_RE'   = C_RE + mu dt (C* - C_RE)

The exchange is algebraically conservative (eps C_E + (1-eps) C_RE is
untouched by it, pointwise), while sequencing diffusion before exchange
keeps the uptake front moving exactly one cell per step from the source.
Both properties are load-bearing for the verification suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, StabilityError
from .grid import Grid2D
from .params import TissueParams
from .physics import mass_transfer_coefficient


@dataclass
class TransportState:
    """Concentration fields plus the transport clock.

    ``t`` is cumulative rest-phase time (the transport clock only runs
    between pulses); ``t_since_pulse`` restarts at 0 at every pulse end
    and drives the resealing decay of mu.
    """

    C_E: np.ndarray
    C_RE: np.ndarray
    t: float = 0.0
    t_since_pulse: float = 0.0
    pulse_index: int = 0

    def copy(self) -> "TransportState":
        return TransportState(
            C_E=self.C_E.copy(),
            C_RE=self.C_RE.copy(),
            t=self.t,
            t_since_pulse=self.t_since_pulse,
            pulse_index=self.pulse_index,
        )


def initial_state(grid: Grid2D, params: TissueParams, source_on: bool = True) -> TransportState:
    """Drug-free tissue with the source face already at C2 (when on)."""
    C_E = grid.zeros()
    if source_on:
        C_E[:, 0] = params.C2
    return TransportState(C_E=C_E, C_RE=grid.zeros())


def transport_stability_dt(grid: Grid2D, D: float) -> float:
    """Strict upper bound on dt for the explicit scheme; callers must stay below it."""
    if not D > 0:
        raise DomainError(f"diffusion coefficient must be positive, got {D!r}")
    dx2 = grid.dx * grid.dx
    dy2 = grid.dy * grid.dy
    return 0.5 * dx2 * dy2 / (D * (dx2 + dy2))


class _Workspace:
    """Reusable padded buffer; the pad ring holds the ghost nodes."""

    def __init__(self, grid: Grid2D):
        self.pad = np.zeros((grid.M2 + 2, grid.M1 + 2), dtype=np.float64)


def _fill_ghosts(pad: np.ndarray, field: np.ndarray) -> None:
    """Zero-gradient (reflection) ghosts on all four faces."""
    pad[1:-1, 1:-1] = field
    pad[1:-1, 0] = pad[1:-1, 2]
    pad[1:-1, -1] = pad[1:-1, -3]
    pad[0, 1:-1] = pad[2, 1:-1]
    pad[-1, 1:-1] = pad[-3, 1:-1]


def _step_fields(
    C_E: np.ndarray,
    C_RE: np.ndarray,
    out_E: np.ndarray,
    out_RE: np.ndarray,
    pad: np.ndarray,
    a: float,
    c: float,
    mu_dt: float,
    exchange_ratio: float,
    source_value: float | None,
) -> None:
    """One step into (out_E, out_RE); source_value None means a closed domain."""
    _fill_ghosts(pad, C_E)
    # diffusion: C* = C + a (E + W - 2C) + c (N + S - 2C)
    np.multiply(C_E, -2.0, out=out_E)
    out_E += pad[1:-1, 2:]
    out_E += pad[1:-1, :-2]
    out_E *= a
    lap_y = pad[2:, 1:-1] - 2.0 * C_E + pad[:-2, 1:-1]
    lap_y *= c
    out_E += lap_y
    out_E += C_E
    if source_value is not None:
        out_E[:, 0] = source_value
    # conservative exchange against the diffused extracellular field
    if mu_dt != 0.0:
        diff = out_E - C_RE
        np.multiply(diff, mu_dt, out=out_RE)
        out_RE += C_RE
        diff *= exchange_ratio * mu_dt
        out_E -= diff
        if source_value is not None:
            out_E[:, 0] = source_value
    else:
        out_RE[...] = C_RE


def transport_step(
    state: TransportState,
    mu: float,
    dt: float,
    grid: Grid2D,
    params: TissueParams,
    source_on: bool = True,
) -> TransportState:
    """Advance both concentration fields by one stable explicit step.

    Rejects dt at or above the stability bound before touching the state.
    """
    bound = transport_stability_dt(grid, params.D)
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt!r}")
    if dt >= bound:
        raise StabilityError(
            f"transport dt = {dt!r} violates the stability bound {bound!r}",
            dt=dt,
            bound=bound,
        )
    if mu < 0:
        raise DomainError(f"mass-transfer coefficient must be nonnegative, got {mu!r}")

    work = _Workspace(grid)
    out_E = np.empty_like(state.C_E)
    out_RE = np.empty_like(state.C_RE)
    a = params.D * dt / (grid.dx * grid.dx)
    c = params.D * dt / (grid.dy * grid.dy)
    ratio = (1.0 - params.eps) / params.eps
    source = params.C2 if source_on else None
    _step_fields(state.C_E, state.C_RE, out_E, out_RE, work.pad, a, c, mu * dt, ratio, source)
    return TransportState(
        C_E=out_E,
        C_RE=out_RE,
        t=state.t + dt,
        t_since_pulse=state.t_since_pulse + dt,
        pulse_index=state.pulse_index,
    )


def run_rest_phase(
    state: TransportState,
    N_ep: float,
    duration: float,
    dt: float,
    grid: Grid2D,
    params: TissueParams,
    mu_fn: Callable[[float], float] | None = None,
    source_on: bool = True,
    on_step: Callable[[TransportState], None] | None = None,
) -> TransportState:
    """Run one inter-pulse rest phase of the given duration.

    mu is re-evaluated at the start of every step from the resealing clock
    ``t_since_pulse``; by default it comes from the pore density N_ep left
    by the last pulse, but a callable mu_fn(t_since_pulse) can replace it
    (comparison harness, zero-electroporation baseline).  ``on_step`` is
    invoked after each completed step with the current state.
    """
    if duration < 0:
        raise DomainError(f"duration must be nonnegative, got {duration!r}")
    bound = transport_stability_dt(grid, params.D)
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt!r}")
    if dt >= bound:
        raise StabilityError(
            f"transport dt = {dt!r} violates the stability bound {bound!r}",
            dt=dt,
            bound=bound,
        )
    if mu_fn is None:
        def mu_fn(t_since_pulse: float) -> float:
            return mass_transfer_coefficient(t_since_pulse, N_ep, params)

    n_steps = int(round(duration / dt))
    if abs(n_steps * dt - duration) > 1e-9 * max(duration, dt):
        n_steps = int(duration / dt)
    work = _Workspace(grid)
    cur_E, cur_RE = state.C_E.copy(), state.C_RE.copy()
    out_E, out_RE = np.empty_like(cur_E), np.empty_like(cur_RE)
    a = params.D * dt / (grid.dx * grid.dx)
    c = params.D * dt / (grid.dy * grid.dy)
    ratio = (1.0 - params.eps) / params.eps
    source = params.C2 if source_on else None
    t0, ts0 = state.t, state.t_since_pulse

    live = TransportState(C_E=cur_E, C_RE=cur_RE, t=t0, t_since_pulse=ts0,
                          pulse_index=state.pulse_index)
    for n in range(n_steps):
        mu = mu_fn(live.t_since_pulse)
        if mu < 0:
            raise DomainError(f"mass-transfer coefficient must be nonnegative, got {mu!r}")
        _step_fields(live.C_E, live.C_RE, out_E, out_RE, work.pad, a, c, mu * dt, ratio, source)
        live.C_E, out_E = out_E, live.C_E
        live.C_RE, out_RE = out_RE, live.C_RE
        live.t = t0 + (n + 1) * dt
        live.t_since_pulse = ts0 + (n + 1) * dt
        if on_step is not None:
            on_step(live)
    remainder = duration - n_steps * dt
    if remainder > 1e-9 * dt:
        mu = mu_fn(live.t_since_pulse)
        a_r = params.D * remainder / (grid.dx * grid.dx)
        c_r = params.D * remainder / (grid.dy * grid.dy)
        _step_fields(live.C_E, live.C_RE, out_E, out_RE, work.pad, a_r, c_r,
                     mu * remainder, ratio, source)
        live.C_E, out_E = out_E, live.C_E
        live.C_RE, out_RE = out_RE, live.C_RE
        live.t = t0 + duration
        live.t_since_pulse = ts0 + duration
        if on_step is not None:
            on_step(live)
    # land the phase clock exactly on the requested duration
    live.t = t0 + duration
    live.t_since_pulse = ts0 + duration
    return live


def drug_mass(state: TransportState, grid: Grid2D, params: TissueParams) -> float:
    """Discrete integral of eps C_E + (1-eps) C_RE over the domain (M mm^2).

    Uses the trapezoidal quadrature, which is exactly the functional the
    reflected-ghost scheme conserves when the domain is closed.
    """
    mixture = params.eps * state.C_E + (1.0 - params.eps) * state.C_RE
    return grid.integrate(mixture)
