"""Multi-pulse experiment orchestration.

A protocol run alternates PN times between a short ON phase (uniform
field applied: pores created, tissue Joule-heated) and a long OFF phase
(drug exchange between compartments plus passive cooling).  Drug
transport happens only during OFF phases, so the transport clock counts
cumulative rest time; the thermal solver keeps its own clock and step
size, and the two never exchange data.

Per cycle: the end-of-pulse pore density is recomputed from scratch
(identical pulses recreate the same pore population) and the resealing
clock restarts at zero, which produces the characteristic uptake jumps
after every pulse.  Temperature carries over from cycle to cycle, so
ratcheting across pulses is captured and checked against the 315.15 K
cell-damage threshold.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import thermal, transport
from .errors import ConfigError, SafetyAbort, SimulationError, StabilityError
from .grid import Grid2D
from .params import (
    CELL_DAMAGE_T_K,
    DOSE_THRESHOLD_M,
    MAX_FIELD_V_PER_MM,
    PulseProtocol,
    TissueParams,
)
from .physics import (
    kalamiza_mtc,
    mass_transfer_coefficient,
    pore_density_analytic,
    transmembrane_potential,
    uniform_electric_field,
)

DEFAULT_PROBES = ((0.1, 0.5), (0.5, 0.5), (0.9, 0.5))
DEFAULT_INITIATION_FLOOR = 1e-300
_TIME_EPS = 1e-9


class MtcSource(enum.Enum):
    """Which mass-transfer coefficient drives the compartment exchange."""

    MODEL = "model"          # resealing MTC from the pore-density dynamics
    KALAMIZA = "kalamiza"    # dual-porosity literature coefficient
    ZERO = "zero"            # no electroporation: pure-diffusion baseline


class SafetyMode(enum.Enum):
    STRICT = "strict"    # abort the run when T reaches the damage threshold
    REPORT = "report"    # finish the run, flag safety_ok=False


class SweepAxis(enum.Enum):
    P = "P"
    D = "D"
    T_EP = "t_ep"
    PN = "PN"


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved description of one simulation scenario.

    Time steps left as None are chosen automatically from the stability
    bounds: transport at 0.8x its bound (which reproduces the reference
    0.2 s step on the default grid), the pulse-phase thermal step at
    min(2e-5 s, half the bound), and the rest-phase thermal step at half
    the bound so coarse grids cool at desk scale.
    """

    params: TissueParams = field(default_factory=TissueParams)
    protocol: PulseProtocol = field(default_factory=PulseProtocol)
    grid: Grid2D = field(default_factory=lambda: Grid2D.from_counts(101, 101, 1.0))
    probes: tuple[tuple[float, float], ...] = DEFAULT_PROBES
    cadence: float = 1.0                                    # probe sampling period, s
    snapshot_times: tuple[float, ...] | None = None         # None -> final time only
    mtc_source: MtcSource = MtcSource.MODEL
    thermal_enabled: bool = True
    initiation_floor: float = DEFAULT_INITIATION_FLOOR
    dt_transport: float | None = None
    dt_thermal_pulse: float | None = None
    dt_thermal_rest: float | None = None
    enforce_field_limit: bool = True
    safety_mode: SafetyMode = SafetyMode.STRICT

    def __post_init__(self):
        if abs(self.grid.L - self.params.L) > 1e-12 * self.params.L:
            raise ConfigError(
                f"grid spans {self.grid.L!r} mm but the tissue side is {self.params.L!r} mm",
                location="grid",
            )
        for x, y in self.probes:
            if not (0.0 <= x <= self.params.L and 0.0 <= y <= self.params.L):
                raise ConfigError(
                    f"probe ({x!r}, {y!r}) lies outside the tissue", location="probes.points"
                )
        if not self.cadence > 0:
            raise ConfigError(f"cadence must be positive, got {self.cadence!r}",
                              location="output.cadence")
        if not self.initiation_floor > 0:
            raise ConfigError(
                f"initiation floor must be positive, got {self.initiation_floor!r}",
                location="output.initiation_floor",
            )
        total = self.protocol.PN * self.protocol.t_M
        if self.snapshot_times is not None:
            for s in self.snapshot_times:
                if not 0.0 <= s <= total + _TIME_EPS:
                    raise ConfigError(
                        f"snapshot time {s!r} outside the simulated span [0, {total!r}]",
                        location="output.snapshot_times",
                    )
        if self.enforce_field_limit:
            E = self.field_strength
            if E > MAX_FIELD_V_PER_MM * (1.0 + 1e-12):
                raise ConfigError(
                    f"field strength {E!r} V/mm exceeds the {MAX_FIELD_V_PER_MM} V/mm "
                    "reversible-electroporation limit (set enforce_field_limit = false "
                    "to override)",
                    location="protocol",
                )

    @property
    def field_strength(self) -> float:
        return uniform_electric_field(self.protocol.phi0, self.protocol.phiL, self.params.L)

    @property
    def pole_transmembrane_potential(self) -> float:
        """V_m at the pole facing the field, where pore creation peaks."""
        return transmembrane_potential(self.field_strength, self.params.r_c, 0.0)

    @property
    def transport_dt(self) -> float:
        if self.dt_transport is not None:
            return self.dt_transport
        return 0.8 * transport.transport_stability_dt(self.grid, self.params.D)

    @property
    def thermal_pulse_dt(self) -> float:
        if self.dt_thermal_pulse is not None:
            return self.dt_thermal_pulse
        return min(2.0e-5, 0.5 * thermal.thermal_stability_dt(self.grid, self.params))

    @property
    def thermal_rest_dt(self) -> float:
        if self.dt_thermal_rest is not None:
            return self.dt_thermal_rest
        return 0.5 * thermal.thermal_stability_dt(self.grid, self.params)

    @property
    def snapshots_resolved(self) -> tuple[float, ...]:
        if self.snapshot_times is not None:
            return self.snapshot_times
        return (self.protocol.PN * self.protocol.t_M,)

    def total_rest_time(self) -> float:
        return self.protocol.PN * self.protocol.t_M

    def mu_function(self, N_ep: float):
        """mu(t_since_pulse) according to the configured source."""
        if self.mtc_source is MtcSource.MODEL:
            return lambda ts: mass_transfer_coefficient(ts, N_ep, self.params)
        if self.mtc_source is MtcSource.KALAMIZA:
            return lambda ts: kalamiza_mtc(ts, self.params)
        return lambda ts: 0.0


@dataclass
class Snapshot:
    quantity: str        # "C_E", "C_RE" or "T"
    time: float          # transport-clock time, s
    values: np.ndarray   # (M2, M1)


@dataclass
class InitiationEntry:
    x: float
    y: float
    time: float | None   # None when the floor was never crossed
    value: float | None


@dataclass
class SimulationResult:
    """Probe series, snapshots, uptake-front table and safety verdict."""

    config: ScenarioConfig
    times: np.ndarray                 # (n_samples,)
    probe_CE: np.ndarray              # (n_samples, n_probes)
    probe_CRE: np.ndarray
    probe_T: np.ndarray
    row_times: np.ndarray             # C_RE mid-row series timestamps
    row_CRE: np.ndarray               # (n_row_samples, M1)
    snapshots: list[Snapshot]
    initiation_table: list[InitiationEntry]
    peak_T: float
    safety_ok: bool
    partial: bool
    dose_mean: float                  # grid mean of final C_RE, M
    dose_frac_above: float            # fraction of nodes with C_RE > 0.025 M
    total_rest_time: float
    total_pulse_time: float
    pulse_end_center_T: list[float]
    final_CE: np.ndarray
    final_CRE: np.ndarray
    final_T: np.ndarray | None

    def probe_label(self, index: int) -> str:
        return f"p{index}"

    def summary_dict(self) -> dict:
        """Scalar summary used by the export, CLI and HTTP layers."""
        finals = {}
        for idx, (x, y) in enumerate(self.config.probes):
            finals[self.probe_label(idx)] = {
                "x": x,
                "y": y,
                "C_E": float(self.probe_CE[-1, idx]) if len(self.times) else None,
                "C_RE": float(self.probe_CRE[-1, idx]) if len(self.times) else None,
                "T": float(self.probe_T[-1, idx]) if len(self.times) else None,
            }
        return {
            "peak_T_K": self.peak_T,
            "safety_ok": self.safety_ok,
            "partial": self.partial,
            "dose_mean_CRE_M": self.dose_mean,
            "dose_frac_above_threshold": self.dose_frac_above,
            "dose_threshold_M": DOSE_THRESHOLD_M,
            "total_rest_time_s": self.total_rest_time,
            "total_pulse_time_s": self.total_pulse_time,
            "final_probes": finals,
        }


def _cadence_targets(duration: float, cadence: float) -> list[float]:
    """Sampling offsets k*cadence inside one phase, k = 1..floor(duration/cadence)."""
    count = int(duration / cadence + _TIME_EPS)
    return [k * cadence for k in range(1, count + 1)]


class _PhaseSampler:
    """Captures values the first time the phase clock passes each target."""

    def __init__(self, targets: list[float]):
        self.targets = targets
        self.next_idx = 0
        self.captured: list = []

    def poll(self, t_phase: float, capture) -> None:
        while self.next_idx < len(self.targets) and t_phase >= self.targets[self.next_idx] - _TIME_EPS:
            self.captured.append(capture(self.targets[self.next_idx]))
            self.next_idx += 1

    def flush_remaining(self, capture) -> None:
        """Capture any targets not yet reached (end-of-phase rounding guard)."""
        while self.next_idx < len(self.targets):
            self.captured.append(capture(self.targets[self.next_idx]))
            self.next_idx += 1


class _Recorder:
    """Accumulates probe rows, the C_RE mid-row series and snapshots."""

    def __init__(self, config: ScenarioConfig):
        grid = config.grid
        self.config = config
        self.probe_idx = [grid.node_index(x, y) for x, y in config.probes]
        self.mid_row = grid.mid_row
        self.dense_window = 2 * grid.M1 + 2   # steps with per-step mid-row capture
        self.times: list[float] = []
        self.CE_rows: list[list[float]] = []
        self.CRE_rows: list[list[float]] = []
        self.T_rows: list[list[float]] = []
        self.row_times: list[float] = []
        self.row_values: list[np.ndarray] = []
        self.snapshots: list[Snapshot] = []
        self._dense_end_t = 0.0

    def sample_probes(self, fld: np.ndarray) -> list[float]:
        return [float(fld[j, i]) for j, i in self.probe_idx]

    def record_initial(self, tstate: transport.TransportState,
                       thstate: thermal.ThermalState | None) -> None:
        self.times.append(0.0)
        self.CE_rows.append(self.sample_probes(tstate.C_E))
        self.CRE_rows.append(self.sample_probes(tstate.C_RE))
        T_b = self.config.params.T_b
        self.T_rows.append(self.sample_probes(thstate.T) if thstate is not None
                           else [T_b] * len(self.probe_idx))
        self.row_times.append(0.0)
        self.row_values.append(tstate.C_RE[self.mid_row, :].copy())
        for s in self.config.snapshots_resolved:
            if abs(s) <= _TIME_EPS:
                self.snapshots.append(Snapshot("C_E", 0.0, tstate.C_E.copy()))
                self.snapshots.append(Snapshot("C_RE", 0.0, tstate.C_RE.copy()))
                if thstate is not None:
                    self.snapshots.append(Snapshot("T", 0.0, thstate.T.copy()))

    def merge_phase(self, phase_start: float, transport_rows: list, thermal_rows: list | None) -> None:
        """Zip the per-phase cadence captures into global probe rows."""
        T_b = self.config.params.T_b
        n = len(transport_rows)
        for k in range(n):
            offset, ce, cre = transport_rows[k]
            self.times.append(phase_start + offset)
            self.CE_rows.append(ce)
            self.CRE_rows.append(cre)
            if thermal_rows is not None and k < len(thermal_rows):
                self.T_rows.append(thermal_rows[k][1])
            else:
                self.T_rows.append([T_b] * len(self.probe_idx))


def _snapshot_targets_for_phase(config: ScenarioConfig, phase_start: float,
                                duration: float) -> list[float]:
    """Requested snapshot times that fall inside this phase, as offsets."""
    out = []
    for s in config.snapshots_resolved:
        if phase_start + _TIME_EPS < s <= phase_start + duration + _TIME_EPS:
            out.append(s - phase_start)
    return sorted(out)


def run_protocol(config: ScenarioConfig) -> SimulationResult:
    """Execute the full multi-pulse protocol described by ``config``.

    Raises StabilityError before any stepping if a configured step
    violates its bound, and SafetyAbort (carrying the partial result) if
    strict safety trips.  Results are bit-deterministic for a given
    configuration.
    """
    params, protocol, grid = config.params, config.protocol, config.grid

    dt_tr = config.transport_dt
    bound_tr = transport.transport_stability_dt(grid, params.D)
    if not 0 < dt_tr < bound_tr:
        raise StabilityError(
            f"transport dt = {dt_tr!r} violates the stability bound {bound_tr!r}",
            dt=dt_tr, bound=bound_tr,
        )
    if config.thermal_enabled:
        bound_th = thermal.thermal_stability_dt(grid, params)
        for label, dt_val in (("pulse", config.thermal_pulse_dt),
                              ("rest", config.thermal_rest_dt)):
            if not 0 < dt_val < bound_th:
                raise StabilityError(
                    f"thermal {label} dt = {dt_val!r} violates the stability "
                    f"bound {bound_th!r}",
                    dt=dt_val, bound=bound_th,
                )

    V_m = config.pole_transmembrane_potential
    N_ep = 0.0
    if config.mtc_source is MtcSource.MODEL:
        N_ep = pore_density_analytic(protocol.t_ep, V_m, params)
    mu_fn = config.mu_function(N_ep)

    tstate = transport.initial_state(grid, params)
    thstate = thermal.initial_state(grid, params) if config.thermal_enabled else None
    rec = _Recorder(config)
    rec.record_initial(tstate, thstate)

    strict = config.safety_mode is SafetyMode.STRICT
    peak_T = params.T_b
    pulse_end_center = []
    center = grid.node_index(grid.L / 2.0, grid.L / 2.0)
    total_pulse_time = 0.0
    total_rest_time = 0.0

    def assemble(partial: bool) -> SimulationResult:
        final_CRE = tstate.C_RE
        return SimulationResult(
            config=config,
            times=np.asarray(rec.times),
            probe_CE=np.asarray(rec.CE_rows, dtype=np.float64).reshape(len(rec.times), -1),
            probe_CRE=np.asarray(rec.CRE_rows, dtype=np.float64).reshape(len(rec.times), -1),
            probe_T=np.asarray(rec.T_rows, dtype=np.float64).reshape(len(rec.times), -1),
            row_times=np.asarray(rec.row_times),
            row_CRE=np.asarray(rec.row_values),
            snapshots=rec.snapshots,
            initiation_table=[],
            peak_T=peak_T,
            safety_ok=peak_T < CELL_DAMAGE_T_K,
            partial=partial,
            dose_mean=float(final_CRE.mean()),
            dose_frac_above=float((final_CRE > DOSE_THRESHOLD_M).mean()),
            total_rest_time=total_rest_time,
            total_pulse_time=total_pulse_time,
            pulse_end_center_T=pulse_end_center,
            final_CE=tstate.C_E,
            final_CRE=final_CRE,
            final_T=thstate.T if thstate is not None else None,
        )

    try:
        for pulse in range(1, protocol.PN + 1):
            if thstate is not None:
                thstate, pk = thermal.run_pulse_heating(
                    thstate, protocol, config.thermal_pulse_dt, grid, params,
                    safety_limit=CELL_DAMAGE_T_K if strict else None,
                )
                peak_T = max(peak_T, pk)
                pulse_end_center.append(float(thstate.T[center]))
            total_pulse_time += protocol.t_ep

            phase_start = tstate.t
            tstate.pulse_index = pulse
            tstate.t_since_pulse = 0.0

            cadence_offsets = _cadence_targets(protocol.t_M, config.cadence)
            snap_offsets = _snapshot_targets_for_phase(config, phase_start, protocol.t_M)

            thermal_rows = None
            if thstate is not None:
                cool_sampler = _PhaseSampler(cadence_offsets)
                snap_sampler_T = _PhaseSampler(snap_offsets)
                cool_start = thstate.t

                def on_cool(t_now: float, T: np.ndarray) -> None:
                    offset = t_now - cool_start
                    cool_sampler.poll(offset, lambda tgt: (tgt, rec.sample_probes(T)))
                    snap_sampler_T.poll(
                        offset,
                        lambda tgt: Snapshot("T", phase_start + tgt, T.copy()),
                    )

                thstate, _ = thermal.run_cooling(
                    thstate, protocol.t_M, config.thermal_rest_dt, grid, params,
                    on_step=on_cool,
                )
                cool_sampler.flush_remaining(
                    lambda tgt: (tgt, rec.sample_probes(thstate.T)))
                snap_sampler_T.flush_remaining(
                    lambda tgt: Snapshot("T", phase_start + tgt, thstate.T.copy()))
                thermal_rows = cool_sampler.captured
                rec.snapshots.extend(snap_sampler_T.captured)

            tr_sampler = _PhaseSampler(cadence_offsets)
            snap_sampler = _PhaseSampler(snap_offsets)
            dense = pulse == 1

            def on_transport(state: transport.TransportState) -> None:
                offset = state.t - phase_start
                tr_sampler.poll(
                    offset,
                    lambda tgt: (tgt, rec.sample_probes(state.C_E),
                                 rec.sample_probes(state.C_RE)),
                )
                snap_sampler.poll(
                    offset,
                    lambda tgt: [
                        Snapshot("C_E", phase_start + tgt, state.C_E.copy()),
                        Snapshot("C_RE", phase_start + tgt, state.C_RE.copy()),
                    ],
                )
                if dense and len(rec.row_times) <= rec.dense_window:
                    rec.row_times.append(state.t)
                    rec.row_values.append(state.C_RE[rec.mid_row, :].copy())
                elif offset >= rec._next_row_target(phase_start) - _TIME_EPS:
                    rec.row_times.append(state.t)
                    rec.row_values.append(state.C_RE[rec.mid_row, :].copy())

            # mid-row cadence targets: reuse the probe cadence
            rec._row_next = None
            tstate = _run_rest_with_row_capture(
                tstate, N_ep, protocol.t_M, dt_tr, grid, params, mu_fn,
                rec, phase_start, tr_sampler, snap_sampler, dense,
                config.cadence,
            )
            tr_sampler.flush_remaining(
                lambda tgt: (tgt, rec.sample_probes(tstate.C_E),
                             rec.sample_probes(tstate.C_RE)))
            snap_sampler.flush_remaining(
                lambda tgt: [
                    Snapshot("C_E", phase_start + tgt, tstate.C_E.copy()),
                    Snapshot("C_RE", phase_start + tgt, tstate.C_RE.copy()),
                ])
            for item in snap_sampler.captured:
                rec.snapshots.extend(item)
            total_rest_time += protocol.t_M
            rec.merge_phase(phase_start, tr_sampler.captured, thermal_rows)
    except SafetyAbort as abort:
        peak_T = max(peak_T, abort.peak_T)
        result = assemble(partial=True)
        abort.result = result
        raise

    result = assemble(partial=False)
    result.initiation_table = _build_initiation_table(result)
    return result


def _run_rest_with_row_capture(tstate, N_ep, duration, dt, grid, params, mu_fn,
                               rec, phase_start, tr_sampler, snap_sampler,
                               dense, cadence):
    """Rest phase driver: probes/snapshots via samplers, plus the C_RE
    mid-row series (every step inside the dense window of the first rest,
    cadence-spaced afterwards)."""
    dense_limit = rec.dense_window
    row_targets = _cadence_targets(duration, cadence)
    row_sampler = _PhaseSampler(row_targets)

    def on_step(state: transport.TransportState) -> None:
        offset = state.t - phase_start
        tr_sampler.poll(
            offset,
            lambda tgt: (tgt, rec.sample_probes(state.C_E),
                         rec.sample_probes(state.C_RE)),
        )
        snap_sampler.poll(
            offset,
            lambda tgt: [
                Snapshot("C_E", phase_start + tgt, state.C_E.copy()),
                Snapshot("C_RE", phase_start + tgt, state.C_RE.copy()),
            ],
        )
        if dense and len(rec.row_times) - 1 < dense_limit:
            rec.row_times.append(state.t)
            rec.row_values.append(state.C_RE[rec.mid_row, :].copy())
        else:
            row_sampler.poll(
                offset,
                lambda tgt: (phase_start + tgt, state.C_RE[rec.mid_row, :].copy()),
            )

    new_state = transport.run_rest_phase(
        tstate, N_ep, duration, dt, grid, params,
        mu_fn=mu_fn, on_step=on_step,
    )
    for t_row, row in row_sampler.captured:
        if t_row > rec.row_times[-1] + _TIME_EPS:
            rec.row_times.append(t_row)
            rec.row_values.append(row)
    return new_state


def _build_initiation_table(result: SimulationResult) -> list[InitiationEntry]:
    """First crossing of the initiation floor for every interior column."""
    grid = result.config.grid
    floor = result.config.initiation_floor
    y_mid = grid.mid_row * grid.dy
    entries = []
    rows = result.row_CRE
    times = result.row_times
    for i in range(1, grid.M1):
        column = rows[:, i]
        above = np.nonzero(column > floor)[0]
        if len(above):
            k = int(above[0])
            entries.append(InitiationEntry(x=i * grid.dx, y=y_mid,
                                           time=float(times[k]),
                                           value=float(column[k])))
        else:
            entries.append(InitiationEntry(x=i * grid.dx, y=y_mid, time=None, value=None))
    return entries


def initiation_times(
    result: SimulationResult,
    locations: list[float] | None = None,
    floor: float | None = None,
) -> list[InitiationEntry]:
    """First time C_RE exceeds ``floor`` along the y = L/2 row.

    ``locations`` are x positions in mm (nearest column is used); None
    means every interior column.  A location whose column never crosses
    the floor is reported with time/value None.  The default floor picks
    up the very first nonzero uptake, resolved to single-step precision
    inside the dense recording window.
    """
    grid = result.config.grid
    if floor is None:
        floor = result.config.initiation_floor
    if locations is None:
        columns = list(range(1, grid.M1))
    else:
        columns = [grid.node_index(x, grid.mid_row * grid.dy)[1] for x in locations]
    y_mid = grid.mid_row * grid.dy
    out = []
    for i in columns:
        column = result.row_CRE[:, i]
        above = np.nonzero(column > floor)[0]
        if len(above):
            k = int(above[0])
            out.append(InitiationEntry(x=i * grid.dx, y=y_mid,
                                       time=float(result.row_times[k]),
                                       value=float(column[k])))
        else:
            out.append(InitiationEntry(x=i * grid.dx, y=y_mid, time=None, value=None))
    return out


@dataclass
class SweepItem:
    axis: str
    value: float
    result: SimulationResult | None
    error: str | None = None


def build_variant(base: ScenarioConfig, axis: SweepAxis, value) -> ScenarioConfig:
    """Derive a scenario from ``base`` with one swept parameter replaced.

    Automatic time steps are re-resolved against the new parameters, so
    e.g. a larger diffusivity gets a correspondingly smaller stable step.
    """
    if axis in (SweepAxis.P, SweepAxis.D):
        new_params = replace(base.params, **{axis.value: float(value)})
        return replace(base, params=new_params)
    if axis is SweepAxis.T_EP:
        return replace(base, protocol=replace(base.protocol, t_ep=float(value)))
    new_protocol = replace(base.protocol, PN=int(value))
    return replace(base, protocol=new_protocol)


def sweep(base: ScenarioConfig, axis: SweepAxis, values: list) -> list[SweepItem]:
    """One independent protocol run per value, in input order.

    Items run concurrently (runs share no mutable state); an invalid
    derived configuration is reported on its item without aborting the
    rest of the sweep.
    """
    if not values:
        raise ConfigError("sweep requires at least one value", location="sweep.values")

    def run_one(value) -> SweepItem:
        try:
            cfg = build_variant(base, axis, value)
            return SweepItem(axis=axis.value, value=value, result=run_protocol(cfg))
        except SafetyAbort as e:
            item = SweepItem(axis=axis.value, value=value, result=e.result,
                             error=f"safety abort: {e}")
            return item
        except SimulationError as e:
            return SweepItem(axis=axis.value, value=value, result=None, error=str(e))

    with ThreadPoolExecutor(max_workers=min(4, len(values))) as pool:
        return list(pool.map(run_one, values))


@dataclass
class ProbeDeviation:
    probe: str
    x: float
    y: float
    max_abs_dev: float       # max over time of |C_RE difference|
    rel_final_dev: float     # |difference| / reference at the final sample


@dataclass
class ComparisonResult:
    model: SimulationResult
    kalamiza: SimulationResult
    deviations: list[ProbeDeviation]


def compare_mtc(config: ScenarioConfig) -> ComparisonResult:
    """Run the identical scenario under both exchange coefficients.

    Reports, per probe, the maximum absolute intracellular-concentration
    deviation over time and the relative deviation of the final value.
    """
    res_model = run_protocol(replace(config, mtc_source=MtcSource.MODEL))
    res_kal = run_protocol(replace(config, mtc_source=MtcSource.KALAMIZA))
    deviations = []
    for idx, (x, y) in enumerate(config.probes):
        a = res_model.probe_CRE[:, idx]
        b = res_kal.probe_CRE[:, idx]
        n = min(len(a), len(b))
        max_abs = float(np.max(np.abs(a[:n] - b[:n]))) if n else 0.0
        ref = abs(b[n - 1]) if n else 0.0
        rel = float(abs(a[n - 1] - b[n - 1]) / ref) if ref > 0 else 0.0
        deviations.append(ProbeDeviation(probe=f"p{idx}", x=x, y=y,
                                         max_abs_dev=max_abs, rel_final_dev=rel))
    return ComparisonResult(model=res_model, kalamiza=res_kal, deviations=deviations)
