"""Time integration of the semigroup and energy-decay measurement.

The trajectory z' = A_h z is advanced by the implicit trapezoidal rule
(Crank-Nicolson).  Because the discrete generator is exactly dissipative
in the energy form, each step satisfies

    E(z+) - E(z) = -dt * D(m),      m = (z + z+)/2,

where D is the heat-gradient dissipation form, so the discrete energy is
non-increasing to round-off and the dissipation identity can be checked
per step rather than asymptotically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .characteristic import BoundaryVariant
from .discretization import DiscreteGenerator, GridSpec, assemble
from .errors import SolveFailureError, VariantError, WindowError
from .state import StateVector

__all__ = [
    "SimulationConfig",
    "EnergySeries",
    "DecayFit",
    "CrankNicolsonStepper",
    "step",
    "run",
    "project_kernel",
    "kernel_functional",
    "fit_decay",
    "last_clean_decade",
    "decade_slopes",
    "write_energy_csv",
]

ENERGY_FLOOR_RATIO = 1e-12


@dataclass(frozen=True)
class SimulationConfig:
    dt: float
    t_max: float
    grid: GridSpec
    variant: BoundaryVariant
    integrator: str = "implicit_trapezoidal"
    output_stride: int = 1

    def __post_init__(self):
        if self.integrator != "implicit_trapezoidal":
            raise ValueError("only the implicit trapezoidal integrator is available")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.dt > 0.5 * self.grid.h_wave + 1e-15:
            raise ValueError(
                f"dt = {self.dt:g} violates the accuracy guard "
                f"dt <= h_wave/2 = {0.5 * self.grid.h_wave:g}"
            )
        if self.t_max < 10.0:
            raise ValueError("t_max must be at least 10")
        if self.output_stride < 1:
            raise ValueError("output_stride must be >= 1")


@dataclass
class EnergySeries:
    """Energy history with per-interval dissipation integrals.

    ``dissipation[k]`` is the integral of the heat-gradient dissipation
    over (times[k-1], times[k]] (first entry 0), so the balance
    E(t_k) - E(t_{k-1}) + dissipation[k] = 0 holds step-exactly.
    """

    times: np.ndarray
    energies: np.ndarray
    dissipation: np.ndarray
    phi: np.ndarray | None = field(default=None)


class CrankNicolsonStepper:
    """Factorized implicit-trapezoidal propagator for a fixed (grid, dt)."""

    def __init__(self, disc: DiscreteGenerator, dt: float):
        self.disc = disc
        self.dt = dt
        eye = sp.identity(disc.dim, format="csc")
        try:
            self._lu = spla.splu((eye - 0.5 * dt * disc.A).tocsc())
        except RuntimeError as exc:
            raise SolveFailureError(f"factorization failed: {exc}") from exc
        self._rhs = (eye + 0.5 * dt * disc.A).tocsr()

    def advance(self, z: np.ndarray) -> np.ndarray:
        out = self._lu.solve(self._rhs @ z)
        if not np.all(np.isfinite(out)):
            raise SolveFailureError("non-finite state after implicit solve")
        return out


_STEPPER_CACHE: dict[tuple, CrankNicolsonStepper] = {}


def _stepper_for(config: SimulationConfig) -> CrankNicolsonStepper:
    key = (config.grid.n_wave, config.grid.n_heat, config.variant, config.dt)
    if key not in _STEPPER_CACHE:
        if len(_STEPPER_CACHE) > 8:
            _STEPPER_CACHE.clear()
        disc = assemble(config.grid, config.variant)
        _STEPPER_CACHE[key] = CrankNicolsonStepper(disc, config.dt)
    return _STEPPER_CACHE[key]


def step(state: StateVector, config: SimulationConfig) -> StateVector:
    """One implicit trapezoidal step of the packed state."""
    stepper = _stepper_for(config)
    z = stepper.disc.pack_state(state)
    return stepper.disc.unpack(stepper.advance(z))


def run(x0: StateVector, config: SimulationConfig) -> EnergySeries:
    """Propagate x0 to t_max, recording energy, dissipation and phi.

    The per-interval dissipation is accumulated from the midpoint states,
    for which the trapezoidal rule satisfies the energy balance exactly.
    """
    stepper = _stepper_for(config)
    disc = stepper.disc
    z = disc.pack_state(x0)
    z = z.astype(complex) if np.iscomplexobj(z) else z.astype(float)
    n_steps = int(round(config.t_max / config.dt))
    stride = config.output_stride

    times = [0.0]
    energies = [disc.energy(z)]
    dissipation = [0.0]
    phis = [kernel_functional(disc.unpack(z))]
    acc = 0.0
    for i in range(1, n_steps + 1):
        z_new = stepper.advance(z)
        mid = 0.5 * (z + z_new)
        acc += config.dt * disc.dissipation_rate(mid)
        z = z_new
        if i % stride == 0 or i == n_steps:
            times.append(i * config.dt)
            energies.append(disc.energy(z))
            dissipation.append(acc)
            phis.append(kernel_functional(disc.unpack(z)))
            acc = 0.0
    return EnergySeries(
        times=np.asarray(times),
        energies=np.asarray(energies),
        dissipation=np.asarray(dissipation),
        phi=np.asarray(phis),
    )


def kernel_functional(x: StateVector) -> float:
    """The bounded functional u(0) + int v + int (1-xi) w.

    Its level sets split the state space: the projection onto the
    stationary direction (1, 0, 0) is x -> (phi(x), 0, 0).
    """
    val = x.u[-1]
    val = val + np.trapezoid(x.v, x.xi_wave)
    val = val + np.trapezoid((1.0 - x.xi_heat) * x.w, x.xi_heat)
    return complex(val).real if not np.iscomplexobj(x.u) else complex(val)


def project_kernel(x: StateVector) -> tuple[StateVector, StateVector]:
    """Split x = x0 + x1 with x1 = (phi(x), 0, 0) stationary and x0 decaying.

    Only meaningful for the Neumann variant; the Dirichlet generator has a
    trivial kernel.
    """
    if x.variant is not BoundaryVariant.NEUMANN:
        raise VariantError("kernel projection applies to the Neumann variant only")
    phi = kernel_functional(x)
    x1 = StateVector(
        u=np.full_like(x.u, phi),
        v=np.zeros_like(x.v),
        w=np.zeros_like(x.w),
        variant=x.variant,
        u_prime=None if x.u_prime is None else np.zeros_like(x.u_prime),
    )
    x0 = x.minus(x1)
    return x0, x1


@dataclass(frozen=True)
class DecayFit:
    window: tuple[float, float]
    slope: float
    stderr: float
    k: int
    local_slopes: tuple[tuple[float, float], ...] = ()


def _window_slope(ts: np.ndarray, es: np.ndarray) -> tuple[float, float]:
    lt, le = np.log(ts), np.log(es)
    slope, intercept = np.polyfit(lt, le, 1)
    resid = le - (slope * lt + intercept)
    dof = max(len(ts) - 2, 1)
    denom = np.sum((lt - lt.mean()) ** 2)
    stderr = math.sqrt(float(np.sum(resid**2) / dof / denom))
    return float(slope), stderr


def fit_decay(
    series: EnergySeries, window: tuple[float, float], k: int = 1
) -> DecayFit:
    """Least-squares log-log slope of the energy over a time window.

    The window must span at least a factor 4 in time and contain at least
    10 samples with energy above the round-off floor.  Local slopes over
    sliding half-windows are attached to expose drift of the exponent.
    """
    t_lo, t_hi = window
    if t_hi < 4.0 * t_lo or t_lo <= 0.0:
        raise WindowError(f"window ({t_lo:g}, {t_hi:g}) must satisfy t_hi >= 4 t_lo > 0")
    floor = ENERGY_FLOOR_RATIO * series.energies[0]
    mask = (series.times >= t_lo) & (series.times <= t_hi)
    if np.count_nonzero(mask) < 10:
        raise WindowError("fewer than 10 samples in the fit window")
    ts, es = series.times[mask], series.energies[mask]
    if np.any(es <= floor):
        raise WindowError("window reaches the round-off energy floor")
    slope, stderr = _window_slope(ts, es)
    locals_: list[tuple[float, float]] = []
    ratio = t_hi / t_lo
    n_sub = max(2, int(round(math.log(ratio) / math.log(2.0))))
    for j in range(n_sub):
        a = t_lo * ratio ** (j / n_sub)
        b = t_lo * ratio ** ((j + 1) / n_sub)
        m = (ts >= a) & (ts <= b)
        if np.count_nonzero(m) >= 5:
            sl, _ = _window_slope(ts[m], es[m])
            locals_.append((math.sqrt(a * b), sl))
    return DecayFit(
        window=(t_lo, t_hi), slope=slope, stderr=stderr, k=k,
        local_slopes=tuple(locals_),
    )


def last_clean_decade(series: EnergySeries) -> tuple[float, float]:
    """The last factor-10 window before the energy reaches its floor."""
    floor = ENERGY_FLOOR_RATIO * series.energies[0]
    above = series.times[series.energies > floor]
    if len(above) < 10:
        raise WindowError("energy history entirely at the round-off floor")
    t_hi = float(above[-1])
    t_lo = t_hi / 10.0
    if t_lo < series.times[1]:
        t_lo = float(series.times[1])
        if t_hi < 4.0 * t_lo:
            raise WindowError("history too short for a decade fit")
    return t_lo, t_hi


def decade_slopes(series: EnergySeries) -> list[tuple[float, float]]:
    """Fitted slopes over successive factor-10 windows ending at the floor."""
    floor = ENERGY_FLOOR_RATIO * series.energies[0]
    above = series.times[series.energies > floor]
    t_hi = float(above[-1])
    out = []
    while t_hi / 10.0 >= max(series.times[1], series.times[-1] * 1e-4):
        t_lo = t_hi / 10.0
        mask = (series.times >= t_lo) & (series.times <= t_hi)
        if np.count_nonzero(mask) < 5:
            break
        sl, _ = _window_slope(series.times[mask], series.energies[mask])
        out.append((math.sqrt(t_lo * t_hi), sl))
        t_hi = t_lo
    out.reverse()
    return out


def write_energy_csv(series: EnergySeries, path, stride: int = 1) -> None:
    import csv

    ts, es = series.times, series.energies
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "E", "dissipation_rate", "phi", "local_slope"])
        logs = np.full(len(ts), math.nan)
        pos = es > 0
        lt = np.log(np.maximum(ts, 1e-300))
        le = np.log(np.where(pos, es, math.nan))
        for i in range(2, len(ts) - 2):
            if pos[i - 2 : i + 3].all() and ts[i - 2] > 0:
                logs[i] = np.polyfit(lt[i - 2 : i + 3], le[i - 2 : i + 3], 1)[0]
        for i in range(0, len(ts), stride):
            dt_int = ts[i] - ts[i - 1] if i > 0 else math.nan
            rate = series.dissipation[i] / dt_int if i > 0 else 0.0
            phi = series.phi[i] if series.phi is not None else math.nan
            writer.writerow(
                [
                    f"{ts[i]:.9e}",
                    f"{es[i]:.12e}",
                    f"{rate:.12e}",
                    f"{float(np.real(phi)):.12e}",
                    f"{logs[i]:.6e}" if math.isfinite(logs[i]) else "nan",
                ]
            )
