"""Grid containers for data triples and state vectors.

The state space is H^1(-1,0) x L^2(-1,0) x L^2(0,1): a wave displacement u
and velocity v on [-1,0] and a temperature w on [0,1].  Both intervals are
discretized by uniform node grids; L^2 quantities use trapezoidal
quadrature and the H^1 seminorm uses cell-wise difference quotients (the
exact Dirichlet energy of the piecewise-linear interpolant), so that the
norms here agree with the Gram matrices assembled for the discrete
generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .characteristic import BoundaryVariant

__all__ = ["wave_nodes", "heat_nodes", "DataTriple", "StateVector"]


def wave_nodes(n_wave: int) -> np.ndarray:
    return np.linspace(-1.0, 0.0, n_wave + 1)


def heat_nodes(n_heat: int) -> np.ndarray:
    return np.linspace(0.0, 1.0, n_heat + 1)


def _trapz_sq(values: np.ndarray, h: float) -> float:
    sq = np.abs(values) ** 2
    return float(h * (sq.sum() - 0.5 * sq[0] - 0.5 * sq[-1]))


def _diff_sq(values: np.ndarray, h: float) -> float:
    d = np.diff(values) / h
    return float(h * np.sum(np.abs(d) ** 2))


@dataclass
class DataTriple:
    """Right-hand-side data (f, g, h) sampled on the two node grids."""

    f: np.ndarray
    g: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        self.f = np.asarray(self.f)
        self.g = np.asarray(self.g)
        self.h = np.asarray(self.h)
        if self.f.shape != self.g.shape:
            raise ValueError("f and g must share the wave grid")
        if self.f.ndim != 1 or self.h.ndim != 1:
            raise ValueError("data must be 1-D node arrays")

    @property
    def n_wave(self) -> int:
        return len(self.f) - 1

    @property
    def n_heat(self) -> int:
        return len(self.h) - 1

    @property
    def xi_wave(self) -> np.ndarray:
        return wave_nodes(self.n_wave)

    @property
    def xi_heat(self) -> np.ndarray:
        return heat_nodes(self.n_heat)

    @classmethod
    def from_callables(cls, f, g, h, n_wave: int, n_heat: int) -> "DataTriple":
        xw, xh = wave_nodes(n_wave), heat_nodes(n_heat)
        return cls(f=np.vectorize(f)(xw), g=np.vectorize(g)(xw), h=np.vectorize(h)(xh))

    @property
    def norm_X(self) -> float:
        """H^1 x L^2 x L^2 norm with difference-quotient derivative for f."""
        hw, hh = 1.0 / self.n_wave, 1.0 / self.n_heat
        return float(
            np.sqrt(
                _trapz_sq(self.f, hw)
                + _diff_sq(self.f, hw)
                + _trapz_sq(self.g, hw)
                + _trapz_sq(self.h, hh)
            )
        )


@dataclass
class StateVector:
    """State (u, v, w) on the node grids, optionally with an exact u'.

    When ``u_prime`` is supplied (closed-form solutions carry it) the H^1
    seminorm uses it via trapezoidal quadrature; otherwise difference
    quotients are used.
    """

    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    variant: BoundaryVariant = BoundaryVariant.NEUMANN
    u_prime: np.ndarray | None = field(default=None)

    def __post_init__(self):
        self.u = np.asarray(self.u)
        self.v = np.asarray(self.v)
        self.w = np.asarray(self.w)
        if self.u.shape != self.v.shape:
            raise ValueError("u and v must share the wave grid")
        if self.u_prime is not None:
            self.u_prime = np.asarray(self.u_prime)

    @property
    def n_wave(self) -> int:
        return len(self.u) - 1

    @property
    def n_heat(self) -> int:
        return len(self.w) - 1

    @property
    def xi_wave(self) -> np.ndarray:
        return wave_nodes(self.n_wave)

    @property
    def xi_heat(self) -> np.ndarray:
        return heat_nodes(self.n_heat)

    def _useminorm_sq(self) -> float:
        hw = 1.0 / self.n_wave
        if self.u_prime is not None:
            return _trapz_sq(self.u_prime, hw)
        return _diff_sq(self.u, hw)

    @property
    def energy(self) -> float:
        """(1/2)(||u'||^2 + ||v||^2 + ||w||^2)."""
        hw, hh = 1.0 / self.n_wave, 1.0 / self.n_heat
        return 0.5 * (
            self._useminorm_sq() + _trapz_sq(self.v, hw) + _trapz_sq(self.w, hh)
        )

    @property
    def seminorm(self) -> float:
        return float(np.sqrt(2.0 * self.energy))

    @property
    def norm_X(self) -> float:
        """Full state norm: (||u||_{H^1}^2 + ||v||^2 + ||w||^2)^(1/2)."""
        hw = 1.0 / self.n_wave
        return float(np.sqrt(2.0 * self.energy + _trapz_sq(self.u, hw)))

    def scaled(self, alpha: complex) -> "StateVector":
        return StateVector(
            u=alpha * self.u,
            v=alpha * self.v,
            w=alpha * self.w,
            variant=self.variant,
            u_prime=None if self.u_prime is None else alpha * self.u_prime,
        )

    def minus(self, other: "StateVector") -> "StateVector":
        up = None
        if self.u_prime is not None and other.u_prime is not None:
            up = self.u_prime - other.u_prime
        return StateVector(
            u=self.u - other.u,
            v=self.v - other.v,
            w=self.w - other.w,
            variant=self.variant,
            u_prime=up,
        )
