"""Finite-difference approximation of the coupled wave-heat generator.

The state is stacked as (u-nodes, v-nodes, interior w-nodes) with the
interface value shared: v(0) and w(0) are one unknown, which encodes the
temperature-velocity matching condition, and w(1) = 0 is eliminated.  The
second-derivative blocks are the lumped piecewise-linear stiffness/mass
pairs, coupled at the interface through their boundary fluxes.  With this
closure the discrete generator is exactly dissipative in the discrete
energy form: the energy rate equals minus the heat stiffness quadratic
form, with no O(h) interface remainder, so trapezoidal time stepping is
provably monotone.  Eigenvalues converge at second order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .characteristic import BoundaryVariant
from .errors import InfeasibleProfileError
from .state import StateVector, heat_nodes, wave_nodes

__all__ = [
    "GridSpec",
    "DiscreteGenerator",
    "DomainDatum",
    "assemble",
    "gram_matrices",
    "make_domain_data",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform cell counts for the wave segment [-1,0] and heat segment [0,1]."""

    n_wave: int
    n_heat: int
    scheme_order: int = 2

    def __post_init__(self):
        if self.n_wave < 8 or self.n_heat < 8:
            raise ValueError("grids need at least 8 cells per segment")
        if self.scheme_order != 2:
            raise ValueError("only the second-order scheme is implemented")

    @property
    def h_wave(self) -> float:
        return 1.0 / self.n_wave

    @property
    def h_heat(self) -> float:
        return 1.0 / self.n_heat

    def doubled(self) -> "GridSpec":
        return GridSpec(2 * self.n_wave, 2 * self.n_heat)


def _wave_stiffness(n: int, h: float) -> sp.csr_matrix:
    # natural (Neumann) stiffness on n+1 nodes; Dirichlet variants slice row/col 0
    main = np.full(n + 1, 2.0 / h)
    main[0] = main[-1] = 1.0 / h
    off = np.full(n, -1.0 / h)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def _heat_stiffness(n: int, h: float) -> sp.csr_matrix:
    # nodes 0..n-1 (node n carries the Dirichlet end and is eliminated)
    main = np.full(n, 2.0 / h)
    main[0] = 1.0 / h
    off = np.full(n - 1, -1.0 / h)
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


def _trapz_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n + 1, h)
    w[0] = w[-1] = h / 2.0
    return w


@dataclass
class DiscreteGenerator:
    """Sparse generator with the Gram matrices of its natural geometry.

    ``W`` induces the full state norm, ``W_E`` the energy seminorm (twice
    the energy), and ``W_diss`` the heat-gradient dissipation form; all are
    real symmetric and ``W`` is positive definite.
    """

    A: sp.csr_matrix
    W: sp.csr_matrix
    W_E: sp.csr_matrix
    W_diss: sp.csr_matrix
    grid: GridSpec
    variant: BoundaryVariant

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    @property
    def n_u(self) -> int:
        return self.grid.n_wave + (1 if self.variant is BoundaryVariant.NEUMANN else 0)

    def pack_state(self, x: StateVector) -> np.ndarray:
        """Stack (u, v, w) into generator coordinates, dropping tied values."""
        if x.n_wave != self.grid.n_wave or x.n_heat != self.grid.n_heat:
            raise ValueError("state grids do not match the generator grid")
        if self.variant is BoundaryVariant.NEUMANN:
            parts = [x.u, x.v, x.w[1:-1]]
        else:
            parts = [x.u[1:], x.v[1:], x.w[1:-1]]
        return np.concatenate(parts)

    def pack_data(self, f: np.ndarray, g: np.ndarray, h: np.ndarray) -> np.ndarray:
        """Stack right-hand-side data; the interface row mass-averages g(0), h(0)."""
        hw, hh = self.grid.h_wave, self.grid.h_heat
        g_iface = (0.5 * hw * g[-1] + 0.5 * hh * h[0]) / (0.5 * hw + 0.5 * hh)
        if self.variant is BoundaryVariant.NEUMANN:
            gg = np.concatenate([g[:-1], [g_iface]])
            return np.concatenate([f, gg, h[1:-1]])
        gg = np.concatenate([g[1:-1], [g_iface]])
        return np.concatenate([f[1:], gg, h[1:-1]])

    def unpack(self, z: np.ndarray) -> StateVector:
        nu = self.n_u
        n_w, n_h = self.grid.n_wave, self.grid.n_heat
        u_part, v_part, w_inner = z[:nu], z[nu : 2 * nu], z[2 * nu :]
        if self.variant is BoundaryVariant.NEUMANN:
            u, v = u_part, v_part
        else:
            u = np.concatenate([[0.0 * z[0]], u_part])
            v = np.concatenate([[0.0 * z[0]], v_part])
        w = np.concatenate([[v[-1]], w_inner, [0.0 * z[0]]])
        assert len(u) == n_w + 1 and len(w) == n_h + 1
        return StateVector(u=u, v=v, w=w, variant=self.variant)

    def energy(self, z: np.ndarray) -> float:
        return 0.5 * float(np.real(np.conj(z) @ (self.W_E @ z)))

    def dissipation_rate(self, z: np.ndarray) -> float:
        return float(np.real(np.conj(z) @ (self.W_diss @ z)))

    def norm(self, z: np.ndarray) -> float:
        return math.sqrt(max(float(np.real(np.conj(z) @ (self.W @ z))), 0.0))

    def eigenvalues_near(self, target: complex, k: int = 6) -> np.ndarray:
        """Discrete eigenvalues closest to ``target``, nearest first."""
        if self.dim <= 1500:
            ev = scipy.linalg.eigvals(self.A.toarray())
        else:
            ev = spla.eigs(
                sp.csc_matrix(self.A, dtype=complex),
                k=min(k, self.dim - 2),
                sigma=target,
                return_eigenvectors=False,
            )
        return ev[np.argsort(np.abs(ev - target))][:k]

    def dump_matrix(self, path: str | Path) -> None:
        """Write the generator in (row, col, value) coordinate text format."""
        coo = self.A.tocoo()
        with open(path, "w") as fh:
            fh.write(f"# {self.dim} {self.dim} {coo.nnz}\n")
            for r, c, v in zip(coo.row, coo.col, coo.data):
                fh.write(f"{r} {c} {v:.17e}\n")


def _build_parts(grid: GridSpec, variant: BoundaryVariant):
    n_w, n_h = grid.n_wave, grid.n_heat
    hw, hh = grid.h_wave, grid.h_heat
    neumann = variant is BoundaryVariant.NEUMANN

    K_w = _wave_stiffness(n_w, hw)
    mass_w = _trapz_weights(n_w, hw)
    if not neumann:
        K_w = K_w[1:, 1:]
        mass_w = mass_w[1:]
    nu = K_w.shape[0]

    K_h = _heat_stiffness(n_h, hh)
    mass_h_nodes = _trapz_weights(n_h, hh)[:-1]  # dofs 0..n_h-1, dof 0 = interface

    n_q = nu + n_h - 1
    mass_q = np.concatenate([mass_w, np.full(n_h - 1, hh)])
    mass_q[nu - 1] += mass_h_nodes[0]

    # selector embedding heat dofs (0 -> interface v-slot, k -> w_k) into q
    heat_idx = np.concatenate([[nu - 1], np.arange(nu, n_q)])
    S_h = sp.csr_matrix(
        (np.ones(n_h), (np.arange(n_h), heat_idx)), shape=(n_h, n_q)
    )
    return K_w, mass_w, K_h, S_h, mass_q, nu, n_q


def assemble(grid: GridSpec, variant: BoundaryVariant) -> DiscreteGenerator:
    """Assemble the discrete generator and its Gram matrices."""
    K_w, mass_w, K_h, S_h, mass_q, nu, n_q = _build_parts(grid, variant)
    inv_mass = sp.diags(1.0 / mass_q)

    K_h_embedded = (S_h.T @ K_h @ S_h).tocsr()
    sel_v = sp.hstack([sp.identity(nu), sp.csr_matrix((nu, n_q - nu))]).tocsr()

    A = sp.bmat(
        [
            [None, sel_v],
            [-inv_mass @ sel_v.T @ K_w, -inv_mass @ K_h_embedded],
        ],
        format="csr",
    )

    W_E = sp.block_diag([K_w, sp.diags(mass_q)], format="csr")
    W = sp.block_diag([K_w + sp.diags(mass_w), sp.diags(mass_q)], format="csr")
    W_diss = sp.bmat(
        [[sp.csr_matrix((nu, nu)), None], [None, K_h_embedded]], format="csr"
    )

    return DiscreteGenerator(
        A=A, W=W.tocsr(), W_E=W_E.tocsr(), W_diss=W_diss.tocsr(),
        grid=grid, variant=variant,
    )


def gram_matrices(
    grid: GridSpec, variant: BoundaryVariant
) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """The (W, W_E) pair: full-norm and seminorm Gram matrices."""
    gen = assemble(grid, variant)
    return gen.W, gen.W_E


# ---------------------------------------------------------------------------
# domain-data profiles


class _CosSum:
    """Finite sum of amp*cos(freq*x + phase) atoms, closed under d/dx."""

    def __init__(self, atoms):
        self.atoms = [tuple(map(float, a)) for a in atoms]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for amp, freq, phase in self.atoms:
            out = out + amp * np.cos(freq * x + phase)
        return out

    def deriv(self) -> "_CosSum":
        return _CosSum(
            [(amp * freq, freq, phase + math.pi / 2) for amp, freq, phase in self.atoms]
        )


class _ShiftedPoly:
    """Polynomial in (sign*x + shift); derivatives pick up the sign."""

    def __init__(self, coeffs, sign: float = 1.0, shift: float = 0.0):
        self.poly = np.polynomial.Polynomial(coeffs)
        self.sign = float(sign)
        self.shift = float(shift)

    def __call__(self, x):
        return self.poly(self.sign * np.asarray(x, dtype=float) + self.shift)

    def deriv(self) -> "_ShiftedPoly":
        d = _ShiftedPoly([0.0], self.sign, self.shift)
        d.poly = self.poly.deriv() * self.sign
        return d


def _in_tau(coeffs):  # polynomial in (xi + 1)
    return _ShiftedPoly(coeffs, sign=1.0, shift=1.0)


def _in_sigma(coeffs):  # polynomial in (1 - xi)
    return _ShiftedPoly(coeffs, sign=-1.0, shift=1.0)


_PI = math.pi

_PROFILES: dict[tuple[str, str, int], tuple] = {
    # Neumann: u'(-1)=0, w(1)=0, v(0)=w(0), u'(0)=w'(0)
    ("neumann", "smooth_bump", 1): (
        _CosSum([(1.0, _PI, _PI)]),          # cos(pi (xi + 1))
        _CosSum([(0.5, _PI, 0.0)]),          # 0.5 cos(pi xi)
        _CosSum([(0.5, _PI / 2, 0.0)]),      # 0.5 cos(pi xi / 2)
    ),
    ("neumann", "smooth_bump", 2): (
        _CosSum([(1.0, _PI, _PI)]),
        _CosSum([(-4.0, _PI, 0.0)]),
        _CosSum([(-4.0, _PI / 2, 0.0)]),
    ),
    ("neumann", "polynomial", 1): (
        _in_tau([0.0, 0.0, 3.0, -1.0]),
        _ShiftedPoly([-4.0, 1.0, 1.0]),
        _ShiftedPoly([-4.0, 3.0, 1.0]),
    ),
    ("neumann", "polynomial", 2): (
        _in_tau([0.0, 0.0, 1.0, 1.0]),
        _in_tau([-4.5, 0.0, 1.0, -4.0]),
        _in_sigma([0.0, -26.0 / 3.0, 0.0, 1.0, 1.0 / 6.0]),
    ),
    # Dirichlet: u(-1)=v(-1)=0, w(1)=0, v(0)=w(0), u'(0)=w'(0)
    ("dirichlet", "smooth_bump", 1): (
        _CosSum([(1.0, _PI, _PI / 2)]),      # sin(pi (xi + 1))
        _CosSum([(1.0, _PI, -_PI / 2)]),     # sin(pi xi)
        _CosSum([(1.0, _PI, _PI / 2)]),      # -sin(pi (1 - xi))
    ),
    ("dirichlet", "smooth_bump", 2): (
        _in_tau([0.0, 1.0, 0.0, 1.0]),
        _in_tau([0.0, 1.0, -14.0, 7.0]),
        _in_sigma([0.0, -7.0, 0.0, 1.0]),
    ),
    ("dirichlet", "polynomial", 1): (
        _in_tau([0.0, 0.0, 1.0]),
        _in_tau([0.0, -3.0]),
        _in_sigma([0.0, -4.0, 1.0]),
    ),
    ("dirichlet", "polynomial", 2): (
        _in_tau([0.0, 1.0, 0.0, 1.0]),
        _in_tau([0.0, 1.0, -14.0, 7.0]),
        _in_sigma([0.0, -7.0, 0.0, 1.0]),
    ),
}


class DomainDatum(NamedTuple):
    state: StateVector
    certificate: dict[str, float]
    profile: str
    k: int


def _constraint_residuals(u, v, w, variant: BoundaryVariant, k: int) -> dict[str, float]:
    up, vp, wp = u.deriv(), v.deriv(), w.deriv()
    upp, wpp = up.deriv(), wp.deriv()
    wppp = wpp.deriv()
    cert: dict[str, float] = {}
    if variant is BoundaryVariant.NEUMANN:
        cert["u_end"] = float(abs(up(-1.0)))
    else:
        cert["u_end"] = float(abs(u(-1.0)))
        cert["v_end"] = float(abs(v(-1.0)))
    cert["w_end"] = float(abs(w(1.0)))
    cert["interface_value"] = float(abs(v(0.0) - w(0.0)))
    cert["interface_flux"] = float(abs(up(0.0) - wp(0.0)))
    if k >= 2:
        # the image (v, u'', w'') must satisfy the same conditions
        if variant is BoundaryVariant.NEUMANN:
            cert["image_u_end"] = float(abs(vp(-1.0)))
        else:
            cert["image_u_end"] = float(abs(v(-1.0)))
            cert["image_v_end"] = float(abs(upp(-1.0)))
        cert["image_w_end"] = float(abs(wpp(1.0)))
        cert["image_interface_value"] = float(abs(upp(0.0) - wpp(0.0)))
        cert["image_interface_flux"] = float(abs(vp(0.0) - wppp(0.0)))
    return cert


def make_domain_data(
    profile: str,
    grid: GridSpec,
    variant: BoundaryVariant,
    k: int = 1,
    custom: dict | None = None,
) -> DomainDatum:
    """Construct initial data satisfying the generator-domain constraints.

    Profiles ``smooth_bump`` and ``polynomial`` are built-in closed forms;
    ``custom`` takes polynomial coefficients {"u": [...], "v": [...],
    "w": [...]} in powers of (xi+1), (xi+1) and (1-xi) respectively and is
    rejected if the constraints are violated.  ``k=2`` data additionally
    keeps its image under the generator inside the domain.
    """
    if k not in (1, 2):
        raise ValueError("smoothness order k must be 1 or 2")
    if profile == "custom":
        if custom is None:
            raise InfeasibleProfileError("custom profile needs coefficient arrays")
        u = _in_tau(custom["u"])
        v = _in_tau(custom["v"])
        w = _in_sigma(custom["w"])
    else:
        try:
            u, v, w = _PROFILES[(variant.value, profile, k)]
        except KeyError:
            raise InfeasibleProfileError(
                f"no profile {profile!r} for {variant.value}, k={k}"
            ) from None
    cert = _constraint_residuals(u, v, w, variant, k)
    worst = max(cert.values())
    if worst > 1e-10:
        raise InfeasibleProfileError(
            f"profile violates domain constraints (worst residual {worst:.2e})"
        )
    xw, xh = wave_nodes(grid.n_wave), heat_nodes(grid.n_heat)
    state = StateVector(
        u=u(xw), v=v(xw), w=w(xh), variant=variant, u_prime=u.deriv()(xw)
    )
    return DomainDatum(state=state, certificate=cert, profile=profile, k=k)
