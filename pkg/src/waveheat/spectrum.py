"""Eigenvalue enumeration for the wave-heat generator.

Eigenvalues come in conjugate pairs accumulating along the imaginary axis:
near (n + 1/2)*pi*i for the Neumann variant and near n*pi*i for the
Dirichlet variant, each localized in a disk of radius 2 |n + 1/2|^(-1/2)
(resp. 2 |n|^(-1/2)).  Seeds at the disk centers are polished by Newton
iteration on the scaled determinant; an argument-principle winding count
over the same disks provides an independent check that each disk holds
exactly one root.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass
from pathlib import Path

from .characteristic import (
    BoundaryVariant,
    char_fn_deriv_scaled,
    char_fn_scaled,
    newton_ratio,
    relative_residual,
)
from .errors import (
    ContourTooCloseError,
    CutIntersectionError,
    DegenerateInputError,
    InsufficientDataError,
    NoConvergenceError,
)

__all__ = [
    "EigenvalueSeed",
    "EigenvalueRecord",
    "AsymptoticsReport",
    "seeds",
    "polish",
    "count_zeros_contour",
    "asymptotics_report",
    "enumerate_eigenvalues",
    "write_eigenvalues_csv",
]

NEWTON_RESIDUAL_TOL = 1e-12
NEWTON_STEP_TOL = 1e-13
NEWTON_MAX_ITERS = 50


@dataclass(frozen=True)
class EigenvalueSeed:
    """Localization disk for one eigenvalue branch index."""

    n: int
    center: complex
    radius: float


@dataclass(frozen=True)
class EigenvalueRecord:
    n: int
    lam: complex
    residual: float
    iters: int
    contained: bool
    variant: BoundaryVariant


def seeds(variant: BoundaryVariant, n_max: int) -> list[EigenvalueSeed]:
    """Seed disks for indices -n_max..n_max (negative indices mirror by conjugation).

    The Dirichlet variant has no eigenvalue at the origin, so index 0 is
    omitted there.
    """
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    out: list[EigenvalueSeed] = []
    for n in range(-n_max, n_max + 1):
        if variant is BoundaryVariant.NEUMANN:
            half = n + 0.5
            out.append(
                EigenvalueSeed(n=n, center=complex(0.0, half * math.pi),
                               radius=2.0 * abs(half) ** -0.5)
            )
        else:
            if n == 0:
                continue
            out.append(
                EigenvalueSeed(n=n, center=complex(0.0, n * math.pi),
                               radius=2.0 * abs(n) ** -0.5)
            )
    return out


def _newton(start: complex, variant: BoundaryVariant) -> tuple[complex, int] | None:
    lam = start
    for it in range(1, NEWTON_MAX_ITERS + 1):
        try:
            step = newton_ratio(lam, variant)
        except DegenerateInputError:
            return None
        lam = lam - step
        if relative_residual(lam, variant) <= NEWTON_RESIDUAL_TOL:
            return lam, it
        if abs(step) <= NEWTON_STEP_TOL * max(abs(lam), 1.0):
            if relative_residual(lam, variant) <= 1e-10:
                return lam, it
            return None
    return None


def polish(seed: EigenvalueSeed, variant: BoundaryVariant) -> EigenvalueRecord:
    """Newton-polish a seed into an eigenvalue record.

    Escaping the seed disk is not an error (localization is only guaranteed
    for large |n|); it is recorded in ``contained``.  For stubborn small-|n|
    seeds a coarse scan of the disk supplies alternative starting points
    before giving up.
    """
    result = _newton(seed.center, variant)
    if result is None:
        result = _rescue_from_disk(seed, variant)
    if result is None:
        raise NoConvergenceError(
            f"Newton did not converge from seed n={seed.n} ({variant.value})"
        )
    lam, iters = result
    return EigenvalueRecord(
        n=seed.n,
        lam=lam,
        residual=relative_residual(lam, variant),
        iters=iters,
        contained=abs(lam - seed.center) < seed.radius,
        variant=variant,
    )


def _rescue_from_disk(
    seed: EigenvalueSeed, variant: BoundaryVariant
) -> tuple[complex, int] | None:
    # rank interior sample points by scaled residual and retry Newton
    candidates = []
    for k in range(48):
        rho = seed.radius * (0.25 + 0.7 * ((k * 5) % 12) / 12.0)
        ang = 2.0 * math.pi * k / 48.0
        pt = seed.center + rho * cmath.exp(1j * ang)
        if pt.imag == 0.0 and pt.real <= 0.0:
            continue
        candidates.append((relative_residual(pt, variant), pt))
    candidates.sort(key=lambda c: c[0])
    for _, pt in candidates[:6]:
        result = _newton(pt, variant)
        if result is not None:
            return result
    return None


def _cut_intersects_circle(center: complex, radius: float) -> bool:
    # the cut is (-inf, 0]; include the origin (branch point) in the exclusion
    if abs(center) <= radius:
        return True
    if abs(center.imag) >= radius:
        return False
    reach = math.sqrt(radius**2 - center.imag**2)
    return center.real - reach < 0.0


def count_zeros_contour(
    center: complex, radius: float, variant: BoundaryVariant,
    n_start: int = 256, n_cap: int = 262144,
) -> int:
    """Argument-principle zero count of the determinant inside a circle.

    Trapezoidal quadrature of D'/D around the contour, with the node count
    doubled until the rounded winding number is stable across two successive
    refinement levels.
    """
    if _cut_intersects_circle(center, radius):
        raise CutIntersectionError(
            f"circle |lam - {center}| = {radius} touches the branch cut"
        )
    prev_int: int | None = None
    n = n_start
    while n <= n_cap:
        total = 0j
        min_dist = math.inf
        for j in range(n):
            lam = center + radius * cmath.exp(2j * math.pi * j / n)
            num = char_fn_scaled(lam, variant)
            den = char_fn_deriv_scaled(lam, variant)
            if num.mantissa == 0:
                raise ContourTooCloseError(f"zero on the contour at {lam}")
            ratio = (den.mantissa / num.mantissa) * math.exp(
                den.log_scale - num.log_scale
            )
            # |D/D'| approximates the distance to the nearest zero
            min_dist = min(min_dist, 1.0 / max(abs(ratio), 1e-300))
            total += ratio * (lam - center)
        if min_dist < 1e-6:
            raise ContourTooCloseError(
                f"zero within {min_dist:.2e} of the contour (tolerance 1e-6)"
            )
        winding = total / n
        if abs(winding.imag) < 0.25 and abs(winding.real - round(winding.real)) < 0.25:
            cur = round(winding.real)
            if prev_int is not None and cur == prev_int:
                return cur
            prev_int = cur
        else:
            prev_int = None
        n *= 2
    raise NoConvergenceError(
        f"winding number failed to stabilize below {n_cap} contour nodes"
    )


@dataclass(frozen=True)
class AsymptoticsReport:
    """Deviation and real-part scaling summary over a set of records."""

    rows: list[dict]
    product_min: float
    product_max: float
    max_center_deviation_ratio: float
    all_re_negative: bool
    containment_threshold: int | None


def asymptotics_report(records: list[EigenvalueRecord]) -> AsymptoticsReport:
    """Tabulate Im-deviation from the seed lattice and |Re lam|*|Im lam|^(1/2).

    The product column measures the two-sided real-part scaling; its spread
    over the upper half of the index range is the empirical constant band.
    Requires at least 20 records.
    """
    if len(records) < 20:
        raise InsufficientDataError(f"need >= 20 records, got {len(records)}")
    rows = []
    for rec in sorted(records, key=lambda r: abs(r.lam.imag)):
        if rec.variant is BoundaryVariant.NEUMANN:
            center_im = (rec.n + 0.5) * math.pi
            rad = 2.0 * abs(rec.n + 0.5) ** -0.5
        else:
            center_im = rec.n * math.pi
            rad = 2.0 * abs(rec.n) ** -0.5
        deviation = abs(rec.lam.imag - center_im)
        rows.append(
            {
                "n": rec.n,
                "re": rec.lam.real,
                "im": rec.lam.imag,
                "deviation": deviation,
                "deviation_ratio": deviation / rad,
                "product": abs(rec.lam.real) * abs(rec.lam.imag) ** 0.5,
                "contained": rec.contained,
            }
        )
    top = rows[len(rows) // 2 :]
    products = [r["product"] for r in top]
    not_contained = [abs(r["n"]) for r in rows if not r["contained"]]
    threshold = (max(not_contained) + 1) if not_contained else None
    return AsymptoticsReport(
        rows=rows,
        product_min=min(products),
        product_max=max(products),
        max_center_deviation_ratio=max(r["deviation_ratio"] for r in rows),
        all_re_negative=all(r["re"] < 0.0 for r in rows),
        containment_threshold=threshold,
    )


def enumerate_eigenvalues(
    variant: BoundaryVariant, n_max: int
) -> list[EigenvalueRecord]:
    """Polish every seed for indices -n_max..n_max, in index order."""
    return [polish(s, variant) for s in seeds(variant, n_max)]


def write_eigenvalues_csv(records: list[EigenvalueRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "re", "im", "residual", "iters", "contained", "variant"])
        for rec in sorted(records, key=lambda r: r.n):
            writer.writerow(
                [
                    rec.n,
                    f"{rec.lam.real:.15e}",
                    f"{rec.lam.imag:.15e}",
                    f"{rec.residual:.3e}",
                    rec.iters,
                    int(rec.contained),
                    rec.variant.value,
                ]
            )
