"""Entropies, entropy production on lattice fields, and limit wall costs.

An entropy is a map ``Phi: R^2 -> R^2`` whose Jacobian satisfies
``xi . (DPhi(xi) xi_perp) = 0``; composed with a rotated unit field its
divergence measures the field's distance from being a smooth solution of the
eikonal constraint.  The cubic one-parameter family implemented here saturates
the wall cost: evaluated across a jump of size ``|[chi]|`` aligned with its
axis it produces exactly ``|[chi]|^3 / 6`` per unit interface length, which is
also the value of the optimal one-dimensional transition profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.typing import NDArray

from .errors import DimensionError, DomainError
from .lattice_core import Rect, ScalarField, VectorField, cell_sum, div_d

__all__ = [
    "Entropy",
    "Interface",
    "PolygonalBVField",
    "perp",
    "jin_kohn",
    "psi_alpha",
    "ent_norm_estimate",
    "entropy_production",
    "total_variation_production",
    "limit_H_bv",
    "limit_H0",
    "sigma_surface_density",
    "modica_mortola_profile_energy",
]


def perp(v: NDArray) -> NDArray:
    """Rotation by +90 degrees: (x, y) -> (-y, x)."""
    v = np.asarray(v, dtype=np.float64)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


@dataclass(frozen=True)
class Entropy:
    """An entropy carried as a pair of callables (Phi, DPhi).

    ``phi`` maps (...,2) arrays to (...,2); ``dphi`` maps (...,2) arrays to
    (...,2,2) Jacobians.  Both must be pure and reentrant.
    """

    phi: Callable[[NDArray], NDArray]
    dphi: Callable[[NDArray], NDArray]
    kind: str = "analytic"
    label: str = ""


def _unit(v, name: str) -> NDArray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (2,):
        raise DomainError(f"{name} must be a 2-vector")
    if abs(math.hypot(v[0], v[1]) - 1.0) > 1e-12:
        raise DomainError(f"{name} must be a unit vector")
    return v


def jin_kohn(nu) -> Entropy:
    """The cubic entropy attached to the axis ``nu``:
    ``Phi(xi) = (2/3) ((xi . nu_perp)^3 nu + (xi . nu)^3 nu_perp)``."""
    nu = _unit(nu, "nu")
    nup = perp(nu)

    def phi(xi: NDArray) -> NDArray:
        xi = np.asarray(xi, dtype=np.float64)
        a = xi @ nup
        b = xi @ nu
        return (2.0 / 3.0) * (a[..., None] ** 3 * nu + b[..., None] ** 3 * nup)

    outer_a = np.outer(nu, nup)
    outer_b = np.outer(nup, nu)

    def dphi(xi: NDArray) -> NDArray:
        xi = np.asarray(xi, dtype=np.float64)
        a = xi @ nup
        b = xi @ nu
        return 2.0 * (
            a[..., None, None] ** 2 * outer_a + b[..., None, None] ** 2 * outer_b
        )

    return Entropy(phi, dphi, "analytic", f"jin-kohn(nu=({nu[0]:g},{nu[1]:g}))")


def psi_alpha(e: Entropy, xi) -> tuple[NDArray, NDArray]:
    """The pair (Psi, alpha) with ``DPhi + 2 Psi (x) xi = alpha Id``.

    ``alpha(xi) = xi_perp . (DPhi xi_perp) / |xi|^2`` and
    ``Psi(xi) = -(DPhi - alpha Id) xi / (2 |xi|^2)``.  Vectorized over
    leading axes of ``xi``; the origin is a singular point and rejected.
    """
    xi = np.asarray(xi, dtype=np.float64)
    norm_sq = np.sum(xi * xi, axis=-1)
    if np.any(norm_sq == 0.0):
        raise DomainError("(Psi, alpha) is undefined at xi = 0")
    d = e.dphi(xi)
    xp = perp(xi)
    alpha = np.einsum("...i,...ij,...j->...", xp, d, xp) / norm_sq
    dxi = np.einsum("...ij,...j->...i", d, xi)
    psi = -(dxi - alpha[..., None] * xi) / (2.0 * norm_sq[..., None])
    return psi, alpha


def ent_norm_estimate(e: Entropy, sample_box, resolution: int) -> float:
    """Sampled lower bound for the Lipschitz constant of Psi.

    ``sample_box = (x0, x1, y0, y1)`` must avoid a neighbourhood of the
    origin; the estimate is the largest difference quotient of Psi over
    axis-adjacent sample pairs and converges to Lip(Psi) from below as the
    resolution grows.
    """
    x0, x1, y0, y1 = map(float, sample_box)
    if not (x1 > x0 and y1 > y0):
        raise DomainError("empty sample box")
    if resolution < 2:
        raise DomainError("resolution must be at least 2")
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    xi = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1)
    norms = np.hypot(xi[..., 0], xi[..., 1])
    if np.min(norms) < 1e-9:
        raise DomainError("sample box must exclude a neighbourhood of the origin")
    psi, _ = psi_alpha(e, xi)
    best = 0.0
    for axis in (0, 1):
        dpsi = np.diff(psi, axis=axis)
        dxi = np.diff(xi, axis=axis)
        num = np.hypot(dpsi[..., 0], dpsi[..., 1])
        den = np.hypot(dxi[..., 0], dxi[..., 1])
        ratios = num / den
        if ratios.size:
            best = max(best, float(np.max(ratios)))
    return best


def _production_density(chi: VectorField, e: Entropy) -> ScalarField:
    w = e.phi(perp(chi.values))
    vf = VectorField(chi.grid, w, chi.valid)
    return div_d(vf)


def entropy_production(chi: VectorField, e: Entropy, zeta: Callable) -> float:
    """Lattice pairing ``l^2 sum zeta * div_d(Phi o chi_perp)``.

    ``zeta`` is a smooth weight evaluated at the lattice points ``(l i, l j)``
    and must be supported inside the valid set of the divergence.
    """
    g = chi.grid
    dv = _production_density(chi, e)
    xs, ys = g.lattice_points()
    zvals = np.asarray(zeta(np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1)))
    if zvals.shape != (g.nx, g.ny):
        raise DomainError("zeta must map (nx, ny, 2) points to (nx, ny) weights")
    outside = np.ones((g.nx, g.ny), dtype=bool)
    if not dv.valid.empty:
        si, sj = dv.valid.slices
        outside[si, sj] = False
    if np.any(np.abs(zvals[outside]) > 1e-12):
        raise DomainError("test weight support escapes the valid index set")
    return g.spacing**2 * cell_sum(zvals * dv.values, dv.valid)


def total_variation_production(
    chi: VectorField, e: Entropy, region: Rect | None = None
) -> float:
    """l^1 cell sum of the production density: the lattice total variation of
    ``div(Phi o chi_perp)`` over ``region``."""
    dv = _production_density(chi, e)
    rect = dv.valid if region is None else dv.valid.intersect(region)
    if rect.empty:
        raise DimensionError("empty region for the total variation")
    return chi.grid.spacing**2 * cell_sum(np.abs(dv.values), rect)


@dataclass(frozen=True)
class Interface:
    """One straight jump segment: one-sided values, normal, and length."""

    chi_plus: tuple[float, float]
    chi_minus: tuple[float, float]
    nu: tuple[float, float]
    length: float

    def __post_init__(self):
        a = _unit(self.chi_plus, "chi_plus")
        b = _unit(self.chi_minus, "chi_minus")
        nu = _unit(self.nu, "nu")
        if not (self.length > 0):
            raise DomainError("interface length must be positive")
        jump = a - b
        if math.hypot(*jump) == 0.0:
            raise DomainError("interface with zero jump")
        if abs(jump[0] * nu[1] - jump[1] * nu[0]) > 1e-10:
            raise DomainError("jump must be parallel to the interface normal")

    @property
    def jump_size(self) -> float:
        a = np.asarray(self.chi_plus)
        b = np.asarray(self.chi_minus)
        return float(np.hypot(*(a - b)))


@dataclass(frozen=True)
class PolygonalBVField:
    """Piecewise-constant unit field described by its jump segments.

    ``regions`` may optionally carry (vertex-array, value) pairs for
    serialization; the limit functionals depend on the interfaces only.
    """

    interfaces: tuple[Interface, ...]
    regions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "interfaces", tuple(self.interfaces))
        for _, value in self.regions:
            _unit(value, "region value")


def limit_H_bv(f: PolygonalBVField) -> float:
    """Exact wall cost on a polygonal field: sum of |jump|^3 / 6 per length."""
    return math.fsum(seg.jump_size**3 / 6.0 * seg.length for seg in f.interfaces)


def limit_H0(f: PolygonalBVField) -> float:
    """Same wall cost evaluated through the cubic entropy attached to each
    segment normal: ``|(Phi(chi+_perp) - Phi(chi-_perp)) . nu|`` per length."""
    total = []
    for seg in f.interfaces:
        e = jin_kohn(seg.nu)
        a = e.phi(perp(np.asarray(seg.chi_plus, dtype=np.float64)))
        b = e.phi(perp(np.asarray(seg.chi_minus, dtype=np.float64)))
        total.append(abs(float((a - b) @ np.asarray(seg.nu))) * seg.length)
    return math.fsum(total)


def sigma_surface_density(a, b, nu) -> float:
    """Surface energy density of a unit-vector jump: |a - b|^3 / 6."""
    a = _unit(a, "a")
    b = _unit(b, "b")
    nu = _unit(nu, "nu")
    jump = a - b
    size = math.hypot(*jump)
    if size == 0.0:
        raise DomainError("a and b must differ")
    if abs(jump[0] * nu[1] - jump[1] * nu[0]) > 1e-10:
        raise DomainError("(a - b) must be parallel to nu")
    return size**3 / 6.0


def modica_mortola_profile_energy(d: float, n_quad: int = 4096, half_width: float = 12.0) -> float:
    """Energy of the optimal scalar transition profile, scaled to a jump of
    size ``|d|``: quadrature of ``(1 - gamma^2)^2 + gamma'^2`` for
    ``gamma = tanh`` times ``|d|^3 / 16``; the line integral equals 8/3.
    """
    if d == 0.0:
        raise DomainError("jump size d must be nonzero")
    if n_quad < 64:
        raise DomainError("quadrature resolution must be at least 64")
    if half_width < 12.0:
        raise DomainError("truncated line must have half-width >= 12")
    nodes_per_panel = 16
    panels = max(4, n_quad // nodes_per_panel)
    z, w = leggauss(nodes_per_panel)
    edges = np.linspace(-half_width, half_width, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    s = mid[:, None] + half[:, None] * z[None, :]
    weights = half[:, None] * w[None, :]
    sech2 = 1.0 / np.cosh(s) ** 2
    integrand = 2.0 * sech2**2
    integral = math.fsum((weights * integrand).ravel(order="C"))
    return abs(d) ** 3 / 16.0 * integral
