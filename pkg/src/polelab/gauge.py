"""Gauge structure around a pole: patch transition functions, loop holonomy,
and the flux-quantization predicate.

The single-valuedness of the two-patch transition function e^{i*2*q*g*phi}
requires 2*q*g to be an integer; the same condition makes a 4*pi*g flux
string invisible to a charge q and makes the patch mismatch a pure gauge
gradient. The three formulations are exposed as separate predicates that
share one residual definition (distance of 2*q*g from the nearest integer),
so they agree as booleans for every input, not just generic ones.
"""

import json
from dataclasses import dataclass
from functools import lru_cache, partial
from typing import Callable

import numpy as np

from .errors import DomainError, SingularPointError
from .fields import as_vec3, wu_yang_potential

# Polar-angle band on which both patches are regular and may be compared.
OVERLAP_BAND = (np.pi / 2 - 0.3, np.pi / 2 + 0.3)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class GaugePatch:
    """A vector-potential prescription together with its regular polar band."""

    potential: Callable
    theta_min: float
    theta_max: float

    def __post_init__(self):
        if not 0.0 <= self.theta_min < self.theta_max <= np.pi:
            raise DomainError("patch domain must satisfy 0 <= theta_min < theta_max <= pi")

    def contains(self, r):
        arr = as_vec3(r)
        rho = np.hypot(arr[..., 0], arr[..., 1])
        theta = np.arctan2(rho, arr[..., 2])
        return np.all((theta >= self.theta_min) & (theta <= self.theta_max))


def north_patch(g):
    return GaugePatch(partial(wu_yang_potential, "north", g), 0.0, OVERLAP_BAND[1])


def south_patch(g):
    return GaugePatch(partial(wu_yang_potential, "south", g), OVERLAP_BAND[0], np.pi)


@dataclass(frozen=True)
class QuantizationReport:
    n_real: float
    n_nearest: int
    residual: float
    satisfied: bool

    def to_dict(self):
        return {
            "n_real": self.n_real,
            "n_nearest": self.n_nearest,
            "residual": self.residual,
            "satisfied": self.satisfied,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def transition_function(q, g, phi):
    """Patch transition factor e^{i*2*q*g*phi} at azimuth phi."""
    phi = np.asarray(phi, dtype=float)
    out = np.exp(2j * q * g * phi)
    return complex(out) if out.ndim == 0 else out


def winding_residual(q, g):
    """Distance of 2*q*g from the nearest integer, with that integer."""
    n_real = 2.0 * q * g
    n_nearest = int(np.rint(n_real))
    return abs(n_real - n_nearest), n_nearest


def check_quantization(q, g, tol=DEFAULT_TOL):
    """Report whether 2*q*g is an integer to within tol."""
    if tol <= 0:
        raise DomainError("tol must be > 0")
    residual, n_nearest = winding_residual(q, g)
    return QuantizationReport(
        n_real=2.0 * q * g,
        n_nearest=n_nearest,
        residual=residual,
        satisfied=bool(residual <= tol),
    )


def string_invisibility(q, g, tol=DEFAULT_TOL):
    """True iff the holonomy e^{i*q*4*pi*g} of the full string flux is trivial.

    The winding residual is recovered from the argument of the actual phase
    factor, so the predicate is the amplitude-level statement of the same
    condition check_quantization tests arithmetically. tol is in winding
    units (fraction of a full turn), identical to check_quantization's.
    """
    if tol <= 0:
        raise DomainError("tol must be > 0")
    holonomy = np.exp(1j * q * 4.0 * np.pi * g)
    residual = abs(np.angle(holonomy)) / (2.0 * np.pi)
    return bool(residual <= tol)


def patch_mismatch(g, point):
    """A_north - A_south at a point of the overlap band.

    The mismatch is the azimuthal vector of magnitude 2*g/(r*sin(theta)),
    i.e. the gradient of 2*g*phi: pure gauge, so it is removable exactly when
    e^{i*2*q*g*phi} is single-valued. Points outside the overlap band raise
    DomainError.
    """
    arr = as_vec3(point)
    rho = np.hypot(arr[..., 0], arr[..., 1])
    theta = np.arctan2(rho, arr[..., 2])
    if np.any(theta < OVERLAP_BAND[0]) or np.any(theta > OVERLAP_BAND[1]):
        raise DomainError("patch mismatch is only defined on the overlap band")
    return wu_yang_potential("north", g, arr) - wu_yang_potential("south", g, arr)


# ---------------------------------------------------------------------------
# loops and line integrals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LoopPath:
    """Closed polyline. vertices has shape (N, 3) with first row equal to the
    last; orientation -1 traverses it backwards."""

    vertices: np.ndarray
    orientation: int = 1

    def __post_init__(self):
        arr = as_vec3(self.vertices)
        if arr.ndim != 2 or arr.shape[0] < 4:
            raise DomainError("a closed loop needs at least 3 distinct vertices plus closure")
        if not np.allclose(arr[0], arr[-1], rtol=0.0, atol=1e-12):
            raise DomainError("loop is not closed: first vertex must equal the last")
        if self.orientation not in (-1, 1):
            raise DomainError("orientation must be +1 or -1")
        object.__setattr__(self, "vertices", arr)

    def reversed(self):
        return LoopPath(self.vertices, -self.orientation)


def circle_loop(rho, z=0.0, n=64, center=(0.0, 0.0)):
    """n-vertex closed polygon inscribed in the circle of cylindrical radius
    rho at height z."""
    if rho <= 0 or n < 3:
        raise DomainError("circle loop needs rho > 0 and n >= 3")
    ang = 2.0 * np.pi * np.arange(n + 1) / n
    ang[-1] = 0.0  # exact closure
    verts = np.empty((n + 1, 3))
    verts[:, 0] = center[0] + rho * np.cos(ang)
    verts[:, 1] = center[1] + rho * np.sin(ang)
    verts[:, 2] = z
    return LoopPath(verts)


def polar_circle(r, theta, n=64):
    """Circle of constant polar angle theta on the sphere of radius r."""
    if not 0 < theta < np.pi:
        raise DomainError("polar circle needs 0 < theta < pi")
    return circle_loop(r * np.sin(theta), z=r * np.cos(theta), n=n)


def rectangle_loop(x0, x1, y0, y1, z=0.0):
    verts = np.array([
        [x0, y0, z], [x1, y0, z], [x1, y1, z], [x0, y1, z], [x0, y0, z]
    ], dtype=float)
    return LoopPath(verts)


@lru_cache(maxsize=16)
def _gl_nodes(order):
    x, w = np.polynomial.legendre.leggauss(order)
    # map from [-1, 1] to [0, 1]
    return 0.5 * (x + 1.0), 0.5 * w


def line_integral(potential, loop, order=12, tol=1e-13, max_doublings=8):
    """Integral of A . dl around the polyline.

    Composite Gauss-Legendre panels per segment, doubling the panel count
    until successive values agree to tol (relative to max(1, |value|)).
    Returns (value, error_estimate). The potential must accept points of
    shape (..., 3).
    """
    verts = loop.vertices
    starts, ends = verts[:-1], verts[1:]
    seg = ends - starts  # (S, 3)
    nodes, weights = _gl_nodes(order)

    def value(panels):
        # panel offsets p/panels + node/panels, all segments at once
        offs = (np.arange(panels)[:, None] + nodes[None, :]) / panels  # (P, O)
        pts = starts[:, None, None, :] + offs[None, :, :, None] * seg[:, None, None, :]
        a = potential(pts)  # (S, P, O, 3)
        integrand = np.einsum("spoc,sc->spo", a, seg)
        return float(np.sum(integrand * weights[None, None, :]) / panels)

    prev = value(1)
    err = np.inf
    panels = 1
    for _ in range(max_doublings):
        panels *= 2
        cur = value(panels)
        err = abs(cur - prev)
        prev = cur
        if err <= tol * max(1.0, abs(cur)):
            break
    return loop.orientation * prev, err


def loop_holonomy(potential, loop, q, **quad_kw):
    """(e^{i*q*closed-loop integral}, integral) for a charge q.

    The complex factor is the phase a charge picks up around the loop; the
    real number is the enclosed flux as seen through A.
    """
    flux, _ = line_integral(potential, loop, **quad_kw)
    return np.exp(1j * q * flux), flux


def refined_circle_flux(potential, rho, z=0.0, center=(0.0, 0.0),
                        n0=64, levels=3):
    """Flux through the smooth circle, extrapolated from inscribed polygons.

    A fixed N-gon's line integral differs from the smooth circle's by
    O(1/N^2), so the values at N, 2N, 4N, ... are Neville-extrapolated in
    1/N^2. Returns (flux, error_estimate). n0 >= 64 keeps the leading
    polygon error small enough for the extrapolation to reach ~1e-10.
    """
    if levels < 2:
        raise DomainError("refined flux needs at least 2 refinement levels")
    ns = n0 * 2 ** np.arange(levels)
    vals = []
    for n in ns:
        flux, _ = line_integral(potential, circle_loop(rho, z=z, n=int(n), center=center))
        vals.append(flux)
    # Neville table in x = 1/n^2, evaluated at x = 0
    x = 1.0 / ns.astype(float) ** 2
    tab = list(vals)
    corners = [tab[-1]]
    for m in range(1, levels):
        for i in range(levels - m):
            tab[i] = (tab[i + 1] * x[i] - tab[i] * x[i + m]) / (x[i] - x[i + m])
        corners.append(tab[0])
    err = abs(corners[-1] - corners[-2])
    return corners[-1], err


def cap_flux(g, theta, r=1.0, patch="north", n0=64, levels=3):
    """Flux of a pole g through the spherical cap of opening angle theta,
    measured as the extrapolated circle holonomy of the given patch."""
    pot = partial(wu_yang_potential, patch, g)
    return refined_circle_flux(pot, r * np.sin(theta), z=r * np.cos(theta),
                               n0=n0, levels=levels)


# ---------------------------------------------------------------------------
# covariant-derivative triviality
# ---------------------------------------------------------------------------

def higgs_covariant_residual(q, gauge_fn, H0, points, h=1e-3):
    """max |(grad - i*q*grad(Lambda)) H| for H = H0 * e^{i*q*Lambda}.

    gauge_fn is the gauge scalar Lambda, callable on points of shape (..., 3);
    both gradients are central differences with step h, evaluated at each of
    the sample points. For any smooth Lambda the residual is O(h^2): the field
    H is covariantly constant when the potential is the gradient of the gauge
    function, no matter whether that gauge function is single-valued.
    """
    pts = as_vec3(points)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[0] == 0 or not np.isfinite(h) or h <= 0:
        raise DomainError("need a non-empty sample set and step h > 0")

    def H(p):
        return H0 * np.exp(1j * q * np.asarray(gauge_fn(p)))

    h_center = H(pts)
    res2 = np.zeros(pts.shape[0])
    for axis in range(3):
        step = np.zeros(3)
        step[axis] = h
        lam_p = np.asarray(gauge_fn(pts + step))
        lam_m = np.asarray(gauge_fn(pts - step))
        grad_h = (H(pts + step) - H(pts - step)) / (2.0 * h)
        grad_lam = (lam_p - lam_m) / (2.0 * h)
        res2 = res2 + np.abs(grad_h - 1j * q * grad_lam * h_center) ** 2
    worst = float(np.sqrt(np.max(res2)))
    return worst
