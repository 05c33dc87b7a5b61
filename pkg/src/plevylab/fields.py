"""Test functions: evaluation, analytic gradients, L^p gradient norms, and
total-variation seminorms for the piecewise-constant ones.

Every field evaluates vectorized on ``(n, dim)`` arrays.  Gradients are
analytic; piecewise-constant fields have zero gradient away from their
interfaces and refuse pointwise gradients on them.  The total-variation
seminorm is computed in closed form as (jump magnitude) x (interface measure
strictly inside the domain), which is exact for the hyperplane and sphere
interfaces supported here; nothing is discretized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import sphere_area, unit_ball_volume
from .geometry import Ball, Box, IntervalUnion, SlitBall
from .quadrature import integrate

SMOOTH = "smooth"
LIPSCHITZ = "lipschitz"
PIECEWISE_CONSTANT = "piecewise_constant"


class FieldError(ValueError):
    pass


class InterfaceGradientError(FieldError):
    """Gradient requested on a jump interface."""


def _pts(x, dim):
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1) if dim > 1 else pts.reshape(-1, 1)
    if pts.shape[1] != dim:
        raise FieldError("expected points of shape (n, %d)" % dim)
    return pts


class Field:
    dim: int
    regularity: str
    # 1-D points where the field is continuous but not differentiable
    kinks: tuple = ()
    # 1-D jump interface locations (piecewise-constant fields)
    jump_points: tuple = ()
    support_radius = None
    # True when offset_diff is evaluated without catastrophic cancellation
    # at any offset scale (concentrated kernels probe |h| far below the
    # resolution of u(x+h) - u(x) computed by subtraction)
    stable_offset_diff = False

    def eval(self, x):
        return self._eval(_pts(x, self.dim))

    def grad(self, x):
        return self._grad(_pts(x, self.dim))

    def offset_diff(self, x, h):
        """u(x + h) - u(x) for paired point/offset arrays."""
        pts = _pts(x, self.dim)
        off = np.broadcast_to(np.asarray(h, dtype=float), pts.shape)
        return self._offset_diff(pts, off)

    def _offset_diff(self, pts, off):
        return self._eval(pts + off) - self._eval(pts)

    def scaled(self, c):
        return Scaled(self, c)

    def shifted(self, c):
        return Shifted(self, c)

    def spec(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Linear(Field):
    """u(x) = a.x + b with constant vector slope a."""

    slope: tuple = (1.0,)
    intercept: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "slope",
                           tuple(float(s) for s in np.atleast_1d(self.slope)))

    @property
    def dim(self):
        return len(self.slope)

    regularity = SMOOTH
    stable_offset_diff = True

    def _eval(self, pts):
        return pts @ np.asarray(self.slope) + self.intercept

    def _grad(self, pts):
        return np.broadcast_to(np.asarray(self.slope),
                               pts.shape).copy()

    def _offset_diff(self, pts, off):
        return off @ np.asarray(self.slope)

    def laplacian(self, x):
        pts = _pts(x, self.dim)
        return np.zeros(pts.shape[0])

    def spec(self):
        return {"field": "linear",
                "slope": ",".join(repr(s) for s in self.slope),
                "intercept": repr(self.intercept)}


@dataclass(frozen=True)
class Gaussian(Field):
    """u(x) = exp(-|x|^2)."""

    dim: int = 1
    regularity = SMOOTH
    stable_offset_diff = True

    def _eval(self, pts):
        return np.exp(-np.sum(pts * pts, axis=1))

    def _grad(self, pts):
        return -2.0 * pts * self._eval(pts)[:, None]

    def _offset_diff(self, pts, off):
        # u(x+h) - u(x) = exp(-|x|^2) expm1(-(2 x.h + |h|^2)); the exponent
        # difference is formed from the offset itself, so no cancellation
        delta = 2.0 * np.sum(pts * off, axis=1) + np.sum(off * off, axis=1)
        return self._eval(pts) * np.expm1(-delta)

    def radial_gradient_magnitude(self, r):
        return 2.0 * np.asarray(r) * np.exp(-np.asarray(r) ** 2)

    def laplacian(self, x):
        pts = _pts(x, self.dim)
        r2 = np.sum(pts * pts, axis=1)
        return (4.0 * r2 - 2.0 * self.dim) * np.exp(-r2)

    def spec(self):
        return {"field": "gaussian", "d": str(self.dim)}


@dataclass(frozen=True)
class Tent(Field):
    """u(x) = max(0, 1 - |x|); Lipschitz with constant 1, supported in B_1."""

    dim: int = 1
    regularity = LIPSCHITZ
    support_radius = 1.0

    @property
    def kinks(self):
        return (-1.0, 0.0, 1.0) if self.dim == 1 else ()

    @property
    def stable_offset_diff(self):
        return self.dim == 1

    def _eval(self, pts):
        r = np.linalg.norm(pts, axis=1)
        return np.maximum(0.0, 1.0 - r)

    def _offset_diff(self, pts, off):
        if self.dim != 1:
            return super()._offset_diff(pts, off)
        x = pts[:, 0]
        h = off[:, 0]
        y = x + h
        # on one linear piece the slope acts on the exact offset; across a
        # kink t(y) - t(x) = min(|x|,1) - min(|y|,1) subtracts nearby
        # magnitudes, which is exact (Sterbenz) and only O(eps |x|) off
        # through the rounding of x + h
        same = (np.sign(x) == np.sign(y)) & (np.abs(x) < 1.0) \
            & (np.abs(y) < 1.0) & (x != 0.0)
        across = np.minimum(np.abs(x), 1.0) - np.minimum(np.abs(y), 1.0)
        return np.where(same, -np.sign(x) * h, across)

    def _grad(self, pts):
        # a.e. gradient; arbitrary (zero) on the kink set {0, |x|=1}
        r = np.linalg.norm(pts, axis=1)
        out = np.zeros_like(pts)
        inside = (r > 0) & (r < 1)
        out[inside] = -pts[inside] / r[inside, None]
        return out

    def spec(self):
        return {"field": "tent", "d": str(self.dim)}


@dataclass(frozen=True)
class SmoothBump(Field):
    """C^inf bump exp(1 - 1/(1 - |x/R|^2)) on |x| < R, zero outside."""

    dim: int = 1
    radius: float = 1.0
    regularity = SMOOTH

    @property
    def support_radius(self):
        return self.radius

    def _eval(self, pts):
        s = np.sum(pts * pts, axis=1) / self.radius ** 2
        out = np.zeros(pts.shape[0])
        inside = s < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside]))
        return out

    def _grad(self, pts):
        s = np.sum(pts * pts, axis=1) / self.radius ** 2
        out = np.zeros_like(pts)
        inside = s < 1.0
        u = np.exp(1.0 - 1.0 / (1.0 - s[inside]))
        factor = -2.0 / (self.radius ** 2 * (1.0 - s[inside]) ** 2) * u
        out[inside] = pts[inside] * factor[:, None]
        return out

    def radial_gradient_magnitude(self, r):
        r = np.asarray(r, dtype=float)
        s = (r / self.radius) ** 2
        out = np.zeros_like(s)
        inside = s < 1.0
        u = np.exp(1.0 - 1.0 / (1.0 - s[inside]))
        out[inside] = 2.0 * r[inside] / (self.radius ** 2
                                         * (1.0 - s[inside]) ** 2) * u
        return out

    def laplacian(self, x):
        # for u = exp(g(s)), s = |x|^2/R^2: Lap u = (2u/R^2)(d g' + 2s(g'^2 + g''))
        pts = _pts(x, self.dim)
        s = np.sum(pts * pts, axis=1) / self.radius ** 2
        out = np.zeros(pts.shape[0])
        inside = s < 1.0
        si = s[inside]
        u = np.exp(1.0 - 1.0 / (1.0 - si))
        g1 = -1.0 / (1.0 - si) ** 2
        g2 = -2.0 / (1.0 - si) ** 3
        out[inside] = (2.0 * u / self.radius ** 2) \
            * (self.dim * g1 + 2.0 * si * (g1 * g1 + g2))
        return out

    def spec(self):
        return {"field": "bump", "d": str(self.dim),
                "radius": repr(self.radius)}


@dataclass(frozen=True)
class SignJump(Field):
    """u = -magnitude on {x_d < 0}, +magnitude on {x_d > 0}, 0 on the plane.

    The jump across the interface has size ``2 * magnitude`` (the default
    levels -1/2 and +1/2 give a unit jump).
    """

    dim: int = 1
    magnitude: float = 0.5
    regularity = PIECEWISE_CONSTANT
    stable_offset_diff = True  # differences of constants are exact

    @property
    def jump_points(self):
        return (0.0,) if self.dim == 1 else ()

    @property
    def jump_size(self):
        return 2.0 * abs(self.magnitude)

    def _eval(self, pts):
        return self.magnitude * np.sign(pts[:, -1])

    def _grad(self, pts):
        if np.any(pts[:, -1] == 0.0):
            raise InterfaceGradientError(
                "gradient undefined on the jump interface x_d = 0")
        return np.zeros_like(pts)

    def spec(self):
        return {"field": "sign_jump", "d": str(self.dim),
                "magnitude": repr(self.magnitude)}


@dataclass(frozen=True)
class BallIndicator(Field):
    """Indicator-type field: ``inside`` on |x| < radius, ``outside`` beyond."""

    dim: int = 2
    radius: float = 0.5
    inside: float = 1.0
    outside: float = 0.0
    regularity = PIECEWISE_CONSTANT
    stable_offset_diff = True

    @property
    def jump_points(self):
        return (-self.radius, self.radius) if self.dim == 1 else ()

    @property
    def jump_size(self):
        return abs(self.inside - self.outside)

    def _eval(self, pts):
        r2 = np.sum(pts * pts, axis=1)
        return np.where(r2 < self.radius ** 2, self.inside, self.outside)

    def _grad(self, pts):
        r = np.sqrt(np.sum(pts * pts, axis=1))
        if np.any(r == self.radius):
            raise InterfaceGradientError(
                "gradient undefined on the sphere interface")
        return np.zeros_like(pts)

    def spec(self):
        return {"field": "ball_indicator", "d": str(self.dim),
                "radius": repr(self.radius), "inside": repr(self.inside),
                "outside": repr(self.outside)}


class _Wrapped(Field):
    def __init__(self, base, c):
        self.base = base
        self.c = float(c)

    @property
    def dim(self):
        return self.base.dim

    @property
    def regularity(self):
        return self.base.regularity

    @property
    def kinks(self):
        return self.base.kinks

    @property
    def jump_points(self):
        return self.base.jump_points

    @property
    def support_radius(self):
        return self.base.support_radius

    @property
    def stable_offset_diff(self):
        return self.base.stable_offset_diff


class Scaled(_Wrapped):
    """c * u, for homogeneity checks."""

    def _eval(self, pts):
        return self.c * self.base._eval(pts)

    def _grad(self, pts):
        return self.c * self.base._grad(pts)

    def _offset_diff(self, pts, off):
        return self.c * self.base._offset_diff(pts, off)

    @property
    def jump_size(self):
        return abs(self.c) * self.base.jump_size

    def spec(self):
        return dict(self.base.spec(), scale=repr(self.c))


class Shifted(_Wrapped):
    """u + c; gradients and jumps are untouched."""

    def _eval(self, pts):
        return self.base._eval(pts) + self.c

    def _grad(self, pts):
        return self.base._grad(pts)

    def _offset_diff(self, pts, off):
        return self.base._offset_diff(pts, off)

    @property
    def jump_size(self):
        return self.base.jump_size

    def spec(self):
        return dict(self.base.spec(), shift=repr(self.c))


def grad_lp_norm(field, domain, p_exp, *, abs_tol=1e-11):
    """Integral of |grad u|^p over the domain.

    Closed form for linear fields; one-dimensional adaptive quadrature on
    interval unions; radial quadrature on balls for fields whose gradient
    magnitude is radial.  Piecewise-constant fields are rejected (their
    gradient energy lives on interfaces; use :func:`bv_seminorm`).
    """
    if field.regularity == PIECEWISE_CONSTANT:
        # with every interface outside the open domain the field is locally
        # constant there and its gradient energy vanishes
        if bv_seminorm(field, domain) == 0.0:
            return 0.0
        raise FieldError("field jumps inside the domain: use bv_seminorm")
    if p_exp < 1:
        raise FieldError("p must be >= 1")
    if field.dim != domain.dim:
        raise FieldError("field/domain dimension mismatch")
    if isinstance(field, (Scaled, Shifted)):
        scale = abs(field.c) ** p_exp if isinstance(field, Scaled) else 1.0
        return scale * grad_lp_norm(field.base, domain, p_exp,
                                    abs_tol=abs_tol)
    if isinstance(field, Linear):
        slope = math.sqrt(sum(s * s for s in field.slope))
        return slope ** p_exp * domain.volume()
    if isinstance(domain, IntervalUnion):
        total = 0.0
        for a, b in domain.intervals:
            def f(x):
                g = field.grad(x.reshape(-1, 1))
                return np.abs(g[:, 0]) ** p_exp
            val, _ = integrate(f, a, b, points=field.kinks, abs_tol=abs_tol)
            total += val
        return total
    if isinstance(domain, Ball) and hasattr(field, "radial_gradient_magnitude") \
            and all(c == 0.0 for c in domain.center):
        def f(r):
            return (field.radial_gradient_magnitude(r) ** p_exp
                    * r ** (domain.dim - 1))
        val, _ = integrate(f, 0.0, domain.radius, abs_tol=abs_tol)
        return sphere_area(domain.dim) * val
    raise FieldError("no quadrature route for %s on %s"
                     % (type(field).__name__, type(domain).__name__))


def _hyperplane_section_measure(domain):
    """(d-1)-measure of {x_d = 0} inside the domain, or None if excluded."""
    if isinstance(domain, IntervalUnion):
        inside = any(a < 0.0 < b for a, b in domain.intervals)
        return 1.0 if inside else 0.0
    if isinstance(domain, SlitBall):
        return 0.0  # the slit is removed from the domain by definition
    if isinstance(domain, Ball):
        if any(c != 0.0 for c in domain.center):
            return None
        d, r = domain.dim, domain.radius
        return unit_ball_volume(d - 1) * r ** (d - 1) if d >= 2 else 1.0
    if isinstance(domain, Box):
        if not (domain.lo[-1] < 0.0 < domain.hi[-1]):
            return 0.0
        return float(np.prod([h - l for l, h
                              in zip(domain.lo[:-1], domain.hi[:-1])]))
    return None


def bv_seminorm(field, domain):
    """Total variation of a piecewise-constant field inside the domain.

    Sum over interfaces of jump size times the interface measure strictly
    inside the open domain.  Interfaces falling on removed slits contribute
    nothing.  Raises for interfaces without a closed-form measure.
    """
    if isinstance(field, (Scaled, Shifted)):
        factor = abs(field.c) if isinstance(field, Scaled) else 1.0
        return factor * bv_seminorm(field.base, domain)
    if field.regularity != PIECEWISE_CONSTANT:
        raise FieldError("bv_seminorm needs a piecewise-constant field")
    if field.dim != domain.dim:
        raise FieldError("field/domain dimension mismatch")
    if isinstance(field, SignJump):
        measure = _hyperplane_section_measure(domain)
        if measure is None:
            raise FieldError("no closed-form interface measure for %s"
                             % type(domain).__name__)
        return field.jump_size * measure
    if isinstance(field, BallIndicator):
        rho = field.radius
        if isinstance(domain, IntervalUnion):
            count = sum(1 for pt in (-rho, rho)
                        if any(a < pt < b for a, b in domain.intervals))
            return field.jump_size * count
        if isinstance(domain, Ball) and all(c == 0.0 for c in domain.center):
            if rho >= domain.radius:
                return 0.0
            return field.jump_size * sphere_area(domain.dim) \
                * rho ** (domain.dim - 1)
        raise FieldError("no closed-form interface measure for %s"
                         % type(domain).__name__)
    raise FieldError("bv_seminorm unsupported for %s" % type(field).__name__)


def sobolev_norm_p(field, p_exp, *, abs_tol=1e-11):
    """Full-space W^{1,p} norm to the p-th power, ||u||_p^p + ||grad u||_p^p.

    Only for compactly supported fields (the bound tests use it with the
    tent field), integrating over the support interval/ball.
    """
    r = field.support_radius
    if r is None:
        raise FieldError("needs a compactly supported field")
    if field.dim == 1:
        dom = IntervalUnion(((-r, r),))

        def fval(x):
            return np.abs(field.eval(x.reshape(-1, 1))) ** p_exp
        val, _ = integrate(fval, -r, r, points=field.kinks, abs_tol=abs_tol)
        return val + grad_lp_norm(field, dom, p_exp, abs_tol=abs_tol)
    dom = Ball(r, field.dim)

    def fval(rr):
        pts = np.zeros((rr.size, field.dim))
        pts[:, 0] = rr
        return (np.abs(field.eval(pts)) ** p_exp
                * rr ** (field.dim - 1))
    val, _ = integrate(fval, 0.0, r, abs_tol=abs_tol)
    return sphere_area(field.dim) * val + grad_lp_norm(field, dom, p_exp,
                                                       abs_tol=abs_tol)


def from_spec(spec):
    kind = spec.get("field")
    if kind == "linear":
        slope = tuple(float(v) for v in spec.get("slope", "1").split(","))
        return Linear(slope, float(spec.get("intercept", 0.0)))
    if kind == "gaussian":
        return Gaussian(int(spec.get("d", 1)))
    if kind == "tent":
        return Tent(int(spec.get("d", 1)))
    if kind == "bump":
        return SmoothBump(int(spec.get("d", 1)),
                          float(spec.get("radius", 1.0)))
    if kind == "sign_jump":
        return SignJump(int(spec.get("d", 1)),
                        float(spec.get("magnitude", 0.5)))
    if kind == "ball_indicator":
        return BallIndicator(int(spec.get("d", 2)),
                             float(spec.get("radius", 0.5)),
                             float(spec.get("inside", 1.0)),
                             float(spec.get("outside", 0.0)))
    raise FieldError("unknown field kind %r" % kind)
