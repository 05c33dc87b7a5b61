"""Radial kernel families with unit (1 ^ |h|^p)-mass, and their calculus.

A kernel is a radial density ``nu`` on R^d \\ {0} subject to the integrability
condition ``int (1 ^ |h|^p) nu(h) dh < infty`` and normalized so that integral
equals one.  Families indexed by a concentration parameter ``eps`` are provided:

``stable``            a_{eps,d,p} |h|^(-d-p+eps), full support
``rescaled``          three-piece rescaling of a normalized base profile
``truncated_power``   (d+b)/(S eps^(d+b)) |h|^(b-p) on the ball B_eps
``smoothed_power``    (|h|+eps)^b |h|^(-p) / (S b_eps) on B_eps0
                      (b = -d switches to the log-normalized variant)
``log_limit``         |h|^(-d-p) / (S log(eps0/eps)) on the annulus eps<|h|<eps0

``S`` is the sphere area |S^{d-1}|.  Normalization, tail mass and weighted
moments are evaluated by adaptive radial quadrature split at the known kinks,
with a power substitution at the origin and the 1/t map on unbounded tails.
Offset sampling inverts the radial CDF of the weighted law
``S (1 ^ r^p) nu(r) r^{d-1} dr`` (closed form where available, otherwise a
4096-node log-spaced table with monotone cubic interpolation) and draws the
direction uniformly on the sphere.  Kernels are immutable; samplers take a
caller-owned generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .constants import sphere_area
from .quadrature import (QuadratureError, fixed_gauss, integrate,
                         integrate_tail)

NORMALIZATION_ACCEPT_TOL = 1e-6   # accepted deviation from unit mass
NORMALIZATION_REQUEST_TOL = 1e-10  # accuracy requested from quadrature
DEFAULT_EPS_GRID = (0.4, 0.2, 0.1, 0.05, 0.02)
_TABLE_NODES = 4096
_TABLE_TAIL_MASS = 1e-9


class KernelError(ValueError):
    pass


@dataclass(frozen=True)
class RadialKernel:
    """One radial kernel: profile, structure hints, and sampling data.

    ``origin_exponent`` is gamma with ``nu(r) ~ r^(-gamma)`` as r -> 0 and
    ``tail_exponent`` is q with ``nu(r) ~ r^(-q)`` at infinity; both feed the
    singular quadrature and may be None for custom profiles (the adaptive
    fallback then detects divergence on its own).  ``breakpoints`` lists radii
    where the profile is not smooth (support edges included).
    """

    dim: int
    p_exp: float
    profile: object
    support_radius: float = None
    inner_radius: float = 0.0
    origin_exponent: float = None
    tail_exponent: float = None
    breakpoints: tuple = ()
    radial_cdf: object = None
    radial_cdf_inv: object = None
    family_tag: str = "custom"
    eps: float = None
    params: dict = field(default_factory=dict)
    # log nu(r), for overflow-free products with vanishing weights; power-law
    # profiles exceed the float range long before the weighted density does
    log_profile: object = None
    # nu(r) = origin_coefficient * r^(-origin_exponent) exactly (or to ~1e-12)
    # for r < origin_pure_radius; lets integrators treat the singular core
    # in closed form below floating point resolution
    origin_coefficient: float = None
    origin_pure_radius: float = None

    def weighted_radial_density(self, r, *, weight_beta=None):
        """S^{d-1} area times (1 ^ r^beta) nu(r) r^(d-1) (beta defaults to p).

        Evaluated in log space when the kernel carries a ``log_profile`` so
        that singular profiles never overflow under the vanishing weight.
        """
        r = np.asarray(r, dtype=float)
        beta = self.p_exp if weight_beta is None else weight_beta
        area = sphere_area(self.dim)
        if self.log_profile is None:
            w = np.minimum(1.0, r ** beta)
            return area * w * self.profile(r) * r ** (self.dim - 1)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore",
                         under="ignore"):
            lr = np.log(r)
            expo = self.log_profile(r) + np.minimum(0.0, beta * lr)
            if self.dim > 1:
                expo = expo + (self.dim - 1) * lr
            out = area * np.exp(expo)
        return np.where(np.isfinite(out), out, 0.0)

    def spec(self):
        out = {"family": self.family_tag, "d": str(self.dim),
               "p": repr(self.p_exp)}
        if self.eps is not None:
            out["eps"] = repr(self.eps)
        out.update({k: repr(v) for k, v in self.params.items()})
        return out


def _radial_pieces(kernel, lo, hi_cap=None):
    """Split points for radial integrals of the weighted density."""
    pts = set()
    hi = kernel.support_radius
    for b in kernel.breakpoints:
        pts.add(float(b))
    pts.add(1.0)  # the (1 ^ r^p) weight kink
    if kernel.inner_radius > 0:
        pts.add(kernel.inner_radius)
    if hi is not None:
        pts.add(hi)
    if hi_cap is not None:
        pts.add(float(hi_cap))
    return sorted(p for p in pts if p > lo)


def _weighted_alpha_at_zero(kernel, beta=None):
    """Exponent a with weighted density ~ r^(a-1) at the origin, or None."""
    gamma = kernel.origin_exponent
    if gamma is None:
        return None
    b = kernel.p_exp if beta is None else beta
    return kernel.dim + b - gamma


def _radial_integral(kernel, lo, hi, *, weight_beta=None, abs_tol):
    """Integral of S (1 ^ r^beta) nu(r) r^(d-1) over (lo, hi].

    ``hi = None`` integrates to infinity (full-support kernels), using the
    tail-decay hint when present.
    """
    d, p = kernel.dim, kernel.p_exp
    beta = p if weight_beta is None else weight_beta

    def f(r):
        return kernel.weighted_radial_density(r, weight_beta=beta)

    lo = max(lo, kernel.inner_radius)
    support = kernel.support_radius
    if support is not None:
        hi = support if hi is None else min(hi, support)
    if hi is not None and hi <= lo:
        return 0.0
    finite_hi = hi if hi is not None else None
    total, err = 0.0, 0.0
    cuts = _radial_pieces(kernel, lo, hi_cap=finite_hi)
    if finite_hi is not None:
        cuts = [c for c in cuts if c <= finite_hi]
        if not cuts or cuts[-1] < finite_hi:
            cuts.append(finite_hi)
    near_cap = cuts[-1] if cuts else max(lo, 1.0)
    alpha0 = None
    if lo == 0.0 and kernel.inner_radius == 0.0:
        alpha0 = _weighted_alpha_at_zero(kernel, beta)
        if alpha0 is not None and alpha0 <= 0.0:
            raise QuadratureError(
                "radial integral diverges at the origin "
                "(weighted exponent %.3g <= 0)" % alpha0)
    val, e = integrate(f, lo, near_cap, points=cuts[:-1] if cuts else (),
                       alpha_left=alpha0, abs_tol=abs_tol)
    total += val
    err += e
    if hi is None:
        q = kernel.tail_exponent
        decay = None if q is None else q - (d - 1)
        tail, e = integrate_tail(f, near_cap, decay_exponent=decay,
                                 abs_tol=abs_tol)
        total += tail
        err += e
    return total


def normalization(kernel, *, abs_tol=NORMALIZATION_REQUEST_TOL):
    """The p-Levy unit-mass integral int (1 ^ |h|^p) nu(h) dh.

    Divergent profiles raise :class:`QuadratureError` instead of returning a
    number.
    """
    return _radial_integral(kernel, 0.0, None, abs_tol=abs_tol)


def mass_outside(kernel, delta, *, abs_tol=NORMALIZATION_REQUEST_TOL):
    """Weighted tail mass int_{|h| > delta} (1 ^ |h|^p) nu(h) dh."""
    if delta <= 0:
        raise KernelError("delta must be positive")
    return _radial_integral(kernel, delta, None, abs_tol=abs_tol)


def weighted_moment(kernel, beta, big_r, *, abs_tol=NORMALIZATION_REQUEST_TOL):
    """Truncated moment int_{|h| <= R} (1 ^ |h|^beta) nu(h) dh for beta >= p."""
    if beta < kernel.p_exp:
        raise KernelError("moment defined for beta >= p")
    if big_r <= 0:
        raise KernelError("R must be positive")
    return _radial_integral(kernel, 0.0, big_r, weight_beta=beta,
                            abs_tol=abs_tol)


def check_normalized(kernel, *, tol=NORMALIZATION_ACCEPT_TOL):
    mass = normalization(kernel)
    if abs(mass - 1.0) > tol:
        raise KernelError(
            "kernel is not normalized: measured mass %.12g (|mass-1| > %g)"
            % (mass, tol))
    return mass


# ---------------------------------------------------------------------------
# sampling


def _tabulated_cdf(kernel):
    """Log-spaced CDF table of the weighted radial law, PCHIP-interpolated.

    Nodes span all but ~1e-9 of the mass.  Non-finite or non-monotone tables
    are reported as construction failures.
    """
    lo = kernel.inner_radius
    hi = kernel.support_radius
    if hi is None:
        raise KernelError("cdf tabulation needs a compactly supported "
                          "profile; supply a closed-form cdf instead")
    r_lo = max(lo, hi * 1e-12)
    nodes = np.geomspace(r_lo, hi, _TABLE_NODES)
    if lo > 0:
        nodes = np.concatenate(([lo], nodes[nodes > lo]))
    segs = np.zeros(nodes.size)
    for i in range(1, nodes.size):
        segs[i] = fixed_gauss(kernel.weighted_radial_density,
                              nodes[i - 1], nodes[i], n=12)
    cdf = np.cumsum(segs)
    head = _radial_integral(kernel, 0.0, nodes[0],
                            abs_tol=NORMALIZATION_REQUEST_TOL) \
        if lo == 0.0 else 0.0
    cdf += head
    if not np.all(np.isfinite(cdf)):
        raise KernelError("cdf tabulation produced non-finite values")
    total = cdf[-1]
    if not (abs(total - 1.0) <= 1e-4):
        raise KernelError("cdf tabulation mass %.6g far from 1" % total)
    cdf /= total
    cdf = np.clip(cdf, 0.0, 1.0)
    keep = np.concatenate(([True], np.diff(cdf) > 0))
    cdf_k, nodes_k = cdf[keep], nodes[keep]
    if cdf_k[0] > 0.0:
        cdf_k = np.concatenate(([0.0], cdf_k))
        nodes_k = np.concatenate(([max(lo, r_lo * 0.5)], nodes_k))
    fwd = PchipInterpolator(nodes_k, cdf_k, extrapolate=False)
    inv = PchipInterpolator(cdf_k, nodes_k, extrapolate=False)
    r_min, r_max = nodes_k[0], nodes_k[-1]

    def cdf_fn(r):
        r = np.asarray(r, dtype=float)
        out = np.clip(fwd(np.clip(r, r_min, r_max)), 0.0, 1.0)
        return np.where(r <= r_min, 0.0, np.where(r >= r_max, 1.0, out))

    def inv_fn(v):
        v = np.asarray(v, dtype=float)
        return np.clip(inv(np.clip(v, 0.0, 1.0)), r_min, r_max)

    return cdf_fn, inv_fn


_sampler_cache = {}


def _sampler(kernel):
    if kernel.radial_cdf_inv is not None:
        return kernel.radial_cdf_inv
    key = id(kernel)
    if key not in _sampler_cache:
        _sampler_cache[key] = _tabulated_cdf(kernel)[1]
    return _sampler_cache[key]


def radial_cdf(kernel):
    if kernel.radial_cdf is not None:
        return kernel.radial_cdf
    key = ("cdf", id(kernel))
    if key not in _sampler_cache:
        _sampler_cache[key] = _tabulated_cdf(kernel)[0]
    return _sampler_cache[key]


def sample_directions(rng, size, dim):
    """Uniform points on S^{dim-1}; normalized Gaussians for dim >= 2."""
    if dim == 1:
        return (rng.integers(0, 2, size=(size, 1)) * 2.0 - 1.0)
    g = rng.normal(size=(size, dim))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return g / norms


def sample_offset_with_radii(kernel, rng, size=1):
    """Draw offsets h in R^d from the kernel's unit-mass weighted law.

    Returns ``(h, radii)``; the radii are the exact sampled values (the
    squared-norm route loses them to underflow for very concentrated
    kernels).
    """
    inv = _sampler(kernel)
    radii = np.asarray(inv(rng.random(size)), dtype=float)
    if not np.all(np.isfinite(radii)):
        raise KernelError("sampler produced non-finite radii")
    dirs = sample_directions(rng, size, kernel.dim)
    return radii[:, None] * dirs, radii


def sample_offset(kernel, rng, size=1):
    """Draw offsets h in R^d from the kernel's unit-mass weighted law."""
    return sample_offset_with_radii(kernel, rng, size)[0]


# ---------------------------------------------------------------------------
# family constructors


def make_stable(dim, p_exp, eps):
    """Fractional-type kernel a_{eps,d,p} |h|^(-d-p+eps) with closed forms.

    Valid for 0 < eps < p; outside that window the normalizer
    a = eps (p - eps) / (p S) degenerates and the construction is rejected.
    The weighted radial law is piecewise power: ~ r^(eps-1) inside the unit
    ball and ~ r^(eps-p-1) outside, so CDF and inverse are explicit.
    """
    if dim < 1:
        raise KernelError("dim must be >= 1")
    if p_exp < 1:
        raise KernelError("p must be >= 1")
    if not 0.0 < eps < p_exp:
        raise KernelError("stable family needs 0 < eps < p "
                          "(got eps=%g, p=%g)" % (eps, p_exp))
    area = sphere_area(dim)
    a = eps * (p_exp - eps) / (p_exp * area)
    power = -dim - p_exp + eps
    log_a = math.log(a)

    def profile(r):
        r = np.asarray(r, dtype=float)
        return a * np.power(r, power)

    def log_profile(r):
        return log_a + power * np.log(np.asarray(r, dtype=float))

    m1 = (p_exp - eps) / p_exp  # weighted mass of the unit ball

    def cdf(r):
        r = np.asarray(r, dtype=float)
        inner = m1 * np.power(np.clip(r, 0.0, 1.0), eps)
        outer = m1 + (eps / p_exp) * (
            1.0 - np.power(np.maximum(r, 1.0), -(p_exp - eps)))
        return np.where(r <= 1.0, inner, outer)

    def cdf_inv(v):
        v = np.asarray(v, dtype=float)
        lo = np.power(np.clip(v, 0.0, m1) / m1, 1.0 / eps)
        # 1 - (v - m1) p / eps rewritten as (1 - v) p / eps: stable near v=1
        w = np.maximum(1.0 - v, 1e-300)
        hi = np.power(w * p_exp / eps, -1.0 / (p_exp - eps))
        return np.where(v <= m1, lo, hi)

    return RadialKernel(
        dim=dim, p_exp=p_exp, profile=profile, log_profile=log_profile,
        origin_exponent=dim + p_exp - eps, tail_exponent=dim + p_exp - eps,
        origin_coefficient=a, origin_pure_radius=math.inf,
        radial_cdf=cdf, radial_cdf_inv=cdf_inv,
        family_tag="stable", eps=eps)


def make_rescaled(base, eps):
    """Three-piece rescaling of a normalized base kernel.

    nu_eps(h) = eps^(-d-p) nu(h/eps)          on |h| <= eps
              = eps^(-d) |h|^(-p) nu(h/eps)   on eps < |h| <= 1
              = eps^(-d) nu(h/eps)            on |h| > 1

    preserving the unit mass exactly.  The weighted radial law of the
    rescaled kernel is the base law contracted by eps, so the base CDF is
    reused: cdf(r) = cdf_base(r/eps).
    """
    if not isinstance(base, RadialKernel):
        raise KernelError("base must be a RadialKernel")
    if not 0.0 < eps <= 1.0:
        raise KernelError("rescaled family needs 0 < eps <= 1")
    check_normalized(base)
    d, p = base.dim, base.p_exp
    base_profile = base.profile
    base_log = base.log_profile

    def profile(r):
        r = np.asarray(r, dtype=float)
        z = base_profile(r / eps)
        out = np.where(r <= eps, eps ** (-d - p) * z,
                       np.where(r <= 1.0,
                                eps ** (-d) * np.power(r, -p) * z,
                                eps ** (-d) * z))
        return out

    log_profile = None
    if base_log is not None:
        log_eps = math.log(eps)

        def log_profile(r):
            r = np.asarray(r, dtype=float)
            z = base_log(r / eps)
            return np.where(
                r <= eps, -(d + p) * log_eps + z,
                np.where(r <= 1.0, -d * log_eps - p * np.log(r) + z,
                         -d * log_eps + z))

    base_inv = base.radial_cdf_inv
    base_cdf = base.radial_cdf
    if base_inv is None or base_cdf is None:
        raise KernelError("rescaling needs a base with sampling data")

    def cdf(r):
        return base_cdf(np.asarray(r, dtype=float) / eps)

    def cdf_inv(v):
        return eps * np.asarray(base_inv(v), dtype=float)

    origin_c = None
    origin_pure = None
    if base.origin_coefficient is not None and base.origin_exponent is not None:
        origin_c = base.origin_coefficient * eps ** (base.origin_exponent
                                                     - d - p)
        origin_pure = eps * min(1.0, base.origin_pure_radius or 1.0)
    support = None if base.support_radius is None \
        else eps * base.support_radius
    breaks = {eps, 1.0}
    breaks.update(eps * b for b in base.breakpoints)
    return RadialKernel(
        dim=d, p_exp=p, profile=profile, log_profile=log_profile,
        support_radius=support,
        inner_radius=eps * base.inner_radius,
        origin_exponent=base.origin_exponent,
        tail_exponent=base.tail_exponent,
        origin_coefficient=origin_c, origin_pure_radius=origin_pure,
        breakpoints=tuple(sorted(breaks)),
        radial_cdf=cdf, radial_cdf_inv=cdf_inv,
        family_tag="rescaled", eps=eps,
        params={"base": base.family_tag, "base_eps": base.eps})


def make_truncated_power(dim, p_exp, beta, eps):
    """Compact kernel (d+beta)/(S eps^(d+beta)) |h|^(beta-p) on B_eps."""
    if beta <= -dim:
        raise KernelError("truncated power needs beta > -d "
                          "(beta <= -d is not integrable at the origin)")
    if not 0.0 < eps < 1.0:
        raise KernelError("truncated power needs 0 < eps < 1")
    area = sphere_area(dim)
    c = (dim + beta) / (area * eps ** (dim + beta))
    log_c = math.log(c)

    def profile(r):
        r = np.asarray(r, dtype=float)
        vals = c * np.power(r, beta - p_exp)
        return np.where(r <= eps, vals, 0.0)

    def log_profile(r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= eps, log_c + (beta - p_exp) * np.log(r),
                        -np.inf)

    expo = dim + beta

    def cdf(r):
        r = np.asarray(r, dtype=float)
        return np.power(np.clip(r / eps, 0.0, 1.0), expo)

    def cdf_inv(v):
        v = np.asarray(v, dtype=float)
        return eps * np.power(np.clip(v, 0.0, 1.0), 1.0 / expo)

    return RadialKernel(
        dim=dim, p_exp=p_exp, profile=profile, log_profile=log_profile,
        support_radius=eps, origin_exponent=p_exp - beta,
        origin_coefficient=c, origin_pure_radius=eps,
        breakpoints=(eps,), radial_cdf=cdf, radial_cdf_inv=cdf_inv,
        family_tag="truncated_power", eps=eps, params={"beta": beta})


def make_log_limit(dim, p_exp, eps, eps0):
    """Annulus kernel |h|^(-d-p) / (S log(eps0/eps)) on eps < |h| < eps0."""
    if not 0.0 < eps < eps0 < 1.0:
        raise KernelError("log limit needs 0 < eps < eps0 < 1")
    area = sphere_area(dim)
    c = 1.0 / (area * math.log(eps0 / eps))
    log_c = math.log(c)

    def profile(r):
        r = np.asarray(r, dtype=float)
        vals = c * np.power(r, -dim - p_exp)
        return np.where((r > eps) & (r <= eps0), vals, 0.0)

    def log_profile(r):
        r = np.asarray(r, dtype=float)
        return np.where((r > eps) & (r <= eps0),
                        log_c - (dim + p_exp) * np.log(r), -np.inf)

    log_ratio = math.log(eps0 / eps)

    def cdf(r):
        r = np.asarray(r, dtype=float)
        return np.clip(np.log(np.maximum(r, eps) / eps) / log_ratio,
                       0.0, 1.0)

    def cdf_inv(v):
        v = np.asarray(v, dtype=float)
        return eps * np.power(eps0 / eps, np.clip(v, 0.0, 1.0))

    return RadialKernel(
        dim=dim, p_exp=p_exp, profile=profile, log_profile=log_profile,
        support_radius=eps0, inner_radius=eps, breakpoints=(eps, eps0),
        radial_cdf=cdf, radial_cdf_inv=cdf_inv,
        family_tag="log_limit", eps=eps, params={"eps0": eps0})


def smoothing_constant(dim, beta, eps, eps0, *, abs_tol=1e-13):
    """The normalizer b_eps of the smoothed-power family, two ways.

    Primary route: deterministic quadrature of the t-integral
    ``eps^(d+beta) int_{eps/(eps+eps0)}^1 t^(-d-beta-1) (1-t)^(d-1) dt``
    (beta = -d uses the log-normalized variant).  The result is cross-checked
    against the direct radial integral ``int_0^eps0 (r+eps)^beta r^(d-1) dr``;
    disagreement raises, so a transcription error cannot pass silently.
    """
    if not 0.0 < eps < eps0 < 1.0:
        raise KernelError("needs 0 < eps < eps0 < 1")
    if beta < -dim:
        raise KernelError("needs beta >= -d")
    t0 = eps / (eps + eps0)
    if beta == -dim:
        def tf(t):
            return np.power(t, -1.0) * np.power(1.0 - t, dim - 1)
        tval, _ = integrate(tf, t0, 1.0, abs_tol=abs_tol,
                            alpha_right=float(dim))
        b = tval / abs(math.log(eps))
        direct_scale = abs(math.log(eps))
    else:
        def tf(t):
            return np.power(t, -dim - beta - 1.0) * np.power(1.0 - t,
                                                             dim - 1)
        tval, _ = integrate(tf, t0, 1.0, abs_tol=abs_tol,
                            alpha_right=float(dim))
        b = eps ** (dim + beta) * tval
        direct_scale = 1.0

    def rf(r):
        return np.power(r + eps, beta) * np.power(r, dim - 1.0)
    direct, _ = integrate(rf, 0.0, eps0, abs_tol=abs_tol)
    if abs(b * direct_scale - direct) > 1e-8 * max(1.0, abs(direct)):
        raise QuadratureError(
            "b_eps cross-check failed: t-integral %.12g vs radial %.12g"
            % (b * direct_scale, direct),
            achieved=abs(b * direct_scale - direct))
    return b


def make_smoothed_power(dim, p_exp, beta, eps, eps0):
    """Mollified power kernel (|h|+eps)^beta |h|^(-p) / (S b_eps) on B_eps0.

    ``beta = -d`` selects the log-normalized limiting variant with an extra
    ``1/|log eps|`` factor.  No closed-form CDF exists here, so sampling goes
    through the tabulated inverse.
    """
    if beta < -dim:
        raise KernelError("smoothed power needs beta >= -d")
    b = smoothing_constant(dim, beta, eps, eps0)
    area = sphere_area(dim)
    denom = area * b * (abs(math.log(eps)) if beta == -dim else 1.0)
    log_denom = math.log(denom)

    def profile(r):
        r = np.asarray(r, dtype=float)
        vals = np.power(r + eps, beta) * np.power(r, -p_exp) / denom
        return np.where(r <= eps0, vals, 0.0)

    def log_profile(r):
        r = np.asarray(r, dtype=float)
        return np.where(r <= eps0,
                        beta * np.log(r + eps) - p_exp * np.log(r)
                        - log_denom, -np.inf)

    origin_c = eps ** beta / denom
    origin_pure = 1e-7 * eps
    kernel = RadialKernel(
        dim=dim, p_exp=p_exp, profile=profile, log_profile=log_profile,
        support_radius=eps0, origin_exponent=float(p_exp),
        origin_coefficient=origin_c, origin_pure_radius=origin_pure,
        breakpoints=(eps0,), family_tag="smoothed_power", eps=eps,
        params={"beta": beta, "eps0": eps0})
    cdf_fn, inv_fn = _tabulated_cdf(kernel)
    return RadialKernel(
        dim=dim, p_exp=p_exp, profile=profile, log_profile=log_profile,
        support_radius=eps0, origin_exponent=float(p_exp),
        origin_coefficient=origin_c, origin_pure_radius=origin_pure,
        breakpoints=(eps0,), radial_cdf=cdf_fn, radial_cdf_inv=inv_fn,
        family_tag="smoothed_power", eps=eps,
        params={"beta": beta, "eps0": eps0})


# ---------------------------------------------------------------------------
# eps -> kernel families


@dataclass(frozen=True)
class KernelFamily:
    """Generator of kernels along a concentration grid.

    ``kind`` is one of stable / rescaled / truncated_power / smoothed_power /
    log_limit.  Every kernel it produces satisfies the unit-mass axiom; the
    concentration behaviour differs per family (see the package docs), which
    is why each family carries its own default grid inside its validity
    window.
    """

    kind: str
    dim: int
    p_exp: float
    beta: float = None
    eps0: float = None
    base: RadialKernel = None

    def eps_max(self):
        if self.kind == "stable":
            return self.p_exp
        if self.kind in ("rescaled", "truncated_power"):
            return 1.0
        return self.eps0

    def kernel(self, eps):
        if not 0.0 < eps < self.eps_max():
            raise KernelError("eps=%g outside the %s validity window (0, %g)"
                              % (eps, self.kind, self.eps_max()))
        if self.kind == "stable":
            return make_stable(self.dim, self.p_exp, eps)
        if self.kind == "rescaled":
            return make_rescaled(self.base, eps)
        if self.kind == "truncated_power":
            return make_truncated_power(self.dim, self.p_exp, self.beta, eps)
        if self.kind == "smoothed_power":
            return make_smoothed_power(self.dim, self.p_exp, self.beta,
                                       eps, self.eps0)
        if self.kind == "log_limit":
            return make_log_limit(self.dim, self.p_exp, eps, self.eps0)
        raise KernelError("unknown family kind %r" % self.kind)

    def default_grid(self):
        # annulus kernels only concentrate once eps drops below the probe
        # radii, hence the lower grid
        if self.kind == "log_limit":
            return (0.08, 0.04, 0.02, 0.01, 0.005)
        return tuple(e for e in DEFAULT_EPS_GRID if e < self.eps_max())

    def spec(self):
        out = {"family": self.kind, "d": str(self.dim), "p": repr(self.p_exp)}
        if self.beta is not None:
            out["beta"] = repr(self.beta)
        if self.eps0 is not None:
            out["eps0"] = repr(self.eps0)
        if self.base is not None:
            out["base"] = self.base.family_tag
            out["base_eps"] = repr(self.base.eps)
        return out


def family_from_spec(spec):
    kind = spec["family"]
    dim = int(spec.get("d", 1))
    p_exp = float(spec.get("p", 2.0))
    if kind == "stable":
        return KernelFamily("stable", dim, p_exp)
    if kind == "rescaled":
        base_eps = float(spec.get("base_eps", 0.5))
        base = make_stable(dim, p_exp, base_eps)
        return KernelFamily("rescaled", dim, p_exp, base=base)
    if kind == "truncated_power":
        return KernelFamily("truncated_power", dim, p_exp,
                            beta=float(spec.get("beta", 0.0)))
    if kind == "smoothed_power":
        return KernelFamily("smoothed_power", dim, p_exp,
                            beta=float(spec.get("beta", -0.5)),
                            eps0=float(spec.get("eps0", 0.5)))
    if kind == "log_limit":
        return KernelFamily("log_limit", dim, p_exp,
                            eps0=float(spec.get("eps0", 0.5)))
    raise KernelError("unknown family kind %r" % kind)


def kernel_from_spec(spec):
    fam = family_from_spec(spec)
    return fam.kernel(float(spec["eps"]))


def default_families(dim=1, p_exp=2.0):
    """The five family kinds with their default parameters."""
    return (
        KernelFamily("stable", dim, p_exp),
        KernelFamily("rescaled", dim, p_exp,
                     base=make_stable(dim, p_exp, 0.5 * min(p_exp, 1.0))),
        KernelFamily("truncated_power", dim, p_exp, beta=0.0),
        KernelFamily("smoothed_power", dim, p_exp, beta=-0.5, eps0=0.5),
        KernelFamily("log_limit", dim, p_exp, eps0=0.5),
    )
