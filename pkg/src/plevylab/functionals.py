"""Nonlocal energy functionals and their estimators.

The central object is the double integral of ``|u(x) - u(y)|^p`` against a
radial kernel over pairs drawn from one or two domains.  Two evaluation modes:

Monte Carlo
    Importance sampling in the substitution ``h = y - x``: x uniform on the
    domain, ``|h|`` from the kernel's unit-mass weighted radial law, direction
    uniform.  A proposed pair is accepted when ``x + h`` lands in the target
    set, and contributes ``vol * (|u(x+h) - u(x)| / (1 ^ |h|))^p``, which is
    unbiased for the double integral because the offset density is
    ``(1 ^ |h|^p) nu(h)``.  The weight is bounded for Lipschitz fields.
    Differences come from the fields' stable offset evaluation (exact at
    any radius); fields without one fall back to the analytic gradient
    below 1e-8, where raw subtraction is float noise.  Concentrated
    kernels put substantial mass at such radii.
    Sampling is chunked through counter-based generators keyed by
    (seed, case tag) with the chunk index in the counter block, and chunk
    sums are merged in index order, so any thread count reproduces the
    serial result bit for bit.

Deterministic (dimension one)
    Nested adaptive quadrature over interval pairs, split at every field kink,
    jump point and kernel breakpoint.  Singular cores, where the kernel is an
    exact power law below floating point resolution, are integrated in closed
    form: the inner integral over ``(0, r_c)`` uses the local slope, and the
    outer integral gets an analytic sliver at jump interfaces whose adjacent
    behaviour is ``|x - e|^(1-gamma)``.  This mode is the oracle the Monte
    Carlo estimates are checked against, and serves the jump fields whose MC
    weights are heavy-tailed.

Also here: the symmetrized-difference operator at a point (p = 2), the
pairing of a test function against the kernel's unit-mass measure (p = 1),
truncated fractional seminorms, and the three fractional rescalings that
recover the gradient energy.
"""

from __future__ import annotations

import math
import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels as kmod
from .constants import sphere_area
from .fields import PIECEWISE_CONSTANT, FieldError
from .geometry import IntervalUnion, containment_margin
from .quadrature import QuadratureError, integrate, integrate_tail

MODE_MC = "mc"
MODE_DET = "deterministic-1d"

_CHUNK = 262_144
_SMALL_R = 1e-8
_MASK64 = (1 << 64) - 1

DEFAULT_N_SAMPLES = 1_000_000
DEFAULT_SEED = 12345


class EnergyError(RuntimeError):
    pass


@dataclass(frozen=True)
class EnergyEstimate:
    """One functional evaluation: value, uncertainty, and provenance."""

    value: float
    stderr: float
    n_samples: int
    eps: float
    kernel_id: str
    domain_id: str
    field_id: str
    mode: str
    seed: int = None

    def row(self):
        return {"value": self.value, "stderr": self.stderr,
                "n": self.n_samples, "eps": self.eps,
                "kernel": self.kernel_id, "domain": self.domain_id,
                "field": self.field_id, "mode": self.mode,
                "seed": self.seed}


def _ident(spec):
    kind = spec.get("family") or spec.get("domain") or spec.get("field")
    rest = ",".join("%s=%s" % (k, v) for k, v in sorted(spec.items())
                    if k not in ("family", "domain", "field"))
    return "%s(%s)" % (kind, rest)


def _case_tag(*parts):
    return zlib.crc32("|".join(str(p) for p in parts).encode()) & _MASK64


def _thread_count():
    raw = os.environ.get("PLEVYLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _chunk_rng(seed, tag, index):
    bitgen = np.random.Philox(key=[seed & _MASK64, tag & _MASK64],
                              counter=[0, 0, index, 0])
    return np.random.Generator(bitgen)


# ---------------------------------------------------------------------------
# Monte Carlo core


def _quotients(field, xs, h, r, p_exp):
    """|u(x+h) - u(x)| / (1 ^ |h|) from the exact sampled offsets.

    Fields with a stable offset difference evaluate exactly at any radius.
    Others fall back to eval subtraction, which below 1e-8 is pure float
    cancellation while the quotient's limit |grad u . h/|h|| is exact;
    concentrated kernels place real mass at such radii.
    """
    if field.stable_offset_diff:
        du = np.abs(field.offset_diff(xs, h))
        if not np.all(np.isfinite(du)):
            bad = np.argmax(~np.isfinite(du))
            raise EnergyError("non-finite field value near x=%s" % xs[bad])
        q = np.zeros_like(du)
        pos = r > 0.0
        q[pos] = du[pos] / np.minimum(1.0, r[pos])
        return q
    du = np.abs(field.eval(xs + h) - field.eval(xs))
    if not np.all(np.isfinite(du)):
        bad = np.argmax(~np.isfinite(du))
        raise EnergyError("non-finite field value near x=%s" % xs[bad])
    q = np.zeros_like(du)
    big = r >= _SMALL_R
    q[big] = du[big] / np.minimum(1.0, r[big])
    small = ~big & (r > 0.0)
    if np.any(small):
        if field.regularity == PIECEWISE_CONSTANT:
            # jump interfaces are a null set at these radii
            pass
        else:
            dirs = h[small] / r[small, None]
            g = field.grad(xs[small])
            q[small] = np.abs(np.sum(g * dirs, axis=1))
    return q


def _mc_double(field, sample_domain, kernel, accept, n, seed, tag):
    """Chunked, thread-stable Monte Carlo for the pair functional."""
    vol = sample_domain.volume()
    p_exp = kernel.p_exp

    def run(index, m):
        rng = _chunk_rng(seed, tag, index)
        xs = sample_domain.sample_uniform(rng, m)
        h, radii = kmod.sample_offset_with_radii(kernel, rng, m)
        ys = xs + h
        keep = accept(ys)
        s1 = s2 = 0.0
        if np.any(keep):
            hk = h[keep]
            r = radii[keep]
            q = _quotients(field, xs[keep], hk, r, p_exp)
            w = vol * q ** p_exp
            s1 = float(w.sum())
            s2 = float((w * w).sum())
        return index, s1, s2

    chunks = []
    start = 0
    idx = 0
    while start < n:
        m = min(_CHUNK, n - start)
        chunks.append((idx, m))
        start += m
        idx += 1
    workers = _thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda c: run(*c), chunks))
    else:
        results = [run(*c) for c in chunks]
    results.sort(key=lambda t: t[0])
    s1 = math.fsum(r[1] for r in results)
    s2 = math.fsum(r[2] for r in results)
    mean = s1 / n
    var = max(s2 / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return mean, math.sqrt(var / n)


# ---------------------------------------------------------------------------
# deterministic 1-D core


def _field_marks(field):
    return tuple(field.kinks) + tuple(field.jump_points)


def _geo_refine(lo, hi, cuts, *, origin=0.0, factor=8.0):
    """Split points making each panel span a bounded ratio from ``origin``.

    Power-law integrands vary smoothly on geometric scales; refined this way
    every sub-panel is cheap for Gauss panels regardless of how many decades
    ``(lo, hi)`` covers.
    """
    pts = set(cuts)
    t = (lo - origin) * factor
    while origin + t < hi:
        if origin + t > lo:
            pts.add(origin + t)
        t *= factor
    return sorted(pts)


def _eval1(field, x):
    return float(field.eval(np.array([[x]]))[0])


def _slope(field, x):
    if field.regularity == PIECEWISE_CONSTANT:
        return 0.0
    return float(field.grad(np.array([[x]]))[0, 0])


class _PairIntegrator:
    """Double integral of |u(x)-u(y)|^p nu(|x-y|) over one interval pair."""

    def __init__(self, field, kernel, p_exp, y_lo, y_hi, tol):
        self.field = field
        self.kernel = kernel
        self.p = p_exp
        self.y_lo = y_lo
        self.y_hi = y_hi
        self.tol = tol
        self.marks = _field_marks(field)
        self.inner_tol = max(tol * 1e-2, 1e-12)
        self.inner_rel = 1e-9

    # -- inner integral over y at fixed x ---------------------------------

    def _integrand(self, x, ux, slope, sign, blend):
        field, kernel, p = self.field, self.kernel, self.p
        logprof = kernel.log_profile
        stable = field.stable_offset_diff

        def f(r):
            if stable:
                pts = np.full((r.size, 1), x)
                du = np.abs(field._offset_diff(pts, (sign * r)[:, None]))
            else:
                pts = (x + sign * r)[:, None]
                du = np.abs(field._eval(pts) - ux)
                if blend > 0.0:
                    du = np.where(r < blend, abs(slope) * r, du)
            if logprof is None:
                return kernel.profile(r) * du ** p
            out = np.exp(p * np.log(du) + logprof(r))
            return np.where(du > 0.0, out, 0.0)

        return f

    def _range_value(self, x, ux, slope, r_lo, r_hi, sign, floor):
        kernel, p = self.kernel, self.p
        lo = max(r_lo, kernel.inner_radius, floor)
        hi = r_hi
        if kernel.support_radius is not None:
            hi = min(hi, kernel.support_radius)
        if hi <= lo:
            return 0.0
        cuts = set()
        for m in self.marks:
            rm = sign * (m - x)
            if rm > lo and (not math.isfinite(hi) or rm < hi):
                cuts.add(rm)
        for b in kernel.breakpoints:
            if lo < b and (not math.isfinite(hi) or b < hi):
                cuts.add(b)
        total = 0.0
        start = lo
        first = min(cuts) if cuts else (hi if math.isfinite(hi) else 1.0)
        piecewise = self.field.regularity == PIECEWISE_CONSTANT
        # below this radius the raw difference u(x+r)-u(x) is dominated by
        # float cancellation and the local slope is used instead; it must
        # not reach past the first field kink on this side
        blend = 0.0 if piecewise \
            else min(1e-4 * max(1.0, abs(x)), first)
        # closed-form singular core below floating point comfort
        if lo == 0.0 and kernel.origin_exponent is not None \
                and kernel.origin_coefficient is not None:
            gamma = kernel.origin_exponent
            pure = kernel.origin_pure_radius or 0.0
            core_top = _SMALL_R if piecewise else blend
            r_cl = min(core_top, pure, first * 0.5,
                       hi * 0.5 if math.isfinite(hi) else core_top)
            if r_cl > 0.0:
                a_in = p - gamma + 1.0
                if abs(slope) > 0.0:
                    if a_in <= 0.0:
                        raise QuadratureError(
                            "pair energy diverges on the diagonal "
                            "(inner exponent %.3g <= 0)" % a_in)
                    total += (abs(slope) ** p * kernel.origin_coefficient
                              * r_cl ** a_in / a_in)
                start = r_cl
        f = self._integrand(x, ux, slope, sign, blend)
        cuts = [c for c in cuts if c > start]
        if math.isfinite(hi):
            pts = _geo_refine(start, hi, cuts)
            val, _ = integrate(f, start, hi, points=pts,
                               abs_tol=self.inner_tol,
                               rel_tol=self.inner_rel)
            total += val
        else:
            far = max([start] + cuts + [1.0])
            if far > start:
                pts = _geo_refine(start, far, [c for c in cuts if c < far])
                val, _ = integrate(f, start, far, points=pts,
                                   abs_tol=self.inner_tol,
                                   rel_tol=self.inner_rel)
                total += val
            tail, _ = integrate_tail(f, max(far, start),
                                     decay_exponent=kernel.tail_exponent,
                                     abs_tol=self.inner_tol,
                                     rel_tol=self.inner_rel)
            total += tail
        return total

    def inner(self, x, floor=0.0):
        ux = _eval1(self.field, x)
        slope = _slope(self.field, x)
        ay, by = self.y_lo, self.y_hi
        total = 0.0
        if by <= x:
            total += self._range_value(x, ux, slope, x - by, x - ay, -1.0,
                                       floor)
        elif ay >= x:
            total += self._range_value(x, ux, slope, ay - x, by - x, +1.0,
                                       floor)
        else:
            total += self._range_value(x, ux, slope, 0.0, x - ay, -1.0,
                                       floor)
            total += self._range_value(x, ux, slope, 0.0, by - x, +1.0,
                                       floor)
        return total

    # -- outer integral -----------------------------------------------------

    def _outer_cuts(self, ax, bx):
        radii = {0.0, 1.0}
        radii.update(b for b in self.kernel.breakpoints)
        if self.kernel.support_radius is not None:
            radii.add(self.kernel.support_radius)
        if self.kernel.inner_radius > 0:
            radii.add(self.kernel.inner_radius)
        marks = set(self.marks)
        for m in (self.y_lo, self.y_hi):
            if math.isfinite(m):
                marks.add(m)
        cuts = set()
        for m in marks:
            for c in radii:
                for s in (m - c, m + c):
                    if ax < s < bx:
                        cuts.add(s)
        return sorted(cuts)

    def _jump_singular(self, e, toward_right):
        """Outer exponent at a jump point e, or None when regular there.

        Singular when the kernel reaches the origin with exponent gamma > 1
        and the partner interval has points across the jump arbitrarily
        close to e.
        """
        field, kernel = self.field, self.kernel
        if field.regularity != PIECEWISE_CONSTANT:
            return None
        if not any(abs(e - j) < 1e-14 for j in field.jump_points):
            return None
        if kernel.inner_radius > 0 or kernel.origin_exponent is None:
            return None
        gamma = kernel.origin_exponent
        if gamma <= 1.0:
            return None
        # x approaching e from the right sees the jump against partner
        # points just below e, and vice versa
        if toward_right:
            across = self.y_lo < e and self.y_hi >= e
        else:
            across = self.y_hi > e and self.y_lo <= e
        if not across:
            return None
        alpha = 2.0 - gamma
        if alpha <= 0.0:
            raise QuadratureError(
                "pair energy diverges at the jump interface "
                "(outer exponent %.3g <= 0)" % alpha)
        return alpha

    def _sliver(self, e, width, sign):
        """Closed-form outer sliver (e, e+sign*width) at a jump interface."""
        kernel, p = self.kernel, self.p
        gamma = kernel.origin_exponent
        c0 = kernel.origin_coefficient
        jump = self.field.jump_size
        alpha = 2.0 - gamma
        power_part = jump ** p * c0 * width ** alpha / alpha
        rest = width * self.inner(e + sign * 0.5 * width, floor=width)
        return power_part + rest

    def piece_value(self, lo, hi, tol):
        sing_lo = self._jump_singular(lo, toward_right=True)
        sing_hi = self._jump_singular(hi, toward_right=False)
        val = 0.0
        pure = self.kernel.origin_pure_radius or math.inf
        base_w = min(1e-6 * (hi - lo), 0.45 * pure)
        for m in self.marks:
            gap = min(abs(lo - m), abs(hi - m))
            if gap > 0:
                base_w = min(base_w, 0.45 * gap)
        a, b = lo, hi
        if sing_lo is not None and base_w > 0:
            w = min(base_w, 0.45 * (lo - self.y_lo))
            val += self._sliver(lo, w, +1.0)
            a = lo + w
        if sing_hi is not None and base_w > 0:
            w = min(base_w, 0.45 * (self.y_hi - hi))
            val += self._sliver(hi, w, -1.0)
            b = hi - w
        if b > a:
            pts = set()
            if sing_lo is not None:
                pts.update(_geo_refine(a, b, (), origin=lo))
            if sing_hi is not None:
                pts.update(hi - q for q in _geo_refine(hi - b, hi - a, ())
                           if a < hi - q < b)

            def g(xs):
                return np.array([self.inner(float(x)) for x in
                                 np.atleast_1d(xs)])
            piece, _ = integrate(g, a, b, points=sorted(pts), abs_tol=tol)
            val += piece
        return val

    def integral_over(self, ax, bx):
        cuts = self._outer_cuts(ax, bx)
        edges = [ax, *cuts, bx]
        pieces = list(zip(edges[:-1], edges[1:]))
        tol = self.tol / max(len(pieces), 1)
        return sum(self.piece_value(lo, hi, tol) for lo, hi in pieces)


def _constant_on_hull(field, lo, hi):
    """True when a piecewise-constant field has no jump inside (lo, hi)."""
    if field.regularity != PIECEWISE_CONSTANT:
        return False
    return not any(lo < j < hi for j in field.jump_points)


def _pair_energy(field, kernel, p_exp, x_iv, y_iv, tol):
    ax, bx = x_iv
    ay, by = y_iv
    if field.regularity == PIECEWISE_CONSTANT:
        lo = min(ax, ay)
        hi = max(bx, by)
        if math.isfinite(lo) and math.isfinite(hi) \
                and _constant_on_hull(field, lo, hi):
            return 0.0
    integ = _PairIntegrator(field, kernel, p_exp, ay, by, tol)
    return integ.integral_over(ax, bx)


def _det_double(field, kernel, x_intervals, y_intervals, *, symmetric,
                abs_tol):
    x_ivs = list(x_intervals)
    y_ivs = list(y_intervals)
    if symmetric:
        jobs = []
        for i in range(len(x_ivs)):
            for j in range(i, len(x_ivs)):
                jobs.append((x_ivs[i], x_ivs[j], 2.0 if j > i else 1.0))
    else:
        jobs = [(xi, yj, 1.0) for xi in x_ivs for yj in y_ivs]
    tol = abs_tol / max(len(jobs), 1)
    total = 0.0
    for x_iv, y_iv, factor in jobs:
        total += factor * _pair_energy(field, kernel, kernel.p_exp,
                                       x_iv, y_iv, tol)
    return total


def _require_det_domain(domain):
    if not isinstance(domain, IntervalUnion):
        raise EnergyError("deterministic mode is available on "
                          "one-dimensional interval unions only")


# ---------------------------------------------------------------------------
# public functionals


def energy(field, domain, kernel, *, mode=MODE_MC, n=DEFAULT_N_SAMPLES,
           seed=DEFAULT_SEED, abs_tol=1e-10):
    """Pair energy over the domain: the double integral of |du|^p nu(x-y)."""
    if field.dim != domain.dim or field.dim != kernel.dim:
        raise EnergyError("field/domain/kernel dimension mismatch")
    if mode == MODE_DET:
        _require_det_domain(domain)
        value = _det_double(field, kernel, domain.intervals,
                            domain.intervals, symmetric=True, abs_tol=abs_tol)
        return EnergyEstimate(value, 0.0, 0, kernel.eps,
                              _ident(kernel.spec()), _ident(domain.spec()),
                              _ident(field.spec()), MODE_DET)
    tag = _case_tag("energy", _ident(kernel.spec()), _ident(domain.spec()),
                    _ident(field.spec()))
    value, stderr = _mc_double(field, domain, kernel, domain.contains,
                               n, seed, tag)
    return EnergyEstimate(value, stderr, n, kernel.eps,
                          _ident(kernel.spec()), _ident(domain.spec()),
                          _ident(field.spec()), MODE_MC, seed)


def cross_energy(field, domain, kernel, *, other=None, mode=MODE_MC,
                 n=DEFAULT_N_SAMPLES, seed=DEFAULT_SEED, abs_tol=1e-10):
    """Energy over pairs leaving the domain: x inside, y outside.

    ``other`` restricts the partner set; by default it is the full
    complement of the domain.
    """
    if field.dim != domain.dim or field.dim != kernel.dim:
        raise EnergyError("field/domain/kernel dimension mismatch")
    if mode == MODE_DET:
        _require_det_domain(domain)
        if other is None:
            y_ivs = domain.complement_pieces()
        else:
            _require_det_domain(other)
            y_ivs = other.intervals
        value = _det_double(field, kernel, domain.intervals, y_ivs,
                            symmetric=False, abs_tol=abs_tol)
        return EnergyEstimate(value, 0.0, 0, kernel.eps,
                              _ident(kernel.spec()), _ident(domain.spec()),
                              _ident(field.spec()), MODE_DET)
    if other is None:
        def accept(ys):
            return ~domain.contains(ys)
    else:
        def accept(ys):
            return other.contains(ys)
    tag = _case_tag("cross", _ident(kernel.spec()), _ident(domain.spec()),
                    _ident(field.spec()))
    value, stderr = _mc_double(field, domain, kernel, accept, n, seed, tag)
    return EnergyEstimate(value, stderr, n, kernel.eps,
                          _ident(kernel.spec()), _ident(domain.spec()),
                          _ident(field.spec()), MODE_MC, seed)


def local_measure(field, domain, subdomain, kernel, *, mode=MODE_MC,
                  n=DEFAULT_N_SAMPLES, seed=DEFAULT_SEED, abs_tol=1e-10):
    """Mass the localized energy measure assigns to a compact subdomain.

    x runs over the subdomain, y over the whole domain; the subdomain must
    be compactly contained (positive clearance).
    """
    margin = containment_margin(domain, subdomain)
    if not margin > 0.0:
        raise EnergyError("subdomain is not compactly contained "
                          "(clearance %.3g)" % margin)
    if mode == MODE_DET:
        _require_det_domain(domain)
        _require_det_domain(subdomain)
        value = _det_double(field, kernel, subdomain.intervals,
                            domain.intervals, symmetric=False,
                            abs_tol=abs_tol)
        return EnergyEstimate(value, 0.0, 0, kernel.eps,
                              _ident(kernel.spec()), _ident(domain.spec()),
                              _ident(field.spec()), MODE_DET)
    tag = _case_tag("local", _ident(kernel.spec()), _ident(domain.spec()),
                    _ident(subdomain.spec()), _ident(field.spec()))
    value, stderr = _mc_double(field, subdomain, kernel, domain.contains,
                               n, seed, tag)
    return EnergyEstimate(value, stderr, n, kernel.eps,
                          _ident(kernel.spec()), _ident(domain.spec()),
                          _ident(field.spec()), MODE_MC, seed)


# ---------------------------------------------------------------------------
# pointwise operator and test-function pairing


def _sphere_pair_mean(field, center, radii, n_angle=128):
    """Mean over directions of u(x + r w) at each radius (d <= 3)."""
    d = field.dim
    radii = np.asarray(radii, dtype=float)
    if d == 1:
        pts = np.concatenate([center[0] + radii, center[0] - radii])
        vals = field.eval(pts.reshape(-1, 1))
        return 0.5 * (vals[:radii.size] + vals[radii.size:])
    if d == 2:
        theta = (np.arange(n_angle) + 0.5) * (2.0 * math.pi / n_angle)
        dirs = np.column_stack([np.cos(theta), np.sin(theta)])
    elif d == 3:
        n_t = 48
        t, wt = np.polynomial.legendre.leggauss(n_t)
        phi = (np.arange(n_angle) + 0.5) * (2.0 * math.pi / n_angle)
        st = np.sqrt(1.0 - t ** 2)
        dirs = np.concatenate([
            np.column_stack([st * math.cos(p0), st * math.sin(p0), t])
            for p0 in phi])
        weights = np.tile(wt / 2.0, n_angle) / n_angle
        pts = center[None, None, :] + radii[:, None, None] * dirs[None, :, :]
        vals = field.eval(pts.reshape(-1, d)).reshape(radii.size, -1)
        return vals @ weights
    else:
        raise EnergyError("sphere averages implemented for d <= 3")
    pts = center[None, None, :] + radii[:, None, None] * dirs[None, :, :]
    vals = field.eval(pts.reshape(-1, d)).reshape(radii.size, -1)
    return vals.mean(axis=1)


def generator(field, point, kernel, *, abs_tol=1e-10, core_radius=1e-4):
    """Symmetrized nonlocal difference operator at a point (p = 2 only).

    -(1/2) int (u(x+h) + u(x-h) - 2 u(x)) nu(h) dh, evaluated by
    radial-angular quadrature.  The symmetrization kills the first-order
    term, so the integrand is O(|h|^2) at the origin; below ``core_radius``
    that quadratic part is integrated via the field's Laplacian and the
    kernel's second moment (the raw difference there is pure float
    cancellation).
    """
    if kernel.p_exp != 2.0:
        raise EnergyError("the difference operator is defined for p = 2 "
                          "kernels")
    if not hasattr(field, "laplacian"):
        raise FieldError("generator needs a field with an analytic "
                         "laplacian (C^2)")
    x0 = np.asarray(point, dtype=float).reshape(-1)
    if x0.size != field.dim or field.dim != kernel.dim:
        raise EnergyError("point/field/kernel dimension mismatch")
    d = kernel.dim
    u0 = float(field.eval(x0.reshape(1, -1))[0])
    lap = float(field.laplacian(x0.reshape(1, -1))[0])
    rc = min(core_radius, kernel.support_radius or core_radius)
    core = 0.0
    if kernel.inner_radius < rc:
        m2 = kmod.weighted_moment(kernel, 2.0, rc)
        core = -(lap / (2.0 * d)) * m2
    area = sphere_area(d)

    def f(r):
        mean = _sphere_pair_mean(field, x0, r)
        sym = 2.0 * (mean - u0)
        return -0.5 * area * sym * kernel.profile(r) * r ** (d - 1)

    lo = max(rc, kernel.inner_radius)
    hi = kernel.support_radius
    cuts = [b for b in kernel.breakpoints if b > lo]
    numeric = 0.0
    if hi is not None:
        if hi > lo:
            numeric, _ = integrate(f, lo, hi,
                                   points=[c for c in cuts if c < hi],
                                   abs_tol=abs_tol)
    else:
        far = max([lo] + cuts + [1.0])
        part, _ = integrate(f, lo, far, points=[c for c in cuts if c < far],
                            abs_tol=abs_tol)
        decay = None if kernel.tail_exponent is None \
            else kernel.tail_exponent - (d - 1)
        tail, _ = integrate_tail(f, far, decay_exponent=decay,
                                 abs_tol=abs_tol)
        numeric = part + tail
    return core + numeric


def _test_fn_eval(test_fn, pts):
    if hasattr(test_fn, "eval"):
        return np.asarray(test_fn.eval(pts), dtype=float)
    return np.asarray(test_fn(pts), dtype=float)


def dirac_pairing(test_fn, kernel, *, support_radius=None,
                  allow_any_p=False, abs_tol=1e-10, n_angle=256):
    """Pairing of a smooth compactly supported function with the kernel's
    unit-mass measure ``(1 ^ |h|^p) nu(h) dh``.

    As the family concentrates this tends to the value at the origin.  The
    convergence statement is for p = 1 families; other exponents are
    admitted only behind ``allow_any_p`` as an experiment, never asserted.
    """
    if kernel.p_exp != 1.0 and not allow_any_p:
        raise EnergyError("pairing is asserted for p = 1 kernels; pass "
                          "allow_any_p=True to experiment")
    rad = support_radius
    if rad is None:
        rad = getattr(test_fn, "support_radius", None)
    if rad is None:
        raise EnergyError("test function must be compactly supported "
                          "(give support_radius)")
    d = kernel.dim
    center = np.zeros(d)

    class _Probe:
        dim = d

        @staticmethod
        def eval(pts):
            return _test_fn_eval(test_fn, pts)

    def f(r):
        mean = _sphere_pair_mean(_Probe, center, r, n_angle=n_angle)
        return mean * kernel.weighted_radial_density(r)

    lo = kernel.inner_radius
    hi = min(rad, kernel.support_radius or rad)
    if hi <= lo:
        return 0.0
    cuts = [b for b in kernel.breakpoints if lo < b < hi]
    alpha = None
    if lo == 0.0 and kernel.origin_exponent is not None:
        alpha = d + kernel.p_exp - kernel.origin_exponent
        if alpha <= 0.0:
            raise QuadratureError("pairing diverges at the origin")
    val, _ = integrate(f, lo, hi, points=cuts, alpha_left=alpha,
                       abs_tol=abs_tol)
    return val


# ---------------------------------------------------------------------------
# fractional seminorms


def _power_window_kernel(dim, p_exp, gamma, *, cutoff=0.0, top=None):
    """Unnormalized |h|^(-gamma) window kernel for the fractional scalings."""

    def profile(r):
        r = np.asarray(r, dtype=float)
        vals = np.power(r, -gamma)
        if top is not None:
            vals = np.where(r <= top, vals, 0.0)
        if cutoff > 0.0:
            vals = np.where(r > cutoff, vals, 0.0)
        return vals

    def log_profile(r):
        r = np.asarray(r, dtype=float)
        out = -gamma * np.log(r)
        if top is not None:
            out = np.where(r <= top, out, -np.inf)
        if cutoff > 0.0:
            out = np.where(r > cutoff, out, -np.inf)
        return out

    breaks = tuple(b for b in (cutoff, top) if b)
    return kmod.RadialKernel(
        dim=dim, p_exp=p_exp, profile=profile, log_profile=log_profile,
        support_radius=top, inner_radius=cutoff,
        origin_exponent=gamma if cutoff == 0.0 else None,
        origin_coefficient=1.0 if cutoff == 0.0 else None,
        origin_pure_radius=math.inf if cutoff == 0.0 else None,
        tail_exponent=gamma, breakpoints=breaks,
        family_tag="power_window",
        params={"gamma": gamma, "cutoff": cutoff})


def gagliardo(field, domain, s, p_exp, *, cutoff=0.0, abs_tol=1e-10):
    """Fractional seminorm: double integral of |du|^p / |x-y|^(d+sp).

    ``cutoff`` restricts to pairs with |x-y| >= cutoff, which is how the
    divergence of non-extension domains is probed without producing inf.
    """
    if not 0.0 < s < 1.0:
        raise EnergyError("s must lie in (0, 1)")
    _require_det_domain(domain)
    d = domain.dim
    kernel = _power_window_kernel(d, p_exp, d + s * p_exp, cutoff=cutoff)
    return _det_double(field, kernel, domain.intervals, domain.intervals,
                       symmetric=True, abs_tol=abs_tol)


def fractional_values(field, domain, p_exp, variant, grid, *, abs_tol=1e-10):
    """The three fractional rescalings, evaluated on a parameter grid.

    variant 1: (1-s) times the fractional seminorm, s -> 1.
    variant 2: eps^-d times the difference-quotient energy over |x-y| < eps.
    variant 3: 1/|log eps| times the |h|^(-d-p) energy over |x-y| > eps.

    Returns a list of (parameter, value) pairs.
    """
    _require_det_domain(domain)
    d = domain.dim
    rows = []
    if variant == 1:
        for s in grid:
            val = (1.0 - s) * gagliardo(field, domain, s, p_exp,
                                        abs_tol=abs_tol)
            rows.append((s, val))
        return rows
    if variant == 2:
        for eps in grid:
            kern = _power_window_kernel(d, p_exp, float(p_exp), top=eps)
            raw = _det_double(field, kern, domain.intervals,
                              domain.intervals, symmetric=True,
                              abs_tol=abs_tol)
            rows.append((eps, raw / eps ** d))
        return rows
    if variant == 3:
        for eps in grid:
            kern = _power_window_kernel(d, p_exp, d + float(p_exp),
                                        cutoff=eps)
            raw = _det_double(field, kern, domain.intervals,
                              domain.intervals, symmetric=True,
                              abs_tol=abs_tol)
            rows.append((eps, raw / abs(math.log(eps))))
        return rows
    raise EnergyError("variant must be 1, 2 or 3")
