"""Open domains with exact membership, closed-form volume, and sampling.

Supported kinds: unions of disjoint open intervals (dimension one), axis
boxes, balls, slit balls (a ball with the hyperplane ``x_d = 0`` removed,
optionally thickened to a slab by inner shrinking), and the full space.
Points are always ``(n, dim)`` float arrays.  Sampling is rejection from the
bounding box with a caller-owned generator, so parallel callers stay
independent and every run is reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import unit_ball_volume


class DomainError(ValueError):
    pass


def _as_points(x, dim):
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1) if dim > 1 else pts.reshape(-1, 1)
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise DomainError("expected points of shape (n, %d)" % dim)
    return pts


class Domain:
    """Common protocol; concrete kinds override the private hooks."""

    dim: int

    def contains(self, x):
        return self._contains(_as_points(x, self.dim))

    def volume(self):
        raise DomainError("volume undefined for %s" % type(self).__name__)

    def bounding_box(self):
        raise DomainError("%s is unbounded" % type(self).__name__)

    def sample_uniform(self, rng, size=1):
        pts, _ = self.sample_uniform_with_stats(rng, size)
        return pts

    def sample_uniform_with_stats(self, rng, size=1):
        """Rejection sampling from the bounding box.

        Returns ``(points, n_proposed)`` so callers can audit the acceptance
        ratio against ``volume / box_volume``.
        """
        lo, hi = self.bounding_box()
        dim = self.dim
        out = np.empty((size, dim))
        got = 0
        proposed = 0
        while got < size:
            batch = max(size - got, 1)
            cand = rng.random((batch, dim)) * (hi - lo) + lo
            proposed += batch
            keep = self._contains(cand)
            k = int(keep.sum())
            if k:
                take = min(k, size - got)
                out[got:got + take] = cand[keep][:take]
                got += take
        return out, proposed

    def _contains(self, pts):
        raise NotImplementedError

    def inner_shrink(self, delta):
        raise DomainError("inner_shrink unsupported for %s"
                          % type(self).__name__)

    def outer_grow(self, delta):
        raise DomainError("outer_grow unsupported for %s"
                          % type(self).__name__)

    def spec(self):
        raise NotImplementedError


@dataclass(frozen=True)
class IntervalUnion(Domain):
    """Union of pairwise disjoint open intervals on the line."""

    intervals: tuple
    dim: int = field(default=1, init=False)

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        if not ivs:
            raise DomainError("empty interval union")
        ivs = tuple(sorted(ivs))
        for a, b in ivs:
            if not b > a:
                raise DomainError("degenerate interval (%g, %g)" % (a, b))
        for (_, b0), (a1, _) in zip(ivs[:-1], ivs[1:]):
            if a1 < b0:
                raise DomainError("overlapping intervals")
        object.__setattr__(self, "intervals", ivs)

    def _contains(self, pts):
        x = pts[:, 0]
        keep = np.zeros(x.shape, dtype=bool)
        for a, b in self.intervals:
            keep |= (x > a) & (x < b)
        return keep

    def volume(self):
        return sum(b - a for a, b in self.intervals)

    def bounding_box(self):
        a = min(a for a, _ in self.intervals)
        b = max(b for _, b in self.intervals)
        return np.array([a]), np.array([b])

    def inner_shrink(self, delta):
        if delta <= 0:
            raise DomainError("delta must be positive")
        kept = [(a + delta, b - delta) for a, b in self.intervals
                if b - delta > a + delta]
        if not kept:
            raise DomainError("inner_shrink(%g) empties the domain" % delta)
        return IntervalUnion(tuple(kept))

    def outer_grow(self, delta):
        if delta <= 0:
            raise DomainError("delta must be positive")
        grown = sorted((a - delta, b + delta) for a, b in self.intervals)
        merged = [grown[0]]
        for a, b in grown[1:]:
            la, lb = merged[-1]
            if a <= lb:
                merged[-1] = (la, max(lb, b))
            else:
                merged.append((a, b))
        return IntervalUnion(tuple(merged))

    def complement_pieces(self):
        """Open complement as (a, b) pairs, with +-inf end pieces."""
        pieces = []
        prev = -math.inf
        for a, b in self.intervals:
            pieces.append((prev, a))
            prev = b
        pieces.append((prev, math.inf))
        return [(a, b) for a, b in pieces if b > a]

    def spec(self):
        return {"domain": "interval_union",
                "intervals": ";".join("%r:%r" % iv for iv in self.intervals)}


def slit_interval():
    """The one-dimensional slit domain (-1, 0) u (0, 1)."""
    return IntervalUnion(((-1.0, 0.0), (0.0, 1.0)))


def interval(a, b):
    return IntervalUnion(((a, b),))


@dataclass(frozen=True)
class Box(Domain):
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi) or not lo:
            raise DomainError("corner size mismatch")
        if any(h <= l for l, h in zip(lo, hi)):
            raise DomainError("box has empty side")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return len(self.lo)

    def _contains(self, pts):
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.all((pts > lo) & (pts < hi), axis=1)

    def volume(self):
        return float(np.prod([h - l for l, h in zip(self.lo, self.hi)]))

    def bounding_box(self):
        return np.asarray(self.lo), np.asarray(self.hi)

    def inner_shrink(self, delta):
        lo = [l + delta for l in self.lo]
        hi = [h - delta for h in self.hi]
        if any(h <= l for l, h in zip(lo, hi)):
            raise DomainError("inner_shrink empties the box")
        return Box(tuple(lo), tuple(hi))

    def outer_grow(self, delta):
        return Box(tuple(l - delta for l in self.lo),
                   tuple(h + delta for h in self.hi))

    def spec(self):
        return {"domain": "box",
                "lo": ",".join(repr(v) for v in self.lo),
                "hi": ",".join(repr(v) for v in self.hi)}


@dataclass(frozen=True)
class Ball(Domain):
    radius: float
    dim: int = 2
    center: tuple = None

    def __post_init__(self):
        if self.radius <= 0:
            raise DomainError("radius must be positive")
        c = self.center
        c = tuple(0.0 for _ in range(self.dim)) if c is None else \
            tuple(float(v) for v in c)
        if len(c) != self.dim:
            raise DomainError("center/dim mismatch")
        object.__setattr__(self, "center", c)

    def _contains(self, pts):
        d2 = np.sum((pts - np.asarray(self.center)) ** 2, axis=1)
        return d2 < self.radius ** 2

    def volume(self):
        return unit_ball_volume(self.dim) * self.radius ** self.dim

    def bounding_box(self):
        c = np.asarray(self.center)
        return c - self.radius, c + self.radius

    def inner_shrink(self, delta):
        if self.radius - delta <= 0:
            raise DomainError("inner_shrink empties the ball")
        return Ball(self.radius - delta, self.dim, self.center)

    def outer_grow(self, delta):
        return Ball(self.radius + delta, self.dim, self.center)

    def spec(self):
        return {"domain": "ball", "radius": repr(self.radius),
                "d": str(self.dim)}


@dataclass(frozen=True)
class SlitBall(Domain):
    """Ball centered at the origin minus the slab ``|x_d| <= slab``.

    ``slab = 0`` is the slit ball of the counterexample domains: the
    hyperplane itself is excluded (open-set convention) even though it has
    measure zero.  Inner shrinking both reduces the radius and thickens the
    slab, which is exactly the set of points at distance > delta from the
    boundary.
    """

    radius: float
    dim: int = 2
    slab: float = 0.0

    def __post_init__(self):
        if self.dim < 2:
            raise DomainError("slit ball needs dim >= 2 (use slit_interval)")
        if self.radius <= 0 or self.slab < 0 or self.slab >= self.radius:
            raise DomainError("invalid slit ball")

    def _contains(self, pts):
        d2 = np.sum(pts * pts, axis=1)
        return (d2 < self.radius ** 2) & (np.abs(pts[:, -1]) > self.slab)

    def volume(self):
        return (unit_ball_volume(self.dim) * self.radius ** self.dim
                - self._slab_volume())

    def _slab_volume(self):
        w, big_r, d = self.slab, self.radius, self.dim
        if w == 0.0:
            return 0.0
        if d == 2:
            return 2.0 * (w * math.sqrt(big_r ** 2 - w ** 2)
                          + big_r ** 2 * math.asin(w / big_r))
        if d == 3:
            return 2.0 * math.pi * (big_r ** 2 * w - w ** 3 / 3.0)
        raise DomainError("slab volume closed form implemented for d <= 3")

    def bounding_box(self):
        r = self.radius
        return np.full(self.dim, -r), np.full(self.dim, r)

    def inner_shrink(self, delta):
        if self.radius - delta <= self.slab + delta:
            raise DomainError("inner_shrink empties the slit ball")
        return SlitBall(self.radius - delta, self.dim, self.slab + delta)

    def outer_grow(self, delta):
        # growing past the slab fills the slit completely
        if self.slab - delta <= 0:
            return Ball(self.radius + delta, self.dim)
        return SlitBall(self.radius + delta, self.dim, self.slab - delta)

    def spec(self):
        return {"domain": "slit_ball", "radius": repr(self.radius),
                "d": str(self.dim), "slab": repr(self.slab)}


@dataclass(frozen=True)
class FullSpace(Domain):
    dim: int = 1

    def _contains(self, pts):
        return np.ones(pts.shape[0], dtype=bool)

    def spec(self):
        return {"domain": "full_space", "d": str(self.dim)}


def containment_margin(outer, inner):
    """Clearance of ``inner`` inside ``outer`` (<= 0 means not compact).

    Supports interval unions inside interval unions and concentric-enough
    balls inside balls; other pairs are rejected.
    """
    if isinstance(outer, IntervalUnion) and isinstance(inner, IntervalUnion):
        margin = math.inf
        for a, b in inner.intervals:
            best = -math.inf
            for c, d in outer.intervals:
                if c <= a and b <= d:
                    best = max(best, min(a - c, d - b))
            margin = min(margin, best)
        return margin
    if isinstance(outer, Ball) and isinstance(inner, Ball):
        gap = np.linalg.norm(np.asarray(inner.center)
                             - np.asarray(outer.center))
        return outer.radius - (gap + inner.radius)
    raise DomainError("containment check unsupported for %s in %s"
                      % (type(inner).__name__, type(outer).__name__))


def interval_difference(big, small):
    """Open set difference big \\ closure(small) for interval unions."""
    pieces = []
    for a, b in big.intervals:
        cur = [(a, b)]
        for c, d in small.intervals:
            nxt = []
            for lo, hi in cur:
                if d <= lo or c >= hi:
                    nxt.append((lo, hi))
                else:
                    if lo < c:
                        nxt.append((lo, c))
                    if d < hi:
                        nxt.append((d, hi))
            cur = nxt
        pieces.extend(cur)
    if not pieces:
        raise DomainError("difference is empty")
    return IntervalUnion(tuple(pieces))


def from_spec(spec):
    """Rebuild a domain from its flat key-value record."""
    kind = spec.get("domain")
    if kind == "interval_union":
        ivs = []
        for part in spec["intervals"].split(";"):
            a, b = part.split(":")
            ivs.append((float(a), float(b)))
        return IntervalUnion(tuple(ivs))
    if kind == "slit_interval":
        return slit_interval()
    if kind == "box":
        lo = tuple(float(v) for v in spec["lo"].split(","))
        hi = tuple(float(v) for v in spec["hi"].split(","))
        return Box(lo, hi)
    if kind == "ball":
        return Ball(float(spec["radius"]), int(spec.get("d", 2)))
    if kind == "slit_ball":
        return SlitBall(float(spec["radius"]), int(spec.get("d", 2)),
                        float(spec.get("slab", 0.0)))
    if kind == "full_space":
        return FullSpace(int(spec.get("d", 1)))
    raise DomainError("unknown domain kind %r" % kind)
