"""Signed powers, Bregman forms, and the kernels of the model domains.

Everything here is a pure evaluator.  The three model domains are the
interval (a,b), the unit disk in R^2 and the unit ball in R^3; for each we
carry closed forms of the Poisson kernel P(x,z), the Green function G(x,y)
and the Feller kernel gamma(z,w) = inward normal derivative of P(.,w) at z:

    disk:  P(x,e^{i.eta}) = (1-r^2) / (2 pi (1 - 2 r cos(theta-eta) + r^2))
           G(x,y)         = (1/2 pi) ln(|1 - conj(x) y| / |x - y|)
           gamma(xi,eta)  = 1 / (4 pi sin^2((xi-eta)/2))
    ball:  P(x,z)         = (1-|x|^2) / (4 pi |x-z|^3)
           G(x,y)         = (1/4 pi) (1/|x-y| - 1/rho),  rho^2 = 1 - 2 x.y + |x|^2 |y|^2
           gamma(z,w)     = 1 / (2 pi |z-w|^3)
    interval: the "kernel" degenerates to the endpoint weights
           P(x,a) = (b-x)/(b-a),  P(x,b) = (x-a)/(b-a),
           G(x,y) = (b-a)^{-1} (min-a)(b-max),  gamma(a,b) = 1/(b-a).

Green functions use the normalization -Delta G(x,.) = delta_x, which is the
one under which P = d/dn G integrates to 1 over the boundary (harmonic
measure density).  The disk/ball gamma closed forms equal the limit
P(z + h n_z, w)/h as h -> 0+, which ``feller_normal_derivative_check``
verifies numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    DomainError,
    InvalidArgumentError,
    SingularityError,
    UnsupportedInputError,
)

__all__ = [
    "Exponent",
    "Interval",
    "Disk",
    "Ball",
    "DomainSpec",
    "KernelSet",
    "as_exponent",
    "signed_power",
    "bregman_fp",
    "symmetrized_hp",
    "bregman_chain_terms",
    "bregman_comparability",
    "poisson_comparability",
    "green_comparability",
    "feller_comparability",
    "feller_normal_derivative_check",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Exponent:
    """Integrability exponent p; construction rejects p <= 1 and non-finite p."""

    p: float

    def __post_init__(self):
        if not math.isfinite(self.p):
            raise InvalidArgumentError(f"exponent must be finite, got {self.p}")
        if self.p <= 1.0:
            raise InvalidArgumentError(f"exponent must satisfy p > 1, got {self.p}")


def as_exponent(p: Union[float, Exponent]) -> Exponent:
    """Coerce a float to a validated Exponent (no-op on Exponent input)."""
    return p if isinstance(p, Exponent) else Exponent(float(p))


# ---------------------------------------------------------------------------
# signed powers and Bregman forms
# ---------------------------------------------------------------------------

def signed_power(a, kappa: float):
    """Odd power a -> |a|^kappa * sgn(a).

    Odd and strictly increasing in a for kappa > 0; signed_power(0, kappa) = 0
    for every kappa > 0 (the formula's value, no singularity is raised).
    Accepts scalars or arrays.
    """
    if not (math.isfinite(kappa) and kappa > 0):
        raise InvalidArgumentError(f"kappa must be finite and > 0, got {kappa}")
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)):
        raise InvalidArgumentError("signed_power requires finite input")
    out = np.sign(a) * np.abs(a) ** kappa
    return out if out.ndim else float(out)


def bregman_fp(p: Union[float, Exponent], a, b):
    """Second-order Taylor remainder of t -> |t|^p at a, evaluated at b:

        F_p(a, b) = |b|^p - |a|^p - p a^<p-1> (b - a).

    Nonnegative by convexity, zero iff a = b; even under (a,b) -> (-a,-b).

    The direct formula cancels catastrophically for b near a, so on that
    regime (|b/a - 1| <= 1/2, same sign) the value is computed from the
    binomial series |a|^p sum_{k>=2} C(p,k) ((b-a)/a)^k, which is exact to
    roundoff (and terminates for integer p, making F_2(a,b) = (b-a)^2 exact).
    """
    p = as_exponent(p).p
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise InvalidArgumentError("bregman_fp requires finite input")
    a, b = np.broadcast_arrays(a, b)
    # reduce to base point a >= 0 using F_p(-a,-b) = F_p(a,b)
    flip = np.sign(a)
    flip = np.where(flip == 0.0, 1.0, flip)
    aa = a * flip
    bb = b * flip
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        u = np.where(aa > 0, (bb - aa) / np.where(aa > 0, aa, 1.0), np.inf)
    series = np.abs(u) <= 0.5
    direct = (
        np.abs(bb) ** p
        - aa**p
        - p * aa ** (p - 1.0) * (bb - aa)
    )
    out = np.where(series, 0.0, direct)
    if np.any(series):
        us = u[series]
        acc = np.zeros_like(us)
        coef = 0.5 * p * (p - 1.0)  # C(p, 2)
        upow = us * us
        k = 2
        while True:
            term = coef * upow
            acc += term
            if np.max(np.abs(term)) <= 1e-17 * (np.max(np.abs(acc)) + 1e-300) or k >= 400:
                break
            coef *= (p - k) / (k + 1.0)
            if coef == 0.0:  # integer p: the series terminates
                break
            upow = upow * us
            k += 1
        out[series] = aa[series] ** p * acc
    return out if out.ndim else float(out)


def symmetrized_hp(p: Union[float, Exponent], a, b):
    """Symmetrized Bregman form

        H_p(a, b) = (p/2) (a^<p-1> - b^<p-1>) (a - b)
                  = (F_p(a,b) + F_p(b,a)) / 2.

    Symmetric and nonnegative.
    """
    p = as_exponent(p).p
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise InvalidArgumentError("symmetrized_hp requires finite input")
    sa = np.sign(a) * np.abs(a) ** (p - 1.0)
    sb = np.sign(b) * np.abs(b) ** (p - 1.0)
    out = 0.5 * p * (sa - sb) * (a - b)
    return out if out.ndim else float(out)


def bregman_chain_terms(p: Union[float, Exponent], a, b):
    """The four pairwise-comparable expressions of the equivalence chain:

        H_p(a,b),  F_p(a,b),  (a-b)^2 (|a| v |b|)^{p-2},  (a^<p/2> - b^<p/2>)^2.

    Returns them in that order as arrays. All four vanish exactly on the
    diagonal a = b and are strictly positive off it; at p = 2 they coincide.
    """
    p = as_exponent(p).p
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    hp = symmetrized_hp(p, a, b)
    fp = bregman_fp(p, a, b)
    mx = np.maximum(np.abs(a), np.abs(b))
    with np.errstate(divide="ignore", invalid="ignore"):
        mid = np.where(mx > 0, (a - b) ** 2 * mx ** (p - 2.0), 0.0)
    half = signed_power(a, p / 2.0) - signed_power(b, p / 2.0)
    return hp, fp, mid, half ** 2


def bregman_comparability(p: Union[float, Exponent], n: int = 10_000, rng=None) -> dict:
    """Sample the chain on random pairs and report min/max of adjacent ratios.

    Pairs with a == b are excluded (all four terms vanish there). The sample
    mixes moderate uniforms, heavy tails and near-diagonal pairs so the
    envelope actually stresses the comparability constants.
    """
    p = as_exponent(p).p
    rng = np.random.default_rng(rng)
    third = n // 3
    a1 = rng.uniform(-3.0, 3.0, size=third)
    b1 = rng.uniform(-3.0, 3.0, size=third)
    a2 = rng.standard_normal(third) * np.exp(rng.uniform(0, 3, size=third))
    b2 = rng.standard_normal(third) * np.exp(rng.uniform(0, 3, size=third))
    a3 = rng.uniform(-2.0, 2.0, size=n - 2 * third)
    b3 = a3 + rng.standard_normal(n - 2 * third) * 1e-3
    a = np.concatenate([a1, a2, a3])
    b = np.concatenate([b1, b2, b3])
    keep = a != b
    a, b = a[keep], b[keep]
    hp, fp, mid, sq = bregman_chain_terms(p, a, b)
    ratios = {
        "H_over_F": hp / fp,
        "F_over_maxweight": fp / mid,
        "maxweight_over_halfpower": mid / sq,
    }
    out = {}
    for name, r in ratios.items():
        out[name] = (float(np.min(r)), float(np.max(r)))
    out["n_pairs"] = int(a.size)
    return out


# ---------------------------------------------------------------------------
# model domains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    """Open interval (a, b) on the line; boundary is the endpoint pair."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise InvalidArgumentError("interval endpoints must be finite")
        if not self.a < self.b:
            raise InvalidArgumentError(f"need a < b, got ({self.a}, {self.b})")

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def r0(self) -> float:
        # largest interior tangent-ball scale; diagnostics only
        return 0.5 * (self.b - self.a)

    def distance_to_boundary(self, x: float) -> float:
        return min(x - self.a, self.b - x)

    def boundary_points(self):
        return (self.a, self.b)


@dataclass(frozen=True)
class Disk:
    """Open unit disk in R^2; boundary points are parametrized by angle."""

    @property
    def r0(self) -> float:
        return 1.0

    def distance_to_boundary(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return 1.0 - float(np.hypot(x[..., 0], x[..., 1]))

    def boundary_point(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


@dataclass(frozen=True)
class Ball:
    """Open unit ball in R^3; boundary points are unit vectors."""

    d: int = 3

    def __post_init__(self):
        if self.d != 3:
            raise InvalidArgumentError(f"only d = 3 is supported, got d = {self.d}")

    @property
    def r0(self) -> float:
        return 1.0

    def distance_to_boundary(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return 1.0 - float(np.linalg.norm(x, axis=-1))


DomainSpec = Union[Interval, Disk, Ball]

_SING_EPS = 1e-14


def _as_complex(x) -> complex:
    x = np.asarray(x, dtype=float)
    return complex(x[0], x[1])


class KernelSet:
    """Poisson, Green, and Feller evaluators bound to one model domain.

    Argument conventions per domain:

    * ``Disk``: interior points are length-2 arrays, boundary points angles.
    * ``Ball``: interior points length-3 arrays, boundary points unit vectors
      (arrays broadcast over a leading axis).
    * ``Interval``: interior points floats, boundary points the endpoint
      values ``a`` or ``b``.

    All evaluators are stateless and safe to share across workers.
    """

    def __init__(self, domain: DomainSpec):
        if not isinstance(domain, (Interval, Disk, Ball)):
            raise InvalidArgumentError(f"unknown domain spec {domain!r}")
        self.domain = domain

    # -- validation helpers -------------------------------------------------
    def _require_interior(self, x) -> None:
        delta = self.domain.distance_to_boundary(x)
        if not delta > 0.0:
            raise DomainError(f"point {x!r} is not strictly interior (delta = {delta:g})")

    def _interval_endpoint_index(self, z: float) -> int:
        a, b = self.domain.a, self.domain.b
        if math.isclose(z, a, rel_tol=0.0, abs_tol=1e-12 * (1 + abs(a))):
            return 0
        if math.isclose(z, b, rel_tol=0.0, abs_tol=1e-12 * (1 + abs(b))):
            return 1
        raise DomainError(f"{z!r} is not an endpoint of ({a}, {b})")

    # -- Poisson kernel ------------------------------------------------------
    def poisson(self, x, z):
        """P(x, z) for strictly interior x and boundary z.

        Positive, integrates to 1 in z over the boundary.  Vectorized over z.
        """
        dom = self.domain
        if isinstance(dom, Disk):
            self._require_interior(x)
            x = np.asarray(x, dtype=float)
            r = float(np.hypot(x[0], x[1]))
            theta = math.atan2(x[1], x[0])
            eta = np.asarray(z, dtype=float)
            denom = 1.0 - 2.0 * r * np.cos(theta - eta) + r * r
            out = (1.0 - r * r) / (TWO_PI * denom)
            return out if out.ndim else float(out)
        if isinstance(dom, Ball):
            self._require_interior(x)
            x = np.asarray(x, dtype=float)
            z = np.asarray(z, dtype=float)
            d2 = np.sum((z - x) ** 2, axis=-1)
            out = (1.0 - float(np.dot(x, x))) / (4.0 * math.pi * d2 ** 1.5)
            return out if out.ndim else float(out)
        # interval: two endpoint weights
        self._require_interior(x)
        idx = self._interval_endpoint_index(float(np.asarray(z)))
        a, b = dom.a, dom.b
        x = float(x)
        return (b - x) / (b - a) if idx == 0 else (x - a) / (b - a)

    # -- Green function --------------------------------------------------
    def green(self, x, y):
        """G(x, y) for distinct strictly interior points; symmetric, positive."""
        dom = self.domain
        if isinstance(dom, Disk):
            self._require_interior(x)
            self._require_interior(y)
            zx, zy = _as_complex(x), _as_complex(y)
            sep = abs(zx - zy)
            if sep < _SING_EPS:
                raise SingularityError("green function evaluated at x = y")
            return math.log(abs(1.0 - zx.conjugate() * zy) / sep) / TWO_PI
        if isinstance(dom, Ball):
            self._require_interior(x)
            self._require_interior(y)
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            sep = float(np.linalg.norm(x - y))
            if sep < _SING_EPS:
                raise SingularityError("green function evaluated at x = y")
            rho = math.sqrt(1.0 - 2.0 * float(np.dot(x, y)) + float(np.dot(x, x)) * float(np.dot(y, y)))
            return (1.0 / sep - 1.0 / rho) / (4.0 * math.pi)
        # interval
        self._require_interior(x)
        self._require_interior(y)
        x, y = float(x), float(y)
        if abs(x - y) < _SING_EPS * (1 + abs(x)):
            raise SingularityError("green function evaluated at x = y")
        lo, hi = (x, y) if x < y else (y, x)
        return (lo - dom.a) * (dom.b - hi) / dom.length

    # -- Feller kernel ---------------------------------------------------
    def feller(self, z, w):
        """gamma(z, w) for distinct boundary points; vectorized over w.

        Comparable with |z - w|^{-d}: the ratio is identically 1/pi on the
        disk and 1/(2 pi) on the ball.
        """
        dom = self.domain
        if isinstance(dom, Disk):
            s = np.asarray(z, dtype=float) - np.asarray(w, dtype=float)
            sin2 = np.sin(0.5 * s) ** 2
            if np.any(sin2 < _SING_EPS):
                raise SingularityError("feller kernel evaluated at z = w")
            out = 1.0 / (4.0 * math.pi * sin2)
            return out if out.ndim else float(out)
        if isinstance(dom, Ball):
            z = np.asarray(z, dtype=float)
            w = np.asarray(w, dtype=float)
            d2 = np.sum((z - w) ** 2, axis=-1)
            if np.any(d2 < _SING_EPS**2):
                raise SingularityError("feller kernel evaluated at z = w")
            out = 1.0 / (2.0 * math.pi * d2 ** 1.5)
            return out if out.ndim else float(out)
        # interval: gamma between the two distinct endpoints. With this value
        # the ordered two-point double sum of F_p reproduces the closed-form
        # boundary energy of linear functions.
        i = self._interval_endpoint_index(float(np.asarray(z)))
        j = self._interval_endpoint_index(float(np.asarray(w)))
        if i == j:
            raise SingularityError("feller kernel evaluated at z = w")
        return 1.0 / dom.length


# ---------------------------------------------------------------------------
# empirical comparability constants for the kernel estimates
# ---------------------------------------------------------------------------

def _random_interior(domain: DomainSpec, rng, rmax: float = 0.9):
    if isinstance(domain, Disk):
        r = rmax * math.sqrt(rng.uniform())
        t = rng.uniform(0.0, TWO_PI)
        return np.array([r * math.cos(t), r * math.sin(t)])
    if isinstance(domain, Ball):
        v = rng.standard_normal(3)
        v /= np.linalg.norm(v)
        return rmax * rng.uniform() ** (1.0 / 3.0) * v
    return domain.a + (domain.b - domain.a) * rng.uniform(0.05, 0.95)


def _random_boundary(domain: DomainSpec, rng):
    if isinstance(domain, Disk):
        return rng.uniform(0.0, TWO_PI)
    if isinstance(domain, Ball):
        v = rng.standard_normal(3)
        return v / np.linalg.norm(v)
    return domain.a if rng.uniform() < 0.5 else domain.b


def _boundary_gap(domain: DomainSpec, z, w) -> float:
    if isinstance(domain, Disk):
        return float(np.linalg.norm(domain.boundary_point(z) - domain.boundary_point(w)))
    if isinstance(domain, Ball):
        return float(np.linalg.norm(np.asarray(z) - np.asarray(w)))
    return abs(float(z) - float(w))


def poisson_comparability(ks: KernelSet, n: int = 200, rng=None):
    """Min/max of P(x,z) |z-x|^d / delta(x) over random (x, z)."""
    rng = np.random.default_rng(rng)
    dom = ks.domain
    d = 2 if isinstance(dom, Disk) else 3 if isinstance(dom, Ball) else 1
    ratios = []
    for _ in range(n):
        x = _random_interior(dom, rng)
        z = _random_boundary(dom, rng)
        if isinstance(dom, Disk):
            gap = float(np.linalg.norm(dom.boundary_point(z) - x))
        elif isinstance(dom, Ball):
            gap = float(np.linalg.norm(np.asarray(z) - x))
        else:
            gap = abs(float(z) - float(x))
        ratios.append(ks.poisson(x, z) * gap**d / dom.distance_to_boundary(x))
    return float(np.min(ratios)), float(np.max(ratios))


def green_comparability(ks: KernelSet, n: int = 200, rng=None):
    """Min/max of G against its sharp comparison function.

    Comparison: (1 ^ delta(x) delta(y)/|x-y|^2) |x-y|^{2-d} for the ball,
    ln(1 + delta(x) delta(y)/|x-y|^2) for the disk.
    """
    rng = np.random.default_rng(rng)
    dom = ks.domain
    if isinstance(dom, Interval):
        raise UnsupportedInputError("the sharp Green bounds are stated for d >= 2 only")
    ratios = []
    for _ in range(n):
        x = _random_interior(dom, rng)
        y = _random_interior(dom, rng)
        sep = float(np.linalg.norm(np.asarray(x) - np.asarray(y)))
        if sep < 1e-6:
            continue
        dd = dom.distance_to_boundary(x) * dom.distance_to_boundary(y)
        if isinstance(dom, Disk):
            comp = math.log1p(dd / sep**2)
        else:
            comp = min(1.0, dd / sep**2) / sep
        ratios.append(ks.green(x, y) / comp)
    return float(np.min(ratios)), float(np.max(ratios))


def feller_comparability(ks: KernelSet, n: int = 200, rng=None):
    """Min/max of gamma(z,w) |z-w|^d over random distinct boundary pairs."""
    rng = np.random.default_rng(rng)
    dom = ks.domain
    d = 2 if isinstance(dom, Disk) else 3 if isinstance(dom, Ball) else 1
    ratios = []
    while len(ratios) < n:
        z = _random_boundary(dom, rng)
        w = _random_boundary(dom, rng)
        gap = _boundary_gap(dom, z, w)
        if gap < 1e-9:
            continue
        ratios.append(ks.feller(z, w) * gap**d)
    return float(np.min(ratios)), float(np.max(ratios))


def feller_normal_derivative_check(ks: KernelSet, z, w, h_seq=(1e-3, 1e-4, 1e-5)) -> float:
    """Recompute gamma(z,w) from its defining limit P(z + h n_z, w)/h.

    Evaluates the quotient along ``h_seq`` and Richardson-extrapolates the
    (leading-order linear) h-dependence away.  Used to validate the closed
    forms, notably 2/(sigma_3 |z-w|^3) on the ball.
    """
    dom = ks.domain
    vals = []
    for h in h_seq:
        if isinstance(dom, Disk):
            x = (1.0 - h) * dom.boundary_point(z)
        elif isinstance(dom, Ball):
            x = (1.0 - h) * np.asarray(z, dtype=float)
        else:
            i = ks._interval_endpoint_index(float(z))
            x = dom.a + h if i == 0 else dom.b - h
        vals.append(ks.poisson(x, w) / h)
    # Neville elimination assuming an error expansion in powers of h
    hs = np.asarray(h_seq, dtype=float)
    tab = np.asarray(vals, dtype=float)
    for level in range(1, len(hs)):
        tab = tab[1:] + (tab[1:] - tab[:-1]) * hs[level:] / (hs[:-level] - hs[level:])
    return float(tab[0])
