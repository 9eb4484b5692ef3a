"""Poisson extensions on the unit disk via truncated Fourier series.

A boundary function g on the circle with coefficients (a0, a_n, b_n) extends
harmonically to

    u(r, theta) = a0 + sum_{n=1..N} r^n (a_n cos n theta + b_n sin n theta),

which is exactly harmonic at every truncation order.  The series also gives
the gradient in closed form,

    |grad u|^2 = (du/dr)^2 + (du/dtheta / r)^2,

with the removable r = 0 singularity handled analytically (only the n = 1
terms contribute there), and the Dirichlet integral

    int_D |grad u|^2 dx = pi sum_n n (a_n^2 + b_n^2).

``poisson_extend_pointwise`` integrates g against the Poisson kernel and is
kept strictly independent of the series path so the two can cross-validate.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    AccuracyError,
    AliasingError,
    ConfigurationError,
    DomainError,
    InvalidArgumentError,
)
from .kernels import Disk, Interval, KernelSet

__all__ = [
    "BoundaryFunction",
    "HarmonicDiskFunction",
    "IntervalHarmonic",
    "fourier_project",
    "eval_u",
    "eval_grad_sq",
    "poisson_extend_pointwise",
    "radial_trace",
]

TWO_PI = 2.0 * math.pi


def _is_power_of_two(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


@dataclass
class BoundaryFunction:
    """Boundary datum g on the unit circle, parametrized by angle.

    Exactly one of three representations backs the object: a callable (with
    optional analytic derivative), a uniform sample grid of power-of-two size,
    or a Fourier coefficient table.  Coefficients for sampled data are
    computed lazily by FFT and cached.
    """

    fn: Optional[Callable] = None
    dfn: Optional[Callable] = None
    sample_values: Optional[np.ndarray] = None
    a0: Optional[float] = None
    an: Optional[np.ndarray] = None
    bn: Optional[np.ndarray] = None
    label: str = ""
    _fft_cache: dict = field(default_factory=dict, repr=False)

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_callable(cls, fn, derivative=None, label=""):
        return cls(fn=fn, dfn=derivative, label=label or getattr(fn, "__name__", ""))

    @classmethod
    def from_samples(cls, values, label=""):
        values = np.asarray(values, dtype=float)
        if values.ndim != 1 or values.size < 4 or not _is_power_of_two(values.size):
            raise InvalidArgumentError(
                f"sample grid must be 1-d, size >= 4 and a power of two, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidArgumentError("sample values must be finite")
        return cls(sample_values=values, label=label)

    @classmethod
    def from_coefficients(cls, a0, an=(), bn=(), label=""):
        an = np.atleast_1d(np.asarray(an, dtype=float))
        bn = np.atleast_1d(np.asarray(bn, dtype=float))
        n = max(an.size, bn.size)
        an = np.pad(an, (0, n - an.size))
        bn = np.pad(bn, (0, n - bn.size))
        if not (math.isfinite(a0) and np.all(np.isfinite(an)) and np.all(np.isfinite(bn))):
            raise InvalidArgumentError("coefficients must be finite")
        return cls(a0=float(a0), an=an, bn=bn, label=label)

    @classmethod
    def from_fourier_csv(cls, path, label=""):
        """Load a coefficient table with columns n, a_n, b_n (n = 0 row sets a0)."""
        rows = {}
        with open(path, newline="") as handle:
            reader = csv.DictReader(handle)
            if reader.fieldnames is None or [f.strip() for f in reader.fieldnames[:3]] != ["n", "a_n", "b_n"]:
                raise InvalidArgumentError(
                    f"expected CSV header 'n,a_n,b_n', got {reader.fieldnames}"
                )
            for row in reader:
                rows[int(row["n"])] = (float(row["a_n"]), float(row["b_n"]))
        nmax = max(rows) if rows else 0
        a0 = rows.get(0, (0.0, 0.0))[0]
        an = np.zeros(nmax)
        bn = np.zeros(nmax)
        for n, (a, b) in rows.items():
            if n > 0:
                an[n - 1] = a
                bn[n - 1] = b
        return cls.from_coefficients(a0, an, bn, label=label or str(path))

    # -- evaluation --------------------------------------------------------
    @property
    def is_band_limited(self) -> bool:
        return self.a0 is not None

    @property
    def grid_size(self) -> Optional[int]:
        return None if self.sample_values is None else self.sample_values.size

    def _coeffs_from_samples(self, m: int):
        key = ("c", m)
        if key not in self._fft_cache:
            vals = self.sample_values
            spec = np.fft.rfft(vals) / vals.size
            a0 = spec[0].real
            an = 2.0 * spec[1:].real
            bn = -2.0 * spec[1:].imag
            if vals.size % 2 == 0:
                an[-1] *= 0.5  # Nyquist mode appears once
            self._fft_cache[key] = (a0, an, bn)
        return self._fft_cache[key]

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.fn is not None:
            out = np.asarray(self.fn(theta), dtype=float)
        elif self.a0 is not None:
            out = self._eval_series(theta, self.a0, self.an, self.bn)
        else:
            a0, an, bn = self._coeffs_from_samples(self.sample_values.size)
            out = self._eval_series(theta, a0, an, bn)
        return out if out.ndim else float(out)

    def derivative(self, theta):
        """d g / d theta; required by the diagonal regularization."""
        theta = np.asarray(theta, dtype=float)
        if self.dfn is not None:
            out = np.asarray(self.dfn(theta), dtype=float)
        elif self.a0 is not None or self.sample_values is not None:
            if self.a0 is not None:
                a0, an, bn = self.a0, self.an, self.bn
            else:
                a0, an, bn = self._coeffs_from_samples(self.sample_values.size)
            n = np.arange(1, an.size + 1, dtype=float)
            out = self._eval_series(theta, 0.0, n * bn, -n * an)
        else:
            raise ConfigurationError(
                f"boundary function {self.label!r} has no derivative evaluator"
            )
        return out if out.ndim else float(out)

    @property
    def has_derivative(self) -> bool:
        return self.dfn is not None or self.fn is None

    @staticmethod
    def _eval_series(theta, a0, an, bn):
        n = np.arange(1, an.size + 1, dtype=float)
        ang = np.multiply.outer(theta, n)
        return a0 + np.cos(ang) @ an + np.sin(ang) @ bn

    def samples(self, m: int):
        """Values on the uniform grid theta_j = 2 pi j / m."""
        if self.sample_values is not None and self.sample_values.size == m:
            return self.sample_values
        theta = np.arange(m) * (TWO_PI / m)
        return np.asarray(self(theta), dtype=float)


@dataclass(frozen=True, eq=False)
class HarmonicDiskFunction:
    """Truncated Fourier representation of a harmonic function on the disk."""

    a0: float
    an: np.ndarray
    bn: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "an", np.asarray(self.an, dtype=float))
        object.__setattr__(self, "bn", np.asarray(self.bn, dtype=float))
        if self.an.shape != self.bn.shape or self.an.ndim != 1:
            raise InvalidArgumentError("coefficient arrays must be 1-d of equal length")

    @property
    def order(self) -> int:
        return self.an.size

    # -- series evaluation --------------------------------------------------
    def eval(self, r, theta):
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        if np.any(r < 0) or np.any(r >= 1.0):
            raise DomainError("eval requires 0 <= r < 1 (use radial_trace at the boundary)")
        r, theta = np.broadcast_arrays(r, theta)
        n = np.arange(1, self.order + 1, dtype=float)
        rn = np.power.outer(r, n)
        ang = np.multiply.outer(theta, n)
        out = self.a0 + (rn * np.cos(ang)) @ self.an + (rn * np.sin(ang)) @ self.bn
        return out if out.ndim else float(out)

    def eval_xy(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return self.eval(np.hypot(x, y), np.arctan2(y, x))

    def grad_sq(self, r, theta):
        """|grad u|^2 in polar form; the r = 0 value is the series limit
        a_1^2 + b_1^2 (only degree-one terms carry a gradient at the center).
        """
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        if np.any(r < 0) or np.any(r >= 1.0):
            raise DomainError("grad_sq requires 0 <= r < 1")
        r, theta = np.broadcast_arrays(r, theta)
        n = np.arange(1, self.order + 1, dtype=float)
        # n r^{n-1}: explicit to keep r = 0 finite
        rn1 = np.power.outer(r, n - 1.0) * n
        ang = np.multiply.outer(theta, n)
        cos, sin = np.cos(ang), np.sin(ang)
        du_dr = (rn1 * cos) @ self.an + (rn1 * sin) @ self.bn
        du_dt_over_r = -(rn1 * sin) @ self.an + (rn1 * cos) @ self.bn
        out = du_dr**2 + du_dt_over_r**2
        return out if out.ndim else float(out)

    def dirichlet_integral(self) -> float:
        """int_D |grad u|^2 dx = pi sum n (a_n^2 + b_n^2), exact."""
        n = np.arange(1, self.order + 1, dtype=float)
        return math.pi * float(np.sum(n * (self.an**2 + self.bn**2)))

    def boundary_series(self, theta):
        """The series evaluated at r = 1 (the trace for band-limited data)."""
        theta = np.asarray(theta, dtype=float)
        n = np.arange(1, self.order + 1, dtype=float)
        ang = np.multiply.outer(theta, n)
        out = self.a0 + np.cos(ang) @ self.an + np.sin(ang) @ self.bn
        return out if out.ndim else float(out)

    def boundary_function(self) -> BoundaryFunction:
        return BoundaryFunction.from_coefficients(self.a0, self.an, self.bn)


@dataclass(frozen=True)
class IntervalHarmonic:
    """Affine function u(x) = c x + dconst on an interval (all of its
    harmonic functions are of this form)."""

    c: float
    dconst: float
    domain: Interval

    @classmethod
    def from_boundary_values(cls, domain: Interval, ua: float, ub: float):
        c = (ub - ua) / domain.length
        return cls(c=c, dconst=ua - c * domain.a, domain=domain)

    def eval(self, x):
        x = np.asarray(x, dtype=float)
        out = self.c * x + self.dconst
        return out if out.ndim else float(out)

    def boundary_values(self):
        return (self.eval(self.domain.a), self.eval(self.domain.b))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def fourier_project(g: BoundaryFunction, order: int, min_samples: int = 256) -> HarmonicDiskFunction:
    """Project g onto trigonometric degree <= order and extend harmonically.

    Coefficients come from the FFT of a uniform sample grid.  For sampled
    input the grid must resolve the requested order (M >= 2 order + 2,
    otherwise the high modes alias and an AliasingError is raised).  For
    band-limited g of degree <= order the projection, and hence the
    extension, is exact.
    """
    if order < 1:
        raise InvalidArgumentError(f"truncation order must be >= 1, got {order}")
    if g.is_band_limited:
        an = np.zeros(order)
        bn = np.zeros(order)
        k = min(order, g.an.size)
        an[:k] = g.an[:k]
        bn[:k] = g.bn[:k]
        return HarmonicDiskFunction(g.a0, an, bn)
    if g.sample_values is not None:
        m = g.sample_values.size
        if m < 2 * order + 2:
            raise AliasingError(
                f"sample grid of size {m} cannot resolve order {order} (need M >= {2 * order + 2})"
            )
        values = g.sample_values
    else:
        m = max(min_samples, 1 << (2 * order + 2 - 1).bit_length())
        values = g.samples(m)
    spec = np.fft.rfft(values) / m
    a0 = float(spec[0].real)
    an = 2.0 * spec[1 : order + 1].real
    bn = -2.0 * spec[1 : order + 1].imag
    return HarmonicDiskFunction(a0, np.asarray(an), np.asarray(bn))


def eval_u(H: HarmonicDiskFunction, r, theta):
    """Truncated series value of u at (r, theta), 0 <= r < 1."""
    return H.eval(r, theta)


def eval_grad_sq(H: HarmonicDiskFunction, r, theta):
    """|grad u|^2 at (r, theta) from the differentiated series."""
    return H.grad_sq(r, theta)


def poisson_extend_pointwise(
    ks: KernelSet,
    g: BoundaryFunction,
    x,
    m: int = 1024,
    tol: float = 1e-10,
) -> float:
    """Quadrature of int g(eta) P(x, e^{i eta}) d eta on the disk.

    Independent oracle for the Fourier path: uses only kernel evaluations and
    the trapezoid rule (spectrally accurate for smooth g).  The error is
    estimated by doubling m; failure to meet ``tol`` raises AccuracyError.
    """
    if not isinstance(ks.domain, Disk):
        raise InvalidArgumentError("poisson_extend_pointwise operates on the disk")
    x = np.asarray(x, dtype=float)
    if ks.domain.distance_to_boundary(x) <= 0:
        raise DomainError(f"{x!r} is not strictly interior")

    def level(mm):
        etas = np.arange(mm) * (TWO_PI / mm)
        return float(np.sum(np.asarray(g(etas)) * ks.poisson(x, etas)) * (TWO_PI / mm))

    coarse, fine = level(m), level(2 * m)
    err = abs(fine - coarse)
    scale = max(abs(fine), 1.0)
    if err > tol * scale:
        finest = level(4 * m)
        if abs(finest - fine) > tol * scale:
            raise AccuracyError(
                "poisson quadrature did not converge",
                diagnostics={"m": m, "err_mid": err, "err_fine": abs(finest - fine)},
            )
        return finest
    return fine


def radial_trace(H: HarmonicDiskFunction, theta, radii=None, tol: float = 1e-9):
    """Boundary value at angle theta recovered as the limit of u(r, theta).

    Evaluates along r_k = 1 - 2^{-k} and removes the h = 1 - r dependence by
    Neville extrapolation (exact in exact arithmetic for band-limited data,
    where u(1 - h, theta) is a polynomial in h).  A residual above ``tol``
    times the data scale raises AccuracyError with the oscillation recorded.
    """
    if radii is None:
        radii = 1.0 - 2.0 ** -np.arange(3, 11, dtype=float)
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size < 3 or np.any(np.diff(radii) <= 0) or np.any(radii >= 1):
        raise InvalidArgumentError("radii must be increasing toward 1, length >= 3")
    theta_arr = np.atleast_1d(np.asarray(theta, dtype=float))
    hs = 1.0 - radii
    table = np.stack([np.atleast_1d(H.eval(r, theta_arr)) for r in radii])  # (k, nt)
    prev = table[-1].copy()
    for level_ in range(1, hs.size):
        num = (
            hs[: -level_, None] * table[1:]
            - hs[level_:, None] * table[:-1]
        )
        table = num / (hs[: -level_, None] - hs[level_:, None])
    result = table[0]
    scale = np.max(np.abs(result)) + abs(H.a0) + 1.0
    resid = np.max(np.abs(result - prev))
    # `prev` is the last raw value; for a convergent sequence the extrapolant
    # and the finest sample differ by O(h_last)
    if resid > max(tol * scale, 64.0 * hs[-1] * scale):
        raise AccuracyError(
            "radial trace did not converge",
            diagnostics={"residual": float(resid), "h_last": float(hs[-1])},
        )
    out = result if np.asarray(theta).ndim else float(result[0])
    return out
