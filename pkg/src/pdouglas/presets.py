"""Named boundary data and smooth test functions for checks and the CLI.

Boundary presets (angle-parametrized, on the disk):

    const:c        g = c
    cos            g = cos theta
    cosk:k         g = cos(k theta)
    trig:a0,a1,b1[,a2,b2,...]
    shifted-cos:c  g = c + cos theta
    abs-sin        g = |sin theta|   (Lipschitz, kinks at 0 and pi)

Interior test functions carry value, gradient and Laplacian evaluators on
the closed disk; they feed the remainder and vanishing-boundary checkers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from .errors import UnsupportedInputError
from .forms import BallLinearData
from .harmonic import BoundaryFunction, IntervalHarmonic
from .kernels import Interval

__all__ = [
    "boundary_preset",
    "BOUNDARY_PRESETS",
    "C2Function",
    "interior_preset",
    "INTERIOR_PRESETS",
    "interval_preset",
    "ball_preset",
]


def _const(c: float) -> BoundaryFunction:
    return BoundaryFunction.from_coefficients(c, [0.0], [0.0], label=f"const:{c:g}")


def _cos() -> BoundaryFunction:
    return BoundaryFunction.from_coefficients(0.0, [1.0], [0.0], label="cos")


def _cosk(k: int) -> BoundaryFunction:
    k = int(k)
    if k < 1:
        raise UnsupportedInputError("cosk preset needs k >= 1")
    an = np.zeros(k)
    an[-1] = 1.0
    return BoundaryFunction.from_coefficients(0.0, an, np.zeros(k), label=f"cosk:{k}")


def _trig(*coeffs: float) -> BoundaryFunction:
    vals = [float(c) for c in coeffs]
    if not vals:
        raise UnsupportedInputError("trig preset needs at least a0")
    a0, rest = vals[0], vals[1:]
    an = rest[0::2]
    bn = rest[1::2]
    n = max(len(an), len(bn), 1)
    an = an + [0.0] * (n - len(an))
    bn = bn + [0.0] * (n - len(bn))
    return BoundaryFunction.from_coefficients(a0, an, bn, label="trig:" + ",".join(f"{v:g}" for v in vals))


def _shifted_cos(c: float) -> BoundaryFunction:
    return BoundaryFunction.from_coefficients(float(c), [1.0], [0.0], label=f"shifted-cos:{c:g}")


def _abs_sin() -> BoundaryFunction:
    return BoundaryFunction.from_callable(
        lambda t: np.abs(np.sin(t)),
        derivative=lambda t: np.cos(t) * np.sign(np.sin(t)),
        label="abs-sin",
    )


BOUNDARY_PRESETS = {
    "const": _const,
    "cos": _cos,
    "cosk": _cosk,
    "trig": _trig,
    "shifted-cos": _shifted_cos,
    "abs-sin": _abs_sin,
}


def boundary_preset(spec: str) -> BoundaryFunction:
    """Build a BoundaryFunction from a preset string like ``shifted-cos:1.5``."""
    name, _, argstr = spec.partition(":")
    name = name.strip()
    if name not in BOUNDARY_PRESETS:
        known = ", ".join(sorted(BOUNDARY_PRESETS))
        raise UnsupportedInputError(f"unknown boundary preset {name!r}; known presets: {known}")
    args = [float(v) for v in argstr.split(",")] if argstr else []
    return BOUNDARY_PRESETS[name](*args)


@dataclass(frozen=True)
class C2Function:
    """A C^2 function on the closed unit disk with gradient and Laplacian."""

    f: Callable
    grad: Callable  # (x, y) -> (ux, uy)
    laplacian: Callable
    label: str = ""

    def eval(self, x, y):
        return self.f(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    def grad_sq(self, x, y):
        ux, uy = self.grad(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        return ux**2 + uy**2

    def boundary_function(self) -> BoundaryFunction:
        def g(theta):
            return self.f(np.cos(theta), np.sin(theta))

        def dg(theta):
            ct, st = np.cos(theta), np.sin(theta)
            ux, uy = self.grad(ct, st)
            return -st * ux + ct * uy

        return BoundaryFunction.from_callable(g, derivative=dg, label=f"{self.label}|boundary")


def _c2_x1sq() -> C2Function:
    return C2Function(
        f=lambda x, y: x**2,
        grad=lambda x, y: (2.0 * x, np.zeros_like(y)),
        laplacian=lambda x, y: 2.0 + 0.0 * x,
        label="x1sq",
    )


def _c2_harmonic_cos() -> C2Function:
    # Poisson extension of cos theta is u = x
    return C2Function(
        f=lambda x, y: x + 0.0 * y,
        grad=lambda x, y: (np.ones_like(x), np.zeros_like(y)),
        laplacian=lambda x, y: 0.0 * x,
        label="harmonic-cos",
    )


def _c2_paraboloid() -> C2Function:
    return C2Function(
        f=lambda x, y: 1.0 - x**2 - y**2,
        grad=lambda x, y: (-2.0 * x, -2.0 * y),
        laplacian=lambda x, y: -4.0 + 0.0 * x,
        label="one-minus-rsq",
    )


def _c2_bump() -> C2Function:
    return C2Function(
        f=lambda x, y: (1.0 - x**2 - y**2) ** 2,
        grad=lambda x, y: (
            -4.0 * x * (1.0 - x**2 - y**2),
            -4.0 * y * (1.0 - x**2 - y**2),
        ),
        laplacian=lambda x, y: 16.0 * (x**2 + y**2) - 8.0,
        label="one-minus-rsq-sq",
    )


INTERIOR_PRESETS = {
    "x1sq": _c2_x1sq,
    "harmonic-cos": _c2_harmonic_cos,
    "one-minus-rsq": _c2_paraboloid,
    "one-minus-rsq-sq": _c2_bump,
}


def interior_preset(spec: str) -> C2Function:
    name = spec.strip()
    if name not in INTERIOR_PRESETS:
        known = ", ".join(sorted(INTERIOR_PRESETS))
        raise UnsupportedInputError(f"unknown interior preset {name!r}; known presets: {known}")
    return INTERIOR_PRESETS[name]()


def interval_preset(spec: str, domain: Interval) -> IntervalHarmonic:
    """Parse ``linear:c,d`` into the affine function c x + d on the interval."""
    name, _, argstr = spec.partition(":")
    if name.strip() != "linear":
        raise UnsupportedInputError(f"unknown interval preset {name!r}; known presets: linear")
    try:
        c, d = (float(v) for v in argstr.split(","))
    except ValueError as exc:
        raise UnsupportedInputError("interval preset syntax is linear:c,d") from exc
    return IntervalHarmonic(c=c, dconst=d, domain=domain)


def ball_preset(spec: str) -> BallLinearData:
    """Parse ``linear:c0,c1,c2,c3`` into g(z) = c0 + c . z on the sphere."""
    name, _, argstr = spec.partition(":")
    if name.strip() != "linear":
        raise UnsupportedInputError(f"unknown ball preset {name!r}; known presets: linear")
    try:
        c0, c1, c2, c3 = (float(v) for v in argstr.split(","))
    except ValueError as exc:
        raise UnsupportedInputError("ball preset syntax is linear:c0,c1,c2,c3") from exc
    return BallLinearData(c0, (c1, c2, c3))
