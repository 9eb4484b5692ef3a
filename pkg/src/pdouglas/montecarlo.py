"""Stochastic oracle: Brownian exit sampling for the disk and ball.

Disk exit points are sampled exactly: Brownian motion is conformally
invariant in the plane, so the exit point from x is the Moebius image

    zeta = (w + x) / (1 + conj(x) w),   w uniform on the circle,

of a uniform exit from the center; no discretization error.  The exit
angle CDF is available in closed form for goodness-of-fit tests.

Ball exit points use walk-on-spheres: jump to a uniform point of the
largest inscribed sphere until within ``eps`` of the boundary, then project
radially; the exit law carries an O(eps) bias.

Randomness comes from counter-based Philox streams keyed by (seed, stream),
so estimates are reproducible bit-for-bit and independent streams can be
assigned to workers; the reducer folds per-stream moments in stream order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import InvalidArgumentError, NonTerminationError
from .kernels import Ball, Disk, DomainSpec, Exponent, as_exponent

__all__ = [
    "McConfig",
    "McEstimate",
    "stream_rng",
    "sample_exit_disk",
    "disk_exit_cdf",
    "walk_on_spheres",
    "mc_expectation",
]

TWO_PI = 2.0 * math.pi
WOS_STEP_CAP = 10_000


@dataclass(frozen=True)
class McConfig:
    """Sampling configuration: count, seed, start point, domain, WoS shell."""

    n: int
    seed: int
    x: tuple
    domain: DomainSpec
    wos_eps: float = 1e-3
    n_streams: int = 4

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgumentError("sample count must be >= 1")
        if not (0.0 < self.wos_eps < 0.1):
            raise InvalidArgumentError("wos_eps must lie in (0, 0.1)")
        if self.domain.distance_to_boundary(np.asarray(self.x, dtype=float)) <= 0:
            raise InvalidArgumentError(f"start point {self.x} is not strictly interior")
        if self.n_streams < 1:
            raise InvalidArgumentError("need at least one stream")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n: int
    seed: int

    def within(self, reference: float, sigmas: float = 4.0) -> bool:
        return abs(self.mean - reference) <= sigmas * max(self.stderr, 1e-300)


def stream_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox generator keyed by (seed, stream); streams are independent."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream,))
    return np.random.Generator(np.random.Philox(ss))


def sample_exit_disk(x, rng: np.random.Generator, n: int = 1) -> np.ndarray:
    """Exact Brownian exit angles from x in the unit disk (n samples)."""
    x = np.asarray(x, dtype=float)
    zx = complex(x[0], x[1])
    if abs(zx) >= 1.0:
        raise InvalidArgumentError("start point must satisfy |x| < 1")
    u = rng.uniform(0.0, TWO_PI, size=n)
    w = np.exp(1j * u)
    zeta = (w + zx) / (1.0 + np.conj(zx) * w)
    return np.mod(np.angle(zeta), TWO_PI)


def disk_exit_cdf(x) -> Callable:
    """CDF of the exit angle from x (measured in [0, 2 pi)).

    With x = rho e^{i alpha}, the inverse boundary Moebius map gives

        F(theta) = mod(2 arg(e^{i s} - rho) - s, 2 pi) / (2 pi),  s = theta - alpha,

    exact and monotone; used for Kolmogorov-Smirnov validation.
    """
    x = np.asarray(x, dtype=float)
    rho = float(np.hypot(x[0], x[1]))
    alpha = float(math.atan2(x[1], x[0]))

    def cdf(theta):
        s = np.mod(np.asarray(theta, dtype=float) - alpha, TWO_PI)
        psi = np.mod(2.0 * np.angle(np.exp(1j * s) - rho) - s, TWO_PI)
        return psi / TWO_PI

    return cdf


def walk_on_spheres(
    domain: Ball,
    x,
    rng: np.random.Generator,
    eps: float = 1e-3,
    n: int = 1,
    step_cap: int = WOS_STEP_CAP,
) -> np.ndarray:
    """Approximate Brownian exit points from the unit ball, shape (n, 3).

    Jumps to a uniform point of the inscribed sphere of radius 1 - |pos|
    until the shell width drops below eps, then projects to the boundary.
    The exit law converges to harmonic measure with O(eps) bias.
    """
    x = np.asarray(x, dtype=float)
    if domain.distance_to_boundary(x) <= 0:
        raise InvalidArgumentError("start point must be strictly interior")
    pos = np.tile(x, (n, 1))
    active = np.ones(n, dtype=bool)
    for _ in range(step_cap):
        radii = np.linalg.norm(pos[active], axis=1)
        shell = 1.0 - radii
        still = shell >= eps
        idx = np.flatnonzero(active)
        active[idx[~still]] = False
        idx = idx[still]
        if idx.size == 0:
            break
        direc = rng.standard_normal((idx.size, 3))
        direc /= np.linalg.norm(direc, axis=1, keepdims=True)
        pos[idx] += shell[still, None] * direc
    else:
        raise NonTerminationError(f"walk-on-spheres exceeded {step_cap} steps")
    return pos / np.linalg.norm(pos, axis=1, keepdims=True)


def _stream_counts(n: int, n_streams: int):
    base = n // n_streams
    counts = [base] * n_streams
    for k in range(n - base * n_streams):
        counts[k] += 1
    return counts


def mc_expectation(cfg: McConfig, g: Callable, p: Union[float, Exponent]) -> McEstimate:
    """Monte Carlo estimate of E^x |g(X_tau)|^p.

    ``g`` takes exit angles (disk) or unit vectors of shape (k, 3) (ball).
    Per-stream first and second moments are reduced in fixed stream order,
    so the estimate is bit-identical for a given (seed, config).
    """
    p = as_exponent(p).p
    counts = _stream_counts(cfg.n, cfg.n_streams)
    total = 0.0
    total_sq = 0.0
    for stream, k in enumerate(counts):
        if k == 0:
            continue
        rng = stream_rng(cfg.seed, stream)
        if isinstance(cfg.domain, Disk):
            exits = sample_exit_disk(cfg.x, rng, n=k)
        elif isinstance(cfg.domain, Ball):
            exits = walk_on_spheres(cfg.domain, cfg.x, rng, eps=cfg.wos_eps, n=k)
        else:
            raise InvalidArgumentError("mc_expectation supports the disk and the ball")
        vals = np.abs(np.asarray(g(exits), dtype=float)) ** p
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals**2))
    mean = total / cfg.n
    if cfg.n > 1:
        var = max(total_sq - cfg.n * mean**2, 0.0) / (cfg.n - 1)
    else:
        var = 0.0
    return McEstimate(mean=mean, stderr=math.sqrt(var / cfg.n), n=cfg.n, seed=cfg.seed)
