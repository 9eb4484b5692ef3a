"""One checker per identity: both sides computed independently, compared.

Each checker returns an :class:`IdentityReport` carrying the two sides, the
absolute and relative discrepancies, the tolerance it was judged against and
provenance notes naming the quadrature/oracle used per side.

Normalization: the canonical interior form is E[u] = p(p-1) int |u|^{p-2}
|grad u|^2 and the canonical boundary form is the F_p double integral, under
which the Douglas identity is E = H with no constant.  The classical views
(both sides divided by p (p-1), which for p = 2 turns E into the plain
Dirichlet integral) are reported in ``extras`` as derived quantities.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    InvalidArgumentError,
    PreconditionError,
    UnsupportedInputError,
)
from .forms import (
    BallLinearData,
    FormValue,
    QuadratureGrid,
    _disk_tensor,
    ball_linear_boundary_form,
    ball_linear_interior_energy,
    base_grid,
    boundary_form_hdp,
    boundary_pnorm,
    diagonal_limit,
    green_weighted_energy,
    interior_energy_edp,
    interior_energy_tilde,
    poisson_expectation,
)
from .harmonic import (
    BoundaryFunction,
    HarmonicDiskFunction,
    IntervalHarmonic,
    fourier_project,
    radial_trace,
)
from .kernels import (
    Ball,
    Disk,
    DomainSpec,
    Exponent,
    Interval,
    KernelSet,
    as_exponent,
    bregman_chain_terms,
    bregman_fp,
    signed_power,
)

__all__ = [
    "IdentityReport",
    "FpEnvelopeReport",
    "check_douglas",
    "check_hardy_stein",
    "check_p_variance",
    "check_remainder",
    "check_vanishing",
    "check_minimizer",
    "check_quasimin",
    "check_fpequiv",
    "check_trace_roundtrip",
]

TWO_PI = 2.0 * math.pi
REL_FLOOR = 1e-300
NEAR_ZERO = 1e-10
DEFAULT_ORDER = 16


@dataclass
class IdentityReport:
    """Outcome of one two-sided identity check."""

    identity: str
    domain: str
    p: float
    params: dict
    lhs: float
    rhs: float
    abs_diff: float
    rel_diff: float
    tolerance: float
    passed: bool
    grid: dict
    notes: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def swapped(self) -> "IdentityReport":
        """Presentation-only: exchange which side is labeled lhs/rhs."""
        out = IdentityReport(**asdict(self))
        out.lhs, out.rhs = self.rhs, self.lhs
        return out


def _grid_dict(grid: Optional[QuadratureGrid]) -> dict:
    if grid is None:
        return {}
    return {
        "n_r": grid.n_r,
        "n_theta": grid.n_theta,
        "m_boundary": grid.m_boundary,
        "s0": grid.diagonal_band,
    }


def _build_report(
    identity: str,
    domain: str,
    p: float,
    params: dict,
    lhs: float,
    rhs: float,
    tolerance: float,
    grid: Optional[QuadratureGrid],
    notes: Optional[list] = None,
    extras: Optional[dict] = None,
    pass_override: Optional[bool] = None,
) -> IdentityReport:
    abs_diff = abs(lhs - rhs)
    rel_diff = abs_diff / max(abs(lhs), abs(rhs), REL_FLOOR)
    if pass_override is not None:
        passed = pass_override
    elif max(abs(lhs), abs(rhs)) <= NEAR_ZERO:
        # relative error is meaningless at zero; compare absolutely
        passed = abs_diff <= NEAR_ZERO
    else:
        passed = rel_diff <= tolerance
    return IdentityReport(
        identity=identity,
        domain=domain,
        p=p,
        params=params,
        lhs=float(lhs),
        rhs=float(rhs),
        abs_diff=float(abs_diff),
        rel_diff=float(rel_diff),
        tolerance=float(tolerance),
        passed=bool(passed),
        grid=_grid_dict(grid),
        notes=list(notes or []),
        extras=dict(extras or {}),
    )


def _default_tolerance(p: float) -> float:
    # p = 2 cases are anchored by closed forms; general p is
    # quadrature-vs-quadrature
    return 1e-6 if p == 2.0 else 1e-3


def _domain_name(domain: DomainSpec) -> str:
    if isinstance(domain, Interval):
        return f"interval({domain.a:g},{domain.b:g})"
    return "disk" if isinstance(domain, Disk) else "ball"


# ---------------------------------------------------------------------------
# Douglas identity
# ---------------------------------------------------------------------------

def _douglas_interval(u: IntervalHarmonic, p: float, grid, tolerance) -> IdentityReport:
    dom = u.domain
    ua, ub = u.boundary_values()
    # closed-form interior side: int |c x + d|^{p-2} dx has antiderivative
    # (c x + d)^<p-1> / (c (p-1))
    if u.c == 0.0:
        lhs = 0.0
    else:
        lhs = p * u.c * (signed_power(ub, p - 1.0) - signed_power(ua, p - 1.0))
    hv = boundary_form_hdp(u, p, dom, grid or base_grid(0))
    rhs = hv.value
    tol = 1e-12 if tolerance is None else tolerance
    scale = p * (p - 1.0)
    return _build_report(
        "douglas",
        _domain_name(dom),
        p,
        {"u": f"linear:{u.c:g},{u.dconst:g}"},
        lhs,
        rhs,
        tol,
        grid,
        notes=[
            "interior side in closed form (signed-power antiderivative)",
            "boundary side as the ordered two-point F_p sum",
        ],
        extras={
            "lhs_classical": lhs / scale,
            "rhs_classical": rhs / scale,
        },
    )


def _douglas_disk(g: BoundaryFunction, p: float, grid, tolerance, order) -> IdentityReport:
    grid = grid or base_grid(3)
    H = fourier_project(g, order)
    ev = interior_energy_edp(H, p, grid, strict=False)
    hv = boundary_form_hdp(g, p, Disk(), grid)
    tol = _default_tolerance(p) if tolerance is None else tolerance
    notes = [
        "interior side: tensor quadrature of the series gradient",
        "boundary side: periodic double quadrature with diagonal extension",
    ]
    extras = {
        "lhs_classical": ev.value / (p * (p - 1.0)),
        "rhs_classical": hv.value / (p * (p - 1.0)),
        "dirichlet_integral": H.dirichlet_integral(),
        "lhs_error_estimate": ev.error_estimate,
        "rhs_error_estimate": hv.error_estimate,
    }
    pass_override = None
    if ev.diagnostics:
        extras["adaptive"] = ev.diagnostics
        notes.append("p < 2 with interior zeros: adaptive interior quadrature, no hard pass/fail")
        scale = max(abs(ev.value), abs(hv.value), REL_FLOOR)
        achievable = 5.0 * (ev.error_estimate + hv.error_estimate) / scale
        pass_override = abs(ev.value - hv.value) / scale <= max(tol, achievable)
    return _build_report(
        "douglas",
        "disk",
        p,
        {"g": g.label, "order": order},
        ev.value,
        hv.value,
        tol,
        grid,
        notes=notes,
        extras=extras,
        pass_override=pass_override,
    )


def _douglas_ball(data: BallLinearData, p: float, grid, tolerance) -> IdentityReport:
    grid = grid or base_grid(2)
    n_outer = max(16, grid.m_boundary // 4)
    lhs = ball_linear_interior_energy(data, p, n_r=max(64, grid.n_r))
    rhs = ball_linear_boundary_form(data, p, n_outer=n_outer, n_alpha=n_outer)
    coarse = ball_linear_boundary_form(data, p, n_outer=max(8, n_outer // 2), n_alpha=max(8, n_outer // 2))
    tol = _default_tolerance(p) if tolerance is None else tolerance
    return _build_report(
        "douglas",
        "ball",
        p,
        {"g": f"linear:{data.c0:g},{data.c[0]:g},{data.c[1]:g},{data.c[2]:g}"},
        lhs,
        rhs,
        tol,
        grid,
        notes=[
            "interior side: affine extension is exact; radial Gauss quadrature",
            "boundary side: double sphere quadrature in rotated coordinates",
        ],
        extras={"rhs_error_estimate": abs(rhs - coarse)},
    )


def check_douglas(
    g,
    p: Union[float, Exponent],
    domain: DomainSpec,
    grid: Optional[QuadratureGrid] = None,
    tolerance: Optional[float] = None,
    order: int = DEFAULT_ORDER,
) -> IdentityReport:
    """Interior energy of the harmonic extension vs boundary double form.

    Boundary data by domain: IntervalHarmonic (or an endpoint value pair),
    BoundaryFunction on the disk, BallLinearData on the ball.
    """
    p = as_exponent(p).p
    if isinstance(domain, Interval):
        if not isinstance(g, IntervalHarmonic):
            ua, ub = float(g[0]), float(g[1])
            g = IntervalHarmonic.from_boundary_values(domain, ua, ub)
        return _douglas_interval(g, p, grid, tolerance)
    if isinstance(domain, Disk):
        return _douglas_disk(g, p, grid, tolerance, order)
    if isinstance(domain, Ball):
        if not isinstance(g, BallLinearData):
            raise UnsupportedInputError(
                "ball boundary data must be BallLinearData (linear family)"
            )
        return _douglas_ball(g, p, grid, tolerance)
    raise InvalidArgumentError(f"unknown domain {domain!r}")


# ---------------------------------------------------------------------------
# Hardy-Stein identity
# ---------------------------------------------------------------------------

def check_hardy_stein(
    g: BoundaryFunction,
    p: Union[float, Exponent],
    x,
    grid: Optional[QuadratureGrid] = None,
    tolerance: Optional[float] = None,
    order: int = DEFAULT_ORDER,
) -> IdentityReport:
    """E^x |g|^p - |u(x)|^p  vs  p(p-1) int G(x,y) |u|^{p-2} |grad u|^2 dy."""
    p = as_exponent(p).p
    grid = grid or base_grid(3)
    x = np.asarray(x, dtype=float)
    ks = KernelSet(Disk())
    H = fourier_project(g, order)
    r, t = float(np.hypot(x[0], x[1])), float(math.atan2(x[1], x[0]))
    ux = H.eval(r, t)
    expect = poisson_expectation(ks, g, p, x)
    lhs = expect - abs(ux) ** p
    gw = green_weighted_energy(H, p, x, grid)
    rhs = p * (p - 1.0) * gw.value
    tol = _default_tolerance(p) if tolerance is None else tolerance
    return _build_report(
        "hardy-stein",
        "disk",
        p,
        {"g": g.label, "x": [float(x[0]), float(x[1])], "order": order},
        lhs,
        rhs,
        tol,
        grid,
        notes=[
            "lhs: boundary quadrature of |g|^p against the Poisson kernel",
            "rhs: Green-weighted interior quadrature (polar shells around x)",
        ],
        extras={
            "poisson_expectation": expect,
            "u_at_x": float(ux),
            "green_weighted": gw.value,
            "rhs_error_estimate": p * (p - 1.0) * gw.error_estimate,
        },
    )


# ---------------------------------------------------------------------------
# p-variance displays
# ---------------------------------------------------------------------------

def check_p_variance(
    g: BoundaryFunction,
    p: Union[float, Exponent],
    x,
    w: float = 0.0,
    grid: Optional[QuadratureGrid] = None,
    tolerance: float = 1e-5,
    order: int = 32,
    m: int = 2048,
) -> IdentityReport:
    """Two expansions of E^x |g|^p - |u(x)|^p against Bregman integrands:

        int F_p(u(x), g(z)) P(x, z) dz                       (base form)
        int F_p(g(w0), g(z)) P(x, z) dz - F_p(g(w0), u(x))   (shifted form)

    Both are algebraic consequences of int P = 1 and int g P = u(x), so the
    check exercises the consistency of the quadratures and the series value
    of u; ``w`` is the angle of the shifted base point.
    """
    p = as_exponent(p).p
    grid = grid or base_grid(2)
    ks = KernelSet(Disk())
    x = np.asarray(x, dtype=float)
    H = fourier_project(g, order)
    ux = float(H.eval(np.hypot(x[0], x[1]), math.atan2(x[1], x[0])))
    expect = poisson_expectation(ks, g, p, x, m=m)
    lhs = expect - abs(ux) ** p

    eta = np.arange(m) * (TWO_PI / m)
    pk = ks.poisson(x, eta)
    gz = np.asarray(g(eta), dtype=float)
    rhs_base = float(np.sum(bregman_fp(p, ux, gz) * pk)) * (TWO_PI / m)
    gw0 = float(g(w))
    rhs_shift = (
        float(np.sum(bregman_fp(p, gw0, gz) * pk)) * (TWO_PI / m)
        - bregman_fp(p, gw0, ux)
    )
    rel_shift = abs(lhs - rhs_shift) / max(abs(lhs), abs(rhs_shift), REL_FLOOR)
    report = _build_report(
        "p-variance",
        "disk",
        p,
        {"g": g.label, "x": [float(x[0]), float(x[1])], "w": w},
        lhs,
        rhs_base,
        tolerance,
        grid,
        notes=["base and shifted displays both checked; shifted in extras"],
        extras={"rhs_shifted": rhs_shift, "rel_diff_shifted": rel_shift},
    )
    near_zero = max(abs(lhs), abs(rhs_shift)) <= NEAR_ZERO
    shift_ok = (abs(lhs - rhs_shift) <= NEAR_ZERO) if near_zero else (rel_shift <= tolerance)
    report.passed = bool(report.passed and shift_ok)
    return report


# ---------------------------------------------------------------------------
# remainder identity for non-harmonic u (p >= 2)
# ---------------------------------------------------------------------------

def check_remainder(
    u,
    p: Union[float, Exponent],
    grid: Optional[QuadratureGrid] = None,
    tolerance: float = 1e-3,
    order: int = 32,
) -> IdentityReport:
    """Four-term identity for smooth u on the closed disk (p >= 2):

        E[u] = H[u|boundary] - p int Du u^<p-1> + p int Du P[u^<p-1>|boundary]

    where Du is the Laplacian of u.  Note the last coefficient: deriving the
    boundary term through Green's identity with the kernel normalizations
    used here (int_boundary P(x, z) dz = 1 and the Green function with
    -Delta G = delta, under which int_disk P(y, w) dy = 1/2) gives the
    inward-normal derivative of the zero-boundary part phi = u - P[u] as
    d_n phi(w) = - int Du(y) P(y, w) dy, hence a full factor p, not p/2, on
    the final integral.  Both harmonic inputs (all correction terms vanish)
    and u = x1^2 close the identity under this coefficient.

    ``u`` must provide eval/grad/laplacian (see presets.C2Function).  The
    extras carry the equivalent form with H replaced by E[P[u|boundary]].
    """
    p = as_exponent(p).p
    if p < 2.0:
        raise UnsupportedInputError("the remainder identity requires p >= 2")
    grid = grid or base_grid(3)

    def W_energy(r, t):
        r, t = np.broadcast_arrays(r, t)
        X, Y = r * np.cos(t), r * np.sin(t)
        uu = u.eval(X, Y)
        return np.where(np.abs(uu) > 0, np.abs(uu) ** (p - 2.0), 0.0 if p > 2 else 1.0) * u.grad_sq(X, Y)

    def W_lap1(r, t):
        r, t = np.broadcast_arrays(r, t)
        X, Y = r * np.cos(t), r * np.sin(t)
        return u.laplacian(X, Y) * signed_power(u.eval(X, Y), p - 1.0)

    g_u = u.boundary_function()
    h_b = BoundaryFunction.from_callable(
        lambda t: signed_power(np.asarray(g_u(t)), p - 1.0),
        label=f"{u.label}^<p-1>|boundary",
    )
    PH = fourier_project(h_b, order, min_samples=max(256, 4 * order))

    def W_lap2(r, t):
        r, t = np.broadcast_arrays(r, t)
        X, Y = r * np.cos(t), r * np.sin(t)
        return u.laplacian(X, Y) * PH.eval(r, t)

    e_u = p * (p - 1.0) * _disk_tensor(W_energy, grid.n_r, grid.n_theta)
    lap1 = _disk_tensor(W_lap1, grid.n_r, grid.n_theta)
    lap2 = _disk_tensor(W_lap2, grid.n_r, grid.n_theta)
    hv = boundary_form_hdp(g_u, p, Disk(), grid)
    HPu = fourier_project(g_u, order, min_samples=max(256, 4 * order))
    ev = interior_energy_edp(HPu, p, grid, strict=False)

    rhs = hv.value - p * lap1 + p * lap2
    rhs_via_e = ev.value - p * lap1 + p * lap2
    report = _build_report(
        "remainder",
        "disk",
        p,
        {"u": u.label, "order": order},
        e_u,
        rhs,
        tolerance,
        grid,
        notes=[
            "all four terms by independent quadrature",
            "last-term coefficient p (see docstring for the normalization)",
        ],
        extras={
            "boundary_form": hv.value,
            "interior_energy_of_extension": ev.value,
            "laplacian_term": lap1,
            "poisson_laplacian_term": lap2,
            "rhs_via_extension_energy": rhs_via_e,
            "rel_diff_via_extension": abs(e_u - rhs_via_e)
            / max(abs(e_u), abs(rhs_via_e), REL_FLOOR),
        },
    )
    near_zero = max(abs(e_u), abs(rhs_via_e)) <= NEAR_ZERO
    alt_ok = (
        abs(e_u - rhs_via_e) <= NEAR_ZERO
        if near_zero
        else report.extras["rel_diff_via_extension"] <= tolerance
    )
    report.passed = bool(report.passed and alt_ok)
    return report


# ---------------------------------------------------------------------------
# vanishing-boundary identity
# ---------------------------------------------------------------------------

def check_vanishing(
    v,
    p: Union[float, Exponent],
    grid: Optional[QuadratureGrid] = None,
    tolerance: Optional[float] = None,
    boundary_samples: int = 256,
) -> IdentityReport:
    """For smooth v with v = 0 on the circle:

        int |grad v|^2 |v|^{p-2} dx = (1/(1-p)) int Dv |v|^{p-2} v dx.

    The boundary condition is asserted by sampling (max |v| <= 1e-12).
    """
    p = as_exponent(p).p
    grid = grid or base_grid(3)
    theta = np.arange(boundary_samples) * (TWO_PI / boundary_samples)
    bvals = np.abs(np.asarray(v.eval(np.cos(theta), np.sin(theta))))
    if float(np.max(bvals)) > 1e-12:
        raise PreconditionError(
            f"boundary values not zero: max |v| = {float(np.max(bvals)):.3e}"
        )

    def W_lhs(r, t):
        r, t = np.broadcast_arrays(r, t)
        X, Y = r * np.cos(t), r * np.sin(t)
        vv = v.eval(X, Y)
        wgt = np.maximum(np.abs(vv), 1e-300) ** (p - 2.0) if p != 2.0 else 1.0
        return wgt * v.grad_sq(X, Y)

    def W_rhs(r, t):
        r, t = np.broadcast_arrays(r, t)
        X, Y = r * np.cos(t), r * np.sin(t)
        return v.laplacian(X, Y) * signed_power(v.eval(X, Y), p - 1.0)

    lhs = _disk_tensor(W_lhs, grid.n_r, grid.n_theta)
    rhs = _disk_tensor(W_rhs, grid.n_r, grid.n_theta) / (1.0 - p)
    tol = 1e-6 if tolerance is None else tolerance
    return _build_report(
        "vanishing-boundary",
        "disk",
        p,
        {"v": v.label},
        lhs,
        rhs,
        tol,
        grid,
        notes=["both sides by tensor quadrature from independent integrands"],
    )


# ---------------------------------------------------------------------------
# minimizer and quasiminimizer of the signed-power energy
# ---------------------------------------------------------------------------

def _tilde_energy_exact_harmonic(h: HarmonicDiskFunction, p: float) -> float:
    """Et of u with u^<p/2> equal to the harmonic series h (closed form)."""
    return (4.0 * (p - 1.0) / p) * h.dirichlet_integral()


def check_minimizer(
    g: BoundaryFunction,
    p: Union[float, Exponent],
    grid: Optional[QuadratureGrid] = None,
    order: int = 48,
    gap_sigmas: float = 3.0,
) -> IdentityReport:
    """Energy of the signed-power minimizer vs the harmonic extension.

    The competitor u_min = (P[g^<p/2>])^<2/p> has the minimal energy
    Et = (4(p-1)/p) int |grad u^<p/2>|^2 under the boundary condition, so
    Et[u_min] <= Et[P[g]] always; for p = 2 (or constant g) they coincide,
    otherwise the inequality is strict.  Both energies are computed by the
    same finite-difference engine; the pass rule is equality to 1e-10 at
    p = 2 and a gap exceeding ``gap_sigmas`` times the summed error
    estimates at p != 2 (for nonconstant g).
    """
    p = as_exponent(p).p
    grid = grid or base_grid(3)
    H_g = fourier_project(g, order)
    h_half = BoundaryFunction.from_callable(
        lambda t: signed_power(np.asarray(g(t)), 0.5 * p), label=f"{g.label}^<p/2>"
    )
    H_half = fourier_project(h_half, order, min_samples=max(512, 4 * order))

    tv_har = interior_energy_tilde(H_g.eval_xy, p, grid, strict=False)
    kappa = 2.0 / p

    def u_min_eval(x, y):
        return signed_power(H_half.eval_xy(x, y), kappa)

    tv_min = interior_energy_tilde(u_min_eval, p, grid, strict=False)
    gap = tv_har.value - tv_min.value
    err_sum = tv_har.error_estimate + tv_min.error_estimate
    exact_min = _tilde_energy_exact_harmonic(H_half, p)

    coeff_scale = float(np.max(np.abs(np.concatenate([H_g.an, H_g.bn])))) if H_g.order else 0.0
    constant_g = coeff_scale < 1e-14
    if constant_g or p == 2.0:
        passed = abs(gap) <= max(1e-10, 1e-10 * max(abs(tv_har.value), 1.0))
        note = "p = 2 or constant data: energies must coincide"
    else:
        passed = gap > gap_sigmas * err_sum and gap > 0.0
        note = f"strict gap required beyond {gap_sigmas:g}x summed error estimates"
    return _build_report(
        "minimizer",
        "disk",
        p,
        {"g": g.label, "order": order},
        tv_har.value,
        tv_min.value,
        1e-10,
        grid,
        notes=[note, "both energies via the finite-difference signed-power engine"],
        extras={
            "gap": gap,
            "error_sum": err_sum,
            "minimizer_energy_closed_form": exact_min,
            "lhs_error_estimate": tv_har.error_estimate,
            "rhs_error_estimate": tv_min.error_estimate,
        },
        pass_override=passed,
    )


def check_quasimin(
    g: BoundaryFunction,
    p: Union[float, Exponent],
    rho: float,
    grid: Optional[QuadratureGrid] = None,
    order: int = 48,
    sample_size: int = 512,
) -> IdentityReport:
    """Energy quotient of the harmonic extension over concentric subdisks.

    K_obs = Et_U[u] / Et_U[v_min] with U the disk of radius rho, u the
    harmonic extension of g restricted to U, and v_min the minimizer on U
    with boundary data u on the circle of radius rho.  K_obs >= 1 and finite
    is asserted (K_obs = 1 at p = 2); the observed value is recorded, not
    compared against any a-priori constant.
    """
    p = as_exponent(p).p
    if not 0.0 < rho < 1.0:
        raise InvalidArgumentError("subdisk radius must satisfy 0 < rho < 1")
    grid = grid or base_grid(3)
    H = fourier_project(g, order)
    if p >= 2.0:
        eu = interior_energy_edp(H, p, grid, r_max=rho, strict=False)
    else:
        eu = interior_energy_tilde(H.eval_xy, p, grid, r_max=rho, strict=False)
    # minimizer on U: harmonic extension of (u|_{rho circle})^<p/2>; its
    # Dirichlet integral is scale invariant, so the coefficient formula on
    # the unit disk applies to the rescaled data directly
    theta = np.arange(sample_size) * (TWO_PI / sample_size)
    w_half = signed_power(H.eval(rho, theta), 0.5 * p)
    h = fourier_project(BoundaryFunction.from_samples(w_half), sample_size // 2 - 1)
    ev_min = _tilde_energy_exact_harmonic(h, p)

    floor = 1e-14 * (1.0 + abs(eu.value))
    if ev_min <= floor:
        return _build_report(
            "quasiminimizer",
            "disk",
            p,
            {"g": g.label, "rho": rho},
            eu.value,
            ev_min,
            1e-6,
            grid,
            notes=["degenerate case: minimizer energy below floor (constant data)"],
            extras={"K_obs": None, "degenerate": True},
            pass_override=abs(eu.value) <= NEAR_ZERO,
        )
    K = eu.value / ev_min
    if p == 2.0:
        passed = abs(K - 1.0) <= 1e-6
        note = "p = 2: harmonic extension minimizes the Dirichlet energy, K = 1"
    else:
        passed = K >= 1.0 - 1e-9 and math.isfinite(K)
        note = "K_obs recorded; only 1 <= K_obs < inf is asserted"
    return _build_report(
        "quasiminimizer",
        "disk",
        p,
        {"g": g.label, "rho": rho},
        eu.value,
        ev_min,
        1e-6,
        grid,
        notes=[note],
        extras={"K_obs": K, "degenerate": False, "lhs_error_estimate": eu.error_estimate},
        pass_override=passed,
    )


# ---------------------------------------------------------------------------
# Bregman equivalence envelope
# ---------------------------------------------------------------------------

@dataclass
class FpEnvelopeReport:
    """Observed min/max of the pairwise ratios of the four chain terms."""

    p_values: list
    envelopes: dict  # p (as str) -> {ratio_name: [lo, hi]}
    n_samples: int
    seed: int
    passed: bool
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def check_fpequiv(
    p_values: Sequence[float] = (1.2, 1.5, 2.0, 3.0, 4.0),
    n_samples: int = 10_000,
    seed: int = 0,
) -> FpEnvelopeReport:
    """Sample the four comparable expressions on random pairs a != b and
    record the envelope of the three adjacent ratios; all must be finite and
    positive, and at p = 2 identically 1 (the chain collapses to (a-b)^2).
    """
    rng = np.random.default_rng(seed)
    envelopes = {}
    passed = True
    notes = []
    for p in p_values:
        p = as_exponent(p).p
        a = rng.uniform(-3.0, 3.0, n_samples)
        b = rng.uniform(-3.0, 3.0, n_samples)
        keep = a != b
        a, b = a[keep], b[keep]
        hp, fp, mid, sq = bregman_chain_terms(p, a, b)
        ratios = {
            "H_over_F": hp / fp,
            "F_over_maxweight": fp / mid,
            "maxweight_over_halfpower": mid / sq,
        }
        env = {}
        for name, r in ratios.items():
            lo, hi = float(np.min(r)), float(np.max(r))
            env[name] = [lo, hi]
            if not (0.0 < lo <= hi < math.inf):
                passed = False
                notes.append(f"p={p:g}: ratio {name} escaped (0, inf): [{lo:g}, {hi:g}]")
            if p == 2.0 and (abs(lo - 1.0) > 1e-12 or abs(hi - 1.0) > 1e-12):
                passed = False
                notes.append(f"p=2 ratios must be 1, got {name} in [{lo}, {hi}]")
        envelopes[f"{p:g}"] = env
    return FpEnvelopeReport(
        p_values=[float(p) for p in p_values],
        envelopes=envelopes,
        n_samples=n_samples,
        seed=seed,
        passed=passed,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# trace round-trip
# ---------------------------------------------------------------------------

def check_trace_roundtrip(
    g: BoundaryFunction,
    p: Union[float, Exponent],
    grid: Optional[QuadratureGrid] = None,
    n_angles: int = 64,
    order: int = DEFAULT_ORDER,
    trace_tolerance: float = 1e-8,
) -> IdentityReport:
    """Radial limits of the extension recover g; the boundary form of the
    recovered trace matches the original within combined tolerances."""
    p = as_exponent(p).p
    grid = grid or base_grid(3)
    H = fourier_project(g, order)
    theta = np.arange(n_angles) * (TWO_PI / n_angles)
    recovered = np.asarray(radial_trace(H, theta))
    target = np.asarray(g(theta), dtype=float)
    max_err = float(np.max(np.abs(recovered - target)))
    g_rec = BoundaryFunction.from_samples(recovered, label=f"trace({g.label})")
    rep_orig = check_douglas(g, p, Disk(), grid, order=order)
    rep_rec = check_douglas(g_rec, p, Disk(), grid, order=order)
    lhs, rhs = rep_orig.lhs, rep_rec.lhs
    combined = max(
        rep_orig.tolerance,
        10.0 * trace_tolerance,
    )
    report = _build_report(
        "trace-roundtrip",
        "disk",
        p,
        {"g": g.label, "n_angles": n_angles},
        lhs,
        rhs,
        combined,
        grid,
        notes=["lhs/rhs are the interior energies of the original and recovered data"],
        extras={
            "max_trace_error": max_err,
            "douglas_rel_diff_original": rep_orig.rel_diff,
            "douglas_rel_diff_recovered": rep_rec.rel_diff,
        },
    )
    report.passed = bool(
        report.passed and max_err <= trace_tolerance and rep_orig.passed and rep_rec.passed
    )
    return report


# ---------------------------------------------------------------------------
# forms-level sanity re-exported for the suite
# ---------------------------------------------------------------------------

def lemma_lp_sanity(g: BoundaryFunction, p: Union[float, Exponent], m: int = 1024) -> dict:
    """Whenever the boundary form is finite the boundary p-norm quadrature
    converges under refinement; returns both values and the refinement gap."""
    p = as_exponent(p).p
    coarse = boundary_pnorm(g, p, m)
    fine = boundary_pnorm(g, p, 2 * m)
    return {"pnorm": fine, "refinement_gap": abs(fine - coarse)}
