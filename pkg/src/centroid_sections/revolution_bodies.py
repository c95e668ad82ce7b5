"""Star and convex bodies of revolution: profiles, convexity, volume,
centroids, hyperplane-section centroids, and the intersection-body test."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .spherical_core import (
    LD, HomogeneousFunction, SphereProfile, Quadrature, expand,
    eval_spectrum, eval_spectrum_deriv, ft_homogeneous, gauss_jacobi,
    radon_subsphere, sphere_area,
)

__all__ = [
    "RevolutionBody", "ConvexityReport", "make_base_body", "curvature",
    "volume", "centroid_axis", "section_centroid_axis", "section_volume",
    "intersection_body_test", "reflect_body", "body_to_dict",
    "profile_csv_rows",
]


@dataclass
class RevolutionBody:
    """Body invariant under rotations about the last axis.

    rho is the radial profile as a function of u = <xi, e_n>.  kind is one
    of "base" (closed-form flattened ball), "perturbed" (base plus odd
    perturbation), "custom".  quad_order, when set, is the minimum
    quadrature order that resolves the profile's spectral content; section
    and centroid integrals take max(requested, quad_order).
    """

    n: int
    rho: SphereProfile
    kind: str = "custom"
    params: dict = field(default_factory=dict)
    ft_profile: Optional[SphereProfile] = None
    quad_order: Optional[int] = None

    def resolve_order(self, order: Optional[int], fallback: int = 256) -> int:
        base = fallback if order is None else order
        if self.quad_order is not None:
            return max(base, self.quad_order)
        return base


@dataclass
class ConvexityReport:
    kappa_min: float
    argmin_theta: float
    is_convex: bool
    margin: float
    low_confidence: bool = False


def make_base_body(n: int, a: float) -> RevolutionBody:
    """Origin-symmetric convex body of revolution used as the base of the
    construction: the unit ball flattened near the axis poles.

    Radial profile rho(u) = 1 - 2 a^{n-2} (1 - u^2 + u^2/a^2)^{-1/2}.
    The degree -1 extension has the closed-form transform
    c_n (1 - 2 a^{n-1} (1 - u^2 + a^2 u^2)^{-(n-1)/2}), attached as
    ft_profile; it is negative in caps around u = +-1, so the body is not
    an intersection body.
    """
    if n < 5:
        raise ValueError("base body defined for n >= 5")
    if not 0 < a < 1:
        raise ValueError("flattening parameter a must lie in (0, 1)")
    # subtracted term peaks at u = 0 with value 2 a^{n-2}
    if 1 - 2 * a ** (n - 2) <= 0:
        raise ValueError("profile not positive: a too large for this n")
    an2 = a ** (n - 2)
    an1 = a ** (n - 1)
    inv_a2 = 1.0 / (a * a)

    def rho(u):
        u = np.asarray(u)
        return 1.0 - 2 * an2 / np.sqrt(1 - u * u + u * u * inv_a2)

    def rho_du(u):
        u = np.asarray(u)
        D = 1 - u * u + u * u * inv_a2
        return 2 * an2 * (inv_a2 - 1) * u * D ** (-1.5)

    def rho_du2(u):
        u = np.asarray(u)
        g = inv_a2 - 1
        D = 1 - u * u + u * u * inv_a2
        return 2 * an2 * (g * D ** (-1.5) - 3 * g * g * u * u * D ** (-2.5))

    cn = _c_constant(n)

    def ft(u):
        u = np.asarray(u)
        return cn * (1.0 - 2 * an1 * (1 - u * u + a * a * u * u) ** (-(n - 1) / 2.0))

    prof = SphereProfile(n=n, eval=rho, parity="even",
                         smoothness_note="analytic", derivs=(rho_du, rho_du2))
    ftprof = SphereProfile(n=n, eval=ft, parity="even",
                           smoothness_note="closed form transform")
    return RevolutionBody(n=n, rho=prof, kind="base", params={"a": a},
                          ft_profile=ftprof)


def _c_constant(n: int) -> float:
    from .spherical_core import bochner_multiplier
    return bochner_multiplier(0, 1, n)


def curvature(body: RevolutionBody, grid: int = 4001,
              margin: float = 1e-6, max_degree: int = 120) -> ConvexityReport:
    """Minimum meridian curvature over a theta grid on [0, pi].

    The meridian curve theta -> rho(cos theta) (sin theta, cos theta) has
    curvature kappa = (rho^2 + 2 rho'^2 - rho rho'') / (rho^2 + rho'^2)^{3/2}
    with ' = d/d theta.  A body of revolution is convex iff its meridian is.
    u-derivatives come from attached closed forms when the profile carries
    them, otherwise by spectral differentiation of its expansion.  The
    coordinate poles are regular points of the formula (even extension in
    theta), so the inclusive endpoint grid covers them.
    """
    theta = np.linspace(0.0, np.pi, grid)
    u = np.cos(theta)
    st = np.sin(theta)
    low_confidence = False
    if body.rho.derivs is not None:
        r = np.asarray(body.rho(u), dtype=float)
        fu1 = np.asarray(body.rho.derivs[0](u), dtype=float)
        fu2 = np.asarray(body.rho.derivs[1](u), dtype=float)
    else:
        spec = expand(body.rho, body.n, max_degree)
        low_confidence = spec.truncation_warning
        r = eval_spectrum(spec, u)
        fu1 = eval_spectrum_deriv(spec, u, 1)
        fu2 = eval_spectrum_deriv(spec, u, 2)
    rp = -st * fu1
    rpp = st * st * fu2 - u * fu1
    kappa = (r * r + 2 * rp * rp - r * rpp) / (r * r + rp * rp) ** 1.5
    i = int(np.argmin(kappa))
    kmin = float(kappa[i])
    return ConvexityReport(kappa_min=kmin, argmin_theta=float(theta[i]),
                           is_convex=bool(kmin > margin), margin=margin,
                           low_confidence=low_confidence)


def volume(body: RevolutionBody, order: Optional[int] = None) -> float:
    """|K| = (|S^{n-2}| / n) int rho^n (1-u^2)^{(n-3)/2} du."""
    n = body.n
    q = gauss_jacobi(body.resolve_order(order), (n - 3) / 2)
    vals = np.asarray(body.rho(q.nodes), dtype=LD) ** n
    return float(sphere_area(n - 2) / n * (q.weights @ vals))


def centroid_axis(body: RevolutionBody, order: Optional[int] = None) -> float:
    """Axis component of the centroid; off-axis components vanish by
    rotational symmetry and are not computed.

    |K| <c, e_n> = (|S^{n-2}| / (n+1)) int u rho^{n+1} (1-u^2)^{(n-3)/2} du.
    """
    n = body.n
    q = gauss_jacobi(body.resolve_order(order), (n - 3) / 2)
    rho = np.asarray(body.rho(q.nodes), dtype=LD)
    num = sphere_area(n - 2) / (n + 1) * float(q.weights @ (q.nodes * rho ** (n + 1)))
    vol = sphere_area(n - 2) / n * float(q.weights @ rho ** n)
    return num / vol


def _section_parts(body: RevolutionBody, u_xi: float, order: Optional[int]):
    n = body.n
    q = gauss_jacobi(body.resolve_order(order), (n - 4) / 2)
    r = np.sqrt(max(0.0, 1.0 - float(u_xi) ** 2))
    t = q.nodes
    rho = np.asarray(body.rho(t * LD(r)), dtype=LD)
    sub = sphere_area(n - 3)
    # x_n on the subsphere is t * sqrt(1 - u_xi^2)
    num = sub / n * float(q.weights @ (t * LD(r) * rho ** n))
    vol = sub / (n - 1) * float(q.weights @ rho ** (n - 1))
    return num, vol


def section_volume(body: RevolutionBody, u_xi: float,
                   order: Optional[int] = None) -> float:
    """(n-1)-volume of the hyperplane section through the origin orthogonal
    to a direction xi with <xi, e_n> = u_xi."""
    if body.n < 5:
        raise ValueError("section reduction implemented for n >= 5 only")
    _, vol = _section_parts(body, u_xi, order)
    return vol


def section_centroid_axis(body: RevolutionBody, u_xi: float,
                          order: Optional[int] = None) -> float:
    """Axis component of the centroid of the section orthogonal to xi.

    Well defined by rotational symmetry: any xi with the same <xi, e_n>
    gives a congruent section.
    """
    if body.n < 5:
        raise ValueError("section reduction implemented for n >= 5 only")
    num, vol = _section_parts(body, u_xi, order)
    return num / vol


def intersection_body_test(body: RevolutionBody, grid: int = 2001,
                           max_degree: int = 120,
                           order: Optional[int] = None,
                           rel_tol: float = 1e-9) -> dict:
    """Criterion for smooth origin-symmetric bodies: the body is an
    intersection body iff the transform of the degree -1 extension of its
    radial profile is nonnegative.

    Always evaluates the numerical spectral transform (an attached closed
    form, when present, is deliberately not consulted here so that test
    bodies and constructed bodies share one code path).
    """
    f = HomogeneousFunction(profile=body.rho, degree_p=1.0)
    fhat = ft_homogeneous(f, max_degree=max_degree, order=order)
    u = np.linspace(-1.0, 1.0, grid)
    vals = np.asarray(fhat.profile(u), dtype=float)
    i = int(np.argmin(vals))
    scale = float(np.max(np.abs(vals)))
    min_value = float(vals[i])
    return {
        "min_value": min_value,
        "argmin_u": float(u[i]),
        "is_intersection": bool(min_value >= -rel_tol * max(scale, 1e-300)),
        "truncation_warning": fhat.profile.spectrum.truncation_warning,
    }


def reflect_body(body: RevolutionBody) -> RevolutionBody:
    """Body with the profile reflected u -> -u."""
    rho = body.rho

    def ref_eval(u):
        return rho(np.negative(u))

    parity = rho.parity
    prof = SphereProfile(n=body.n, eval=ref_eval, parity=parity,
                         smoothness_note=rho.smoothness_note)
    return RevolutionBody(n=body.n, rho=prof, kind="custom",
                          params=dict(body.params), quad_order=body.quad_order)


# ---------------------------------------------------------------------------
# serialization

def body_to_dict(body: RevolutionBody, order: Optional[int] = None) -> dict:
    q = gauss_jacobi(body.resolve_order(order), (body.n - 3) / 2)
    u = np.asarray(q.nodes, dtype=float)
    rho = np.asarray(body.rho(u), dtype=float)
    return {
        "n": body.n,
        "kind": body.kind,
        "params": {k: float(v) for k, v in body.params.items()},
        "profile_samples": [[float(a), float(b)] for a, b in zip(u, rho)],
    }


def profile_csv_rows(body: RevolutionBody, grid: int = 1001) -> list:
    """Rows "u,rho,kappa" on a uniform theta grid, ascending in u."""
    theta = np.linspace(np.pi, 0.0, grid)
    u = np.cos(theta)
    if body.rho.derivs is not None:
        fu1 = np.asarray(body.rho.derivs[0](u), dtype=float)
        fu2 = np.asarray(body.rho.derivs[1](u), dtype=float)
        r = np.asarray(body.rho(u), dtype=float)
    else:
        spec = expand(body.rho, body.n, 120)
        r = eval_spectrum(spec, u)
        fu1 = eval_spectrum_deriv(spec, u, 1)
        fu2 = eval_spectrum_deriv(spec, u, 2)
    st = np.sin(theta)
    rp = -st * fu1
    rpp = st * st * fu2 - u * fu1
    kappa = (r * r + 2 * rp * rp - r * rpp) / (r * r + rp * rp) ** 1.5
    return [(float(a), float(b), float(k)) for a, b, k in zip(u, r, kappa)]
