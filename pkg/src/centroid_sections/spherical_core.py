"""Spectral machinery for rotationally invariant functions on the sphere.

A function on S^{n-1} that is invariant under rotations about the last
coordinate axis is a function of u = <xi, e_n>.  Everything here works with
that one-dimensional representation:

  - Gauss-Jacobi quadrature against the weight (1-u^2)^beta,
  - expansion in Gegenbauer polynomials C_m^lambda with lambda = (n-2)/2,
  - the diagonal multiplier action realizing the Fourier transform of
    homogeneous extensions |x|^{-p} f(x/|x|) for 0 < p < n,
  - the great-subsphere (Radon) integral and the transform route through it,
  - a Parseval-type pairing residual.

Convention: forward transform kernel e^{-i<x,y>} with no 2*pi factor, so a
double transform of an even function multiplies by (2*pi)^n.  For odd
profiles the transform carries an extra factor -i which is dropped here; the
returned multiplier is real and composes to (2*pi)^n under double
application just like the even case.

Internal arithmetic runs in extended precision (numpy longdouble).  The
multiplier grows like m^{(n-2)/2} relative to c_n, which amplifies
coefficient noise near u = +-1; 64-bit coefficients would cap pole accuracy
near 1e-9 while extended precision reaches ~1e-13.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.special import gammaln, roots_jacobi

LD = np.longdouble

__all__ = [
    "GegenbauerSpectrum", "SphereProfile", "SpectrumProfile",
    "HomogeneousFunction", "Quadrature", "gauss_jacobi", "sphere_area",
    "sphere_integral", "expand", "eval_spectrum", "eval_spectrum_deriv",
    "bochner_multiplier", "ft_homogeneous", "radon_subsphere",
    "ft_via_radon", "parseval_residual", "spectrum_to_dict",
    "spectrum_from_dict",
]


# ---------------------------------------------------------------------------
# domain types

@dataclass
class SphereProfile:
    """Restriction of a rotationally invariant sphere function to u in [-1,1].

    parity is one of "even", "odd", "mixed".  derivs, when present, holds
    callables for d/du, d2/du2, ... and is used by curvature code instead of
    spectral differentiation.
    """

    n: int
    eval: Callable
    parity: str = "mixed"
    smoothness_note: str = ""
    derivs: Optional[Sequence[Callable]] = None

    def __call__(self, u):
        return self.eval(u)

    def check_parity(self, u_samples, rtol=1e-10):
        u = np.asarray(u_samples, dtype=float)
        a = np.asarray(self.eval(u), dtype=float)
        b = np.asarray(self.eval(-u), dtype=float)
        scale = max(float(np.max(np.abs(a))), 1e-300)
        if self.parity == "even":
            return float(np.max(np.abs(a - b))) <= rtol * scale
        if self.parity == "odd":
            return float(np.max(np.abs(a + b))) <= rtol * scale
        return True


@dataclass
class GegenbauerSpectrum:
    n: int
    lambda_index: float
    coeffs: np.ndarray
    parity: str = "mixed"
    tail_rel: float = 0.0
    truncation_warning: bool = False

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs)
        if self.parity == "even" and np.any(self.coeffs[1::2] != 0):
            raise ValueError("even parity requires zero odd coefficients")
        if self.parity == "odd" and np.any(self.coeffs[0::2] != 0):
            raise ValueError("odd parity requires zero even coefficients")

    @property
    def max_degree(self) -> int:
        return len(self.coeffs) - 1


class SpectrumProfile(SphereProfile):
    """SphereProfile backed by a GegenbauerSpectrum."""

    def __init__(self, spectrum: GegenbauerSpectrum, smoothness_note=""):
        self.spectrum = spectrum
        super().__init__(n=spectrum.n, eval=self._eval,
                         parity=spectrum.parity,
                         smoothness_note=smoothness_note,
                         derivs=(lambda u: self.deriv(u, 1),
                                 lambda u: self.deriv(u, 2)))

    def _eval(self, u):
        return eval_spectrum(self.spectrum, u)

    def deriv(self, u, k: int):
        return eval_spectrum_deriv(self.spectrum, u, k)


@dataclass
class HomogeneousFunction:
    """Profile extended to R^n minus origin as |x|^{-p} profile(x/|x|)."""

    profile: SphereProfile
    degree_p: float

    def __post_init__(self):
        n = self.profile.n
        if not 0 < self.degree_p < n:
            raise ValueError("homogeneity degree must lie in (0, n)")

    @property
    def n(self) -> int:
        return self.profile.n


@dataclass
class Quadrature:
    order: int
    beta: float
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)


# ---------------------------------------------------------------------------
# Gegenbauer recurrences

def _gegenbauer_all(lam, u, max_degree, dtype=LD):
    """Value table C_0..C_max at points u, shape (max_degree+1, len(u)).

    Only used where the full table is affordable; bulk paths use the rolling
    accumulators below.
    """
    u = np.atleast_1d(np.asarray(u, dtype=dtype))
    lam = dtype(lam)
    T = np.empty((max_degree + 1, u.size), dtype=dtype)
    T[0] = 1.0
    if max_degree >= 1:
        T[1] = 2 * lam * u
    for m in range(2, max_degree + 1):
        T[m] = (2 * u * (m + lam - 1) * T[m - 1] - (m + 2 * lam - 2) * T[m - 2]) / m
    return T


def _norm_ratios(lam, max_degree, dtype=LD):
    """Norms h_m = integral of C_m^2 against (1-u^2)^(lam-1/2), by ratio
    recurrence from h_0 so only one gamma evaluation enters."""
    lam_f = float(lam)
    h = np.empty(max_degree + 1, dtype=dtype)
    h0 = np.sqrt(np.pi) * np.exp(gammaln(lam_f + 0.5) - gammaln(lam_f + 1.0))
    h[0] = dtype(h0)
    lam = dtype(lam)
    for m in range(1, max_degree + 1):
        h[m] = h[m - 1] * (m - 1 + 2 * lam) * (m - 1 + lam) / ((m + lam) * m)
    return h


def _rolling_accumulate(coeffs, lam, u, dtype=None):
    """Sum_m coeffs[m] C_m^lam(u) without materializing the table."""
    u = np.asarray(u)
    if dtype is None:
        dtype = np.result_type(coeffs.dtype, u.dtype, np.float64)
    u = u.astype(dtype, copy=False)
    lam = np.dtype(dtype).type(lam)
    c = np.asarray(coeffs, dtype=dtype)
    M = len(c) - 1
    acc = np.full(u.shape, c[0], dtype=dtype)
    if M == 0:
        return acc
    pm1 = np.ones_like(u)
    p = 2 * lam * u
    if c[1] != 0:
        acc += c[1] * p
    for m in range(2, M + 1):
        pm1, p = p, (2 * u * (m + lam - 1) * p - (m + 2 * lam - 2) * pm1) / m
        if c[m] != 0:
            acc += c[m] * p
    return acc


def _project_onto_basis(fw, lam, u, max_degree, norms, dtype=LD):
    """Coefficients <f, C_m>/h_m from weighted samples fw = f(u)*w."""
    u = np.asarray(u, dtype=dtype)
    fw = np.asarray(fw, dtype=dtype)
    lam = dtype(lam)
    out = np.empty(max_degree + 1, dtype=dtype)
    pm1 = np.ones_like(u)
    out[0] = fw.sum() / norms[0]
    if max_degree == 0:
        return out
    p = 2 * lam * u
    out[1] = (fw @ p) / norms[1]
    for m in range(2, max_degree + 1):
        pm1, p = p, (2 * u * (m + lam - 1) * p - (m + 2 * lam - 2) * pm1) / m
        out[m] = (fw @ p) / norms[m]
    return out


# ---------------------------------------------------------------------------
# quadrature

@lru_cache(maxsize=64)
def _gauss_jacobi_cached(order: int, beta: float):
    lam = beta + 0.5
    x64, w64 = roots_jacobi(order, beta, beta)
    x = x64.astype(LD)
    if lam > 0.05:
        # Newton refinement of the symmetric-Jacobi roots in extended
        # precision; float64 nodes would reintroduce the 1e-16 noise floor
        # that the longdouble pipeline exists to avoid.
        lamd = LD(lam)
        for _ in range(3):
            pm1 = np.ones_like(x)
            p = 2 * lamd * x
            for m in range(2, order + 1):
                pm1, p = p, (2 * x * (m + lamd - 1) * p - (m + 2 * lamd - 2) * pm1) / m
            # derivative via C'_Q = 2 lam C_{Q-1}^{lam+1}
            lam1 = lamd + 1
            qm1 = np.ones_like(x)
            q = 2 * lam1 * x
            for m in range(2, order):
                qm1, q = q, (2 * x * (m + lam1 - 1) * q - (m + 2 * lam1 - 2) * qm1) / m
            dq = 2 * lamd * (q if order >= 2 else qm1)
            x = x - p / dq
        h = _norm_ratios(lam, order)
        pm1 = np.ones_like(x)
        p = 2 * LD(lam) * x
        for m in range(2, order):
            pm1, p = p, (2 * x * (m + LD(lam) - 1) * p - (m + 2 * LD(lam) - 2) * pm1) / m
        CQm1 = p if order >= 2 else pm1
        lam1 = LD(lam) + 1
        qm1 = np.ones_like(x)
        q = 2 * lam1 * x
        for m in range(2, order):
            qm1, q = q, (2 * x * (m + lam1 - 1) * q - (m + 2 * lam1 - 2) * qm1) / m
        dCQ = 2 * LD(lam) * (q if order >= 2 else qm1)
        kratio = 2 * (LD(lam) + order - 1) / order
        w = kratio * h[order - 1] / (CQm1 * dCQ)
    else:
        w = w64.astype(LD)
    idx = np.argsort(x)
    return x[idx], w[idx]


def gauss_jacobi(order: int, beta: float) -> Quadrature:
    """Nodes and weights for the weight (1-u^2)^beta on (-1, 1).

    Exact for polynomials up to degree 2*order-1.  Nodes and weights are
    longdouble; downstream float64 consumers may cast freely.
    """
    if order < 2:
        raise ValueError("quadrature order must be at least 2")
    if beta <= -1:
        raise ValueError("Jacobi exponent must exceed -1")
    x, w = _gauss_jacobi_cached(int(order), float(beta))
    return Quadrature(order=order, beta=beta, nodes=x, weights=w)


def sphere_area(k: int) -> float:
    """Surface area of the unit sphere S^k in R^{k+1}."""
    return float(2 * np.pi ** ((k + 1) / 2) / np.exp(gammaln((k + 1) / 2)))


def sphere_integral(f, n: int, order: int = 256) -> float:
    """Integral over S^{n-1} of a rotationally invariant function.

    Reduces to |S^{n-2}| * int_{-1}^{1} f(u) (1-u^2)^{(n-3)/2} du.
    """
    if n < 3:
        raise ValueError("need ambient dimension n >= 3")
    q = gauss_jacobi(order, (n - 3) / 2)
    vals = np.asarray(f(q.nodes), dtype=LD)
    return float(sphere_area(n - 2) * (q.weights @ vals))


# ---------------------------------------------------------------------------
# expansion and evaluation

def expand(f, n: int, max_degree: int, order: Optional[int] = None,
           parity: Optional[str] = None,
           tail_warn_rel: float = 1e-6) -> GegenbauerSpectrum:
    """Expand a profile in C_m^{(n-2)/2} against the S^{n-1} surface weight.

    The tail estimate is the largest coefficient among the last 10% of
    degrees relative to the overall largest; a slowly decaying tail flags
    truncation_warning on the result rather than failing.
    """
    if max_degree < 0:
        raise ValueError("max_degree must be nonnegative")
    lam = (n - 2) / 2
    if parity is None:
        parity = getattr(f, "parity", "mixed")
    if order is None:
        order = max(256, max_degree + 64)
    q = gauss_jacobi(order, (n - 3) / 2)
    vals = np.asarray(f(q.nodes), dtype=LD)
    norms = _norm_ratios(lam, max_degree)
    co = _project_onto_basis(vals * q.weights, lam, q.nodes, max_degree, norms)
    if parity == "even":
        co[1::2] = 0
    elif parity == "odd":
        co[0::2] = 0
    amax = float(np.max(np.abs(co.astype(np.float64))))
    ntail = max(1, (max_degree + 1) // 10)
    tail = float(np.max(np.abs(co[-ntail:].astype(np.float64))))
    tail_rel = tail / amax if amax > 0 else 0.0
    return GegenbauerSpectrum(
        n=n, lambda_index=lam, coeffs=co, parity=parity, tail_rel=tail_rel,
        truncation_warning=bool(tail_rel > tail_warn_rel))


def eval_spectrum(s: GegenbauerSpectrum, u):
    """Evaluate the expansion at u via the three-term recurrence."""
    scalar = np.isscalar(u) or np.ndim(u) == 0
    out = _rolling_accumulate(s.coeffs, s.lambda_index, np.atleast_1d(u))
    out = out.astype(np.float64)
    return float(out[0]) if scalar else out


def eval_spectrum_deriv(s: GegenbauerSpectrum, u, k: int = 1):
    """k-th derivative d^k/du^k of the expansion.

    Uses d/du C_m^lam = 2 lam C_{m-1}^{lam+1}: the derivative series is the
    degree-shifted coefficient vector evaluated at parameter lam + k.
    """
    if k < 0:
        raise ValueError("derivative order must be nonnegative")
    if k == 0:
        return eval_spectrum(s, u)
    scalar = np.isscalar(u) or np.ndim(u) == 0
    lam = s.lambda_index
    co = s.coeffs
    if len(co) <= k:
        z = np.zeros(np.atleast_1d(u).shape)
        return 0.0 if scalar else z
    pref = np.prod([2 * (lam + j) for j in range(k)])
    out = pref * _rolling_accumulate(co[k:], lam + k, np.atleast_1d(u))
    out = out.astype(np.float64)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Fourier side

def _bochner_multipliers_ld(n: int, p: float, m_max: int) -> np.ndarray:
    """Multiplier vector for degrees 0..m_max in extended precision.

    Same values as bochner_multiplier but kept in longdouble so that
    coefficient-by-coefficient products do not round twice.
    """
    m_all = np.arange(m_max + 1)
    half = np.where(m_all % 2 == 0, m_all // 2, (m_all - 1) // 2)
    sign = np.where(half % 2 == 0, 1.0, -1.0).astype(LD)
    logmag = ((n / 2) * np.log(np.pi) + (n - p) * np.log(2.0)
              + gammaln((n - p + m_all) / 2) - gammaln((p + m_all) / 2))
    return sign * np.exp(logmag.astype(LD))


def bochner_multiplier(m, p: float, n: int):
    """Scalar action of the transform on harmonic degree m for |x|^{-p}.

    mu(m,p,n) = sign * pi^{n/2} 2^{n-p} Gamma((n-p+m)/2) / Gamma((p+m)/2)
    with sign (-1)^{m/2} for even m and (-1)^{(m-1)/2} for odd m (the odd
    case drops a factor -i, see module docstring).  Satisfies
    mu(m,p,n) * mu(m,n-p,n) = (2 pi)^n.
    """
    if not 0 < p < n:
        raise ValueError("need 0 < p < n for the distributional transform")
    m_arr = np.atleast_1d(np.asarray(m))
    if np.any(m_arr < 0):
        raise ValueError("harmonic degree must be nonnegative")
    half = np.where(m_arr % 2 == 0, m_arr // 2, (m_arr - 1) // 2)
    sign = np.where(half % 2 == 0, 1.0, -1.0)
    logmag = ((n / 2) * np.log(np.pi) + (n - p) * np.log(2.0)
              + gammaln((n - p + m_arr) / 2) - gammaln((p + m_arr) / 2))
    out = sign * np.exp(logmag.astype(LD))
    if np.isscalar(m) or np.ndim(m) == 0:
        return float(out[0])
    return out.astype(np.float64)


def _as_homogeneous(f, default_p=None):
    if isinstance(f, HomogeneousFunction):
        return f
    raise TypeError("expected a HomogeneousFunction")


def ft_homogeneous(f: HomogeneousFunction, max_degree: int = 120,
                   order: Optional[int] = None) -> HomogeneousFunction:
    """Transform of the degree -p extension, returned at degree -(n-p).

    Diagonal in the Gegenbauer expansion: coefficient m picks up
    bochner_multiplier(m, p, n).
    """
    f = _as_homogeneous(f)
    n = f.n
    p = f.degree_p
    spec = expand(f.profile, n, max_degree, order=order)
    mu = _bochner_multipliers_ld(n, p, max_degree)
    out = GegenbauerSpectrum(
        n=n, lambda_index=spec.lambda_index, coeffs=spec.coeffs * mu,
        parity=spec.parity, tail_rel=spec.tail_rel,
        truncation_warning=spec.truncation_warning)
    prof = SpectrumProfile(out, smoothness_note="spectral transform")
    return HomogeneousFunction(profile=prof, degree_p=n - p)


def radon_subsphere(f, n: int, u_xi: float, order: int = 256) -> float:
    """Integral of f over the great subsphere orthogonal to xi.

    With r = sqrt(1-u_xi^2), equals
    |S^{n-3}| int_{-1}^{1} f(t r) (1-t^2)^{(n-4)/2} dt.  Requires n >= 5 so
    the weight exponent is at least 1/2; lower dimensions need a different
    reduction and are rejected.
    """
    if n < 5:
        raise ValueError("subsphere reduction implemented for n >= 5 only")
    if not -1 <= u_xi <= 1:
        raise ValueError("u_xi must lie in [-1, 1]")
    q = gauss_jacobi(order, (n - 4) / 2)
    r = np.sqrt(max(0.0, 1.0 - float(u_xi) ** 2))
    vals = np.asarray(f(q.nodes * LD(r)), dtype=LD)
    return float(sphere_area(n - 3) * (q.weights @ vals))


def ft_via_radon(f: HomogeneousFunction, u_xi: float,
                 order: int = 256) -> float:
    """Pointwise transform of a degree -(n-1) extension via the subsphere
    route: pi times the great-subsphere integral of the profile."""
    f = _as_homogeneous(f)
    if abs(f.degree_p - (f.n - 1)) > 1e-9:
        raise ValueError("subsphere transform route needs degree n-1")
    return float(np.pi) * radon_subsphere(f.profile, f.n, u_xi, order=order)


def parseval_residual(f: HomogeneousFunction, g: HomogeneousFunction,
                      max_degree: int = 120, order: int = 256,
                      floor: float = 1e-30) -> float:
    """Residual of the sphere pairing identity for complementary degrees.

    For declared degrees p and n-p the transform acts at degree p on both
    profiles; the identity compared is
        int (T_p f) g  =  int f (T_p g)
    over S^{n-1}, each side computed by quadrature from pointwise values.
    Residual is |A - B| / max(|A|, |B|, floor).
    """
    f = _as_homogeneous(f)
    g = _as_homogeneous(g)
    n = f.n
    if g.n != n:
        raise ValueError("dimension mismatch")
    if abs((f.degree_p + g.degree_p) - n) > 1e-9:
        raise ValueError("degrees must be complementary: p and n - p")
    p = f.degree_p
    fhat = ft_homogeneous(f, max_degree=max_degree, order=order)
    ghat = ft_homogeneous(HomogeneousFunction(g.profile, p),
                          max_degree=max_degree, order=order)
    q = gauss_jacobi(order, (n - 3) / 2)
    x = q.nodes
    area = LD(sphere_area(n - 2))
    A = area * (q.weights @ (np.asarray(fhat.profile(x), dtype=LD)
                             * np.asarray(g.profile(x), dtype=LD)))
    B = area * (q.weights @ (np.asarray(f.profile(x), dtype=LD)
                             * np.asarray(ghat.profile(x), dtype=LD)))
    # difference taken before any float64 cast: for analytic pairs the
    # residual sits at the longdouble noise floor, well under 1e-16
    return float(abs(A - B) / max(abs(A), abs(B), LD(floor)))


# ---------------------------------------------------------------------------
# serialization

def spectrum_to_dict(s: GegenbauerSpectrum) -> dict:
    return {"n": s.n, "parity": s.parity,
            "coeffs": [float(c) for c in s.coeffs]}


def spectrum_from_dict(d: dict) -> GegenbauerSpectrum:
    n = int(d["n"])
    return GegenbauerSpectrum(
        n=n, lambda_index=(n - 2) / 2,
        coeffs=np.asarray(d["coeffs"], dtype=float), parity=d["parity"])
