"""Run configuration shared by the construction pipeline and the CLI."""

from dataclasses import dataclass, field, asdict
from typing import Optional


def default_tolerances() -> dict:
    return {
        "quadrature_exactness": 1e-12,
        "roundtrip_rel": 1e-8,
        "route_agreement_rel": 1e-7,
        "parseval_rel": 1e-8,
        "equator_rel": 1e-8,
        "identity_rel": 1e-6,
        "root_abs": 1e-13,
        "convexity_margin": 1e-6,
        "pole_section_abs": 1e-12,
        "symmetric_rel": 1e-10,
        "branch_consistency_rel": 1e-9,
        "tail_warn_rel": 1e-6,
        "intersection_rel": 1e-9,
    }


@dataclass
class RunConfig:
    """Numerical parameters for one end-to-end run.

    ``a`` is the flattening parameter of the base body; ``None`` selects the
    largest candidate whose convexity certificate passes with margin.
    """

    n: int = 5
    a: Optional[float] = None
    eps: float = 1e-3
    cap_margin: float = 0.5
    quad_order: int = 256
    max_degree: int = 120
    alpha_grid: int = 721
    seed: int = 0x5EED
    tolerances: dict = field(default_factory=default_tolerances)

    # spectral resolution for the compactly supported cap bump; its Gegenbauer
    # coefficients decay sub-geometrically, so it needs far more degrees than
    # the analytic profiles covered by max_degree
    bump_max_degree: int = 3200
    bump_quad_pad: int = 192

    # subsphere quadrature for section sweeps of the perturbed body; must
    # resolve polynomial degree bump_max_degree to avoid aliasing
    section_quad_order: int = 1728

    # dense grid backing the fast evaluator used inside the section sweep
    dense_eval_grid: int = 80001

    u_switch: float = 0.05
    gl_order: int = 96
    curvature_grid: int = 4001
    equator_grid: int = 2001
    eps_max_halvings: int = 20
    root_max_iter: int = 200
    plot_grid: int = 1001
    planar_resolution: int = 4096
    planar_theta_tol: float = 1e-10

    auto_a_candidates: tuple = (0.5, 0.4, 0.3, 0.2, 0.1, 0.05)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["auto_a_candidates"] = list(self.auto_a_candidates)
        return d

    def validate(self):
        if self.n < 5:
            raise ValueError(
                "construction requires dimension n >= 5; no body of this kind "
                "exists for n = 3 or 4")
        if self.a is not None and not 0 < self.a < 1:
            raise ValueError("a must lie in (0, 1)")
        if not 0 < self.cap_margin < 1:
            raise ValueError("cap_margin must lie in (0, 1)")
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.quad_order < 2 or self.max_degree < 0:
            raise ValueError("bad quadrature order or degree")
        return self
