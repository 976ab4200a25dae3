"""Exact first integrals for planar inverse-square trigonometric potentials.

Symbolic construction of the degree-lam polynomial integral of

    H = p_r^2/2 + (p_psi^2/2 + k / sin^2(lam*psi + psi0)) / r^2

via ladder operators, exact conservation and functional-independence proofs
over the rationals, and a symplectic numeric cross-check.
"""

from .diffring import C, CoeffExpr, K, ONE, RationalPoint, S, Term, ZERO, const, jet, term
from .dynamics import DriftReport, SimConfig, SingularityError, Trajectory
from .integrals import (
    ModelParams,
    build_binomial_integral,
    build_descendant,
    build_geodesic,
    build_H,
    build_H0,
    build_H1,
    build_H2,
    build_H3,
    build_H4,
    build_Hg,
    build_I,
    build_integral_set,
    build_L,
)
from .phasepoly import (
    OperatorSpec,
    P_PSI,
    P_R,
    P_Z,
    PhasePoly,
    apply_U,
    apply_XL,
    format_poly,
    op_power,
    partial,
    poisson,
    poly_from_json,
    poly_to_json,
    reflect,
)
from .verify import (
    PerturbationCase,
    RankReport,
    independence_minor,
    is_conserved,
    necessity_control,
    necessity_suite,
    proportionality,
    rank_at,
    sample_points,
)

__version__ = "0.1.0"
