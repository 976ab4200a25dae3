"""Exact verification: conservation tests, proportionality, Jacobian rank, minors.

Everything here is tolerance-free.  Conservation is decided by canonical
vanishing of a Poisson bracket; functional independence is certified by the
exact rank of the Jacobian evaluated at exact rational points whose (s, c)
pair is Pythagorean; rank is computed by division-free elimination over the
integers.  The necessity suite perturbs each of the three defining conditions

    lam * mu = 1,      mu * G'' + lam * G = 0,      2 lam F G - mu F' G' = 0

one at a time and checks that the bracket residual becomes nonzero, while the
unperturbed control stays zero.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .diffring import C, CoeffExpr, RationalPoint, S, term
from .integrals import ModelParams, build_I, hamiltonian_for
from .phasepoly import OperatorSpec, P_PSI, P_R, PhasePoly, op_power, partial, poisson

__all__ = [
    "is_conserved",
    "proportionality",
    "jacobian",
    "rank_at",
    "RankReport",
    "exact_rank",
    "sample_points",
    "PYTHAGOREAN_PAIRS",
    "VARS_2D",
    "VARS_3D",
    "independence_minor",
    "minor_for",
    "bracket_residual",
    "PerturbationCase",
    "necessity_suite",
    "necessity_control",
]

PYTHAGOREAN_PAIRS = (
    (Fraction(3, 5), Fraction(4, 5)),
    (Fraction(5, 13), Fraction(12, 13)),
    (Fraction(8, 17), Fraction(15, 17)),
)

VARS_2D = ("pr", "ppsi", "r", "psi")
VARS_3D = ("r", "psi", "z", "pr", "ppsi", "pz")


def is_conserved(h: PhasePoly, q: PhasePoly, dims: int = 2, *, lam: int) -> bool:
    """Exact decision: does {h, q} canonicalize to the zero polynomial?"""
    return poisson(h, q, dims, lam=lam).is_zero


def proportionality(a: PhasePoly, b: PhasePoly):
    """The rational rho with a = rho * b, if one exists; None otherwise."""
    if b.is_zero:
        raise ValueError("b must be nonzero")
    if a.is_zero:
        return Fraction(0)
    key, coeff_b = b.items()[0]
    ref_b = coeff_b.terms[0]
    coeff_a = a.coeff(key)
    rho = None
    for t in coeff_a.terms:
        if t.key() == ref_b.key():
            rho = t.q / ref_b.q
            break
    if rho is None:
        return None
    return rho if a == b.scale(rho) else None


def jacobian(fs, var_names, *, lam: int) -> list:
    """Matrix of partials: entry (i, j) = d fs[i] / d var_names[j]."""
    return [[partial(f, v, lam) for v in var_names] for f in fs]


def exact_rank(mat) -> int:
    """Exact rank of a matrix of Fractions via division-free integer elimination."""
    rows = []
    for row in mat:
        row = [Fraction(x) for x in row]
        lcm = 1
        for x in row:
            lcm = lcm * x.denominator // math.gcd(lcm, x.denominator)
        rows.append([int(x * lcm) for x in row])
    m = len(rows)
    n = len(rows[0]) if m else 0
    rank = 0
    pr = 0
    for col in range(n):
        piv = next((i for i in range(pr, m) if rows[i][col]), None)
        if piv is None:
            continue
        rows[pr], rows[piv] = rows[piv], rows[pr]
        pivot = rows[pr][col]
        for i in range(pr + 1, m):
            head = rows[i][col]
            if head:
                rows[i] = [rows[i][j] * pivot - rows[pr][j] * head for j in range(n)]
        pr += 1
        rank += 1
        if pr == m:
            break
    return rank


@dataclass(frozen=True)
class RankReport:
    names: tuple
    point: RationalPoint
    shape: tuple
    rank: int

    def to_json(self) -> dict:
        return {
            "functions": list(self.names),
            "point": {
                f: str(getattr(self.point, f))
                for f in ("r", "z", "p_r", "p_psi", "p_z", "k", "s", "c")
            },
            "shape": list(self.shape),
            "rank": self.rank,
        }


def rank_at(fs, var_names, pt: RationalPoint, *, lam: int, names=None) -> RankReport:
    """Exact rank of the Jacobian of fs w.r.t. var_names at the rational point."""
    rows = [
        [entry.eval_exact(pt) for entry in row] for row in jacobian(fs, var_names, lam=lam)
    ]
    if names is None:
        names = tuple(f"f{i}" for i in range(len(fs)))
    return RankReport(tuple(names), pt, (len(fs), len(var_names)), exact_rank(rows))


def sample_points(seed: int, count: int, *, with_z: bool = True) -> list:
    """Deterministic admissible points: Pythagorean (s, c), small nonzero rationals."""
    rng = random.Random(seed)

    def small(positive: bool = False) -> Fraction:
        while True:
            num = rng.randint(-6, 6)
            den = rng.randint(1, 4)
            if num:
                return Fraction(abs(num) if positive else num, den)

    pts = []
    for _ in range(count):
        s, c = rng.choice(PYTHAGOREAN_PAIRS)
        pts.append(
            RationalPoint(
                r=small(),
                z=small() if with_z else Fraction(0),
                p_r=small(),
                p_psi=small(),
                p_z=small() if with_z else Fraction(0),
                k=small(positive=True),
                s=s,
                c=c,
            )
        )
    return pts


# ---- the independence minor ----------------------------------------------


def minor_for(f: PhasePoly) -> PhasePoly:
    """p_psi * (p_r * df/dr + (2L/r^3) * df/dp_r) for the concrete potential.

    This is the 3x3 minor of the (H, L, f) Jacobian w.r.t. (p_r, p_psi, r)
    that certifies functional independence when nonzero.
    """
    two_l_over_r3 = PhasePoly(
        {(0, 2, 0): term(1, r=-3), (0, 0, 0): term(2, k=1, r=-3, s=-2)}
    )
    return P_PSI * (P_R * partial(f, "r") + two_l_over_r3 * partial(f, "pr"))


def independence_minor(lam: int) -> PhasePoly:
    """The independence minor evaluated on the degree-lam ladder integral."""
    return minor_for(build_I(ModelParams(lam)))


# ---- necessity of the defining conditions -----------------------------------


def bracket_residual(lam: int, mu: Fraction, f_expr: CoeffExpr, g_expr: CoeffExpr) -> PhasePoly:
    """{H_F, U^lam g} for the Hamiltonian and ladder operator built from F."""
    spec = OperatorSpec.custom(lam, f_expr, mu=mu)
    candidate = op_power(PhasePoly.constant(g_expr), spec, lam, "U")
    return poisson(hamiltonian_for(f_expr), candidate, 2, lam=lam)


@dataclass(frozen=True)
class PerturbationCase:
    """One perturbed build: which defining condition is broken and the residual."""

    label: str
    broken: str
    residual: PhasePoly

    @property
    def nonzero(self) -> bool:
        return not self.residual.is_zero

    def to_json(self) -> dict:
        return {
            "case": self.label,
            "broken_condition": self.broken,
            "residual_nonzero": self.nonzero,
            "residual_terms": len(self.residual.momentum_keys()),
        }


def necessity_suite(lam: int) -> list:
    """Three perturbed builds, each of which must leave a nonzero residual."""
    if lam < 2:
        raise ValueError("need lam >= 2 so that mu = 1 differs from 1/lam")
    f_ok = term(1, k=1, s=-2)
    return [
        PerturbationCase(
            "mu = 1",
            "lam*mu = 1",
            bracket_residual(lam, Fraction(1), f_ok, C),
        ),
        PerturbationCase(
            "G = s*c",
            "mu*G'' + lam*G = 0",
            bracket_residual(lam, Fraction(1, lam), f_ok, S * C),
        ),
        PerturbationCase(
            "F = k/s",
            "2*lam*F*G - mu*F'*G' = 0",
            bracket_residual(lam, Fraction(1, lam), term(1, k=1, s=-1), C),
        ),
    ]


def necessity_control(lam: int) -> PhasePoly:
    """Unperturbed build; the residual must canonicalize to zero."""
    return bracket_residual(lam, Fraction(1, lam), term(1, k=1, s=-2), C)
