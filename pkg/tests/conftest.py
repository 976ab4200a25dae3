"""Shared seeded generators for random ring elements and momentum polynomials."""

import random
from fractions import Fraction

from calogero.diffring import CoeffExpr, Term
from calogero.phasepoly import PhasePoly


def random_expr(rng: random.Random, allow_jets: bool = False, max_terms: int = 3) -> CoeffExpr:
    terms = []
    for _ in range(rng.randint(1, max_terms)):
        q = Fraction(rng.choice([x for x in range(-4, 5) if x]), rng.randint(1, 3))
        jets = ()
        if allow_jets and rng.random() < 0.5:
            jets = tuple(
                sorted((rng.choice("FG"), rng.randint(0, 2)) for _ in range(rng.randint(1, 2)))
            )
        terms.append(
            Term(
                q,
                rng.randint(0, 1),
                rng.randint(-2, 2),
                rng.randint(0, 2),
                rng.randint(-2, 2),
                rng.randint(0, 1),
                jets,
            )
        )
    return CoeffExpr(terms)


def random_psi_expr(rng: random.Random, allow_jets: bool = True, max_terms: int = 3) -> CoeffExpr:
    """Random function of psi only (no r, z): trig factors, coupling, optional jets."""
    terms = []
    for _ in range(rng.randint(1, max_terms)):
        q = Fraction(rng.choice([x for x in range(-4, 5) if x]), rng.randint(1, 3))
        jets = ()
        if allow_jets and rng.random() < 0.5:
            jets = tuple(
                sorted((rng.choice("FG"), rng.randint(0, 2)) for _ in range(rng.randint(1, 2)))
            )
        terms.append(Term(q, rng.randint(0, 1), 0, 0, rng.randint(-2, 2), rng.randint(0, 1), jets))
    return CoeffExpr(terms)


def random_poly(
    rng: random.Random,
    max_deg: int = 3,
    max_terms: int = 4,
    dims: int = 2,
    allow_jets: bool = False,
) -> PhasePoly:
    entries = []
    for _ in range(rng.randint(1, max_terms)):
        ir = rng.randint(0, max_deg)
        ipsi = rng.randint(0, max_deg - ir)
        iz = rng.randint(0, max_deg - ir - ipsi) if dims == 3 else 0
        entries.append(((ir, ipsi, iz), random_expr(rng, allow_jets)))
    return PhasePoly(entries)


def random_nonzero_poly(rng: random.Random, **kw) -> PhasePoly:
    while True:
        p = random_poly(rng, **kw)
        if not p.is_zero:
            return p
