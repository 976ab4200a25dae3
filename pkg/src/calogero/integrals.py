"""Builders for the named phase-space functions of the model.

The planar Hamiltonian is H = p_r^2/2 + (p_psi^2/2 + F(psi)) / r^2 with an
angular potential F; its angular part is L = p_psi^2/2 + F and its geodesic
part Hg drops F altogether.  In three dimensions the same potential gives the
Hamiltonian H0 = H + p_z^2/2 together with four quadratic integrals H1..H4
that hold for arbitrary F.  For the concrete potential F = k/s^2, s =
sin(lam*psi + psi0), the lam-th power of the ladder operator applied to
c = cos(lam*psi + psi0) produces one extra polynomial integral of degree lam,
which makes the system maximally superintegrable.  An equivalent explicit
double-binomial expression exists for odd degrees and is built here for
cross-comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .diffring import C, CoeffExpr, S, ZERO as C_ZERO, const, jet, r_pow, term
from .phasepoly import OperatorSpec, PhasePoly, apply_XL, op_power, poly_to_json

__all__ = [
    "ModelParams",
    "angular_potential",
    "hamiltonian_for",
    "build_H",
    "build_L",
    "build_Hg",
    "build_H0",
    "build_H1",
    "build_H2",
    "build_H3",
    "build_H4",
    "build_I",
    "build_descendant",
    "build_geodesic",
    "build_binomial_integral",
    "build_integral_set",
    "integral_set_to_json",
]


@dataclass(frozen=True)
class ModelParams:
    """Model configuration: degree lam, ladder weight mu (default 1/lam), F mode."""

    lam: int
    mu: Fraction | None = None
    f_mode: str = "specialized"
    dims: int = 2

    def __post_init__(self):
        if self.lam < 1:
            raise ValueError("lam must be a positive integer")
        if self.f_mode not in ("jet", "specialized", "zero"):
            raise ValueError(f"unknown f_mode {self.f_mode!r}")
        if self.dims not in (2, 3):
            raise ValueError("dims must be 2 or 3")
        object.__setattr__(
            self, "mu", Fraction(1, self.lam) if self.mu is None else Fraction(self.mu)
        )

    def op_spec(self) -> OperatorSpec:
        return OperatorSpec(self.mu, self.lam, self.f_mode)


def angular_potential(f_mode: str) -> CoeffExpr:
    """F as a jet symbol, as the concrete k/s^2, or zero."""
    if f_mode == "jet":
        return jet("F", 0)
    if f_mode == "specialized":
        return term(1, k=1, s=-2)
    if f_mode == "zero":
        return C_ZERO
    raise ValueError(f"unknown f_mode {f_mode!r}")


def hamiltonian_for(f_expr: CoeffExpr) -> PhasePoly:
    """Planar Hamiltonian p_r^2/2 + (p_psi^2/2 + F) / r^2 for an explicit F."""
    return PhasePoly(
        {
            (2, 0, 0): const(Fraction(1, 2)),
            (0, 2, 0): term(Fraction(1, 2), r=-2),
            (0, 0, 0): f_expr * r_pow(-2),
        }
    )


def build_H(params: ModelParams) -> PhasePoly:
    return hamiltonian_for(angular_potential(params.f_mode))


def build_L(params: ModelParams) -> PhasePoly:
    """Angular part p_psi^2/2 + F."""
    return PhasePoly(
        {(0, 2, 0): const(Fraction(1, 2)), (0, 0, 0): angular_potential(params.f_mode)}
    )


def build_Hg() -> PhasePoly:
    """Geodesic part (p_r^2 + p_psi^2/r^2) / 2."""
    return PhasePoly(
        {(2, 0, 0): const(Fraction(1, 2)), (0, 2, 0): term(Fraction(1, 2), r=-2)}
    )


def build_H0(params: ModelParams) -> PhasePoly:
    """3D Hamiltonian (p_r^2 + p_psi^2/r^2 + p_z^2)/2 + F/r^2."""
    _require_3d(params)
    f = angular_potential(params.f_mode)
    return PhasePoly(
        {
            (2, 0, 0): const(Fraction(1, 2)),
            (0, 2, 0): term(Fraction(1, 2), r=-2),
            (0, 0, 2): const(Fraction(1, 2)),
            (0, 0, 0): f * r_pow(-2),
        }
    )


def build_H1(params: ModelParams) -> PhasePoly:
    _require_3d(params)
    return PhasePoly({(0, 0, 2): const(Fraction(1, 2))})


def build_H2(params: ModelParams) -> PhasePoly:
    _require_3d(params)
    return PhasePoly(
        {(0, 2, 0): const(Fraction(1, 2)), (0, 0, 0): angular_potential(params.f_mode)}
    )


def build_H3(params: ModelParams) -> PhasePoly:
    """((r p_z - z p_r)^2 + (1 + z^2/r^2) p_psi^2)/2 + (1 + z^2/r^2) F."""
    _require_3d(params)
    f = angular_potential(params.f_mode)
    one_plus = const(1) + term(1, r=-2, z=2)
    return PhasePoly(
        {
            (0, 0, 2): term(Fraction(1, 2), r=2),
            (1, 0, 1): term(-1, r=1, z=1),
            (2, 0, 0): term(Fraction(1, 2), z=2),
            (0, 2, 0): one_plus.scale(Fraction(1, 2)),
            (0, 0, 0): one_plus * f,
        }
    )


def build_H4(params: ModelParams) -> PhasePoly:
    """(z p_r^2 + (z/r^2) p_psi^2 - r p_r p_z)/2 + (z/r^2) F."""
    _require_3d(params)
    f = angular_potential(params.f_mode)
    return PhasePoly(
        {
            (2, 0, 0): term(Fraction(1, 2), z=1),
            (0, 2, 0): term(Fraction(1, 2), r=-2, z=1),
            (1, 0, 1): term(Fraction(-1, 2), r=1),
            (0, 0, 0): term(1, r=-2, z=1) * f,
        }
    )


def _require_3d(params: ModelParams) -> None:
    if params.dims != 3:
        raise ValueError("this integral lives in the 3D model; use dims=3")


def build_I(params: ModelParams) -> PhasePoly:
    """Degree-lam integral: the lam-th ladder power applied to c.

    Defined for positive integer lam with mu = 1/lam and the concrete
    potential; the leading p_r^lam coefficient comes out as exactly c.
    """
    if params.lam < 1:
        raise ValueError("lam must be a positive integer")
    if params.f_mode != "specialized":
        raise ValueError("the ladder integral needs the concrete potential k/s^2")
    if params.mu != Fraction(1, params.lam):
        raise ValueError("the ladder integral needs mu = 1/lam")
    return op_power(PhasePoly.constant(C), params.op_spec(), params.lam, "U")


def build_descendant(params: ModelParams, nu: int) -> PhasePoly:
    """nu-fold angular vector field applied to the ladder integral; conserved for every nu."""
    if nu < 0:
        raise ValueError("nu must be non-negative")
    return op_power(build_I(params), params.op_spec(), nu, "XL")


def build_geodesic(lam: int) -> PhasePoly:
    """(p_r + p_psi/(lam r) d/dpsi)^lam c: integral of the geodesic part Hg.

    Equals the top momentum-degree part of the full ladder integral.
    """
    if lam < 1:
        raise ValueError("lam must be a positive integer")
    return op_power(PhasePoly.constant(C), OperatorSpec.geodesic(lam), lam, "U")


def build_binomial_integral(n: int) -> PhasePoly:
    """Explicit double-binomial expression of degree lam = 2n + 1 (phase psi0 = 0).

    Sum over sigma = 0..n and i = 0..l, l = 2 sigma + 1, of

        p_r^i p_psi^(l-i) r^(i-lam) (-2F)^(n-sigma) C(lam, i)
            * C((lam-i)//2, (l-i)//2) * ((1/lam) d/dpsi)^(l-i) c,

    with F = k/s^2.  The scaled derivative cycles c -> -s -> -c -> s.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    lam = 2 * n + 1
    minus_two_f = term(-2, k=1, s=-2)
    cycle = (C, -S, -C, S)
    parts = []
    for sigma in range(n + 1):
        l = 2 * sigma + 1
        f_pow = minus_two_f ** (n - sigma)
        for i in range(l + 1):
            binom = math.comb(lam, i) * math.comb((lam - i) // 2, (l - i) // 2)
            if binom == 0:
                continue
            coeff = f_pow * cycle[(l - i) % 4] * r_pow(i - lam) * Fraction(binom)
            parts.append(((i, l - i, 0), coeff))
    return PhasePoly(parts)


def build_integral_set(params: ModelParams) -> dict:
    """Named bundle of every built integral, all over the 3D phase space."""
    p3 = ModelParams(params.lam, params.mu, params.f_mode, dims=3)
    p2 = ModelParams(params.lam, params.mu, params.f_mode, dims=2)
    out = {
        "H0": build_H0(p3),
        "H1": build_H1(p3),
        "H2": build_H2(p3),
        "H3": build_H3(p3),
        "H4": build_H4(p3),
        "H": build_H(p2),
        "L": build_L(p2),
        "Hg": build_Hg(),
    }
    if params.f_mode == "specialized" and params.mu == Fraction(1, params.lam):
        out["I"] = build_I(p2)
    return out


def integral_set_to_json(integrals: dict, dims: int = 3) -> dict:
    return {name: poly_to_json(poly, dims) for name, poly in sorted(integrals.items())}
