"""Polynomials in the momenta (p_r, p_psi, p_z) over the exact coefficient ring.

A ``PhasePoly`` maps momentum exponent triples (i_r, i_psi, i_z) to nonzero
``CoeffExpr`` coefficients; the empty map is the zero polynomial.  On top of
the ring arithmetic this module provides the canonical Poisson bracket with
convention {A, B} = sum(dA/dq dB/dp - dA/dp dB/dq), the angular vector field

    XL f = p_psi * df/dpsi - F' * df/dp_psi,

the degree-raising ladder operator

    U f = p_r * f + (mu / r) * XL f,

iterated operator powers, and the half-period reflection (s, c) -> (-s, -c).

Because s and c carry the frequency lam inside their argument, every psi
derivative (and hence every bracket) takes ``lam`` explicitly.  For purely
formal (jet) coefficients the value of ``lam`` is irrelevant but still
required, which keeps the frequency from being silently defaulted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .diffring import CoeffExpr, RationalPoint, ZERO as C_ZERO, const, format_term_magnitude, format_expr, jet, term

__all__ = [
    "PhasePoly",
    "OperatorSpec",
    "P_R",
    "P_PSI",
    "P_Z",
    "partial",
    "poisson",
    "apply_XL",
    "apply_U",
    "op_power",
    "reflect",
    "format_poly",
    "poly_to_json",
    "poly_from_json",
]

MOMENTUM_VARS = ("pr", "ppsi", "pz")
POSITION_VARS = ("r", "psi", "z")


class PhasePoly:
    """Momentum polynomial with CoeffExpr coefficients (immutable)."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping | Iterable = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        acc: dict = {}
        for key, coeff in items:
            ir, ipsi, iz = key
            if ir < 0 or ipsi < 0 or iz < 0:
                raise ValueError(f"negative momentum exponent in {key}")
            if not isinstance(coeff, CoeffExpr):
                coeff = const(coeff)
            key = (ir, ipsi, iz)
            acc[key] = acc[key] + coeff if key in acc else coeff
        self._coeffs = {k: v for k, v in acc.items() if not v.is_zero}

    @classmethod
    def zero(cls) -> "PhasePoly":
        return cls()

    @classmethod
    def constant(cls, coeff) -> "PhasePoly":
        return cls({(0, 0, 0): coeff})

    # ---- inspection -------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    def coeff(self, key) -> CoeffExpr:
        return self._coeffs.get(tuple(key), C_ZERO)

    def items(self) -> list:
        """(key, coefficient) pairs in canonical (descending) key order."""
        return sorted(self._coeffs.items(), key=lambda kv: kv[0], reverse=True)

    def momentum_keys(self) -> list:
        return sorted(self._coeffs, reverse=True)

    def degree(self) -> int:
        """Total momentum degree; -1 for the zero polynomial."""
        return max((sum(k) for k in self._coeffs), default=-1)

    def degree_pr(self) -> int:
        return max((k[0] for k in self._coeffs), default=-1)

    def top_degree_part(self) -> "PhasePoly":
        d = self.degree()
        return PhasePoly({k: v for k, v in self._coeffs.items() if sum(k) == d})

    def __eq__(self, other) -> bool:
        return isinstance(other, PhasePoly) and self._coeffs == other._coeffs

    # ---- arithmetic -------------------------------------------------------

    def __add__(self, other: "PhasePoly") -> "PhasePoly":
        if not isinstance(other, PhasePoly):
            return NotImplemented
        out = dict(self._coeffs)
        for key, coeff in other._coeffs.items():
            out[key] = out[key] + coeff if key in out else coeff
        return PhasePoly(out)

    def __sub__(self, other: "PhasePoly") -> "PhasePoly":
        return self + (-other)

    def __neg__(self) -> "PhasePoly":
        return self.map_coeffs(lambda e: -e)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, CoeffExpr):
            other = PhasePoly.constant(other)
        if not isinstance(other, PhasePoly):
            return NotImplemented
        out: dict = {}
        for (a1, a2, a3), ca in self._coeffs.items():
            for (b1, b2, b3), cb in other._coeffs.items():
                key = (a1 + b1, a2 + b2, a3 + b3)
                piece = ca * cb
                out[key] = out[key] + piece if key in out else piece
        return PhasePoly(out)

    __rmul__ = __mul__

    def scale(self, rho) -> "PhasePoly":
        rho = Fraction(rho)
        return self.map_coeffs(lambda e: e.scale(rho))

    def map_coeffs(self, fn) -> "PhasePoly":
        return PhasePoly({k: fn(v) for k, v in self._coeffs.items()})

    # ---- ring morphisms ---------------------------------------------------

    def specialize_jets(self, lam: int) -> "PhasePoly":
        return self.map_coeffs(lambda e: e.specialize_jets(lam))

    def reflect(self) -> "PhasePoly":
        return self.map_coeffs(lambda e: e.reflect())

    @property
    def has_jets(self) -> bool:
        return any(v.has_jets for v in self._coeffs.values())

    # ---- evaluation ---------------------------------------------------------

    def eval_exact(self, pt: RationalPoint) -> Fraction:
        total = Fraction(0)
        for (ir, ipsi, iz), coeff in self._coeffs.items():
            val = coeff.eval_exact(pt)
            if ir:
                val *= pt.p_r ** ir
            if ipsi:
                val *= pt.p_psi ** ipsi
            if iz:
                val *= pt.p_z ** iz
            total += val
        return total

    def eval_float(
        self,
        r: float,
        psi: float,
        z: float,
        pr: float,
        ppsi: float,
        pz: float,
        k: float,
        lam: int,
        psi0: float = 0.0,
    ) -> float:
        total = 0.0
        for (ir, ipsi, iz), coeff in self._coeffs.items():
            val = coeff.eval_float(r, psi, z, k, lam, psi0)
            if ir:
                val *= pr ** ir
            if ipsi:
                val *= ppsi ** ipsi
            if iz:
                val *= pz ** iz
            total += val
        return total

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"PhasePoly({format_poly(self)})"


P_R = PhasePoly({(1, 0, 0): 1})
P_PSI = PhasePoly({(0, 1, 0): 1})
P_Z = PhasePoly({(0, 0, 1): 1})


# ---- differentiation and the bracket ----------------------------------------


def partial(f: PhasePoly, var: str, lam: int | None = None) -> PhasePoly:
    """Partial derivative with respect to one of r, psi, z, pr, ppsi, pz."""
    if var in MOMENTUM_VARS:
        slot = MOMENTUM_VARS.index(var)
        out = {}
        for key, coeff in f._coeffs.items():
            e = key[slot]
            if e:
                nk = list(key)
                nk[slot] = e - 1
                out[tuple(nk)] = coeff.scale(e)
        return PhasePoly(out)
    if var == "r":
        return f.map_coeffs(lambda c: c.d_r())
    if var == "z":
        return f.map_coeffs(lambda c: c.d_z())
    if var == "psi":
        if lam is None:
            raise ValueError("the psi derivative needs the frequency lam")
        return f.map_coeffs(lambda c: c.d_psi(lam))
    raise ValueError(f"unknown variable {var!r}")


def poisson(a: PhasePoly, b: PhasePoly, dims: int = 2, *, lam: int) -> PhasePoly:
    """{a, b} over the pairs (r, p_r), (psi, p_psi) and, when dims=3, (z, p_z)."""
    if dims not in (2, 3):
        raise ValueError("dims must be 2 or 3")
    pairs = [("r", "pr"), ("psi", "ppsi")]
    if dims == 3:
        pairs.append(("z", "pz"))
    total = PhasePoly.zero()
    for q, p in pairs:
        total = total + partial(a, q, lam) * partial(b, p) - partial(a, p) * partial(b, q, lam)
    return total


# ---- the ladder and angular operators ----------------------------------------


@dataclass(frozen=True)
class OperatorSpec:
    """Parameters of the angular/ladder operators.

    ``f_mode`` selects the angular potential F inside XL: "jet" keeps it a
    formal symbol, "specialized" uses k/s^2, "zero" removes it (the geodesic
    operator), and "custom" takes an explicit expression (used to perturb the
    defining conditions).  ``mu`` defaults to 1/lam, the value for which the
    lam-th ladder power of c is conserved.
    """

    mu: Fraction
    lam: int
    f_mode: str = "specialized"
    f_expr: CoeffExpr | None = None

    def __post_init__(self):
        if self.lam < 1:
            raise ValueError("lam must be a positive integer")
        if self.f_mode not in ("jet", "specialized", "zero", "custom"):
            raise ValueError(f"unknown f_mode {self.f_mode!r}")
        if (self.f_mode == "custom") != (self.f_expr is not None):
            raise ValueError("custom mode requires f_expr (and only custom mode may set it)")
        object.__setattr__(self, "mu", Fraction(self.mu))

    @classmethod
    def jet(cls, lam: int, mu=None) -> "OperatorSpec":
        return cls(Fraction(1, lam) if mu is None else mu, lam, "jet")

    @classmethod
    def specialized(cls, lam: int, mu=None) -> "OperatorSpec":
        return cls(Fraction(1, lam) if mu is None else mu, lam, "specialized")

    @classmethod
    def geodesic(cls, lam: int) -> "OperatorSpec":
        return cls(Fraction(1, lam), lam, "zero")

    @classmethod
    def custom(cls, lam: int, f_expr: CoeffExpr, mu=None) -> "OperatorSpec":
        return cls(Fraction(1, lam) if mu is None else mu, lam, "custom", f_expr)

    def f_of(self) -> CoeffExpr:
        if self.f_mode == "jet":
            return jet("F", 0)
        if self.f_mode == "specialized":
            return term(1, k=1, s=-2)
        if self.f_mode == "zero":
            return C_ZERO
        return self.f_expr

    def f_dot(self) -> CoeffExpr:
        return self.f_of().d_psi(self.lam)


def apply_XL(f: PhasePoly, spec: OperatorSpec) -> PhasePoly:
    """Angular vector field: p_psi * df/dpsi - F' * df/dp_psi."""
    out = P_PSI * partial(f, "psi", spec.lam)
    fdot = spec.f_dot()
    if not fdot.is_zero:
        out = out - PhasePoly.constant(fdot) * partial(f, "ppsi")
    return out


def apply_U(f: PhasePoly, spec: OperatorSpec) -> PhasePoly:
    """Ladder operator: p_r * f + (mu / r) * XL f; raises the p_r degree by one."""
    return P_R * f + PhasePoly.constant(term(spec.mu, r=-1)) * apply_XL(f, spec)


def op_power(f: PhasePoly, spec: OperatorSpec, n: int, which: str = "U") -> PhasePoly:
    """n-fold application of U or XL; n = 0 returns f unchanged."""
    if n < 0:
        raise ValueError("operator power must be non-negative")
    if which not in ("U", "XL"):
        raise ValueError(f"unknown operator {which!r}")
    op = apply_U if which == "U" else apply_XL
    out = f
    for _ in range(n):
        out = op(out, spec)
    return out


def reflect(f: PhasePoly) -> PhasePoly:
    """Half-period angle shift, (s, c) -> (-s, -c); an involution."""
    return f.reflect()


# ---- rendering ------------------------------------------------------------


def _momentum_str(key) -> str:
    ir, ipsi, iz = key
    toks = []
    for tok, e in (("p_r", ir), ("p_psi", ipsi), ("p_z", iz)):
        if e == 1:
            toks.append(tok)
        elif e > 1:
            toks.append(f"{tok}^{e}")
    return "*".join(toks)


def format_poly(f: PhasePoly) -> str:
    """Deterministic text rendering, e.g. "c*p_r - (s/r)*p_psi"."""
    if f.is_zero:
        return "0"
    pieces = []
    for key, coeff in f.items():
        mono = _momentum_str(key)
        terms = coeff.terms
        if len(terms) == 1:
            sign = "-" if terms[0].q < 0 else "+"
            body = format_term_magnitude(terms[0])
        else:
            sign = "+"
            body = "(" + format_expr(coeff) + ")"
        if mono:
            if body == "1":
                text = mono
            else:
                if "/" in body and not body.startswith("("):
                    body = f"({body})"
                text = f"{body}*{mono}"
        else:
            text = body
        pieces.append((sign, text))
    first_sign, first_text = pieces[0]
    out = ("-" if first_sign == "-" else "") + first_text
    for sign, text in pieces[1:]:
        out += (" - " if sign == "-" else " + ") + text
    return out


# ---- serialization -----------------------------------------------------------


def poly_to_json(f: PhasePoly, dims: int = 2) -> dict:
    """JSON object {"dims": ..., "terms": [...]} in canonical key order."""
    if dims not in (2, 3):
        raise ValueError("dims must be 2 or 3")
    terms = [
        {"pr": key[0], "ppsi": key[1], "pz": key[2], "coeff": coeff.to_json_terms()}
        for key, coeff in f.items()
    ]
    return {"dims": dims, "terms": terms}


def poly_from_json(obj: dict) -> tuple:
    poly = PhasePoly(
        [
            ((rec["pr"], rec["ppsi"], rec["pz"]), CoeffExpr.from_json_terms(rec["coeff"]))
            for rec in obj["terms"]
        ]
    )
    return poly, obj["dims"]
