"""Exact coefficient ring for functions of (r, psi, z).

Every scalar coefficient in this package lives in the commutative ring

    Q[k][r, 1/r, z, s, 1/s, c] / (c^2 + s^2 - 1)   (x)   jets,

where ``s`` and ``c`` stand for sin(lam*psi + psi0) and cos(lam*psi + psi0),
``k`` is a symbolic coupling constant, and the jets F0, F1, ..., G0, G1, ...
are formal derivative symbols of two unspecified functions of psi (F_d is the
d-th psi-derivative of F).  Keeping F and G formal lets conservation claims
be established for an arbitrary angular potential; ``specialize_jets``
substitutes the concrete pair F = k/s^2, G = c.

Expressions are kept in one canonical form: the cosine exponent is reduced
below 2 with c^2 = 1 - s^2 (s must stay a Laurent generator because the
potential carries negative sine powers), like terms are merged, zero terms
are dropped, and terms are sorted by their exponent key.  Equality is
structural and the zero test is emptiness.  The phase psi0 never appears in
the ring; it enters only through evaluation, where (s, c) receive values.

All values are immutable and every operation is pure, so expressions may be
shared freely between threads.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

__all__ = [
    "Term",
    "CoeffExpr",
    "RationalPoint",
    "ZERO",
    "ONE",
    "K",
    "S",
    "C",
    "term",
    "const",
    "jet",
    "r_pow",
    "z_pow",
    "s_pow",
    "format_expr",
]


class Term(NamedTuple):
    """One canonical monomial: q * k^k_exp * r^r_exp * z^z_exp * s^s_exp * c^c_exp * jets.

    ``jets`` lists one ("F"|"G", order) entry per factor, sorted; repeats
    encode multiplicity.  After canonicalization c_exp is 0 or 1.
    """

    q: Fraction
    k_exp: int = 0
    r_exp: int = 0
    z_exp: int = 0
    s_exp: int = 0
    c_exp: int = 0
    jets: tuple = ()

    def key(self):
        return (self.k_exp, self.r_exp, self.z_exp, self.s_exp, self.c_exp, self.jets)


def _canonical(terms: Iterable[Term]) -> tuple:
    """Merge like terms, eliminate c^2 via c^2 = 1 - s^2, sort, drop zeros."""
    acc: dict = {}
    for t in terms:
        if t.q == 0:
            continue
        if t.c_exp < 2:
            key = t[1:]
            acc[key] = acc.get(key, 0) + t.q
            continue
        half, rem = divmod(t.c_exp, 2)
        for j in range(half + 1):
            q = t.q * ((-1) ** j * math.comb(half, j))
            key = (t.k_exp, t.r_exp, t.z_exp, t.s_exp + 2 * j, rem, t.jets)
            acc[key] = acc.get(key, 0) + q
    out = [Term(q, *key) for key, q in acc.items() if q != 0]
    out.sort(key=lambda t: t[1:])
    return tuple(out)


def _merge_jets(a: tuple, b: tuple) -> tuple:
    return tuple(sorted(a + b)) if (a or b) else ()


class CoeffExpr:
    """Canonical element of the coefficient ring (immutable)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[Term] = ()):
        self.terms = _canonical(terms)

    @classmethod
    def _raw(cls, canonical_terms: tuple) -> "CoeffExpr":
        # fast path for terms already in canonical form
        e = object.__new__(cls)
        e.terms = canonical_terms
        return e

    # ---- ring structure -------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return isinstance(other, CoeffExpr) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __add__(self, other: "CoeffExpr") -> "CoeffExpr":
        if not isinstance(other, CoeffExpr):
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        return CoeffExpr(self.terms + other.terms)

    def __sub__(self, other: "CoeffExpr") -> "CoeffExpr":
        return self + (-other)

    def __neg__(self) -> "CoeffExpr":
        return CoeffExpr._raw(tuple(Term(-t.q, *t[1:]) for t in self.terms))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, CoeffExpr):
            return NotImplemented
        parts = []
        for a in self.terms:
            for b in other.terms:
                parts.append(
                    Term(
                        a.q * b.q,
                        a.k_exp + b.k_exp,
                        a.r_exp + b.r_exp,
                        a.z_exp + b.z_exp,
                        a.s_exp + b.s_exp,
                        a.c_exp + b.c_exp,
                        _merge_jets(a.jets, b.jets),
                    )
                )
        return CoeffExpr(parts)

    __rmul__ = __mul__

    def scale(self, rho) -> "CoeffExpr":
        rho = Fraction(rho)
        if rho == 0:
            return ZERO
        return CoeffExpr._raw(tuple(Term(t.q * rho, *t[1:]) for t in self.terms))

    def __pow__(self, n: int) -> "CoeffExpr":
        if n < 0:
            raise ValueError("only non-negative powers are defined")
        out = ONE
        for _ in range(n):
            out = out * self
        return out

    # ---- derivations -----------------------------------------------------

    def d_psi(self, lam: int) -> "CoeffExpr":
        """Derivation d/dpsi: s -> lam*c, c -> -lam*s, F_d -> F_{d+1}, G_d -> G_{d+1}."""
        if lam < 1:
            raise ValueError("lam must be a positive integer")
        parts = []
        for t in self.terms:
            if t.s_exp:
                parts.append(
                    Term(t.q * t.s_exp * lam, t.k_exp, t.r_exp, t.z_exp, t.s_exp - 1, t.c_exp + 1, t.jets)
                )
            if t.c_exp:
                parts.append(
                    Term(-t.q * t.c_exp * lam, t.k_exp, t.r_exp, t.z_exp, t.s_exp + 1, t.c_exp - 1, t.jets)
                )
            for i, (sym, d) in enumerate(t.jets):
                nj = tuple(sorted(t.jets[:i] + ((sym, d + 1),) + t.jets[i + 1 :]))
                parts.append(Term(t.q, t.k_exp, t.r_exp, t.z_exp, t.s_exp, t.c_exp, nj))
        return CoeffExpr(parts)

    def d_r(self) -> "CoeffExpr":
        parts = [
            Term(t.q * t.r_exp, t.k_exp, t.r_exp - 1, t.z_exp, t.s_exp, t.c_exp, t.jets)
            for t in self.terms
            if t.r_exp
        ]
        return CoeffExpr(parts)

    def d_z(self) -> "CoeffExpr":
        parts = [
            Term(t.q * t.z_exp, t.k_exp, t.r_exp, t.z_exp - 1, t.s_exp, t.c_exp, t.jets)
            for t in self.terms
            if t.z_exp
        ]
        return CoeffExpr(parts)

    # ---- jet handling ----------------------------------------------------

    @property
    def has_jets(self) -> bool:
        return any(t.jets for t in self.terms)

    def specialize_jets(self, lam: int) -> "CoeffExpr":
        """Replace every F_d by the d-th psi-derivative of k/s^2 and G_d by that of c."""
        if not self.has_jets:
            return self
        chains = {"F": [term(1, k=1, s=-2)], "G": [C]}
        parts = []
        for t in self.terms:
            prod = CoeffExpr._raw((Term(t.q, t.k_exp, t.r_exp, t.z_exp, t.s_exp, t.c_exp, ()),))
            for sym, d in t.jets:
                chain = chains[sym]
                while len(chain) <= d:
                    chain.append(chain[-1].d_psi(lam))
                prod = prod * chain[d]
            parts.extend(prod.terms)
        return CoeffExpr(parts)

    def reflect(self) -> "CoeffExpr":
        """Substitute (s, c) -> (-s, -c), the half-period shift of the angle."""
        if self.has_jets:
            raise ValueError("reflect requires a jet-free expression")
        return CoeffExpr._raw(
            tuple(Term(-t.q if (t.s_exp + t.c_exp) % 2 else t.q, *t[1:]) for t in self.terms)
        )

    # ---- evaluation --------------------------------------------------------

    def eval_exact(self, pt: "RationalPoint") -> Fraction:
        """Exact value at a rational point; raises ZeroDivisionError on 0^negative."""
        total = Fraction(0)
        for t in self.terms:
            if t.jets:
                raise ValueError("cannot evaluate jet symbols; specialize first")
            val = t.q
            if t.k_exp:
                val *= pt.k ** t.k_exp
            if t.r_exp:
                val *= pt.r ** t.r_exp
            if t.z_exp:
                val *= pt.z ** t.z_exp
            if t.s_exp:
                val *= pt.s ** t.s_exp
            if t.c_exp:
                val *= pt.c ** t.c_exp
            total += val
        return total

    def eval_float(self, r: float, psi: float, z: float, k: float, lam: int, psi0: float = 0.0) -> float:
        theta = lam * psi + psi0
        s = math.sin(theta)
        c = math.cos(theta)
        total = 0.0
        for t in self.terms:
            if t.jets:
                raise ValueError("cannot evaluate jet symbols; specialize first")
            val = float(t.q)
            if t.k_exp:
                val *= k ** t.k_exp
            if t.r_exp:
                val *= r ** t.r_exp
            if t.z_exp:
                val *= z ** t.z_exp
            if t.s_exp:
                val *= s ** t.s_exp
            if t.c_exp:
                val *= c ** t.c_exp
            total += val
        return total

    # ---- serialization -----------------------------------------------------

    def to_json_terms(self) -> list:
        """Deterministic JSON array of term records, in canonical order."""
        records = []
        for t in self.terms:
            counts: dict = {}
            for sym, d in t.jets:
                counts[(sym, d)] = counts.get((sym, d), 0) + 1
            records.append(
                {
                    "q": str(t.q),
                    "k": t.k_exp,
                    "r": t.r_exp,
                    "z": t.z_exp,
                    "s": t.s_exp,
                    "c": t.c_exp,
                    "jets": {f"{sym}{d}": m for (sym, d), m in sorted(counts.items())},
                }
            )
        return records

    @classmethod
    def from_json_terms(cls, records: list) -> "CoeffExpr":
        parts = []
        for rec in records:
            jets = []
            for token, mult in rec.get("jets", {}).items():
                m = re.fullmatch(r"([FG])(\d+)", token)
                if not m:
                    raise ValueError(f"bad jet token {token!r}")
                jets.extend([(m.group(1), int(m.group(2)))] * mult)
            parts.append(
                Term(
                    Fraction(rec["q"]),
                    rec.get("k", 0),
                    rec.get("r", 0),
                    rec.get("z", 0),
                    rec.get("s", 0),
                    rec.get("c", 0),
                    tuple(sorted(jets)),
                )
            )
        return cls(parts)

    def __str__(self) -> str:
        return format_expr(self)

    def __repr__(self) -> str:
        return f"CoeffExpr({format_expr(self)})"


# ---- constructors -----------------------------------------------------------


def term(q, k: int = 0, r: int = 0, z: int = 0, s: int = 0, c: int = 0, jets=()) -> CoeffExpr:
    """Single-term expression q * k^k * r^r * z^z * s^s * c^c * jets."""
    if z < 0 or k < 0 or c < 0:
        raise ValueError("z, k and c exponents must be non-negative")
    jets = tuple(sorted(tuple(j) for j in jets))
    for sym, d in jets:
        if sym not in ("F", "G") or d < 0:
            raise ValueError(f"bad jet factor ({sym}, {d})")
    return CoeffExpr([Term(Fraction(q), k, r, z, s, c, jets)])


def const(q) -> CoeffExpr:
    return term(q)


def jet(sym: str, order: int) -> CoeffExpr:
    return term(1, jets=((sym, order),))


def r_pow(m: int) -> CoeffExpr:
    return term(1, r=m)


def z_pow(t: int) -> CoeffExpr:
    return term(1, z=t)


def s_pow(e: int) -> CoeffExpr:
    return term(1, s=e)


ZERO = CoeffExpr()
ONE = term(1)
K = term(1, k=1)
S = term(1, s=1)
C = term(1, c=1)


# ---- evaluation points -------------------------------------------------------


@dataclass(frozen=True)
class RationalPoint:
    """Exact phase-space point; (s, c) must be a Pythagorean pair."""

    r: Fraction
    z: Fraction
    p_r: Fraction
    p_psi: Fraction
    p_z: Fraction
    k: Fraction
    s: Fraction
    c: Fraction

    def __post_init__(self):
        for name in ("r", "z", "p_r", "p_psi", "p_z", "k", "s", "c"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.r == 0:
            raise ValueError("r must be nonzero")
        if self.s * self.s + self.c * self.c != 1:
            raise ValueError("(s, c) must satisfy s^2 + c^2 = 1 exactly")


# ---- rendering ---------------------------------------------------------------


def format_term_magnitude(t: Term) -> str:
    """Render |t| with tokens k, r, z, s, c, Fd, Gd; negative powers go below the bar."""
    q = abs(t.q)
    num = []
    den = []
    if q.numerator != 1:
        num.append(str(q.numerator))
    if q.denominator != 1:
        den.append(str(q.denominator))
    if t.k_exp:
        num.append("k" if t.k_exp == 1 else f"k^{t.k_exp}")
    if t.r_exp > 0:
        num.append("r" if t.r_exp == 1 else f"r^{t.r_exp}")
    if t.z_exp:
        num.append("z" if t.z_exp == 1 else f"z^{t.z_exp}")
    if t.s_exp > 0:
        num.append("s" if t.s_exp == 1 else f"s^{t.s_exp}")
    if t.c_exp:
        num.append("c" if t.c_exp == 1 else f"c^{t.c_exp}")
    counts: dict = {}
    for sym, d in t.jets:
        counts[(sym, d)] = counts.get((sym, d), 0) + 1
    for (sym, d), m in sorted(counts.items()):
        num.append(f"{sym}{d}" if m == 1 else f"{sym}{d}^{m}")
    if t.s_exp < 0:
        den.append(f"s^{-t.s_exp}" if t.s_exp != -1 else "s")
    if t.r_exp < 0:
        den.append(f"r^{-t.r_exp}" if t.r_exp != -1 else "r")
    num_str = "*".join(num) if num else "1"
    if not den:
        return num_str
    den_str = den[0] if len(den) == 1 else "(" + "*".join(den) + ")"
    return num_str + "/" + den_str


def format_expr(e: CoeffExpr) -> str:
    if e.is_zero:
        return "0"
    out = []
    for i, t in enumerate(e.terms):
        mag = format_term_magnitude(t)
        if i == 0:
            out.append("-" + mag if t.q < 0 else mag)
        else:
            out.append((" - " if t.q < 0 else " + ") + mag)
    return "".join(out)
