import math
import random
from fractions import Fraction

import pytest

from calogero.diffring import (
    C,
    CoeffExpr,
    K,
    ONE,
    RationalPoint,
    S,
    Term,
    ZERO,
    const,
    format_expr,
    jet,
    r_pow,
    s_pow,
    term,
    z_pow,
)
from conftest import random_expr


def pt(s=Fraction(3, 5), c=Fraction(4, 5), r=1, z=1, k=1):
    return RationalPoint(r=r, z=z, p_r=0, p_psi=0, p_z=0, k=k, s=s, c=c)


# ---- canonicalization --------------------------------------------------------


def test_cos_square_reduces():
    e = CoeffExpr([Term(Fraction(1), c_exp=2)])
    assert e == ONE - S * S
    assert len(e.terms) == 2
    assert all(t.c_exp <= 1 for t in e.terms)


def test_cancellation_gives_empty():
    e = CoeffExpr([Term(Fraction(1), s_exp=1), Term(Fraction(-1), s_exp=1)])
    assert e.is_zero
    assert e == ZERO


def test_like_terms_merge():
    e = CoeffExpr([Term(Fraction(1), c_exp=1), Term(Fraction(2), c_exp=1)])
    assert e.terms == (Term(Fraction(3), c_exp=1),)


def test_canonicalize_is_additive():
    rng = random.Random(101)
    for _ in range(50):
        a = [random_expr(rng, allow_jets=True) for _ in range(2)]
        raw = a[0].terms + a[1].terms
        assert CoeffExpr(raw) == a[0] + a[1]


def test_high_cos_powers():
    # c^4 = (1 - s^2)^2
    e = CoeffExpr([Term(Fraction(1), c_exp=4)])
    expect = (ONE - S * S) * (ONE - S * S)
    assert e == expect


# ---- ring arithmetic ---------------------------------------------------------


def test_mul_examples():
    assert C * C == ONE - S * S
    assert term(1, k=1, s=-2) * (S * S) == K
    x = term(Fraction(3, 2), r=-1, c=1)
    assert x + ZERO == x


def test_ring_axioms_random():
    rng = random.Random(7)
    for _ in range(30):
        a, b, c = (random_expr(rng, allow_jets=True) for _ in range(3))
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) * c == a * c + b * c
        assert (a * b) * c == a * (b * c)
        assert a - a == ZERO
        assert a * ONE == a


def test_scale_and_pow():
    assert S.scale(0) == ZERO
    assert (S + C) ** 2 == S * S + 2 * (S * C) + C * C
    with pytest.raises(ValueError):
        S ** -1


# ---- derivations -------------------------------------------------------------


def test_d_psi_examples():
    assert C.d_psi(3) == term(-3, s=1)
    # F' for the concrete potential k/s^2
    assert term(1, k=1, s=-2).d_psi(2) == term(-4, k=1, s=-3, c=1)
    assert jet("F", 0).d_psi(5) == jet("F", 1)


def test_d_psi_matches_numeric_derivative():
    # central finite differences of the float evaluation at 10 random angles
    rng = random.Random(23)
    e = term(1, k=1, s=-2)
    de = e.d_psi(3)
    h = 1e-6
    for _ in range(10):
        psi = rng.uniform(0.1, 0.9)
        fd = (e.eval_float(1.0, psi + h, 0.0, 2.0, 3) - e.eval_float(1.0, psi - h, 0.0, 2.0, 3)) / (2 * h)
        got = de.eval_float(1.0, psi, 0.0, 2.0, 3)
        assert abs(fd - got) <= 1e-6 * max(1.0, abs(got))


def test_d_r_d_z_examples():
    assert r_pow(-2).d_r() == term(-2, r=-3)
    assert C.d_r() == ZERO
    assert z_pow(2).d_z() == term(2, z=1)


def test_leibniz_rule_random():
    rng = random.Random(11)
    for _ in range(30):
        a = random_expr(rng, allow_jets=True)
        b = random_expr(rng, allow_jets=True)
        assert (a * b).d_psi(2) == a.d_psi(2) * b + a * b.d_psi(2)
        assert (a * b).d_r() == a.d_r() * b + a * b.d_r()
        assert (a * b).d_z() == a.d_z() * b + a * b.d_z()


def test_derivations_commute():
    rng = random.Random(13)
    for _ in range(30):
        a = random_expr(rng, allow_jets=True)
        assert a.d_psi(2).d_r() == a.d_r().d_psi(2)
        assert a.d_psi(2).d_z() == a.d_z().d_psi(2)
        assert a.d_r().d_z() == a.d_z().d_r()


# ---- jet specialization ------------------------------------------------------


def test_specialize_examples():
    assert jet("F", 0).specialize_jets(2) == term(1, k=1, s=-2)
    assert jet("G", 0).specialize_jets(2) == C
    assert jet("F", 1).specialize_jets(2) == term(-4, k=1, s=-3, c=1)


def test_specialize_commutes_with_d_psi():
    rng = random.Random(17)
    for _ in range(30):
        a = random_expr(rng, allow_jets=True)
        assert a.d_psi(3).specialize_jets(3) == a.specialize_jets(3).d_psi(3)


def test_specialize_is_multiplicative():
    rng = random.Random(19)
    for _ in range(20):
        a = random_expr(rng, allow_jets=True)
        b = random_expr(rng, allow_jets=True)
        assert (a * b).specialize_jets(2) == a.specialize_jets(2) * b.specialize_jets(2)


# ---- reflection ---------------------------------------------------------------


def test_reflect_is_involution():
    rng = random.Random(29)
    for _ in range(20):
        a = random_expr(rng)
        assert a.reflect().reflect() == a


def test_reflect_parity():
    assert S.reflect() == -S
    assert C.reflect() == -C
    assert (S * C).reflect() == S * C
    assert term(1, k=1, s=-2).reflect() == term(1, k=1, s=-2)
    with pytest.raises(ValueError):
        jet("F", 0).reflect()


# ---- evaluation ----------------------------------------------------------------


def test_eval_exact_examples():
    assert C.eval_exact(pt()) == Fraction(4, 5)
    # k/s^2 at k=2, s=3/5 is 2/(9/25) = 50/9
    e = term(1, k=1, s=-2)
    p = RationalPoint(r=1, z=0, p_r=0, p_psi=0, p_z=0, k=2, s=Fraction(3, 5), c=Fraction(4, 5))
    assert e.eval_exact(p) == Fraction(50, 9)
    # k/s^2 at k=2, s=1/2 is 8 (evaluated through the float path, exact binary)
    assert e.eval_float(1.0, math.asin(0.5), 0.0, 2.0, 1) == pytest.approx(8.0, rel=1e-12)


def test_eval_float_examples():
    assert C.eval_float(1.0, 0.0, 0.0, 1.0, 1, 0.0) == 1.0
    assert abs(S.eval_float(1.0, math.pi / 2, 0.0, 1.0, 1) - 1.0) < 1e-15


def test_eval_zero_division():
    on_ray = RationalPoint(r=1, z=0, p_r=0, p_psi=0, p_z=0, k=1, s=0, c=1)
    assert r_pow(-1).eval_exact(on_ray) == 1  # r nonzero: fine
    with pytest.raises(ZeroDivisionError):
        s_pow(-2).eval_exact(on_ray)


def test_eval_rejects_jets():
    with pytest.raises(ValueError):
        jet("F", 0).eval_exact(pt())
    with pytest.raises(ValueError):
        jet("G", 1).eval_float(1.0, 0.5, 0.0, 1.0, 2)


def test_exact_float_pythagorean_consistency():
    # same ring element through both evaluation paths, sin(lam*psi) = 0.6
    rng = random.Random(31)
    lam = 3
    psi = math.asin(0.6) / lam
    p = RationalPoint(
        r=Fraction(5, 4), z=Fraction(2, 3), p_r=0, p_psi=0, p_z=0,
        k=Fraction(7, 2), s=Fraction(3, 5), c=Fraction(4, 5),
    )
    for _ in range(30):
        e = random_expr(rng)
        exact = float(e.eval_exact(p))
        approx = e.eval_float(1.25, psi, 2.0 / 3.0, 3.5, lam)
        assert abs(exact - approx) <= 1e-12 * max(1.0, abs(exact))


# ---- validation and serialization ---------------------------------------------


def test_rational_point_validation():
    with pytest.raises(ValueError):
        RationalPoint(r=0, z=0, p_r=0, p_psi=0, p_z=0, k=1, s=Fraction(3, 5), c=Fraction(4, 5))
    with pytest.raises(ValueError):
        RationalPoint(r=1, z=0, p_r=0, p_psi=0, p_z=0, k=1, s=Fraction(1, 2), c=Fraction(1, 2))


def test_term_builder_validation():
    with pytest.raises(ValueError):
        term(1, z=-1)
    with pytest.raises(ValueError):
        term(1, jets=(("X", 0),))


def test_json_roundtrip_and_shape():
    e = term(Fraction(-3, 2), k=1, r=-2, s=-3, c=1) + jet("F", 1) * jet("F", 1) * const(2)
    records = e.to_json_terms()
    assert CoeffExpr.from_json_terms(records) == e
    rec = [r for r in records if r["jets"]][0]
    assert rec["jets"] == {"F1": 2}
    rec = [r for r in records if not r["jets"]][0]
    assert rec == {"q": "-3/2", "k": 1, "r": -2, "z": 0, "s": -3, "c": 1, "jets": {}}


def test_format_examples():
    assert format_expr(ZERO) == "0"
    assert format_expr(term(-2, k=1, r=-2, s=-2, c=1)) == "-2*k*c/(s^2*r^2)"
    assert format_expr(term(Fraction(1, 2), r=-2)) == "1/(2*r^2)"
    assert format_expr(ONE - S * S) == "1 - s^2"
