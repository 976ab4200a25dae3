import math
from fractions import Fraction

import pytest

from calogero.diffring import C, ONE, jet, term
from calogero.integrals import (
    ModelParams,
    angular_potential,
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
    hamiltonian_for,
    integral_set_to_json,
)
from calogero.phasepoly import PhasePoly, poisson
from calogero.verify import proportionality


def test_model_params_defaults():
    p = ModelParams(3)
    assert p.mu == Fraction(1, 3)
    assert p.f_mode == "specialized"
    with pytest.raises(ValueError):
        ModelParams(0)
    with pytest.raises(ValueError):
        ModelParams(2, f_mode="nope")


def test_angular_potential_modes():
    assert angular_potential("specialized") == term(1, k=1, s=-2)
    assert angular_potential("jet") == jet("F", 0)
    assert angular_potential("zero").is_zero


def test_build_H_coefficients():
    h = build_H(ModelParams(2))
    assert h.coeff((0, 0, 0)) == term(1, k=1, r=-2, s=-2)
    assert h.coeff((2, 0, 0)) == ONE.scale(Fraction(1, 2))
    assert build_H(ModelParams(2, f_mode="zero")) == build_Hg()


def test_H_L_bracket():
    p = ModelParams(3)
    assert poisson(build_H(p), build_L(p), 2, lam=3).is_zero


def test_3d_builders_coefficients():
    p3 = ModelParams(2, dims=3)
    h3 = build_H3(p3)
    assert h3.coeff((0, 2, 0)) == (ONE + term(1, r=-2, z=2)).scale(Fraction(1, 2))
    assert h3.coeff((0, 0, 2)) == term(Fraction(1, 2), r=2)
    h4 = build_H4(p3)
    assert h4.coeff((1, 0, 1)) == term(Fraction(-1, 2), r=1)
    assert h4.coeff((0, 0, 0)) == term(1, k=1, r=-2, z=1, s=-2)
    with pytest.raises(ValueError):
        build_H0(ModelParams(2, dims=2))


def test_quadratic_integrals_formal_potential():
    p3 = ModelParams(1, f_mode="jet", dims=3)
    h0 = build_H0(p3)
    for builder in (build_H1, build_H2, build_H3, build_H4):
        assert poisson(h0, builder(p3), 3, lam=1).is_zero


def test_3d_minus_z_kinetic_is_planar():
    p3 = ModelParams(4, dims=3)
    assert build_H0(p3) - build_H1(p3) == build_H(ModelParams(4))


def test_ladder_integral_closed_forms():
    i1 = build_I(ModelParams(1))
    assert i1 == PhasePoly({(1, 0, 0): C, (0, 1, 0): term(-1, r=-1, s=1)})
    i2 = build_I(ModelParams(2))
    assert i2 == PhasePoly(
        {
            (2, 0, 0): C,
            (1, 1, 0): term(-2, r=-1, s=1),
            (0, 2, 0): term(-1, r=-2, c=1),
            (0, 0, 0): term(-2, k=1, r=-2, s=-2, c=1),
        }
    )


def test_ladder_integral_structure():
    for lam in range(1, 9):
        i_lam = build_I(ModelParams(lam))
        assert i_lam.degree() == lam
        # leading p_r coefficient is exactly c, independent of r
        assert i_lam.coeff((lam, 0, 0)) == C
        # planar: no z or p_z anywhere
        assert all(key[2] == 0 for key in i_lam.momentum_keys())
        assert all(t.z_exp == 0 for _, e in i_lam.items() for t in e.terms)


def test_ladder_integral_preconditions():
    with pytest.raises(ValueError):
        build_I(ModelParams(2, f_mode="jet"))
    with pytest.raises(ValueError):
        build_I(ModelParams(2, mu=Fraction(1)))


def test_conservation_small_degrees():
    for lam in range(1, 7):
        p = ModelParams(lam)
        assert poisson(build_H(p), build_I(p), 2, lam=lam).is_zero


def test_conservation_3d_lift():
    for lam in (1, 2, 3):
        p3 = ModelParams(lam, dims=3)
        assert poisson(build_H0(p3), build_I(ModelParams(lam)), 3, lam=lam).is_zero


def test_descendants():
    p = ModelParams(2)
    assert build_descendant(p, 0) == build_I(p)
    h = build_H(p)
    for nu in (1, 2):
        assert poisson(h, build_descendant(p, nu), 2, lam=2).is_zero
    with pytest.raises(ValueError):
        build_descendant(p, -1)


def test_descendant_nu1_lam1_closed_form():
    # XL I1 = -s p_r p_psi - (c/r) p_psi^2 - 2 k c / (s^2 r)
    got = build_descendant(ModelParams(1), 1)
    expect = PhasePoly(
        {
            (1, 1, 0): term(-1, s=1),
            (0, 2, 0): term(-1, r=-1, c=1),
            (0, 0, 0): term(-2, k=1, r=-1, s=-2, c=1),
        }
    )
    assert got == expect


def test_geodesic_integrals():
    hg = build_Hg()
    for lam in range(1, 7):
        g = build_geodesic(lam)
        assert poisson(hg, g, 2, lam=lam).is_zero
        assert g == build_I(ModelParams(lam)).top_degree_part()
    assert build_geodesic(1) == build_I(ModelParams(1))
    # degree 2: drop the coupling term of the full integral
    i2 = build_I(ModelParams(2))
    assert build_geodesic(2) == i2 - PhasePoly.constant(i2.coeff((0, 0, 0)))
    with pytest.raises(ValueError):
        build_geodesic(0)


def test_binomial_integral_n0():
    assert build_binomial_integral(0) == build_I(ModelParams(1))


def test_binomial_coefficient_conventions():
    # lam=3, i=1, l=3 inner coefficient: C(3,1)*C(1,1) = 3
    assert math.comb(3, 1) * math.comb((3 - 1) // 2, (3 - 1) // 2) == 3
    b1 = build_binomial_integral(1)
    assert b1.coeff((1, 2, 0)) == term(-3, r=-2, c=1)


def test_binomial_matches_ladder():
    for n in (1, 2):
        lam = 2 * n + 1
        rho = proportionality(build_binomial_integral(n), build_I(ModelParams(lam)))
        assert rho == 1
    with pytest.raises(ValueError):
        build_binomial_integral(-1)


def test_integral_set_bundle():
    bundle = build_integral_set(ModelParams(2))
    assert set(bundle) == {"H0", "H1", "H2", "H3", "H4", "H", "L", "Hg", "I"}
    assert bundle["I"] == build_I(ModelParams(2))
    obj = integral_set_to_json(bundle)
    assert sorted(obj) == sorted(bundle)
    # a jet-mode bundle has no ladder integral
    jet_bundle = build_integral_set(ModelParams(2, f_mode="jet"))
    assert "I" not in jet_bundle


def test_hamiltonian_for_custom_potential():
    f = term(1, k=1, s=-1)
    h = hamiltonian_for(f)
    assert h.coeff((0, 0, 0)) == term(1, k=1, r=-2, s=-1)
