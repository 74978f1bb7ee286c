"""Reference frames, the transversal/temporal split and leaf pullbacks."""

import pytest
import sympy as sp

from maxcov.errors import DomainError
from maxcov.forms_core import (
    Point,
    basis_form,
    evaluate,
    exterior_derivative,
    interior_product,
    lie_derivative,
    wedge,
)
from maxcov.frames import (
    boost_map,
    d_perp,
    decompose,
    leaf_pullback,
    lorentz_gamma,
    make_boost_frame,
    make_fiducial_frame,
    make_frame_family,
    temporal,
    transversal,
)
from maxcov.sampling import RationalSampler
from maxcov.scalars import T, X, PolynomialField

dt, dx, dy, dz = (basis_form(i) for i in range(4))
ORIGIN = Point(0, 0, 0, 0)


def poly(expr) -> PolynomialField:
    return PolynomialField.from_expr(expr)


def test_fiducial_frame_is_dual_and_closed():
    frame = make_fiducial_frame()
    assert evaluate(frame.theta, [frame.gamma_field], ORIGIN) == 1
    assert all(evaluate(frame.theta, [x], ORIGIN) == 0 for x in frame.spatial_basis)
    assert exterior_derivative(frame.theta).is_zero
    frame.validate()


def test_boost_along_x_with_pythagorean_beta():
    frame = make_boost_frame(make_fiducial_frame(), 1, "3/5")
    assert frame.gamma_field.constant_components() == (sp.Rational(5, 4), sp.Rational(3, 4), 0, 0)
    assert frame.spatial_basis[0].constant_components() == (sp.Rational(3, 4), sp.Rational(5, 4), 0, 0)
    assert frame.theta == dt * sp.Rational(5, 4) - dx * sp.Rational(3, 4)
    frame.validate()


def test_boost_along_y_keeps_x_axis():
    frame = make_boost_frame(make_fiducial_frame(), 2, "3/5")
    assert frame.spatial_basis[0].constant_components() == (0, 1, 0, 0)
    assert frame.spatial_basis[2].constant_components() == (0, 0, 0, 1)


@pytest.mark.parametrize("beta", ["3/5", "5/13", "8/17", "20/29"])
def test_boosted_theta_is_dual_to_gamma(beta):
    for axis in (1, 2, 3):
        frame = make_boost_frame(make_fiducial_frame(), axis, beta)
        assert evaluate(frame.theta, [frame.gamma_field], ORIGIN) == 1


@pytest.mark.parametrize("beta", ["1", "3/2", "-1/2"])
def test_boost_rejects_non_timelike_beta(beta):
    with pytest.raises(DomainError, match="non-timelike boost"):
        make_boost_frame(make_fiducial_frame(), 1, beta)


def test_zero_beta_is_degenerate():
    with pytest.raises(DomainError, match="degenerate boost"):
        make_frame_family("0")


def test_gamma_is_exact_for_pythagorean_beta():
    assert lorentz_gamma(sp.Rational(3, 5)) == sp.Rational(5, 4)
    assert lorentz_gamma(sp.Rational(5, 13)) == sp.Rational(13, 12)
    assert float(lorentz_gamma(sp.Rational(1, 2))) == pytest.approx(2 / 3 ** 0.5)


def test_irrational_gamma_family_still_validates():
    family = make_frame_family("1/2")
    assert not family.is_exact
    for frame in family:
        frame.validate()


def test_mutual_existence(family, alternate_family):
    for fam in (family, alternate_family):
        assert fam.check_mutual_existence()
        matrix = fam.mutual_existence_matrix()
        assert all(matrix[i][i] == 1 for i in range(4))


def test_coframe_is_dual_basis(family):
    for frame in family:
        coframe = frame.coframe()
        for i, covector in enumerate(coframe):
            for j, vector in enumerate(frame.basis):
                assert evaluate(covector, [vector], ORIGIN) == (1 if i == j else 0)


def test_boost_map_preserves_the_metric():
    m = sp.Matrix(boost_map(2, "5/13").matrix)
    eta = sp.diag(1, -1, -1, -1)
    assert m.T * eta * m == eta
    assert m.det() == 1


# --------------------------------------------------------------------------
# decompose and d_perp
# --------------------------------------------------------------------------

def test_decompose_examples():
    frame = make_fiducial_frame()
    perp, par = decompose(frame, wedge(dt, dx))
    assert perp.is_zero and par == wedge(dt, dx)
    perp, par = decompose(frame, wedge(dx, dy))
    assert perp == wedge(dx, dy) and par.is_zero
    perp, par = decompose(frame, wedge(dt, dx) + wedge(dy, dz))
    assert perp == wedge(dy, dz) and par == wedge(dt, dx)


def test_decompose_grade_conventions(family):
    scalar = basis_form(coefficient=poly(X))
    perp, par = decompose(family[1], scalar)
    assert perp == scalar and par.is_zero


@pytest.mark.parametrize("grade", [1, 2, 3])
def test_projectors_are_complementary_and_idempotent(grade, family, sampler):
    a = sampler.random_form(grade)
    for frame in family:
        perp, par = decompose(frame, a)
        assert perp + par == a
        assert interior_product(frame.gamma_field, perp).is_zero
        again_perp, again_par = decompose(frame, perp)
        assert again_perp == perp and again_par.is_zero
        again_perp, again_par = decompose(frame, par)
        assert again_perp.is_zero and again_par == par


@pytest.mark.parametrize("grade", [1, 2, 3])
def test_transversal_and_temporal_parts_recombine(grade, family, sampler):
    a = sampler.random_form(grade)
    for frame in family:
        perp, par = transversal(frame, a), temporal(frame, a)
        assert perp + par == a
        assert interior_product(frame.gamma_field, perp).is_zero
        assert (perp, par) == decompose(frame, a)


def test_d_perp_examples(family):
    frame = make_fiducial_frame()
    assert d_perp(frame, wedge(dx, dy) * poly(T)).is_zero
    assert d_perp(frame, wedge(dy, dz) * poly(X)) == wedge(wedge(dx, dy), dz)
    for boosted in family:
        assert d_perp(boosted, wedge(dx, dy) + wedge(dt, dz)).is_zero


@pytest.mark.parametrize("grade", [1, 2])
def test_d_perp_squares_to_zero_on_transversal_forms(grade, family, sampler):
    a = sampler.random_form(grade)
    for frame in family:
        perp, _ = decompose(frame, a)
        assert d_perp(frame, d_perp(frame, perp)).is_zero


@pytest.mark.parametrize("seed", range(50))
def test_splitting_identity(seed, family):
    sampler = RationalSampler(seed)
    for grade in (1, 2):
        a = sampler.random_form(grade)
        da = exterior_derivative(a)
        for frame in family:
            perp, _ = decompose(frame, a)
            contracted = interior_product(frame.gamma_field, a)
            inner = lie_derivative(frame.gamma_field, perp) - d_perp(frame, contracted)
            assert da == wedge(frame.theta, inner) + d_perp(frame, perp)


# --------------------------------------------------------------------------
# leaf pullback
# --------------------------------------------------------------------------

def test_leaf_pullback_examples():
    frame = make_fiducial_frame()
    assert leaf_pullback(frame, 3, wedge(dt, dx)).is_zero
    assert leaf_pullback(frame, 5, wedge(dx, dy) * poly(T)) == wedge(dx, dy) * 5
    assert leaf_pullback(frame, sp.Rational(1, 2), wedge(dx, dy)) == wedge(dx, dy)


def test_leaf_pullback_annihilates_theta(family):
    for frame in family:
        assert leaf_pullback(frame, 2, frame.theta).is_zero


@pytest.mark.parametrize("t", [0, 1, sp.Rational(-3, 2)])
def test_leaf_pullback_links_d_and_d_perp(t, family, sampler):
    a = sampler.random_form(2)
    for frame in family:
        leaf = leaf_pullback(frame, t, a)
        assert 0 not in leaf.support
        assert exterior_derivative(leaf) == leaf_pullback(frame, t, d_perp(frame, a))


def test_adapted_coordinates_invert_the_immersion(family):
    frame = family[3]
    phi = frame.leaf_immersion(2)
    image = phi.apply((0, 1, -1, sp.Rational(1, 3)))
    assert frame.adapted_coordinates(image) == (2, 1, -1, sp.Rational(1, 3))
