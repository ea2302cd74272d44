import random

import pytest

from wittdisp.displays import enumerate_hmu
from wittdisp.exceptions import BadSpec, NotInHmu
from wittdisp.groups import (
    GroupSpec,
    conjugation_formula_holds,
    divided_frobenius,
    h_mu_factor,
    in_hmu,
    lie_coordinates,
    lie_element,
    lie_projection_pi,
    parabolic_membership,
    subgroup_membership,
)
from wittdisp.matrices import MatW
from wittdisp.rings import FiniteField, IntegerPoly
from wittdisp.selftest import random_hmu, random_hmu_shape
from wittdisp.witt import WittRing


def test_gl_spec_shape():
    spec = GroupSpec.gl(2, 1)
    assert spec.weights == (0, 1)
    assert spec.upos() == [(0, 1)]
    assert spec.dim == 4
    assert spec.d == 1
    assert spec.is_gl


def test_bad_weights():
    with pytest.raises(BadSpec):
        GroupSpec(2, (0,))
    with pytest.raises(BadSpec):
        GroupSpec(2, (0, 2))
    with pytest.raises(BadSpec):
        GroupSpec(2, (0, 1), ("det - 1",))


def test_sl_membership():
    spec = GroupSpec.sl(2, 1)
    assert spec.dim == 3
    W = WittRing.over(FiniteField.of(3), 2)
    u = W.from_int(2)
    assert subgroup_membership(MatW.diag(W, [u, u.try_inv()]), spec)
    assert not subgroup_membership(MatW.diag(W, [u, 1]), spec)
    assert GroupSpec.from_json(spec.to_json()) == spec


def test_unparseable_equation():
    basis = GroupSpec.sl(2, 1).lie_basis
    with pytest.raises(BadSpec):
        GroupSpec(2, (0, 1), ("det -",), basis)


def test_divided_frobenius_of_identity():
    spec = GroupSpec.gl(2, 1)
    W = WittRing.over(FiniteField.of(2), 3)
    phi = divided_frobenius(MatW.identity(W, 2), spec)
    assert phi == MatW.identity(W.with_length(2), 2)


def test_divided_frobenius_needs_hmu():
    spec = GroupSpec.gl(2, 1)
    W = WittRing.over(FiniteField.of(2), 3)
    H = MatW.from_rows(W, [[1, 1], [0, 1]])
    assert not in_hmu(H, spec)
    with pytest.raises(NotInHmu):
        divided_frobenius(H, spec)


def test_conjugation_formula_over_integer_polys():
    rng = random.Random(2)
    W = WittRing.over(IntegerPoly(("a",)), 2, p=3)
    for spec in (GroupSpec.gl(2, 1), GroupSpec.gl(3, 2)):
        for _ in range(3):
            assert conjugation_formula_holds(random_hmu_shape(spec, W, rng), spec)


def test_h_mu_factor_multiplies_back():
    rng = random.Random(4)
    spec = GroupSpec.gl(3, 1)
    W = WittRing.over(FiniteField.of(2), 2)
    for _ in range(5):
        H = random_hmu(spec, W, rng)
        Hp, Hu = h_mu_factor(H, spec)
        assert Hp * Hu == H
        assert parabolic_membership(Hp.w0(), spec)


def test_lie_coordinates_roundtrip():
    F3 = FiniteField.of(3)
    spec = GroupSpec.sl(2, 1)
    a, b, c = F3.from_int(1), F3.from_int(2), F3.from_int(1)
    X = [[a, b], [c, -a]]
    coords = lie_coordinates(X, spec, 3)
    assert lie_element(coords, spec, F3.zero) == X


def test_divided_frobenius_is_multiplicative():
    spec = GroupSpec.gl(2, 1)
    W = WittRing.over(FiniteField.of(2), 2)
    group = list(enumerate_hmu(spec, W))
    assert len(group) == 32
    phi = {H.key(): divided_frobenius(H, spec) for H in group}
    for H1 in group:
        for H2 in group:
            assert divided_frobenius(H1 * H2, spec) == phi[H1.key()] * phi[H2.key()]


def test_divided_frobenius_restricts_to_sl():
    rng = random.Random(8)
    sl, gl = GroupSpec.sl(2, 1), GroupSpec.gl(2, 1)
    W = WittRing.over(FiniteField.of(3), 3)
    for _ in range(10):
        H = random_hmu(gl, W, rng)
        H = H * MatW.diag(W, [H.det().try_inv(), 1])
        assert subgroup_membership(H, sl)
        phi = divided_frobenius(H, sl)
        assert phi == divided_frobenius(H, gl)
        assert subgroup_membership(phi, sl)


def test_h_mu_factor_is_unique():
    spec = GroupSpec.gl(2, 1)
    W = WittRing.over(FiniteField.of(2), 2)
    for H in enumerate_hmu(spec, W):
        Hp, Hu = h_mu_factor(H, spec)
        found = []
        for x in W.elements():
            unipotent = MatW.from_rows(W, [[1, x], [0, 1]])
            rest = H * unipotent.inverse()
            if rest[0, 1].is_zero():
                found.append((rest, unipotent))
        assert found == [(Hp, Hu)]


def test_lie_projection_is_idempotent():
    rng = random.Random(6)
    spec = GroupSpec.gl(3, 1)
    W = WittRing.over(FiniteField.of(2), 2)
    for _ in range(5):
        X = MatW.random(W, 3, rng)
        once = lie_projection_pi(X, spec)
        assert lie_projection_pi(once, spec) == once
        assert lie_projection_pi(X - once, spec).is_zero()
        rows = X.w0()
        assert lie_projection_pi(lie_projection_pi(rows, spec), spec) == lie_projection_pi(rows, spec)
