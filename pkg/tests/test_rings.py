import itertools

import pytest

from wittdisp.exceptions import BadSpec, MixedRings, NonUnit, Unenumerable
from wittdisp.rings import (
    FiniteField,
    IntegerPoly,
    QuotientPoly,
    ZmodPM,
    field_embedding,
    ring_from_json,
)


def test_f4_modulus_and_generator():
    F4 = FiniteField.of(2, 2)
    assert F4.modulus == (1, 1, 1)
    g = F4.gen()
    assert (g * g + g + 1).is_zero()
    assert F4.cardinality() == 4


def test_field_inverses_and_pth_roots():
    F9 = FiniteField.of(3, 2)
    for x in F9.elements():
        assert (F9.pth_root(x) ** 3) == x
        if x.is_zero():
            with pytest.raises(NonUnit):
                x.try_inv()
        else:
            assert x * x.try_inv() == F9.one


def test_reducible_modulus_rejected():
    with pytest.raises(BadSpec):
        FiniteField(2, 2, (1, 0, 1))


def test_mixed_rings():
    with pytest.raises(MixedRings):
        FiniteField.of(2).one + FiniteField.of(3).one


def test_zmod_units():
    R = ZmodPM(3, 2)
    assert R.characteristic == 9
    assert R.from_int(4).is_unit()
    assert not R.from_int(6).is_unit()
    assert R.from_int(4) * R.from_int(4).try_inv() == R.one


def test_dual_numbers():
    A = QuotientPoly.dual_numbers(FiniteField.of(2))
    e = A.gens()[0]
    assert (e * e).is_zero()
    assert A.cardinality() == 4
    u = A.one + e
    assert u * u.try_inv() == A.one
    assert not e.is_unit()
    assert e.is_nilpotent()
    assert not A.is_reduced()


def test_truncated_ring_and_quotient():
    A = QuotientPoly.truncated(FiniteField.of(2), ("s", "t"), 2)
    s, t = A.gens()
    assert A.cardinality() == 8
    assert (s * t).is_zero()
    target, reduce = A.quotient_by([(1, 0), (0, 1)])
    assert target == FiniteField.of(2)
    assert reduce(A.one + s) == target.one


def test_hom_sends_variables_to_images():
    k = FiniteField.of(2)
    A = QuotientPoly.truncated(k, ("s", "t"), 2)
    B = QuotientPoly.dual_numbers(k)
    e = B.gens()[0]
    s, t = A.gens()
    fn = A.hom(B, [e, B.zero])
    assert fn(A.one + s + t) == B.one + e
    assert fn(s * s).is_zero()


def test_ring_json_descriptors():
    for R in (
        FiniteField.of(3, 2),
        ZmodPM(2, 3),
        QuotientPoly.dual_numbers(FiniteField.of(2, 2)),
        IntegerPoly(("a", "b")),
    ):
        assert ring_from_json(R.to_json()) == R


def test_integer_poly_is_infinite():
    R = IntegerPoly(("a",))
    assert not R.is_finite
    with pytest.raises(Unenumerable):
        list(R.elements())


def test_field_embedding_is_a_ring_map():
    F4, F16 = FiniteField.of(2, 2), FiniteField.of(2, 4)
    emb = field_embedding(F4, F16)
    assert emb(F4.one) == F16.one
    for x, y in itertools.product(F4.elements(), repeat=2):
        assert emb(x * y) == emb(x) * emb(y)
        assert emb(x + y) == emb(x) + emb(y)
    with pytest.raises(BadSpec):
        field_embedding(F4, FiniteField.of(2, 3))
