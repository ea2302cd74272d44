import random

import pytest

from wittdisp.exceptions import IndexOutOfRange, LengthUnderflow, MixedRings, NonUnit, NotInIdeal
from wittdisp.rings import FiniteField, QuotientPoly, ZmodPM
from wittdisp.witt import IsUnitIdeal, NotUnitIdeal, WittRing, jacobson_unit_test


def test_one_plus_one_in_w2_f2():
    W = WittRing.over(FiniteField.of(2), 2)
    assert W.vec([1, 0]) + W.vec([1, 0]) == W.vec([0, 1])
    assert W.from_int(2) == W.vec([0, 1])
    assert W.from_int(-1) + W.one == W.zero


def test_fast_and_generic_backends_agree():
    rng = random.Random(7)
    F4 = FiniteField.of(2, 2)
    fast = WittRing.over(F4, 3)
    slow = WittRing.over(F4, 3, backend="generic")
    assert fast.fast and not slow.fast
    for _ in range(30):
        x, y = fast.random_element(rng), fast.random_element(rng)
        xs, ys = slow.vec(list(x.coeffs)), slow.vec(list(y.coeffs))
        assert (x + y).coeffs == (xs + ys).coeffs
        assert (x * y).coeffs == (xs * ys).coeffs
        assert (-x).coeffs == (-xs).coeffs


def test_teichmuller_is_multiplicative():
    F4 = FiniteField.of(2, 2)
    W = WittRing.over(F4, 3)
    for a in F4.elements():
        for b in F4.elements():
            assert W.teichmuller(a) * W.teichmuller(b) == W.teichmuller(a * b)


def test_inverse_over_several_rings():
    rng = random.Random(3)
    for base in (FiniteField.of(3), ZmodPM(2, 2), QuotientPoly.dual_numbers(FiniteField.of(2))):
        W = WittRing.over(base, 3)
        for _ in range(10):
            x = W.random_unit(rng)
            assert x * x.try_inv() == W.one
    W = WittRing.over(FiniteField.of(2), 2)
    with pytest.raises(NonUnit):
        W.vec([0, 1]).try_inv()


def test_ghost_of_integers_is_constant():
    R = ZmodPM(3, 2)
    W = WittRing.over(R, 2)
    x = W.from_int(5)
    assert x.ghost(0) == R.from_int(5)
    assert x.ghost(1) == R.from_int(5)
    with pytest.raises(IndexOutOfRange):
        x.ghost(2)


def test_frobenius_verschiebung_identities():
    rng = random.Random(11)
    for base, n in ((FiniteField.of(2, 2), 3), (ZmodPM(3, 2), 2)):
        W = WittRing.over(base, n)
        for _ in range(10):
            x = W.random_element(rng)
            assert x.verschiebung().frobenius() == x * W.p
            Fx = x.frobenius()
            assert Fx.n == n - 1
            assert all(Fx.ghost(k) == x.ghost(k + 1) for k in range(n - 1))


def test_same_length_frobenius_agrees_after_truncation():
    W = WittRing.over(FiniteField.of(2, 2), 3)
    x = W.random_element(random.Random(1))
    assert x.frobenius_same_length().truncate(2) == x.frobenius()
    assert x.sigma_inverse().frobenius_same_length() == x


def test_shift_and_lengths():
    W = WittRing.over(FiniteField.of(2), 3)
    x = W.vec([0, 1, 1])
    assert x.in_ideal()
    assert x.shift_down() == W.with_length(2).vec([1, 1])
    with pytest.raises(NotInIdeal):
        W.one.shift_down()
    with pytest.raises(LengthUnderflow):
        x.truncate(4)
    with pytest.raises(MixedRings):
        x + W.with_length(2).one


def test_valuation_and_unit_part():
    W = WittRing.over(FiniteField.of(2), 4)
    x = W.from_int(12)
    assert x.valuation() == 2
    assert x.unit_part() * W.from_int(4) == x
    assert W.one.times_p_power(2) == W.from_int(4)
    assert W.zero.valuation() == 4


def test_unit_ideal_test():
    W = WittRing.over(FiniteField.of(2), 2)
    result = jacobson_unit_test([W.vec([0, 1])])
    assert result == NotUnitIdeal(0)

    A = QuotientPoly.dual_numbers(FiniteField.of(2))
    WA = WittRing.over(A, 2)
    gens = [WA.teichmuller(A.gens()[0]), WA.one + WA.teichmuller(A.gens()[0])]
    found = jacobson_unit_test(gens)
    assert isinstance(found, IsUnitIdeal)
    total = WA.zero
    for c, g in zip(found.witness, gens):
        total = total + c * g
    assert total == WA.one


def test_unit_ideal_certificates_per_ghost_component():
    A = QuotientPoly.dual_numbers(FiniteField.of(2))
    WA = WittRing.over(A, 2)
    e = WA.teichmuller(A.gens()[0])
    gens = [e, WA.one + e]
    found = jacobson_unit_test(gens)
    assert len(found.ghost_certificates) == 2
    for k, row in enumerate(found.ghost_certificates):
        total = A.zero
        for r, g in zip(row, gens):
            total = total + r * g.ghost(k)
        assert total == A.one


def test_truncation_commutes_with_frobenius_verschiebung_and_ghosts():
    rng = random.Random(5)
    for base in (FiniteField.of(2, 2), ZmodPM(3, 2)):
        W = WittRing.over(base, 4)
        for _ in range(10):
            x = W.random_element(rng)
            for m in (2, 3):
                assert x.truncate(m).frobenius() == x.frobenius().truncate(m - 1)
                assert x.truncate(m).verschiebung() == x.verschiebung().truncate(m + 1)
                assert all(x.truncate(m).ghost(k) == x.ghost(k) for k in range(m))
