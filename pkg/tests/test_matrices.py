import random

import pytest

from wittdisp.exceptions import BadSpec, NonUnit
from wittdisp.matrices import MatW, PMat
from wittdisp.rings import FiniteField, QuotientPoly
from wittdisp.witt import WittRing


def _w(n=3, f=1):
    return WittRing.over(FiniteField.of(2, f), n)


def test_identity_and_inverse():
    rng = random.Random(5)
    W = _w()
    for _ in range(5):
        M = MatW.random_invertible(W, 3, rng)
        assert M * M.inverse() == MatW.identity(W, 3)
        assert MatW.identity(W, 3) * M == M


def test_adjugate_identity():
    rng = random.Random(8)
    W = _w()
    M = MatW.random(W, 3, rng)
    assert M * M.adjugate() == MatW.identity(W, 3) * M.det()


def test_det_of_diag():
    W = _w(4)
    assert MatW.diag(W, [3, 2, 5]).det() == W.from_int(30)


def test_singular_inverse_raises():
    W = _w()
    with pytest.raises(NonUnit):
        MatW.diag(W, [1, 2]).inverse()
    assert not MatW.diag(W, [1, 2]).is_invertible()


def test_non_square_rejected():
    with pytest.raises(BadSpec):
        MatW.from_rows(_w(), [[1, 0]])


def test_sigma_is_entrywise_frobenius():
    F4 = FiniteField.of(2, 2)
    W = WittRing.over(F4, 2)
    g = F4.gen()
    M = MatW.diag(W, [W.teichmuller(g), W.one])
    assert M.sigma() == MatW.diag(W, [W.teichmuller(g * g), W.one])
    assert M.sigma().sigma_inverse() == M


def test_matrices_over_dual_numbers():
    A = QuotientPoly.dual_numbers(FiniteField.of(2))
    W = WittRing.over(A, 2)
    e = W.teichmuller(A.gens()[0])
    M = MatW.from_rows(W, [[1, e], [0, 1]])
    assert M.inverse() == MatW.from_rows(W, [[1, -e], [0, 1]])


def test_pmat_equality_across_shifts():
    W = _w()
    ident = MatW.identity(W, 2)
    assert PMat(ident * 2, 1).equals(PMat(ident, 0))
    assert not PMat(ident, 1).equals(PMat(ident, 0))
    assert (PMat(ident, 1) * PMat(ident, 2)).shift == 3


def test_truncate_and_pad():
    W = _w(3)
    M = MatW.from_rows(W, [[1, 2], [3, 4]])
    assert M.truncate(2).n == 2
    assert M.truncate(2).pad(3).truncate(2) == M.truncate(2)
    assert M.times_p_power(1) == M * 2
