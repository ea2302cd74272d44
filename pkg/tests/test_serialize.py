import json
from fractions import Fraction

import pytest

from wittdisp.displays import Display, SlopeVec
from wittdisp.exceptions import BadSpec, SearchSpaceTooLarge
from wittdisp.groups import GroupSpec
from wittdisp.matrices import MatW, PMat
from wittdisp.rings import FiniteField, QuotientPoly
from wittdisp.rz import BasePoint, RZPoint, adlv_enumerate
from wittdisp.serialize import (
    coset_from_json,
    coset_to_json,
    display_from_json,
    display_to_json,
    dumps,
    error_to_json,
    rz_point_from_json,
    rz_point_to_json,
    slopes_from_json,
    slopes_to_json,
)
from wittdisp.witt import WittRing

GL2 = GroupSpec.gl(2, 1)


def _reload(obj):
    return json.loads(dumps(obj))


def test_display_over_f4():
    F4 = FiniteField.of(2, 2)
    W = WittRing.over(F4, 2)
    U = MatW.from_rows(W, [[W.teichmuller(F4.gen()), 1], [1, 0]])
    D = Display(GL2, U)
    body = _reload(display_to_json(D))
    assert body["kind"] == "display"
    assert display_from_json(body) == D


def test_display_over_dual_numbers():
    A = QuotientPoly.dual_numbers(FiniteField.of(3))
    W = WittRing.over(A, 2)
    e = W.teichmuller(A.gens()[0])
    D = Display(GroupSpec.sl(2, 1), MatW.from_rows(W, [[1, e], [0, 1]]))
    assert display_from_json(_reload(display_to_json(D))) == D


def test_slopes():
    s = SlopeVec(((Fraction(-1, 2), 2), (Fraction(3), 1)))
    body = _reload(slopes_to_json(s))
    assert body["slopes"] == [["-1/2", 2], ["3/1", 1]]
    assert slopes_from_json(body) == s


def test_lattice_coset():
    W = WittRing.over(FiniteField.of(2), 1)
    base = BasePoint(MatW.identity(W, 2), GL2)
    for c in adlv_enumerate(base, 1, 1):
        back = coset_from_json(_reload(coset_to_json(c)))
        assert back.key() == c.key()
        assert back.shift == c.shift


def test_rz_point():
    W = WittRing.over(FiniteField.of(2), 2)
    D = Display(GL2, MatW.from_rows(W, [[0, 1], [1, 0]]))
    pt = RZPoint(D, PMat(MatW.diag(W, [1, 2]), 1))
    back = rz_point_from_json(_reload(rz_point_to_json(pt)))
    assert back.D == D
    assert back.g.shift == 1
    assert back.g.equals(pt.g)


def test_schema_mismatch():
    W = WittRing.over(FiniteField.of(2), 1)
    body = display_to_json(Display(GL2, MatW.identity(W, 2)))
    body["schema"] = "v0"
    with pytest.raises(BadSpec):
        display_from_json(body)


def test_error_payload():
    body = error_to_json(SearchSpaceTooLarge("too many", size=11, cap=10))
    assert body["error"] == "SearchSpaceTooLarge"
    assert body["message"] == "too many"
