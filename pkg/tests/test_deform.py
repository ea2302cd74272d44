import pytest

from wittdisp.deform import (
    LogWittElem,
    SquareZeroData,
    TangentVector,
    enumerate_lifts,
    gmzcf_solve_trace,
    psi_a_group,
    rigidity_check,
    specialize,
    tangent_class,
    translate_lift,
    universal_deformation,
)
from wittdisp.displays import Display
from wittdisp.exceptions import (
    BadDecomposition,
    BadSpec,
    NotAdjointNilpotent,
    NotCongruent,
    UnsupportedIdeal,
)
from wittdisp.groups import GroupSpec
from wittdisp.matrices import MatW
from wittdisp.rings import FiniteField, QuotientPoly

F2 = FiniteField.of(2)
GL2 = GroupSpec.gl(2, 1)
SWAP = [[0, 1], [1, 0]]


@pytest.fixture
def data():
    return SquareZeroData.dual_numbers(F2)


def _e(data):
    return data.A.gens()[0]


def test_square_zero_validation():
    A = QuotientPoly.truncated(F2, ["t"], 3)
    with pytest.raises(UnsupportedIdeal):
        SquareZeroData(A, tuple(A.gens()))
    dual = QuotientPoly.dual_numbers(F2)
    with pytest.raises(UnsupportedIdeal):
        SquareZeroData(dual, (dual.one + dual.gens()[0],))
    with pytest.raises(UnsupportedIdeal):
        SquareZeroData(F2, ())


def test_quotient_and_ideal(data):
    e = _e(data)
    assert data.contains(e)
    assert not data.contains(data.A.one)
    assert len(data.ideal_elements()) == 2
    assert data.quotient == F2


def test_log_coordinates(data):
    W = data.witt(2)
    e = _e(data)
    with pytest.raises(BadDecomposition):
        LogWittElem.from_witt(W.one, data)
    x = LogWittElem.from_witt(W.vec([e, e]), data)
    assert x.frobenius(2).is_zero()
    assert x.verschiebung().coords == (data.A.zero, e)
    assert (x + x).is_zero()
    assert x.to_witt(W) == W.vec([e, e])


def test_gmzcf_recovers_planted_solution(data):
    W = data.witt(2)
    e = _e(data)
    U = MatW.from_rows(W, SWAP)
    X0 = MatW.from_rows(W, [[0, W.teichmuller(e)], [0, W.vec([0, e])]])
    h0 = MatW.identity(W, 2) + X0
    Uprime = h0.inverse() * U * psi_a_group(h0, GL2, data)
    h, steps = gmzcf_solve_trace(U, Uprime, data, GL2)
    assert h == h0
    assert steps <= GL2.dim * W.n


def test_gmzcf_preconditions(data):
    W = data.witt(2)
    with pytest.raises(NotCongruent):
        gmzcf_solve_trace(MatW.from_rows(W, SWAP), MatW.identity(W, 2), data, GL2)
    ident = MatW.identity(W, 2)
    with pytest.raises(NotAdjointNilpotent):
        gmzcf_solve_trace(ident, ident, data, GL2)


def test_psi_of_identity_and_zero_translation(data):
    W = data.witt(2)
    U = MatW.from_rows(W, SWAP)
    assert psi_a_group(MatW.identity(W, 2), GL2, data) == MatW.identity(W, 2)
    assert translate_lift(U, TangentVector((data.A.zero,)), GL2) == U


def test_lifts_of_gl2(data):
    U0 = MatW.from_rows(data.quotient_witt(2), SWAP)
    lifts = enumerate_lifts(U0, data, GL2)
    assert len(lifts) == 2
    U = data.lift_matrix(U0)
    classes = {repr(tangent_class(U, L.U, data, GL2).to_json()) for L in lifts}
    assert len(classes) == 2

    uni = universal_deformation(U0, 2, GL2)
    assert uni.parent.base.variables == ("t1",)
    special = specialize(uni, data.A, [_e(data)])
    assert special.U in [L.U for L in lifts]
    assert special.U != U


def test_lifts_of_gl3(data):
    spec = GroupSpec.gl(3, 1)
    U0 = MatW.from_rows(data.quotient_witt(2), [[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    assert len(enumerate_lifts(U0, data, spec)) == 4


def test_universal_deformation_arguments(data):
    U0 = MatW.from_rows(data.quotient_witt(2), SWAP)
    with pytest.raises(BadSpec):
        universal_deformation(U0, 0, GL2)
    with pytest.raises(BadSpec):
        universal_deformation(data.lift_matrix(U0), 2, GL2)


def test_rigidity(data):
    D = Display(GL2, MatW.from_rows(data.witt(2), SWAP))
    assert rigidity_check(D, data)
