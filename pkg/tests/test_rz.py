import pytest

from wittdisp.deform import SquareZeroData
from wittdisp.displays import Display, newton_slopes, phi_orbits
from wittdisp.exceptions import BadSpec, MixedRings, NotInJb, NotReduced
from wittdisp.groups import GroupSpec
from wittdisp.matrices import MatW, PMat
from wittdisp.rings import FiniteField, QuotientPoly
from wittdisp.rz import (
    BasePoint,
    RZPoint,
    adlv_count_table,
    adlv_enumerate,
    automorphism_triviality,
    deformation_lifts,
    deformation_rigidity,
    embed_injectivity_check,
    hermite_count,
    hodge_embed,
    jb_action,
    jb_stabilizer,
    quasi_isogeny_search,
    recover_display,
    rz_condition,
)
from wittdisp.witt import WittRing

GL1 = GroupSpec(1, (1,))
GL2 = GroupSpec.gl(2, 1)


def _w(n, p=2, f=1):
    return WittRing.over(FiniteField.of(p, f), n)


def _swap(W):
    return MatW.from_rows(W, [[0, 1], [1, 0]])


@pytest.mark.parametrize("N", [0, 1, 2, 3])
def test_gl1_counts(N):
    base = BasePoint(MatW.identity(_w(1, p=3), 1), GL1)
    assert len(adlv_enumerate(base, 1, N)) == 2 * N + 1


def test_hermite_count():
    assert hermite_count(2, 1, 3) == 7
    assert hermite_count(2, 2, 1) == 21


def test_count_table_for_gl1():
    base = BasePoint(MatW.identity(_w(1), 1), GL1)
    assert adlv_count_table(base, 2, 1) == [(1, 3), (2, 3)]


def test_gl2_cosets_recover_displays():
    base = BasePoint(MatW.identity(_w(1), 2), GL2)
    cosets = adlv_enumerate(base, 1, 1)
    assert cosets
    assert any(c.diag == (0, 0) for c in cosets)
    for c in cosets:
        pt = recover_display(c, base)
        assert rz_condition(pt.D, pt.g, base)


def test_adlv_is_for_gl_only():
    spec = GroupSpec.sl(2, 1)
    base = BasePoint(MatW.identity(_w(1, p=3), 2), spec)
    with pytest.raises(BadSpec):
        adlv_enumerate(base, 1, 1)


def test_jb_action_keeps_rz_condition():
    W = _w(3)
    D = Display(GL2, _swap(W))
    b = D.b()
    pt = RZPoint(D, PMat(MatW.identity(W, 2), 0))
    assert rz_condition(pt.D, pt.g, b)
    moved = jb_action(pt, PMat(MatW.diag(W, [3, 3]), 0), b)
    assert rz_condition(moved.D, moved.g, b)


def test_jb_rejects_non_centralising():
    W = _w(3)
    D = Display(GL2, MatW.identity(W, 2))
    pt = RZPoint(D, PMat(MatW.identity(W, 2), 0))
    with pytest.raises(NotInJb):
        jb_action(pt, PMat(MatW.from_rows(W, [[1, 1], [0, 1]]), 0), D.b())


def test_quasi_isogeny_found_and_absent():
    W = _w(2)
    D1 = Display(GL2, MatW.identity(W, 2))
    D2 = Display(GL2, MatW.from_rows(W, [[1, 0], [1, 1]]))
    g = quasi_isogeny_search(D1, D2)
    assert g is not None
    assert D1.b().mat * g.mat.sigma() == g.mat * D2.b().mat

    D3 = Display(GL2, _swap(W))
    assert quasi_isogeny_search(D1, D3) is None


def test_rz_condition_accepts_base_point():
    W = _w(2)
    base = BasePoint(_swap(W), GL2)
    pt = RZPoint(Display(GL2, _swap(W)), PMat(MatW.identity(W, 2), 0))
    assert rz_condition(pt.D, pt.g, base)
    assert rz_condition(pt.D, pt.g, base.b())
    bad = PMat(MatW.from_rows(W, [[1, 1], [0, 1]]), 0)
    assert not rz_condition(pt.D, bad, base)


def test_adlv_grows_with_the_window():
    base = BasePoint(MatW.identity(_w(1), 2), GL2)
    found = [adlv_enumerate(base, 1, N) for N in (0, 1, 2)]
    counts = [len(cosets) for cosets in found]
    assert counts == sorted(counts)
    diags = [{c.diag for c in cosets} for cosets in found]
    assert diags[0] <= diags[1] <= diags[2]


def test_quasi_isogeny_absent_for_different_slopes():
    W = _w(3)
    p = W.p
    D1 = Display(GL2, MatW.identity(W, 2))
    D2 = Display(GL2, _swap(W))
    assert D1.b().mat == MatW.diag(W, [1, p])
    assert D2.b().mat == MatW.from_rows(W, [[0, p], [1, 0]])
    W6 = _w(6)
    diag = newton_slopes(PMat(MatW.diag(W6, [1, p])))
    assert diag != newton_slopes(PMat(MatW.from_rows(W6, [[0, p], [1, 0]])))
    assert quasi_isogeny_search(D1, D2, entry_digits=1) is None
    assert quasi_isogeny_search(D1, D1) is not None


def test_automorphisms_are_trivial():
    W = _w(1)
    pt = RZPoint(Display(GL2, _swap(W)), PMat(MatW.identity(W, 2), 0))
    assert automorphism_triviality(pt)


def test_framing_with_lost_digits_has_automorphisms():
    W = _w(2)
    D = Display(GL1, MatW.identity(W, 1))
    assert automorphism_triviality(RZPoint(D, PMat(MatW.identity(W, 1), 0)))
    # g = p only sees h mod 2, and h = 3 is an automorphism of U = 1
    assert not automorphism_triviality(RZPoint(D, PMat(MatW.diag(W, [2]), 0)))


def test_jb_stabilizer_of_swap():
    W = _w(1)
    pt = RZPoint(Display(GL2, _swap(W)), PMat(MatW.identity(W, 2), 0))
    stab = jb_stabilizer(pt, BasePoint(_swap(W), GL2))
    assert MatW.identity(W, 2) in stab
    assert MatW.from_rows(W, [[1, 0], [1, 1]]) in stab
    assert len(stab) == 2


def test_automorphisms_need_reduced_ring():
    A = QuotientPoly.dual_numbers(FiniteField.of(2))
    W = WittRing.over(A, 1)
    pt = RZPoint(Display(GL2, _swap(W)), PMat(MatW.identity(W, 2), 0))
    with pytest.raises(NotReduced):
        automorphism_triviality(pt)


def test_hodge_embedding_forgets_equations():
    W = _w(1, p=3)
    sl = GroupSpec.sl(2, 1)
    pt = RZPoint(Display(sl, MatW.identity(W, 2)), PMat(MatW.identity(W, 2), 0))
    embedded = hodge_embed(pt)
    assert embedded.D.spec.is_gl
    assert rz_condition(embedded.D, embedded.g, BasePoint(MatW.identity(W, 2), embedded.D.spec))


def test_sl2_classes_stay_distinct_in_gl2():
    sl = GroupSpec.sl(2, 1)
    orbits = phi_orbits(sl, _w(1))
    assert len(orbits) == 2
    assert embed_injectivity_check([Display(sl, orbit[0]) for orbit in orbits])


def test_torus_classes_merge_in_gl2():
    # diagonal torus with trivial weights: swap conjugates diag(1, -1) to diag(-1, 1) in GL_2 only
    torus = GroupSpec(2, (0, 0), ("x01", "x10"), (((1, 0), (0, 0)), ((0, 0), (0, 1))))
    W = _w(1, p=3)
    D1 = Display(torus, MatW.diag(W, [1, 2]))
    D2 = Display(torus, MatW.diag(W, [2, 1]))
    assert not embed_injectivity_check([D1, D2])


@pytest.fixture
def dual():
    return SquareZeroData.dual_numbers(FiniteField.of(2))


def _bent_swap(data, n):
    W = data.witt(n)
    e = W.teichmuller(data.A.gens()[0])
    return data.lift_matrix(_swap(data.quotient_witt(n))) + MatW.from_rows(W, [[e, 0], [0, 0]])


@pytest.mark.parametrize("n, expected", [(1, 4), (2, 16)])
def test_lift_counts_over_dual_numbers(dual, n, expected):
    D = Display(GL2, _bent_swap(dual, n))
    base = BasePoint(_swap(_w(n)), GL2)
    g0 = PMat(MatW.identity(_w(n), 2), 0)
    lifts = deformation_lifts(D, g0, base, dual)
    # one free Witt vector over the ideal per entry of the weight-1 column
    assert len(lifts) == expected
    assert all(dual.reduce_matrix(g.mat) == g0.mat for g in lifts)
    first = lifts[0].mat
    assert all((g.mat - first).times_p_power(1).is_zero() for g in lifts)


def test_no_lift_without_a_reduced_solution(dual):
    D = Display(GL2, _bent_swap(dual, 1))
    base = BasePoint(_swap(_w(1)), GL2)
    g0 = PMat(MatW.from_rows(_w(1), [[1, 1], [0, 1]]), 0)
    assert not rz_condition(Display(GL2, _swap(_w(1))), g0, base)
    assert deformation_lifts(D, g0, base, dual) == []


def test_deformation_rigidity_over_dual_numbers(dual):
    D = Display(GL2, _bent_swap(dual, 1))
    assert deformation_rigidity(D, BasePoint(_swap(_w(1)), GL2), dual)
    with pytest.raises(MixedRings):
        deformation_rigidity(Display(GL2, _swap(_w(1))), BasePoint(_swap(_w(1)), GL2), dual)
