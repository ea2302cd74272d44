"""Seeded property suite behind the ``selftest`` verb."""

from __future__ import annotations

import itertools
import logging
import random
import time
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from .deform import (
    SquareZeroData,
    enumerate_lifts,
    gmzcf_solve_trace,
    psi_a_group,
    specialize,
    tangent_class,
    tangent_vectors,
    universal_deformation,
)
from .displays import (
    Display,
    PrecisionBudget,
    adjoint_slopes,
    is_adjoint_nilpotent,
    newton_slopes,
    phi_orbits,
    sigma_orbits,
)
from .exceptions import BadSpec, WittDispError
from .groups import GroupSpec, conjugation_formula_holds
from .matrices import MatW, PMat
from .polys import derive_universal_polys, verify_ghost_identities
from .rings import FiniteField, IntegerPoly, QuotientPoly, RingDescriptor, ZmodPM
from .rz import (
    BasePoint,
    RZPoint,
    _hermite_candidates,
    adlv_enumerate,
    automorphism_triviality,
    hmu_act,
    jb_action,
    recover_display,
    rz_condition,
    working_length,
)
from .witt import WittRing
from .workers import map_ordered

logger = logging.getLogger(__name__)

Property = Callable[[random.Random, bool], Dict[str, Any]]
PROPERTIES: Dict[str, Property] = {}


def register(name: str) -> Callable[[Property], Property]:
    def deco(fn: Property) -> Property:
        PROPERTIES[name] = fn
        return fn

    return deco


def random_hmu_shape(spec: GroupSpec, parent: WittRing, rng: random.Random) -> MatW:
    """Random matrix with I(R) entries at the weight -1 positions."""
    upos = set(spec.upos())
    rows = []
    for i in range(spec.h):
        row = []
        for j in range(spec.h):
            x = parent.random_element(rng)
            if (i, j) in upos:
                x = parent.vec([parent.base.zero] + list(x.coeffs[1:]))
            row.append(x)
        rows.append(row)
    return MatW.from_rows(parent, rows)


def random_hmu(spec: GroupSpec, parent: WittRing, rng: random.Random) -> MatW:
    while True:
        H = random_hmu_shape(spec, parent, rng)
        if H.is_invertible():
            return H


def random_adjoint_nilpotent(spec: GroupSpec, parent: WittRing, rng: random.Random) -> Display:
    while True:
        D = Display(spec, MatW.random_invertible(parent, spec.h, rng))
        if is_adjoint_nilpotent(D):
            return D


def _witt_ideal_matrices(data: SquareZeroData, parent: WittRing, h: int) -> List[MatW]:
    vecs = [parent.vec(list(c)) for c in itertools.product(data.ideal_elements(), repeat=parent.n)]
    return [
        MatW(parent, tuple(tuple(flat[i * h:(i + 1) * h]) for i in range(h)))
        for flat in itertools.product(vecs, repeat=h * h)
    ]


@register("ghost_identities")
def check_ghost_identities(rng: random.Random, quick: bool) -> Dict[str, Any]:
    limits = {2: 3, 3: 2, 5: 2} if quick else {2: 5, 3: 4, 5: 3}
    ok, cases = True, 0
    for p, top in limits.items():
        for n in range(1, top + 1):
            ok = ok and verify_ghost_identities(derive_universal_polys(p, n))
            cases += 1
    return {"ok": ok, "cases": cases}


def _sample_rings() -> List[RingDescriptor]:
    return [FiniteField.of(2, 2), ZmodPM(3, 2), QuotientPoly.dual_numbers(FiniteField.of(2, 1))]


@register("witt_ring_axioms")
def check_witt_ring_axioms(rng: random.Random, quick: bool) -> Dict[str, Any]:
    count = 20 if quick else 1000
    n = 2 if quick else 3
    cases = 0
    for base in _sample_rings():
        W = WittRing.over(base, n)
        for _ in range(count):
            x, y, z = (W.random_element(rng) for _ in range(3))
            if (x + y) + z != x + (y + z) or x + y != y + x:
                return {"ok": False, "cases": cases, "ring": base.to_json()}
            if (x * y) * z != x * (y * z) or x * y != y * x:
                return {"ok": False, "cases": cases, "ring": base.to_json()}
            if x * (y + z) != x * y + x * z or x + (-x) != W.zero or x * W.one != x:
                return {"ok": False, "cases": cases, "ring": base.to_json()}
            cases += 1
    return {"ok": True, "cases": cases}


@register("frobenius_verschiebung")
def check_frobenius_verschiebung(rng: random.Random, quick: bool) -> Dict[str, Any]:
    count = 20 if quick else 1000
    n = 2 if quick else 3
    cases = 0
    for base in _sample_rings():
        W = WittRing.over(base, n)
        short = W.with_length(n - 1)
        for _ in range(count):
            x = W.random_element(rng)
            y = short.random_element(rng)
            if x.verschiebung().frobenius() != x * W.p:
                return {"ok": False, "cases": cases, "identity": "FV = p"}
            if (x.frobenius() * y).verschiebung() != x * y.verschiebung():
                return {"ok": False, "cases": cases, "identity": "V(Fx y) = x V(y)"}
            Fx = x.frobenius()
            if any(Fx.ghost(k) != x.ghost(k + 1) for k in range(n - 1)):
                return {"ok": False, "cases": cases, "identity": "w_k F = w_k+1"}
            cases += 1
    return {"ok": True, "cases": cases}


@register("divided_frobenius_conjugation")
def check_divided_frobenius(rng: random.Random, quick: bool) -> Dict[str, Any]:
    count = 3 if quick else 200
    n = 2 if quick else 3
    W = WittRing.over(IntegerPoly(("a", "b")), n, p=2)
    cases = 0
    for spec in (GroupSpec.gl(2, 1), GroupSpec.gl(3, 1)):
        for _ in range(count):
            if not conjugation_formula_holds(random_hmu_shape(spec, W, rng), spec):
                return {"ok": False, "cases": cases, "h": spec.h}
            cases += 1
    return {"ok": True, "cases": cases}


@register("orbit_equivalence")
def check_orbit_equivalence(rng: random.Random, quick: bool) -> Dict[str, Any]:
    cases = [("GL2/F2/n1", GroupSpec.gl(2, 1), FiniteField.of(2), 1)]
    if not quick:
        cases += [
            ("GL2/F3/n1", GroupSpec.gl(2, 1), FiniteField.of(3), 1),
            ("GL1/F4/n2", GroupSpec(1, (1,)), FiniteField.of(2, 2), 2),
            ("GL1w0/F3/n2", GroupSpec(1, (0,)), FiniteField.of(3), 2),
        ]
    counts = {}
    for label, spec, field, n in cases:
        parent = WittRing.over(field, n)
        counts[label] = [len(phi_orbits(spec, parent)), len(sigma_orbits(spec, parent))]
    ok = all(a == b for a, b in counts.values())
    return {"ok": ok, "cases": len(counts), "counts": counts}


@register("slopes")
def check_slopes(rng: random.Random, quick: bool) -> Dict[str, Any]:
    field = FiniteField.of(2)
    W = WittRing.over(field, 6)
    p = W.p
    fixed = [
        (MatW.diag(W, [1, p]), {Fraction(0): 1, Fraction(1): 1}),
        (MatW.from_rows(W, [[0, p], [1, 0]]), {Fraction(1, 2): 2}),
        (MatW.identity(W, 3), {Fraction(0): 3}),
    ]
    for b, expected in fixed:
        if dict(newton_slopes(PMat(b)).slopes) != expected:
            return {"ok": False, "cases": 0, "b": b.to_json()}
    count = 5 if quick else 100
    cases = len(fixed)
    for _ in range(count):
        h = rng.choice((2, 3))
        weights = tuple(rng.randrange(2) for _ in range(h))
        Wh = WittRing.over(field, 12 if h == 3 else 6)
        units = [Wh.random_unit(rng) for _ in range(h)]
        D = Display(GroupSpec(h, weights), MatW.diag(Wh, units))
        std = set(newton_slopes(D.b()).values())
        adj = set(adjoint_slopes(D).values())
        if (Fraction(-1) in adj) != ({Fraction(0), Fraction(1)} <= std):
            return {"ok": False, "cases": cases, "weights": list(weights)}
        cases += 1
    return {"ok": True, "cases": cases}


@register("adjoint_nilpotence")
def check_adjoint_nilpotence(rng: random.Random, quick: bool) -> Dict[str, Any]:
    count = 10 if quick else 100
    spec = GroupSpec.gl(2, 1)
    cases = 0
    for f in (1, 2):
        W = WittRing.over(FiniteField.of(2, f), 8)
        for _ in range(count):
            D = Display(spec, MatW.random_invertible(W, 2, rng))
            by_slopes = all(s > -1 for s in adjoint_slopes(D).values())
            if is_adjoint_nilpotent(D) != by_slopes:
                return {"ok": False, "cases": cases, "U": D.U.to_json()}
            cases += 1
    return {"ok": True, "cases": cases}


@register("gmzcf")
def check_gmzcf(rng: random.Random, quick: bool) -> Dict[str, Any]:
    count = 2 if quick else 50
    spec = GroupSpec.gl(2, 1)
    data = SquareZeroData.dual_numbers(FiniteField.of(2))
    W = data.witt(2)
    ident = MatW.identity(W, 2)
    candidates = _witt_ideal_matrices(data, W, 2)
    worst = 0
    for case in range(count):
        D = random_adjoint_nilpotent(spec, W, rng)
        X0 = rng.choice(candidates)
        h0 = ident + X0
        Uprime = h0.inverse() * D.U * psi_a_group(h0, spec, data)
        h, steps = gmzcf_solve_trace(D.U, Uprime, data, spec)
        worst = max(worst, steps)
        if h != h0 or steps > spec.dim * W.n:
            return {"ok": False, "cases": case, "steps": steps}
        solutions = [
            X for X in candidates
            if (ident - X) * D.U * psi_a_group(ident + X, spec, data) == Uprime
        ]
        if solutions != [X0]:
            return {"ok": False, "cases": case, "solutions": len(solutions)}
    return {"ok": True, "cases": count, "max_iterations": worst}


def lift_orbit_count(U: MatW, data: SquareZeroData, spec: GroupSpec) -> int:
    """Lift classes by brute force: all lifts modulo the H^mu(a) action."""
    W = U.parent
    ident = MatW.identity(W, spec.h)
    upos = set(spec.upos())
    mats = _witt_ideal_matrices(data, W, spec.h)
    stabilising = [X for X in mats if all(X[i, j].in_ideal() for i, j in upos)]
    orbit = {((ident - X) * U * psi_a_group(ident + X, spec, data)).key() for X in stabilising}
    # the action is by translations, so every class has the size of this orbit
    return len(mats) // len(orbit)


@register("lift_count")
def check_lift_count(rng: random.Random, quick: bool) -> Dict[str, Any]:
    data = SquareZeroData.dual_numbers(FiniteField.of(2))
    results = {}
    shapes = [(2, 1)] if quick else [(2, 1), (3, 1)]
    for h, d in shapes:
        spec = GroupSpec.gl(h, d)
        W0 = data.quotient_witt(2)
        D0 = random_adjoint_nilpotent(spec, W0, rng)
        lifts = enumerate_lifts(D0.U, data, spec)
        U = data.lift_matrix(D0.U)
        expected = len(data.ideal_elements()) ** (d * (h - d))
        classes = {repr(tangent_class(U, L.U, data, spec).to_json()) for L in lifts}
        ok = len(lifts) == expected and len(classes) == expected
        if h == 2:
            ok = ok and lift_orbit_count(U, data, spec) == expected
        D_uni = universal_deformation(D0.U, 2, spec)
        hits = set()
        for t in tangent_vectors(data, spec):
            Ds = specialize(D_uni, data.A, list(t.coords))
            hits.add(repr(tangent_class(U, Ds.U, data, spec).to_json()))
        ok = ok and hits == classes
        results[f"GL{h}"] = {"lifts": len(lifts), "expected": expected, "ok": ok}
    return {"ok": all(r["ok"] for r in results.values()), "cases": len(results), "shapes": results}


def _lattice_oracle(M: MatW, u: MatW, e: int, spec: GroupSpec) -> bool:
    """X = M^-1 b sigma(M) in GL(W) mu(p) GL(W), via integrality of X and p X^-1.

    det M = det sigma(M) = p^e, so v(det X) = v(det b) holds for every candidate.
    """
    parent = M.parent
    B = u * spec.mu_p(parent)
    Y = M.adjugate() * B * M.sigma()
    if any(x.valuation() < e for _, _, x in Y.entries()):
        return False
    p_mu_inv = MatW.diag(parent, [parent.p ** (1 - w) for w in spec.weights])
    Z = M.sigma().adjugate() * p_mu_inv * u.inverse() * M
    return all(x.valuation() >= e for _, _, x in Z.entries())


@register("adlv")
def check_adlv(rng: random.Random, quick: bool) -> Dict[str, Any]:
    cases = 0
    gl1 = GroupSpec(1, (1,))
    windows = range(0, 3) if quick else range(0, 6)
    fields = [(2, 1), (3, 1)] if quick else [(2, 1), (2, 2), (3, 1), (5, 1)]
    for (p, f), m, N in itertools.product(fields, (1, 2), windows):
        W = WittRing.over(FiniteField.of(p, f), 1)
        base = BasePoint(MatW.identity(W, 1), gl1)
        if len(adlv_enumerate(base, m, N)) != 2 * N + 1:
            return {"ok": False, "cases": cases, "gl1": [p, f, m, N]}
        cases += 1

    spec = GroupSpec.gl(2, 1)
    field = FiniteField.of(2)
    base = BasePoint(MatW.identity(WittRing.over(field, 1), 2), spec)
    cosets = adlv_enumerate(base, 1, 1)
    parent = WittRing.over(field, working_length(2, 1, 0, PrecisionBudget(1)))
    u = base.u.pad(parent.n)
    oracle = sum(
        1 for diag, M in _hermite_candidates(parent, 2, 1)
        if _lattice_oracle(M, u, sum(a + 1 for a in diag), spec)
    )
    ok = oracle == len(cosets)
    for c in cosets:
        pt = recover_display(c, base)
        ok = ok and rz_condition(pt.D, pt.g, base.b(pt.g.n))
    return {"ok": ok, "cases": cases + 1, "gl2_count": len(cosets), "oracle": oracle}


@register("rz_invariance")
def check_rz_invariance(rng: random.Random, quick: bool) -> Dict[str, Any]:
    count = 5 if quick else 100
    spec = GroupSpec.gl(2, 1)
    cases = 0
    fields = (1,) if quick else (1, 2)
    for f in fields:
        W = WittRing.over(FiniteField.of(2, f), 3)
        lifted = W.with_length(4)
        for _ in range(count):
            u = MatW.random_invertible(W, 2, rng)
            b = BasePoint(u, spec).b()
            pt = RZPoint(Display(spec, u), PMat(MatW.identity(W, 2), 0))
            moved = hmu_act(pt, random_hmu(spec, lifted, rng))
            if not rz_condition(moved.D, moved.g, b):
                return {"ok": False, "cases": cases, "action": "H^mu"}
            k = rng.choice([1, 3, 5, W.p, W.p**2])
            moved = jb_action(pt, PMat(MatW.diag(W, [k, k]), 0), b)
            if not rz_condition(moved.D, moved.g, b):
                return {"ok": False, "cases": cases, "action": "J_b"}
            cases += 1
        small = WittRing.over(FiniteField.of(2, f), 1)
        for _ in range(2 if quick else 10):
            D = random_adjoint_nilpotent(spec, small, rng)
            g = PMat(MatW.random_invertible(small, 2, rng), 0)
            if not automorphism_triviality(RZPoint(D, g)):
                return {"ok": False, "cases": cases, "action": "automorphisms"}
            cases += 1
    return {"ok": True, "cases": cases}


def _run_one(item: Tuple[str, int, bool]) -> Dict[str, Any]:
    name, seed, quick = item
    rng = random.Random(f"{seed}:{name}")
    started = time.monotonic()
    try:
        result = PROPERTIES[name](rng, quick)
    except WittDispError as exc:
        logger.exception("selftest %s raised", name)
        result = {"ok": False, "error": type(exc).__name__, "message": str(exc)}
    logger.info("selftest %s: ok=%s in %.2fs", name, result["ok"], time.monotonic() - started)
    return result


def run_all(
    seed: int = 0,
    names: Optional[Sequence[str]] = None,
    quick: bool = False,
    threads: int = 1,
) -> Dict[str, Any]:
    selected = list(names) if names else sorted(PROPERTIES)
    unknown = [n for n in selected if n not in PROPERTIES]
    if unknown:
        raise BadSpec(f"unknown properties: {', '.join(unknown)}")
    results = map_ordered(_run_one, [(n, seed, quick) for n in selected], threads)
    report = dict(zip(selected, results))
    return {"seed": seed, "quick": quick, "properties": report, "ok": all(r["ok"] for r in report.values())}
