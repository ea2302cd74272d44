from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .deform import SquareZeroData, _witt_ideal_vectors
from .displays import (
    DEFAULT_CAP,
    Display,
    PrecisionBudget,
    _hmu_action_table,
    are_isomorphic,
    cartan_membership,
    enumerate_group,
    phi_conjugate,
    smith_normal_form,
)
from .exceptions import (
    BadSpec,
    InsufficientPrecision,
    MixedRings,
    NotAField,
    NotInJb,
    NotReduced,
    SearchSpaceTooLarge,
)
from .groups import GroupSpec
from .matrices import MatW, PMat
from .rings import FiniteField, field_embedding
from .witt import WittRing, WittVec
from .workers import map_ordered

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BasePoint:
    """u over W(F_q) defining b = u mu(p); digits past u's length are zero."""

    u: MatW
    spec: GroupSpec

    def b(self, n: Optional[int] = None) -> PMat:
        u = self.u if n is None else self.u.pad(n)
        return PMat(u * self.spec.mu_p(u.parent), 0)


@dataclass(frozen=True)
class RZPoint:
    D: Display
    g: PMat

    def to_json(self) -> Dict[str, Any]:
        return {"display": self.D.to_json(), "g": self.g.to_json()}


@dataclass(frozen=True)
class LatticeCoset:
    """p^-shift * M with M lower triangular, diagonal p^(a_i + shift), below-diagonal reduced."""

    M: MatW
    diag: Tuple[int, ...]
    shift: int

    def g(self) -> PMat:
        return PMat(self.M, self.shift)

    def key(self) -> Tuple[Any, ...]:
        return (self.diag, self.M.key())

    def to_json(self) -> Dict[str, Any]:
        h = self.M.h
        below = [
            [[c.to_json() for c in self.M[i, j].coeffs[: self.diag[i] + self.shift]] for j in range(i)]
            for i in range(h)
        ]
        return {"diag": list(self.diag), "shift": self.shift, "below": below}


def _base_matrix(base: Union[BasePoint, PMat], n: int) -> PMat:
    if isinstance(base, BasePoint):
        return base.b(max(n, base.u.n))
    return base


def rz_condition(D: Display, g: PMat, base: Union[BasePoint, PMat]) -> bool:
    """g^-1 b sigma(g) = U mu(p), checked as B sigma(G) = p^(s_b) G U mu(p).

    `base` is a BasePoint or b itself as a PMat over the display's Witt ring.
    """
    b = _base_matrix(base, min(D.n, g.n))
    n = min(D.n, g.n, b.n)
    if n < 1:
        raise InsufficientPrecision("no common precision", needed=1)
    G = g.mat.truncate(n)
    B = b.mat.truncate(n)
    U = D.U.truncate(n)
    lhs = PMat(B * G.sigma(), b.shift)
    rhs = PMat(G * U * D.spec.mu_p(U.parent), 0)
    return lhs.equals(rhs)


def in_jb(j: PMat, base: Union[BasePoint, PMat]) -> bool:
    b = _base_matrix(base, j.n)
    n = min(j.n, b.n)
    J, B = j.mat.truncate(n), b.mat.truncate(n)
    return B * J.sigma() == J * B


def jb_action(pt: RZPoint, j: PMat, base: Union[BasePoint, PMat]) -> RZPoint:
    if not in_jb(j, base):
        raise NotInJb("j^-1 b sigma(j) != b")
    n = min(j.n, pt.g.n)
    return RZPoint(pt.D, PMat(j.mat.truncate(n), j.shift) * PMat(pt.g.mat.truncate(n), pt.g.shift))


def hmu_act(pt: RZPoint, h: MatW) -> RZPoint:
    """(U, g) . h = (h^-1 U Phi(h), g h)."""
    D = phi_conjugate(pt.D, h)
    n = D.n
    return RZPoint(D, PMat(pt.g.mat.truncate(n) * h.truncate(n), pt.g.shift))


def _digit_vectors(parent: WittRing, free: int) -> List[WittVec]:
    """Witt vectors whose coordinates vanish from index `free` on."""
    elems = list(parent.base.elements())
    zero = parent.base.zero
    return [
        parent.vec(list(head) + [zero] * (parent.n - free))
        for head in itertools.product(elems, repeat=free)
    ]


def _hermite_candidates(parent: WittRing, h: int, N: int) -> Iterator[Tuple[Tuple[int, ...], MatW]]:
    p = parent.p
    for diag in itertools.product(range(-N, N + 1), repeat=h):
        choices = []
        for i in range(h):
            below = _digit_vectors(parent, diag[i] + N)
            choices.append([below] * i)
        flat_choices = [c for row in choices for c in row]
        for flat in itertools.product(*flat_choices):
            rows = []
            k = 0
            for i in range(h):
                row: List[Any] = []
                for j in range(h):
                    if j < i:
                        row.append(flat[k])
                        k += 1
                    elif j == i:
                        row.append(p ** (diag[i] + N))
                    else:
                        row.append(0)
                rows.append(row)
            yield diag, MatW.from_rows(parent, rows)


def hermite_count(q: int, h: int, N: int) -> int:
    total = 0
    for diag in itertools.product(range(-N, N + 1), repeat=h):
        total += q ** sum((diag[i] + N) * i for i in range(h))
    return total


def working_length(h: int, N: int, shift: int, budget: PrecisionBudget) -> int:
    return max(budget.n, 2 * N * h + shift + 1 + budget.guard)


def adlv_enumerate(
    base: BasePoint,
    m: int = 1,
    N: int = 1,
    budget: Optional[PrecisionBudget] = None,
    threads: int = 1,
    cap: int = DEFAULT_CAP,
) -> List[LatticeCoset]:
    """Hermite cosets g G(W') in the window with g^-1 b sigma(g) in G(W) mu(p) G(W), over F_{p^{fm}}."""
    spec = base.spec
    if not spec.is_gl:
        raise BadSpec("ADLV enumeration is implemented for GL_h")
    small = base.u.parent.base
    if not isinstance(small, FiniteField):
        raise NotAField("ADLV enumeration needs a finite field")
    budget = budget or PrecisionBudget(base.u.n)
    large = FiniteField.of(small.p, small.f * m)
    embed = field_embedding(small, large)
    L = working_length(spec.h, N, 0, budget)
    parent = WittRing(large, small.p, L)
    u = base.u.pad(L).map_coefficients(embed, parent)
    B = (u * spec.mu_p(parent))

    size = hermite_count(large.q, spec.h, N)
    if size > cap:
        raise SearchSpaceTooLarge(f"{size} Hermite candidates exceed cap {cap}", size=size, cap=cap)
    logger.debug("ADLV: %d candidates over F_%d at length %d", size, large.q, L)

    def _check(item: Tuple[Tuple[int, ...], MatW]) -> Optional[LatticeCoset]:
        diag, M = item
        e = sum(a + N for a in diag)
        Y = M.adjugate() * B * M.sigma()
        if cartan_membership(PMat(Y, e), spec):
            return LatticeCoset(M, diag, N)
        return None

    found = [c for c in map_ordered(_check, _hermite_candidates(parent, spec.h, N), threads) if c]
    return sorted(found, key=lambda c: c.key())


def adlv_count_table(
    base: BasePoint, M: int, N: int, budget: Optional[PrecisionBudget] = None, threads: int = 1, cap: int = DEFAULT_CAP
) -> List[Tuple[int, int]]:
    """(m, fixed-point count at extension m) for m = 1..M."""
    return [(m, len(adlv_enumerate(base, m, N, budget, threads, cap))) for m in range(1, M + 1)]


def _permutation_to_mu(spec: GroupSpec, parent: WittRing) -> MatW:
    # P with P diag(sorted weights) P^-1 = mu(p)
    order = sorted(range(spec.h), key=lambda i: (spec.weights[i], i))
    rows = [[0] * spec.h for _ in range(spec.h)]
    for slot, i in enumerate(order):
        rows[i][slot] = 1
    return MatW.from_rows(parent, rows)


def recover_display(coset: LatticeCoset, base: BasePoint) -> RZPoint:
    """Adjusts g by k in G(W') so that U = g^-1 b sigma(g) mu(p)^-1 is integral."""
    spec = base.spec
    M = coset.M
    parent = M.parent
    embed = field_embedding(base.u.parent.base, parent.base)
    u = base.u.pad(parent.n).map_coefficients(embed, parent)
    B = u * spec.mu_p(parent)
    e = sum(a + coset.shift for a in coset.diag)
    Y = M.adjugate() * B * M.sigma()
    Lm, exps, R = smith_normal_form(Y)
    if [x - e for x in exps] != sorted(spec.weights):
        raise BadSpec("coset is not in the affine Deligne-Lusztig set")
    P = _permutation_to_mu(spec, parent)
    Pinv = P.transpose()
    k = (R * Pinv).sigma_inverse()
    U = k.inverse() * Lm.inverse() * Pinv
    n_u = parent.n - e - 1
    if n_u < 1:
        raise InsufficientPrecision("not enough digits left to read U", needed=parent.n + 1)
    D = Display(spec, U.truncate(n_u))
    pt = RZPoint(D, PMat(M * k, coset.shift))
    if not rz_condition(D, pt.g, PMat(B, 0)):
        raise InsufficientPrecision("recovered display fails the defining equation", needed=parent.n + 1)
    return pt


def quasi_isogeny_search(
    D1: Display,
    D2: Display,
    entry_digits: int = 1,
    guard: int = 1,
    cap: int = DEFAULT_CAP,
) -> Optional[PMat]:
    """g with g^-1 b1 sigma(g) = b2, i.e. b1 sigma(M) = M b2 for g = p^-s M."""
    if not isinstance(D1.parent.base, FiniteField):
        raise NotAField("quasi-isogeny search needs a finite field")
    n = min(D1.n, D2.n)
    b1 = D1.b().mat.truncate(n)
    b2 = D2.b().mat.truncate(n)
    parent = b1.parent
    ident = MatW.identity(parent, D1.spec.h)
    if b1 == b2:
        return PMat(ident, 0)
    digits = min(entry_digits, n)
    choices = _digit_vectors(parent, digits)
    size = len(choices) ** (D1.spec.h ** 2)
    if size > cap:
        raise SearchSpaceTooLarge(f"{size} candidates exceed cap {cap}", size=size, cap=cap)
    h = D1.spec.h
    for flat in itertools.product(choices, repeat=h * h):
        M = MatW(parent, tuple(tuple(flat[i * h:(i + 1) * h]) for i in range(h)))
        if M.det().valuation() >= n - guard:
            continue
        if b1 * M.sigma() == M * b2:
            return PMat(M, 0)
    return None


def _display_automorphisms(D: Display, cap: int) -> List[MatW]:
    """h in H^mu(W_{n+1}) with h^-1 U Phi(h) = U."""
    table = _hmu_action_table(D.spec, D.parent, cap)
    return [H for H, Hinv, phi in table if Hinv * D.U * phi == D.U]


def _require_reduced(D: Display) -> None:
    if not D.parent.base.is_reduced():
        raise NotReduced("automorphism test needs a reduced coefficient ring")


def automorphism_triviality(pt: RZPoint, cap: int = DEFAULT_CAP) -> bool:
    """True iff every h with (U, g) . h = (U, g) is the identity at the display's length.

    The framing g only pins h modulo p^(n - v(det g)), so a framing of positive
    determinant valuation can leave nontrivial stabiliser elements at length n.
    """
    _require_reduced(pt.D)
    n = min(pt.D.n, pt.g.n)
    D = pt.D.truncate(n)
    G = pt.g.mat.truncate(n)
    ident = MatW.identity(D.parent, D.spec.h)
    for h in _display_automorphisms(D, cap):
        hn = h.truncate(n)
        if G * hn == G and hn != ident:
            logger.debug("nontrivial stabiliser element %r", h)
            return False
    return True


def jb_stabilizer(pt: RZPoint, base: Union[BasePoint, PMat], cap: int = DEFAULT_CAP) -> List[MatW]:
    """Integral j in J_b(W_n) with j . (U, g) isomorphic to (U, g), i.e. j g = g h for an automorphism h of U."""
    _require_reduced(pt.D)
    n = min(pt.D.n, pt.g.n)
    D = pt.D.truncate(n)
    framed = RZPoint(D, PMat(pt.g.mat.truncate(n), pt.g.shift))
    G = framed.g.mat
    moved_by_autos = {(G * h.truncate(n)).key() for h in _display_automorphisms(D, cap)}
    out = []
    for j in enumerate_group(D.spec, D.parent, cap):
        if not in_jb(PMat(j, 0), base):
            continue
        if jb_action(framed, PMat(j, 0), base).g.mat.key() in moved_by_autos:
            out.append(j)
    logger.debug("J_b stabiliser of size %d", len(out))
    return out


def hodge_embed(pt: RZPoint) -> RZPoint:
    """Forgets the subgroup equations; U and g are unchanged."""
    gl = GroupSpec(pt.D.spec.h, pt.D.spec.weights)
    return RZPoint(Display(gl, pt.D.U), pt.g)


def embed_injectivity_check(displays: Sequence[Display], cap: int = DEFAULT_CAP) -> bool:
    """Distinct subgroup-level classes stay distinct after forgetting the subgroup."""
    for D1, D2 in itertools.combinations(displays, 2):
        if are_isomorphic(D1, D2, cap) is not None:
            continue
        gl = GroupSpec(D1.spec.h, D1.spec.weights)
        if are_isomorphic(Display(gl, D1.U), Display(gl, D2.U), cap) is not None:
            return False
    return True


def _ideal_matrices(data: SquareZeroData, n: int, h: int, cap: int) -> List[MatW]:
    per_entry = _witt_ideal_vectors(data, n, lead_zero=False)
    size = len(per_entry) ** (h * h)
    if size > cap:
        raise SearchSpaceTooLarge(f"{size} candidates exceed cap {cap}", size=size, cap=cap)
    parent = data.witt(n)
    return [
        MatW(parent, tuple(tuple(flat[i * h:(i + 1) * h]) for i in range(h)))
        for flat in itertools.product(per_entry, repeat=h * h)
    ]


def deformation_lifts(
    D: Display, g0: PMat, base: BasePoint, data: SquareZeroData, cap: int = DEFAULT_CAP
) -> List[PMat]:
    """All g over W_n(A) reducing to g0 with rz_condition(D, g, base); b is lifted by constants."""
    if D.parent.base != data.A:
        raise MixedRings("display is not over the ring of the square-zero data")
    n = min(D.n, g0.n)
    D = D.truncate(n)
    G0 = data.lift_matrix(g0.mat.truncate(n))
    b = PMat(data.lift_matrix(base.b(max(n, base.u.n)).mat.truncate(n)), 0)
    lifts = []
    for X in _ideal_matrices(data, n, D.spec.h, cap):
        g = PMat(G0 + X, g0.shift)
        if rz_condition(D, g, b):
            lifts.append(g)
    return lifts


def deformation_rigidity(D: Display, base: BasePoint, data: SquareZeroData, cap: int = DEFAULT_CAP) -> bool:
    """Every integral g0 solving the equation for D mod a lifts, and its lifts agree once p is inverted.

    The lifts of g0 are then exactly one coset of {X over W(a) : X U mu(p) = 0},
    whose elements are killed by p.
    """
    if D.parent.base != data.A:
        raise MixedRings("display is not over the ring of the square-zero data")
    n = D.n
    D0 = Display(D.spec, data.reduce_matrix(D.U))
    mu = D.spec.mu_p(D.parent)
    kernel = sum(1 for X in _ideal_matrices(data, n, D.spec.h, cap) if (X * D.U * mu).is_zero())
    checked = 0
    for G0 in enumerate_group(D.spec, D0.parent, cap):
        g0 = PMat(G0, 0)
        if not rz_condition(D0, g0, base):
            continue
        lifts = deformation_lifts(D, g0, base, data, cap)
        if len(lifts) != kernel:
            logger.debug("g0 %r has %d lifts, expected %d", G0, len(lifts), kernel)
            return False
        first = lifts[0].mat
        if any(not (g.mat - first).times_p_power(1).is_zero() for g in lifts[1:]):
            return False
        checked += 1
    logger.debug("deformation rigidity: %d framings with %d lifts each", checked, kernel)
    return True
