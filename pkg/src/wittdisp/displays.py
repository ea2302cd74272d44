from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from .exceptions import (
    BadSpec,
    CharNotP,
    InsufficientPrecision,
    NonUnit,
    NotAField,
    NotInSubgroup,
    SearchSpaceTooLarge,
)
from .groups import (
    GroupSpec,
    check_hmu_element,
    divided_frobenius,
    lie_coordinates,
    lie_projection_pi,
    ring_det,
    subgroup_membership,
)
from .matrices import MatW, PMat
from .rings import FiniteField, RingElem
from .witt import WittRing, WittVec

logger = logging.getLogger(__name__)

DEFAULT_CAP = 200_000


@dataclass(frozen=True)
class PrecisionBudget:
    n: int
    guard: int = 1

    def __post_init__(self) -> None:
        if self.guard < 1:
            raise BadSpec("guard must be >= 1")


@dataclass(frozen=True)
class SlopeVec:
    slopes: Tuple[Tuple[Fraction, int], ...]

    @classmethod
    def from_values(cls, values: Sequence[Fraction]) -> "SlopeVec":
        counts: Dict[Fraction, int] = {}
        for v in values:
            counts[Fraction(v)] = counts.get(Fraction(v), 0) + 1
        return cls(tuple(sorted(counts.items())))

    def values(self) -> List[Fraction]:
        return [s for s, m in self.slopes for _ in range(m)]

    @property
    def total(self) -> int:
        return sum(m for _, m in self.slopes)

    def multiplicity(self, slope: Any) -> int:
        return dict(self.slopes).get(Fraction(slope), 0)

    def to_json(self) -> Dict[str, Any]:
        return {"slopes": [[f"{s.numerator}/{s.denominator}", m] for s, m in self.slopes]}


@dataclass(frozen=True)
class Display:
    """Banal (G, mu)-display given by U in G(W_n(R)); b = U mu(p)."""

    spec: GroupSpec
    U: MatW

    def __post_init__(self) -> None:
        if self.U.h != self.spec.h:
            raise BadSpec(f"U is {self.U.h}x{self.U.h}, spec has h={self.spec.h}")
        if not self.U.is_invertible():
            raise NonUnit("U is not invertible")
        if not subgroup_membership(self.U, self.spec):
            raise NotInSubgroup("U fails the subgroup equations")

    @property
    def n(self) -> int:
        return self.U.n

    @property
    def parent(self) -> WittRing:
        return self.U.parent

    def b(self) -> PMat:
        return PMat(self.U * self.spec.mu_p(self.parent), 0)

    def truncate(self, m: int) -> "Display":
        return Display(self.spec, self.U.truncate(m))

    def to_json(self) -> Dict[str, Any]:
        return {"spec": self.spec.to_json(), "witt": self.parent.to_json(), "U": self.U.to_json()}


def _require_field(parent: WittRing) -> FiniteField:
    if not isinstance(parent.base, FiniteField):
        raise NotAField(f"{parent.base.kind} is not a finite field")
    return parent.base


def phi_conjugate(D: Display, H: MatW) -> Display:
    """H^-1 U Phi(H); the result has length min(n, len(H) - 1)."""
    check_hmu_element(H, D.spec)
    m = min(D.n, H.n - 1)
    phi = divided_frobenius(H, D.spec).truncate(m)
    Hm = H.truncate(m)
    return Display(D.spec, Hm.inverse() * D.U.truncate(m) * phi)


def sigma_conjugate(b: PMat, h: MatW) -> PMat:
    _require_field(b.mat.parent)
    m = min(b.n, h.n)
    hm = h.truncate(m)
    return PMat(hm.inverse() * b.mat.truncate(m) * hm.sigma(), b.shift)


def _entry_choices(parent: WittRing, ideal: bool) -> List[WittVec]:
    elems = list(parent.elements())
    return [x for x in elems if x.in_ideal()] if ideal else elems


def _check_cap(size: int, cap: int, what: str) -> None:
    if size > cap:
        raise SearchSpaceTooLarge(f"{what}: {size} candidates exceed cap {cap}", size=size, cap=cap)


def enumerate_hmu(spec: GroupSpec, parent: WittRing, cap: int = DEFAULT_CAP) -> Iterator[MatW]:
    """All of H^mu(W(R)) cap G at the parent's length, in lexicographic order."""
    upos = set(spec.upos())
    full = _entry_choices(parent, False)
    ideal = _entry_choices(parent, True)
    choices = [ideal if (i, j) in upos else full for i in range(spec.h) for j in range(spec.h)]
    size = 1
    for c in choices:
        size *= len(c)
    _check_cap(size, cap, "H^mu enumeration")
    h = spec.h
    for flat in itertools.product(*choices):
        rows = tuple(tuple(flat[i * h:(i + 1) * h]) for i in range(h))
        H = MatW(parent, rows)
        if not ring_det(H.w0()).is_unit():
            continue
        if not subgroup_membership(H, spec):
            continue
        yield H


def enumerate_group(spec: GroupSpec, parent: WittRing, cap: int = DEFAULT_CAP) -> Iterator[MatW]:
    """All of G(W(R)) at the parent's length."""
    full = _entry_choices(parent, False)
    size = len(full) ** (spec.h * spec.h)
    _check_cap(size, cap, "group enumeration")
    h = spec.h
    for flat in itertools.product(full, repeat=h * h):
        g = MatW(parent, tuple(tuple(flat[i * h:(i + 1) * h]) for i in range(h)))
        if ring_det(g.w0()).is_unit() and subgroup_membership(g, spec):
            yield g


@lru_cache(maxsize=32)
def _hmu_action_table(spec: GroupSpec, parent: WittRing, cap: int) -> Tuple[Tuple[MatW, MatW, MatW], ...]:
    # (H, H^-1 mod length n, Phi(H)) for H in H^mu(W_{n+1})
    lifted = parent.with_length(parent.n + 1)
    out = []
    for H in enumerate_hmu(spec, lifted, cap):
        out.append((H, H.truncate(parent.n).inverse(), divided_frobenius(H, spec)))
    logger.debug("H^mu(W_%d) has %d elements", lifted.n, len(out))
    return tuple(out)


def are_isomorphic(D1: Display, D2: Display, cap: int = DEFAULT_CAP) -> Optional[MatW]:
    """A witness H in H^mu(W_{n+1}) with phi_conjugate(D1, H) = D2, or None."""
    if D1.spec != D2.spec or D1.parent != D2.parent:
        raise BadSpec("displays over different groups or rings")
    lifted = D1.parent.with_length(D1.n + 1)
    if D1.U == D2.U:
        return MatW.identity(lifted, D1.spec.h)
    for H, Hinv, phi in _hmu_action_table(D1.spec, D1.parent, cap):
        if Hinv * D1.U * phi == D2.U:
            return H
    return None


def phi_orbits(spec: GroupSpec, parent: WittRing, cap: int = DEFAULT_CAP) -> List[List[MatW]]:
    """Orbits of H^mu(W_{n+1}) acting on G(W_n) by U -> H^-1 U Phi(H)."""
    table = _hmu_action_table(spec, parent, cap)
    remaining = {U.key(): U for U in enumerate_group(spec, parent, cap)}
    orbits: List[List[MatW]] = []
    for key in sorted(remaining):
        if key not in remaining:
            continue
        U = remaining[key]
        orbit = {}
        for _, Hinv, phi in table:
            V = Hinv * U * phi
            orbit[V.key()] = V
        for k in orbit:
            remaining.pop(k, None)
        orbits.append([orbit[k] for k in sorted(orbit)])
    logger.debug("found %d Phi-orbits", len(orbits))
    return orbits


def _b_lift(U: MatW, spec: GroupSpec) -> MatW:
    """b = U mu(p) at length n+1; weight-0 columns padded with zero."""
    lifted = U.parent.with_length(U.n + 1)
    return U.pad(U.n + 1).map(
        lambda i, j, x: x.times_p_power(1) if spec.weights[j] else x, lifted
    )


def _display_key(b: MatW, spec: GroupSpec) -> Optional[MatW]:
    """U at length n from b at length n+1, or None if b mu(p)^-1 is not integral."""
    n = b.n - 1
    for i in range(spec.h):
        for j in range(spec.h):
            if spec.weights[j] and not b[i, j].in_ideal():
                return None
    return b.map(
        lambda i, j, x: x.shift_down().sigma_inverse() if spec.weights[j] else x.truncate(n),
        b.parent.with_length(n),
    )


def sigma_orbits(spec: GroupSpec, parent: WittRing, cap: int = DEFAULT_CAP) -> List[List[MatW]]:
    """Classes of b = U mu(p) under g^-1 b sigma(g), g in G(W_{n+1}), labelled by U."""
    _require_field(parent)
    lifted = parent.with_length(parent.n + 1)
    group = [(g.inverse(), g.sigma()) for g in enumerate_group(spec, lifted, cap)]
    remaining = {U.key(): U for U in enumerate_group(spec, parent, cap)}
    orbits: List[List[MatW]] = []
    for key in sorted(remaining):
        if key not in remaining:
            continue
        b = _b_lift(remaining[key], spec)
        orbit = {}
        for ginv, gs in group:
            V = _display_key(ginv * b * gs, spec)
            if V is not None:
                orbit[V.key()] = V
        for k in orbit:
            remaining.pop(k, None)
        orbits.append([orbit[k] for k in sorted(orbit)])
    logger.debug("found %d sigma-classes", len(orbits))
    return orbits


# characteristic polynomials and Newton polygons

def charpoly(M: MatW) -> List[WittVec]:
    """Coefficients of det(x - M), leading first; Berkowitz, division free."""
    A = M.rows
    h = M.h
    one, zero = M.parent.one, M.parent.zero
    vect = [one, -A[h - 1][h - 1]]
    for r in range(h - 2, -1, -1):
        m = h - r - 1
        R = A[r][r + 1:]
        C = [A[i][r] for i in range(r + 1, h)]
        sub = [row[r + 1:] for row in A[r + 1:]]
        items = [one, -A[r][r]]
        cur = C
        for _ in range(m):
            items.append(-sum((a * b for a, b in zip(R, cur)), zero))
            cur = [sum((a * b for a, b in zip(row, cur)), zero) for row in sub]
        new = []
        for i in range(m + 2):
            acc = zero
            for j in range(min(i, m) + 1):
                if i - j < len(items):
                    acc = acc + items[i - j] * vect[j]
            new.append(acc)
        vect = new
    return vect


def _lower_hull(points: Sequence[Tuple[int, int]]) -> List[Tuple[int, int]]:
    hull: List[Tuple[int, int]] = []
    for pt in sorted(points):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (pt[1] - y1) - (y2 - y1) * (pt[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def _hull_value(hull: Sequence[Tuple[int, int]], x: int) -> Fraction:
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        if x1 <= x <= x2:
            return Fraction(y1) + Fraction(y2 - y1, x2 - x1) * (x - x1)
    raise ValueError(x)  # pragma: no cover


def polygon_slopes(coeffs: Sequence[WittVec], budget: PrecisionBudget) -> List[Fraction]:
    """Valuations of the roots of sum c_k x^k given leading-first coefficients."""
    deg = len(coeffs) - 1
    known: List[Tuple[int, int]] = []
    unknown: List[int] = []
    for idx, c in enumerate(coeffs):
        k = deg - idx
        v = c.valuation()
        if v >= c.n:
            unknown.append(k)
        else:
            known.append((k, v))
    if 0 in unknown:
        raise InsufficientPrecision("constant term vanishes at the carried precision", needed=budget.n + 1)
    hull = _lower_hull(known)
    limit = budget.n - budget.guard
    for x, y in hull:
        if y >= limit:
            raise InsufficientPrecision(f"vertex valuation {y} reaches precision limit {limit}", needed=y + budget.guard + 1)
    for k in unknown:
        if _hull_value(hull, k) > limit:
            raise InsufficientPrecision(f"coefficient of x^{k} is undetermined", needed=budget.n + 1)
    out: List[Fraction] = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        out += [Fraction(y1 - y2, x2 - x1)] * (x2 - x1)
    return out


def newton_slopes(b: PMat, f: Optional[int] = None, budget: Optional[PrecisionBudget] = None) -> SlopeVec:
    field = _require_field(b.mat.parent)
    f = f or field.f
    budget = budget or PrecisionBudget(b.n)
    N = b.mat
    twist = b.mat
    for _ in range(f - 1):
        twist = twist.sigma()
        N = N * twist
    raw = polygon_slopes(charpoly(N), budget)
    return SlopeVec.from_values([s / f - b.shift for s in raw])


def adjoint_pmat(D: Display) -> PMat:
    """p * Ad(b) on Lie(G) in lie_basis coordinates, with shift 1."""
    spec, parent = D.spec, D.parent
    Uinv = D.U.inverse()
    cols = []
    for X in spec.lie_basis:
        nz = [(i, j) for i in range(spec.h) for j in range(spec.h) if X[i][j]]
        scale = 1 + spec.weight_of(*nz[0]) if nz else 1
        Y = MatW.from_rows(parent, [[X[i][j] for j in range(spec.h)] for i in range(spec.h)])
        Y = Y.times_p_power(scale)
        cols.append(lie_coordinates(D.U * Y * Uinv, spec, parent.p))
    rows = [[cols[c][r] for c in range(spec.dim)] for r in range(spec.dim)]
    return PMat(MatW.from_rows(parent, rows), 1)


def adjoint_slopes(D: Display, budget: Optional[PrecisionBudget] = None) -> SlopeVec:
    _require_field(D.parent)
    return newton_slopes(adjoint_pmat(D), budget=budget)


def _rmat_mul(A: Sequence[Sequence[RingElem]], B: Sequence[Sequence[RingElem]]) -> List[List[RingElem]]:
    h = len(A)
    zero = A[0][0].ring.zero
    return [[sum((A[i][k] * B[k][j] for k in range(h)), zero) for j in range(h)] for i in range(h)]


def adjoint_nilpotence_trace(D: Display) -> Tuple[bool, int]:
    """(nilpotent, steps) for X -> Ad(w0(U)) Frob(pi X) on R tensor Lie(G)."""
    base = D.parent.base
    if base.characteristic != D.parent.p:
        raise CharNotP("adjoint nilpotence test needs pR = 0")
    spec = D.spec
    u0 = D.U.w0()
    u0inv = D.U.inverse().w0()
    bound = (spec.dim + 1) * base.nilpotency_bound()
    worst = 0
    for X in spec.lie_basis:
        cur = [[base.from_int(x) for x in row] for row in X]
        steps = 0
        while any(not x.is_zero() for row in cur for x in row):
            if steps >= bound:
                return False, steps
            proj = lie_projection_pi(cur, spec)
            frob = [[x.base_frobenius() for x in row] for row in proj]
            cur = _rmat_mul(_rmat_mul(u0, frob), u0inv)
            steps += 1
        worst = max(worst, steps)
    return True, worst


def is_adjoint_nilpotent(D: Display) -> bool:
    return adjoint_nilpotence_trace(D)[0]


# Smith normal form over W_n(F_q)

def smith_normal_form(M: MatW) -> Tuple[MatW, List[int], MatW]:
    """L M R = diag(p^e_1, ..., p^e_h), e ascending; an entry zero at precision reports e = n."""
    _require_field(M.parent)
    parent, h, n = M.parent, M.h, M.n
    if M.is_zero():
        raise InsufficientPrecision("matrix vanishes at the carried precision", needed=n + 1)
    A = [list(r) for r in M.rows]
    L = [list(r) for r in MatW.identity(parent, h).rows]
    R = [list(r) for r in MatW.identity(parent, h).rows]
    exps: List[int] = []
    for t in range(h):
        best = None
        for i in range(t, h):
            for j in range(t, h):
                v = A[i][j].valuation()
                if v < n and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            exps += [n] * (h - t)
            break
        e, i, j = best
        A[t], A[i] = A[i], A[t]
        L[t], L[i] = L[i], L[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        for row in R:
            row[t], row[j] = row[j], row[t]
        uinv = A[t][t].unit_part().try_inv()
        A[t] = [x * uinv for x in A[t]]
        L[t] = [x * uinv for x in L[t]]
        for r in range(t + 1, h):
            x = A[r][t]
            if x.is_zero():
                continue
            c = x.unit_part().times_p_power(x.valuation() - e)
            A[r] = [a - c * b for a, b in zip(A[r], A[t])]
            L[r] = [a - c * b for a, b in zip(L[r], L[t])]
        for col in range(t + 1, h):
            x = A[t][col]
            if x.is_zero():
                continue
            c = x.unit_part().times_p_power(x.valuation() - e)
            for row in A:
                row[col] = row[col] - c * row[t]
            for row in R:
                row[col] = row[col] - c * row[t]
        exps.append(e)
    return MatW.from_rows(parent, L), exps, MatW.from_rows(parent, R)


def cartan_membership(b: PMat, spec: GroupSpec) -> bool:
    """b in GL_h(W) mu(p) GL_h(W)."""
    if not spec.is_gl:
        raise BadSpec("Cartan membership is implemented for GL_h")
    _, exps, _ = smith_normal_form(b.mat)
    n, s = b.n, b.shift
    target = sorted(spec.weights)
    known = [e - s for e in exps if e < n]
    if len(known) == len(exps):
        return known == target
    # some elementary divisors are only known to be >= n
    if known != target[: len(known)]:
        return False
    if n - s > 1:
        return False
    raise InsufficientPrecision("elementary divisor indistinguishable from truncation", needed=s + 2)


def is_zink_nilpotent(D: Display, budget: Optional[PrecisionBudget] = None) -> bool:
    """V-nilpotence over a finite field: every standard slope is positive."""
    return all(s > 0 for s in newton_slopes(D.b(), budget=budget).values())


def dual_display(D: Display) -> Display:
    if not D.spec.is_gl:
        raise BadSpec("dual display is implemented for GL_h")
    spec = GroupSpec(D.spec.h, tuple(1 - w for w in D.spec.weights))
    return Display(spec, D.U.transpose().inverse())
