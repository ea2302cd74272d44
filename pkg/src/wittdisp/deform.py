"""Deformations of banal displays along square-zero ideals in characteristic p."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, List, Optional, Sequence, Tuple

from .displays import DEFAULT_CAP, Display, adjoint_nilpotence_trace
from .exceptions import (
    BadDecomposition,
    BadSpec,
    InsufficientPrecision,
    MixedRings,
    NotAdjointNilpotent,
    NotCongruent,
    SearchSpaceTooLarge,
    UnsupportedIdeal,
)
from .groups import GroupSpec, divided_frobenius, lie_coordinates
from .matrices import MatW
from .rings import FiniteField, QuotientPoly, RingDescriptor, RingElem
from .witt import WittRing, WittVec

logger = logging.getLogger(__name__)


def _monomial_of(x: RingElem) -> Tuple[int, ...]:
    terms = x.payload
    if len(terms) != 1:
        raise UnsupportedIdeal(f"ideal generator {x.to_json()!r} is not a monomial")
    mono, coeff = terms[0]
    if not x.ring.base.elem(coeff).is_unit():
        raise UnsupportedIdeal("ideal generator must have a unit coefficient")
    return mono


@dataclass(frozen=True)
class SquareZeroData:
    """A monomial ideal a of A with a^2 = 0 and p = 0 in A."""

    A: QuotientPoly
    a_gens: Tuple[RingElem, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.A, QuotientPoly):
            raise UnsupportedIdeal("square-zero data needs a QuotientPoly ring")
        char = self.A.characteristic
        if not isinstance(self.A.base, FiniteField) or char != self.A.base.p:
            raise UnsupportedIdeal("p must vanish in A")
        for g in self.a_gens:
            if g.ring != self.A:
                raise MixedRings("ideal generator from a different ring")
            _monomial_of(g)
        for g1, g2 in itertools.combinations_with_replacement(self.a_gens, 2):
            if not (g1 * g2).is_zero():
                raise UnsupportedIdeal("the ideal does not have square zero")

    @classmethod
    def dual_numbers(cls, field: FiniteField, name: str = "e") -> "SquareZeroData":
        A = QuotientPoly.dual_numbers(field, name)
        return cls(A, tuple(A.gens()))

    @property
    def p(self) -> int:
        return self.A.base.p

    @property
    def quotient(self) -> RingDescriptor:
        return _quotient(self)[0]

    def reduce(self, x: RingElem) -> RingElem:
        return _quotient(self)[1](x)

    def lift(self, x: RingElem) -> RingElem:
        """Set-theoretic section of A -> A/a by standard monomials."""
        target = self.quotient
        if x.ring != target:
            raise MixedRings("element is not in A/a")
        if target == self.A:
            return x
        if target == self.A.base:
            return self.A.from_base(x)
        return self.A.elem(self.A._normalize(dict(x.payload)))

    def contains(self, x: RingElem) -> bool:
        return self.reduce(x).is_zero()

    def ideal_elements(self) -> List[RingElem]:
        return list(_ideal_elements(self))

    def witt(self, n: int) -> WittRing:
        return WittRing.over(self.A, n, self.p)

    def quotient_witt(self, n: int) -> WittRing:
        return WittRing.over(self.quotient, n, self.p)

    def in_witt_ideal(self, x: WittVec) -> bool:
        """x lies in W(a)."""
        return all(self.contains(c) for c in x.coeffs)

    def reduce_matrix(self, M: MatW) -> MatW:
        return M.map_coefficients(self.reduce, self.quotient_witt(M.n))

    def lift_matrix(self, M: MatW) -> MatW:
        return M.map_coefficients(self.lift, self.witt(M.n))


@lru_cache(maxsize=None)
def _quotient(data: SquareZeroData) -> Tuple[RingDescriptor, Callable[[RingElem], RingElem]]:
    if not data.a_gens:
        return data.A, lambda x: x
    return data.A.quotient_by([_monomial_of(g) for g in data.a_gens])


@lru_cache(maxsize=None)
def _ideal_elements(data: SquareZeroData) -> Tuple[RingElem, ...]:
    return tuple(x for x in data.A.elements() if data.contains(x))


@dataclass(frozen=True)
class LogWittElem:
    """Logarithmic coordinates of an element of W_n(a).

    With a^2 = 0 and the trivial divided powers the log coordinates agree with
    the Witt coordinates, addition is coordinatewise and W(A) acts through the
    ghost components.
    """

    coords: Tuple[RingElem, ...]

    @classmethod
    def from_witt(cls, x: WittVec, data: SquareZeroData) -> "LogWittElem":
        if not data.in_witt_ideal(x):
            raise BadDecomposition("Witt vector is not in W(a)")
        return cls(x.coeffs)

    def to_witt(self, parent: WittRing) -> WittVec:
        return parent.vec(list(self.coords))

    @property
    def n(self) -> int:
        return len(self.coords)

    def __add__(self, other: "LogWittElem") -> "LogWittElem":
        return LogWittElem(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def frobenius(self, p: int) -> "LogWittElem":
        zero = self.coords[0].ring.zero
        return LogWittElem(tuple(a * p for a in self.coords[1:]) + (zero,))

    def verschiebung(self) -> "LogWittElem":
        zero = self.coords[0].ring.zero
        return LogWittElem((zero,) + self.coords[:-1])

    def scale(self, w: WittVec) -> "LogWittElem":
        return LogWittElem(tuple(w.ghost(k) * a for k, a in enumerate(self.coords)))

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.coords)


def _weight_basis(spec: GroupSpec, weight: int) -> List[int]:
    out = []
    for idx, X in enumerate(spec.lie_basis):
        nz = [(i, j) for i in range(spec.h) for j in range(spec.h) if X[i][j]]
        if nz and spec.weight_of(*nz[0]) == weight:
            out.append(idx)
    return out


def _basis_matrix(spec: GroupSpec, idx: int, coeff: WittVec) -> MatW:
    X = spec.lie_basis[idx]
    zero = coeff.parent.zero
    return MatW.from_rows(
        coeff.parent,
        [[coeff * X[i][j] if X[i][j] else zero for j in range(spec.h)] for i in range(spec.h)],
    )


@dataclass(frozen=True)
class TangentVector:
    """Element of a tensor u^-, in coordinates along the weight -1 part of the Lie basis."""

    coords: Tuple[RingElem, ...]

    def matrix(self, parent: WittRing, spec: GroupSpec) -> MatW:
        """Sum of [a_i] e_i."""
        acc = MatW.zeros(parent, spec.h)
        for idx, a in zip(_weight_basis(spec, -1), self.coords):
            if not a.is_zero():
                acc = acc + _basis_matrix(spec, idx, parent.teichmuller(a))
        return acc

    def __add__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self.coords)

    def to_json(self) -> List[Any]:
        return [a.to_json() for a in self.coords]


def tangent_vectors(data: SquareZeroData, spec: GroupSpec) -> List[TangentVector]:
    r = len(_weight_basis(spec, -1))
    return [TangentVector(tuple(c)) for c in itertools.product(data.ideal_elements(), repeat=r)]


def _v_inverse_a(x: WittVec, data: SquareZeroData) -> WittVec:
    """V_a^-1 on I_a = a + V W(A): zero on [a], V^-1 on the rest, padded back to length n."""
    x0 = x.coeffs[0]
    if not data.contains(x0):
        raise BadDecomposition("weight -1 entry has w_0 outside a")
    if x.n < 2:
        return x.parent.zero
    rest = x - x.parent.teichmuller(x0)
    return rest.shift_down().pad(x.n)


def psi_a(X: MatW, spec: GroupSpec, data: SquareZeroData) -> MatW:
    """V_a^-1, F or pF entrywise by weight; same length as X."""
    rows = []
    for i in range(spec.h):
        row = []
        for j in range(spec.h):
            x = X[i, j]
            w = spec.weight_of(i, j)
            if w == -1:
                row.append(_v_inverse_a(x, data))
            elif w == 0:
                row.append(x.frobenius_same_length())
            else:
                row.append(x.frobenius_same_length().times_p_power(1))
        rows.append(tuple(row))
    return MatW(X.parent, tuple(rows))


def psi_a_group(h: MatW, spec: GroupSpec, data: SquareZeroData) -> MatW:
    """Psi_a on G(W(a)): 1 + X -> 1 + psi_a(X)."""
    ident = MatW.identity(h.parent, spec.h)
    return ident + psi_a(h - ident, spec, data)


def _check_square_zero_matrix(X: MatW, data: SquareZeroData, what: str) -> None:
    for i, j, x in X.entries():
        if not data.in_witt_ideal(x):
            raise NotCongruent(f"{what}: entry ({i},{j}) is not in W(a)")


def _require_adjoint_nilpotent(D: Display) -> int:
    nil, steps = adjoint_nilpotence_trace(D)
    if not nil:
        raise NotAdjointNilpotent("U is not adjoint nilpotent", evidence={"steps": steps})
    return steps


def gmzcf_solve_trace(
    U: MatW, Uprime: MatW, data: SquareZeroData, spec: GroupSpec
) -> Tuple[MatW, int]:
    """(h, iterations) with h in G(W(a)) and h^-1 U Psi_a(h) = U'."""
    if U.parent != Uprime.parent:
        raise MixedRings("U and U' live over different Witt rings")
    if U.parent.base != data.A:
        raise MixedRings("U is not over the ring of the square-zero data")
    delta = Uprime - U
    _check_square_zero_matrix(delta, data, "U' - U")
    _require_adjoint_nilpotent(Display(spec, U))
    _require_adjoint_nilpotent(Display(spec, Uprime))

    Uinv = U.inverse()
    bound = spec.dim * U.n + 1
    X = MatW.zeros(U.parent, spec.h)
    seen = [X]
    for step in range(1, bound + 1):
        nxt = (U * psi_a(X, spec, data) - delta) * Uinv
        if nxt == X:
            h = MatW.identity(U.parent, spec.h) + X
            if h.inverse() * U * psi_a_group(h, spec, data) != Uprime:
                raise NotCongruent("fixed point fails h^-1 U Psi(h) = U'")
            logger.debug("GMZCF fixed point after %d iterations", step - 1)
            return h, step - 1
        X = nxt
        seen.append(X)
    raise NotAdjointNilpotent(
        f"no fixed point within {bound} iterations",
        evidence={"iterates": [m.to_json() for m in seen[-2:]]},
    )


def gmzcf_solve(U: MatW, Uprime: MatW, data: SquareZeroData, spec: GroupSpec) -> MatW:
    return gmzcf_solve_trace(U, Uprime, data, spec)[0]


def tangent_class(U: MatW, Uprime: MatW, data: SquareZeroData, spec: GroupSpec) -> TangentVector:
    """Class of the lift U' relative to the base lift U, as an element of a tensor u^-."""
    h = gmzcf_solve(U, Uprime, data, spec)
    X = h - MatW.identity(h.parent, spec.h)
    coords = lie_coordinates(X.w0(), spec, data.p)
    return TangentVector(tuple(coords[i] for i in _weight_basis(spec, -1)))


def translate_lift(Uprime: MatW, t: TangentVector, spec: GroupSpec) -> MatW:
    """Action of a tangent vector: g^-1 U' Psi_a(g) with g = 1 + sum [t_i] e_i, where Psi_a(g) = 1."""
    ident = MatW.identity(Uprime.parent, spec.h)
    return (ident - t.matrix(Uprime.parent, spec)) * Uprime


def enumerate_lifts(
    U0: MatW,
    data: SquareZeroData,
    spec: GroupSpec,
    U: Optional[MatW] = None,
) -> List[Display]:
    """One display per isomorphism class of lifts of U0 to A, indexed by a tensor u^-."""
    _require_adjoint_nilpotent(Display(spec, U0))
    if U is None:
        U = data.lift_matrix(U0)
    elif data.reduce_matrix(U) != U0:
        raise NotCongruent("chosen lift does not reduce to U0")
    out = [Display(spec, translate_lift(U, t, spec)) for t in tangent_vectors(data, spec)]
    logger.debug("%d lift classes", len(out))
    return out


def universal_names(spec: GroupSpec) -> List[str]:
    return [f"t{i + 1}" for i in range(len(_weight_basis(spec, -1)))]


def universal_deformation(U0: MatW, N: int, spec: GroupSpec) -> Display:
    """(1 - sum [t_i] e_i) U0 over k[t_1..t_r]/(t)^N."""
    k = U0.parent.base
    if not isinstance(k, FiniteField):
        raise BadSpec("universal deformation needs a finite field")
    if N < 1:
        raise BadSpec("truncation degree must be >= 1")
    names = universal_names(spec)
    if not names:
        raise BadSpec("u^- is zero; the deformation space is a point")
    A = QuotientPoly.truncated(k, names, N)
    parent = WittRing.over(A, U0.n, k.p)
    U = U0.map_coefficients(A.from_base, parent)
    ts = TangentVector(tuple(A.gens()))
    return Display(spec, (MatW.identity(parent, spec.h) - ts.matrix(parent, spec)) * U)


def specialize(D: Display, target: QuotientPoly, images: Sequence[RingElem]) -> Display:
    """Pushes D along the base-linear map sending t_i to images[i]."""
    source = D.parent.base
    if not isinstance(source, QuotientPoly):
        raise BadSpec("specialisation needs a QuotientPoly coefficient ring")
    fn = source.hom(target, images)
    parent = WittRing.over(target, D.n, D.parent.p)
    return Display(D.spec, D.U.map_coefficients(fn, parent))


def _witt_ideal_vectors(data: SquareZeroData, n: int, lead_zero: bool) -> List[WittVec]:
    parent = data.witt(n)
    elems = data.ideal_elements()
    zero = data.A.zero
    heads = [zero] if lead_zero else elems
    return [parent.vec([c0] + list(rest)) for c0 in heads for rest in itertools.product(elems, repeat=n - 1)]


def deformation_automorphisms(
    D: Display, data: SquareZeroData, cap: int = DEFAULT_CAP
) -> List[MatW]:
    """h in H^mu(W_{n+1}(a)) with h^-1 U Phi(h) = U, as matrices of length n + 1."""
    spec, n = D.spec, D.n
    free = _witt_ideal_vectors(data, n + 1, lead_zero=False)
    low = _witt_ideal_vectors(data, n + 1, lead_zero=True)
    neg = set(_weight_basis(spec, -1))
    choices = [low if idx in neg else free for idx in range(spec.dim)]
    size = 1
    for c in choices:
        size *= len(c)
    if size > cap:
        raise SearchSpaceTooLarge(f"{size} automorphism candidates exceed cap {cap}", size=size, cap=cap)
    parent = data.witt(n + 1)
    ident = MatW.identity(parent, spec.h)
    U = D.U
    found = []
    for coeffs in itertools.product(*choices):
        X = MatW.zeros(parent, spec.h)
        for idx, c in enumerate(coeffs):
            if not c.is_zero():
                X = X + _basis_matrix(spec, idx, c)
        h = ident + X
        hinv = (ident - X).truncate(n)
        if hinv * U * divided_frobenius(h, spec) == U:
            found.append(h)
    return found


def rigidity_check(D: Display, data: SquareZeroData, cap: int = DEFAULT_CAP) -> bool:
    """Automorphisms that are the identity mod a are the identity at the readable precision.

    Only levels below n - m + 1 are pinned down, m being the nilpotency index of
    Ad(w0 U) F pi; the top levels of h are not seen at length n.
    """
    if D.parent.base != data.A:
        raise MixedRings("display is not over the ring of the square-zero data")
    m = _require_adjoint_nilpotent(D)
    k = D.n - m + 1
    if k < 1:
        raise InsufficientPrecision(
            f"length {D.n} cannot see automorphisms of nilpotency index {m}", needed=m
        )
    ident = MatW.identity(data.witt(k), D.spec.h)
    autos = deformation_automorphisms(D, data, cap)
    return all(h.truncate(k) == ident for h in autos)

