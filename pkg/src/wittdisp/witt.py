from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from sympy import isprime, perfect_power
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_mul, gf_pow_mod, gf_rem

from .exceptions import (
    BadSpec,
    IndexOutOfRange,
    LengthUnderflow,
    MixedRings,
    NonUnit,
    NotAField,
    NotInIdeal,
    SearchSpaceTooLarge,
    Unenumerable,
)
from .polys import derive_universal_polys, evaluate
from .rings import FiniteField, QuotientPoly, RingDescriptor, RingElem, ZmodPM, _dense, _undense

ZqElem = Tuple[int, ...]


def ring_prime(base: RingDescriptor) -> Optional[int]:
    if isinstance(base, (FiniteField, ZmodPM)):
        return base.p
    if isinstance(base, QuotientPoly):
        return ring_prime(base.base)
    return None


def _is_power_of(char: int, p: int) -> bool:
    if char == p:
        return True
    pp = perfect_power(char)
    return bool(pp) and pp[0] == p


@dataclass(frozen=True)
class WittRing:
    base: RingDescriptor
    p: int
    n: int
    backend: str = "auto"

    def __post_init__(self) -> None:
        if not isprime(self.p):
            raise BadSpec(f"p={self.p} is not prime")
        if self.n < 1:
            raise LengthUnderflow("Witt length must be >= 1")
        char = self.base.characteristic
        if char != 0 and not _is_power_of(char, self.p):
            raise BadSpec(f"characteristic {char} of the base is not a power of p={self.p}")
        if self.backend not in ("auto", "generic"):
            raise BadSpec(f"unknown backend {self.backend!r}")

    @classmethod
    def over(cls, base: RingDescriptor, n: int, p: Optional[int] = None, backend: str = "auto") -> "WittRing":
        p = p if p is not None else ring_prime(base)
        if p is None:
            raise BadSpec("p must be given for an IntegerPoly base")
        return cls(base, p, n, backend)

    @property
    def fast(self) -> bool:
        return self.backend == "auto" and isinstance(self.base, FiniteField)

    @property
    def char_p(self) -> bool:
        return self.base.characteristic == self.p

    def with_length(self, n: int) -> "WittRing":
        return WittRing(self.base, self.p, n, self.backend)

    def vec(self, coeffs: Sequence[Union[RingElem, int]]) -> "WittVec":
        out = []
        for c in coeffs:
            if isinstance(c, int):
                c = self.base.from_int(c)
            elif c.ring != self.base:
                raise MixedRings("coefficient from a different ring")
            out.append(c)
        if len(out) != self.n:
            raise BadSpec(f"expected {self.n} coefficients, got {len(out)}")
        return WittVec(self, tuple(out))

    @property
    def zero(self) -> "WittVec":
        return WittVec(self, (self.base.zero,) * self.n)

    @property
    def one(self) -> "WittVec":
        return self.teichmuller(self.base.one)

    def teichmuller(self, r: RingElem) -> "WittVec":
        if r.ring != self.base:
            raise MixedRings("Teichmuller lift of a foreign element")
        return WittVec(self, (r,) + (self.base.zero,) * (self.n - 1))

    def from_int(self, k: int) -> "WittVec":
        if self.fast:
            pn = self.p**self.n
            return self._from_zq((k % pn,) + (0,) * (self.base.f - 1))
        # double and add
        negative = k < 0
        k = abs(k)
        acc, step = self.zero, self.one
        while k:
            if k & 1:
                acc = acc + step
            k >>= 1
            if k:
                step = step + step
        return -acc if negative else acc

    def elements(self) -> Iterator["WittVec"]:
        if not self.base.is_finite:
            raise Unenumerable("Witt vectors over an infinite ring")
        base_elems = list(self.base.elements())
        for coeffs in itertools.product(base_elems, repeat=self.n):
            yield WittVec(self, tuple(coeffs))

    def cardinality(self) -> int:
        return self.base.cardinality() ** self.n

    def random_element(self, rng: random.Random) -> "WittVec":
        return WittVec(self, tuple(self.base.random_element(rng) for _ in range(self.n)))

    def random_unit(self, rng: random.Random) -> "WittVec":
        while True:
            x = self.random_element(rng)
            if x.is_unit():
                return x

    def to_json(self) -> Dict[str, Any]:
        return {"ring": self.base.to_json(), "p": self.p, "n": self.n}

    def vec_from_json(self, data: Any) -> "WittVec":
        coeffs = data["coeffs"] if isinstance(data, dict) else data
        return self.vec([self.base.element_from_json(c) for c in coeffs])

    # Z_q / p^n backend for finite fields
    def _to_zq(self, x: "WittVec") -> ZqElem:
        return _to_zq(self, x.coeffs)

    def _from_zq(self, z: ZqElem) -> "WittVec":
        return WittVec(self, _from_zq(self, z))


@lru_cache(maxsize=1 << 14)
def _teichmuller_zq(field: FiniteField, n: int, payload: Tuple[int, ...]) -> ZqElem:
    pn = field.p**n
    lifted = _dense(payload)
    if not lifted:
        return (0,) * field.f
    t = gf_pow_mod(lifted, field.q ** (n - 1), _dense(field.modulus), pn, ZZ)
    return _undense(t, field.f)


@lru_cache(maxsize=1 << 16)
def _to_zq(parent: WittRing, coeffs: Tuple[RingElem, ...]) -> ZqElem:
    field: FiniteField = parent.base  # type: ignore[assignment]
    p, n = parent.p, parent.n
    pn = p**n
    acc = [0] * field.f
    for i, x in enumerate(coeffs):
        if x.is_zero():
            continue
        t = _teichmuller_zq(field, n, field.pth_root(x, i).payload)
        acc = [(a + p**i * b) % pn for a, b in zip(acc, t)]
    return tuple(acc)


@lru_cache(maxsize=1 << 16)
def _from_zq(parent: WittRing, z: ZqElem) -> Tuple[RingElem, ...]:
    field: FiniteField = parent.base  # type: ignore[assignment]
    p, n = parent.p, parent.n
    cur = [c % p**n for c in z]
    out: List[RingElem] = []
    for i in range(n):
        digit = field.elem(tuple(c % p for c in cur))
        out.append(digit ** (p**i))
        left = n - i
        if left == 1:
            break
        t = _teichmuller_zq(field, left, digit.payload)
        mod = p**left
        cur = [((c - s) % mod) // p for c, s in zip(cur, t)]
    return tuple(out)


def _zq_mul(parent: WittRing, a: ZqElem, b: ZqElem) -> ZqElem:
    field: FiniteField = parent.base  # type: ignore[assignment]
    pn = parent.p**parent.n
    prod = gf_mul(_dense(a), _dense(b), pn, ZZ)
    return _undense(gf_rem(prod, _dense(field.modulus), pn, ZZ), field.f)


# universal-polynomial backend

@lru_cache(maxsize=1 << 16)
def _generic_binary(parent: WittRing, which: str, xs: Tuple[RingElem, ...], ys: Tuple[RingElem, ...]) -> Tuple[RingElem, ...]:
    polys = derive_universal_polys(parent.p, parent.n)
    table = polys.sum_polys if which == "sum" else polys.prod_polys
    values = list(xs) + list(ys)
    return tuple(evaluate(f, values, parent.base.from_int) for f in table)


@lru_cache(maxsize=1 << 14)
def _generic_neg(parent: WittRing, xs: Tuple[RingElem, ...]) -> Tuple[RingElem, ...]:
    polys = derive_universal_polys(parent.p, parent.n)
    values = list(xs) + [parent.base.zero] * parent.n
    return tuple(evaluate(f, values, parent.base.from_int) for f in polys.neg_polys)


@lru_cache(maxsize=1 << 14)
def _generic_frobenius(parent: WittRing, xs: Tuple[RingElem, ...]) -> Tuple[RingElem, ...]:
    polys = derive_universal_polys(parent.p, parent.n)
    values = list(xs) + [parent.base.zero] * parent.n
    return tuple(evaluate(f, values, parent.base.from_int) for f in polys.frob_polys)


@dataclass(frozen=True)
class WittVec:
    parent: WittRing
    coeffs: Tuple[RingElem, ...]

    @property
    def n(self) -> int:
        return self.parent.n

    @property
    def base(self) -> RingDescriptor:
        return self.parent.base

    def _coerce(self, other: Any) -> "WittVec":
        if isinstance(other, WittVec):
            if other.parent != self.parent:
                raise MixedRings(f"W_{self.n} vs W_{other.n} or different coefficient rings")
            return other
        if isinstance(other, int):
            return self.parent.from_int(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: Any) -> "WittVec":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        P = self.parent
        if P.fast:
            pn = P.p**P.n
            a, b = P._to_zq(self), P._to_zq(other)
            return P._from_zq(tuple((x + y) % pn for x, y in zip(a, b)))
        return WittVec(P, _generic_binary(P, "sum", self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self) -> "WittVec":
        P = self.parent
        if P.fast:
            pn = P.p**P.n
            return P._from_zq(tuple((-x) % pn for x in P._to_zq(self)))
        return WittVec(P, _generic_neg(P, self.coeffs))

    def __sub__(self, other: Any) -> "WittVec":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> "WittVec":
        return (-self) + other

    def __mul__(self, other: Any) -> "WittVec":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        P = self.parent
        if P.fast:
            return P._from_zq(_zq_mul(P, P._to_zq(self), P._to_zq(other)))
        return WittVec(P, _generic_binary(P, "prod", self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "WittVec":
        if e < 0:
            return self.try_inv() ** (-e)
        result, base = self.parent.one, self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def ghost(self, k: int) -> RingElem:
        if not 0 <= k < self.n:
            raise IndexOutOfRange(f"ghost index {k} outside [0, {self.n})")
        p = self.parent.p
        acc = self.base.zero
        for i in range(k + 1):
            acc = acc + self.coeffs[i] ** (p ** (k - i)) * p**i
        return acc

    def truncate(self, m: int) -> "WittVec":
        if not 1 <= m <= self.n:
            raise LengthUnderflow(f"cannot truncate W_{self.n} to length {m}")
        return WittVec(self.parent.with_length(m), self.coeffs[:m])

    def pad(self, m: int) -> "WittVec":
        """Extends by zero coordinates to length m."""
        if m < self.n:
            return self.truncate(m)
        return WittVec(self.parent.with_length(m), self.coeffs + (self.base.zero,) * (m - self.n))

    def frobenius(self) -> "WittVec":
        """Length-dropping F: W_n -> W_{n-1}."""
        if self.n < 2:
            raise LengthUnderflow("F needs length >= 2")
        P = self.parent
        if P.char_p:
            return self.frobenius_same_length().truncate(self.n - 1)
        return WittVec(P.with_length(self.n - 1), _generic_frobenius(P, self.coeffs))

    def frobenius_same_length(self) -> "WittVec":
        if not self.parent.char_p:
            raise BadSpec("same-length Frobenius needs a characteristic-p base")
        p = self.parent.p
        return WittVec(self.parent, tuple(c**p for c in self.coeffs))

    def sigma_inverse(self) -> "WittVec":
        field = self.base
        if not isinstance(field, FiniteField):
            raise NotAField("sigma^-1 needs a finite field base")
        return WittVec(self.parent, tuple(field.pth_root(c) for c in self.coeffs))

    def verschiebung(self, keep_length: bool = False) -> "WittVec":
        coeffs = (self.base.zero,) + self.coeffs
        if keep_length:
            return WittVec(self.parent, coeffs[: self.n])
        return WittVec(self.parent.with_length(self.n + 1), coeffs)

    def shift_down(self) -> "WittVec":
        """V^-1 on I_n(R): drops the leading zero coordinate."""
        if not self.coeffs[0].is_zero():
            raise NotInIdeal("leading coordinate is nonzero")
        if self.n < 2:
            raise LengthUnderflow("V^-1 needs length >= 2")
        return WittVec(self.parent.with_length(self.n - 1), self.coeffs[1:])

    def in_ideal(self) -> bool:
        return self.coeffs[0].is_zero()

    def is_unit(self) -> bool:
        return all(self.ghost(k).is_unit() for k in range(self.n))

    def try_inv(self) -> "WittVec":
        if not self.coeffs[0].is_unit():
            raise NonUnit("w_0 is not a unit")
        P = self.parent
        # P_k is linear in y_k with coefficient w_k(x)
        ys = [self.coeffs[0].try_inv()] + [self.base.zero] * (self.n - 1)
        for k in range(1, self.n):
            wk = self.ghost(k)
            if not wk.is_unit():
                raise NonUnit(f"w_{k} is not a unit")
            partial = (self * WittVec(P, tuple(ys))).coeffs[k]
            ys[k] = -partial * wk.try_inv()
        return WittVec(P, tuple(ys))

    def map(self, fn: Callable[[RingElem], RingElem], target: WittRing) -> "WittVec":
        """Applies a ring map coefficientwise (W_n is functorial)."""
        return target.vec([fn(c) for c in self.coeffs])

    # finite-field valuation helpers

    def valuation(self) -> int:
        """Index of the first nonzero coordinate, or n for zero."""
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                return i
        return self.n

    def unit_part(self) -> "WittVec":
        """u with x = p^v u over a finite field; unknown trailing digits are zero."""
        field = self.base
        if not isinstance(field, FiniteField):
            raise NotAField("unit_part needs a finite field base")
        v = self.valuation()
        if v >= self.n:
            raise NonUnit("zero has no unit part")
        digits = [field.pth_root(c, v) for c in self.coeffs[v:]]
        return self.parent.vec(digits + [field.zero] * v)

    def times_p_power(self, e: int) -> "WittVec":
        """p^e * x at the same length."""
        if e == 0:
            return self
        p = self.parent.p
        if not self.parent.char_p:
            return self * self.parent.from_int(p**e)
        shifted = (self.base.zero,) * e + tuple(c ** (p**e) for c in self.coeffs)
        return WittVec(self.parent, shifted[: self.n])

    def to_json(self) -> Dict[str, Any]:
        return {
            "ring": self.base.to_json(),
            "p": self.parent.p,
            "n": self.n,
            "coeffs": [c.to_json() for c in self.coeffs],
        }

    def __repr__(self) -> str:
        return f"WittVec({[c.to_json() for c in self.coeffs]!r})"


@dataclass(frozen=True)
class IsUnitIdeal:
    """`witness` satisfies sum witness_i g_i = 1 in W_n(R).

    `ghost_certificates[k]` holds r_i in R with sum r_i w_k(g_i) = 1, one row
    per ghost component. The criterion is decided by these rows; the witness
    is a direct combination found by search, not one assembled from the
    V^(n-1)[x] terms of the inductive argument.
    """

    witness: Tuple[WittVec, ...]
    ghost_certificates: Tuple[Tuple[RingElem, ...], ...] = ()


@dataclass(frozen=True)
class NotUnitIdeal:
    k: int


def _ghost_certificate(base: RingDescriptor, values: Sequence[RingElem]) -> Optional[Tuple[RingElem, ...]]:
    """r with sum r_i values_i = 1, by additive closure of the multiples r * values_i."""
    terms = []
    seen = set()
    for i, v in enumerate(values):
        for r in base.elements():
            m = r * v
            if (i, m) not in seen:
                seen.add((i, m))
                terms.append((i, r, m))
    found: Dict[RingElem, Tuple[RingElem, ...]] = {base.zero: tuple(base.zero for _ in values)}
    frontier = [base.zero]
    while frontier and base.one not in found:
        nxt = []
        for e in frontier:
            for i, r, m in terms:
                s = e + m
                if s in found:
                    continue
                coeffs = list(found[e])
                coeffs[i] = coeffs[i] + r
                found[s] = tuple(coeffs)
                nxt.append(s)
        frontier = nxt
    return found.get(base.one)


def jacobson_unit_test(
    generators: Sequence[WittVec], cap: int = 200_000
) -> Union[IsUnitIdeal, NotUnitIdeal]:
    """Decides whether the generators span W_n(R) by testing each ghost ideal R w_k = R."""
    if not generators:
        raise BadSpec("need at least one generator")
    P = generators[0].parent
    if not P.base.is_finite:
        raise Unenumerable("unit ideal test needs a finite coefficient ring")
    certificates = []
    for k in range(P.n):
        cert = _ghost_certificate(P.base, [g.ghost(k) for g in generators])
        if cert is None:
            return NotUnitIdeal(k)
        certificates.append(cert)

    size = P.cardinality()
    if size * len(generators) > cap:
        raise SearchSpaceTooLarge("Bezout witness search", size=size * len(generators), cap=cap)

    # breadth-first additive closure of {c * g_i} tracking coefficients
    terms: List[Tuple[int, WittVec, WittVec]] = []
    seen_terms = set()
    for i, g in enumerate(generators):
        for c in P.elements():
            m = c * g
            if (i, m) not in seen_terms:
                seen_terms.add((i, m))
                terms.append((i, c, m))
    zero_coeffs = tuple(P.zero for _ in generators)
    found: Dict[WittVec, Tuple[WittVec, ...]] = {P.zero: zero_coeffs}
    frontier = [P.zero]
    while frontier and P.one not in found:
        nxt = []
        for e in frontier:
            for i, c, m in terms:
                s = e + m
                if s in found:
                    continue
                coeffs = list(found[e])
                coeffs[i] = coeffs[i] + c
                found[s] = tuple(coeffs)
                nxt.append(s)
        frontier = nxt
    return IsUnitIdeal(found[P.one], tuple(certificates))
