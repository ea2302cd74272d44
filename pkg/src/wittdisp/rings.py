from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Dict, Iterator, List, Sequence, Tuple

from sympy import isprime
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import (
    gf_irreducible_p,
    gf_mul,
    gf_pow_mod,
    gf_rem,
    gf_strip,
)
from sympy.polys.rings import ring as poly_ring

from .exceptions import BadSpec, CharNotP, MixedRings, NonUnit, Unenumerable

Monomial = Tuple[int, ...]


def _dense(low_first: Sequence[int]) -> List[Any]:
    return gf_strip([ZZ(int(c)) for c in reversed(low_first)])


def _undense(poly: Sequence[Any], size: int) -> Tuple[int, ...]:
    low = [int(c) for c in reversed(poly)]
    low += [0] * (size - len(low))
    return tuple(low[:size])


@lru_cache(maxsize=None)
def smallest_irreducible(p: int, f: int) -> Tuple[int, ...]:
    """Monic irreducible of degree f over F_p, first in lexicographic order of (c_0, ..., c_{f-1})."""
    for tail in itertools.product(range(p), repeat=f):
        low = tail + (1,)
        if gf_irreducible_p(_dense(low), p, ZZ):
            return low
    raise BadSpec(f"no irreducible polynomial of degree {f} over F_{p}")  # pragma: no cover


class RingDescriptor:
    """Shared interface of the coefficient rings. Payload-level methods are private."""

    kind: str = ""

    # payload arithmetic, implemented per kind
    def _zero(self) -> Any:
        raise NotImplementedError

    def _from_int(self, k: int) -> Any:
        raise NotImplementedError

    def _add(self, a: Any, b: Any) -> Any:
        raise NotImplementedError

    def _neg(self, a: Any) -> Any:
        raise NotImplementedError

    def _mul(self, a: Any, b: Any) -> Any:
        raise NotImplementedError

    def _is_unit(self, a: Any) -> bool:
        raise NotImplementedError

    def _inv(self, a: Any) -> Any:
        raise NotImplementedError

    def _pow(self, a: Any, e: int) -> Any:
        result = self._from_int(1)
        base = a
        while e:
            if e & 1:
                result = self._mul(result, base)
            e >>= 1
            if e:
                base = self._mul(base, base)
        return result

    @property
    def characteristic(self) -> int:
        raise NotImplementedError

    @property
    def is_finite(self) -> bool:
        return True

    def cardinality(self) -> int:
        raise NotImplementedError

    def _payloads(self) -> Iterator[Any]:
        raise NotImplementedError

    def _random(self, rng: random.Random) -> Any:
        raise NotImplementedError

    def nilpotency_bound(self) -> int:
        raise NotImplementedError

    def is_reduced(self) -> bool:
        return self.nilpotency_bound() == 1

    def to_json(self) -> Dict[str, Any]:
        raise NotImplementedError

    def _payload_to_json(self, a: Any) -> Any:
        raise NotImplementedError

    def _payload_from_json(self, data: Any) -> Any:
        raise NotImplementedError

    # element-level helpers
    def elem(self, payload: Any) -> "RingElem":
        return RingElem(self, payload)

    @property
    def zero(self) -> "RingElem":
        return RingElem(self, self._zero())

    @property
    def one(self) -> "RingElem":
        return RingElem(self, self._from_int(1))

    def from_int(self, k: int) -> "RingElem":
        return RingElem(self, self._from_int(int(k)))

    def elements(self) -> Iterator["RingElem"]:
        if not self.is_finite:
            raise Unenumerable(f"{self.kind} ring has infinitely many elements")
        for payload in self._payloads():
            yield RingElem(self, payload)

    def random_element(self, rng: random.Random) -> "RingElem":
        return RingElem(self, self._random(rng))

    def element_from_json(self, data: Any) -> "RingElem":
        return RingElem(self, self._payload_from_json(data))

    def prime_characteristic(self) -> int:
        char = self.characteristic
        if char == 0 or not isprime(char):
            raise CharNotP(f"{self.kind} ring has characteristic {char}, not a prime")
        return char


@dataclass(frozen=True)
class RingElem:
    ring: RingDescriptor
    payload: Any

    def _coerce(self, other: Any) -> "RingElem":
        if isinstance(other, RingElem):
            if other.ring != self.ring:
                raise MixedRings(f"{self.ring.kind} vs {other.ring.kind}")
            return other
        if isinstance(other, int):
            return self.ring.from_int(other)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: Any) -> "RingElem":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RingElem(self.ring, self.ring._add(self.payload, other.payload))

    __radd__ = __add__

    def __neg__(self) -> "RingElem":
        return RingElem(self.ring, self.ring._neg(self.payload))

    def __sub__(self, other: Any) -> "RingElem":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> "RingElem":
        return (-self) + other

    def __mul__(self, other: Any) -> "RingElem":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RingElem(self.ring, self.ring._mul(self.payload, other.payload))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "RingElem":
        if e < 0:
            return self.try_inv() ** (-e)
        return RingElem(self.ring, self.ring._pow(self.payload, e))

    def is_zero(self) -> bool:
        return self.payload == self.ring._zero()

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_unit(self) -> bool:
        return self.ring._is_unit(self.payload)

    def try_inv(self) -> "RingElem":
        if not self.is_unit():
            raise NonUnit(f"{self.to_json()} is not a unit")
        return RingElem(self.ring, self.ring._inv(self.payload))

    def is_nilpotent(self) -> bool:
        return (self ** self.ring.nilpotency_bound()).is_zero()

    def base_frobenius(self) -> "RingElem":
        return self ** self.ring.prime_characteristic()

    def to_json(self) -> Any:
        return self.ring._payload_to_json(self.payload)

    def __repr__(self) -> str:
        return f"RingElem({self.to_json()!r})"


@dataclass(frozen=True)
class FiniteField(RingDescriptor):
    p: int
    f: int
    modulus: Tuple[int, ...]

    kind = "Fq"

    def __post_init__(self) -> None:
        if not isprime(self.p):
            raise BadSpec(f"p={self.p} is not prime")
        if self.f < 1 or len(self.modulus) != self.f + 1 or self.modulus[-1] != 1:
            raise BadSpec("modulus must be monic of degree f")
        if not gf_irreducible_p(_dense(self.modulus), self.p, ZZ):
            raise BadSpec(f"modulus {list(self.modulus)} is reducible over F_{self.p}")

    @classmethod
    def of(cls, p: int, f: int = 1) -> "FiniteField":
        return cls(p, f, smallest_irreducible(p, f))

    @property
    def q(self) -> int:
        return self.p**self.f

    def _zero(self):
        return (0,) * self.f

    def _from_int(self, k):
        return (k % self.p,) + (0,) * (self.f - 1)

    def _add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def _neg(self, a):
        return tuple((-x) % self.p for x in a)

    def _mul(self, a, b):
        prod = gf_mul(_dense(a), _dense(b), self.p, ZZ)
        return _undense(gf_rem(prod, _dense(self.modulus), self.p, ZZ), self.f)

    def _pow(self, a, e):
        return _undense(gf_pow_mod(_dense(a), e, _dense(self.modulus), self.p, ZZ), self.f)

    def _is_unit(self, a):
        return any(a)

    def _inv(self, a):
        return self._pow(a, self.q - 2)

    @property
    def characteristic(self):
        return self.p

    def cardinality(self):
        return self.q

    def _payloads(self):
        return iter(itertools.product(range(self.p), repeat=self.f))

    def _random(self, rng):
        return tuple(rng.randrange(self.p) for _ in range(self.f))

    def nilpotency_bound(self):
        return 1

    def gen(self) -> RingElem:
        if self.f == 1:
            # F_p is presented modulo x; its generator is the root 0 of x
            return self.zero
        return self.elem((0, 1) + (0,) * (self.f - 2))

    def pth_root(self, a: RingElem, times: int = 1) -> RingElem:
        # x -> x^(1/p^t) equals x^(p^((f - t) mod f))
        return a ** (self.p ** ((-times) % self.f))

    def to_json(self):
        return {"kind": "Fq", "p": self.p, "f": self.f, "modulus": list(self.modulus)}

    def _payload_to_json(self, a):
        return list(a)

    def _payload_from_json(self, data):
        data = [int(c) % self.p for c in data]
        return _undense(list(reversed(data)), self.f)


@dataclass(frozen=True)
class ZmodPM(RingDescriptor):
    p: int
    m: int

    kind = "Zmod"

    def __post_init__(self) -> None:
        if not isprime(self.p) or self.m < 1:
            raise BadSpec(f"Z/{self.p}^{self.m} is not a valid descriptor")

    @property
    def order(self) -> int:
        return self.p**self.m

    def _zero(self):
        return 0

    def _from_int(self, k):
        return k % self.order

    def _add(self, a, b):
        return (a + b) % self.order

    def _neg(self, a):
        return (-a) % self.order

    def _mul(self, a, b):
        return (a * b) % self.order

    def _pow(self, a, e):
        return pow(a, e, self.order)

    def _is_unit(self, a):
        return a % self.p != 0

    def _inv(self, a):
        return pow(a, -1, self.order)

    @property
    def characteristic(self):
        return self.order

    def cardinality(self):
        return self.order

    def _payloads(self):
        return iter(range(self.order))

    def _random(self, rng):
        return rng.randrange(self.order)

    def nilpotency_bound(self):
        return self.m

    def to_json(self):
        return {"kind": "Zmod", "p": self.p, "m": self.m}

    def _payload_to_json(self, a):
        return [a]

    def _payload_from_json(self, data):
        return int(data[0]) % self.order


@dataclass(frozen=True)
class QuotientPoly(RingDescriptor):
    base: RingDescriptor
    variables: Tuple[str, ...]
    relations: Tuple[Monomial, ...]

    kind = "Quotient"

    def __post_init__(self) -> None:
        r = len(self.variables)
        if r == 0:
            raise BadSpec("QuotientPoly needs at least one variable")
        if not self.base.is_finite:
            raise BadSpec("QuotientPoly base must be finite")
        for rel in self.relations:
            if len(rel) != r or any(e < 0 for e in rel) or not any(rel):
                raise BadSpec(f"bad monomial relation {rel}")
        for i in range(r):
            if self._pure_power(i) is None:
                raise BadSpec(f"variable {self.variables[i]} is not nilpotent modulo the relations")

    @classmethod
    def dual_numbers(cls, base: RingDescriptor, name: str = "e") -> "QuotientPoly":
        return cls(base, (name,), ((2,),))

    @classmethod
    def truncated(cls, base: RingDescriptor, variables: Sequence[str], N: int) -> "QuotientPoly":
        r = len(variables)
        rels = tuple(
            m for m in itertools.product(range(N + 1), repeat=r) if sum(m) == N
        )
        return cls(base, tuple(variables), rels)

    def _pure_power(self, i: int) -> int | None:
        best = None
        for rel in self.relations:
            if all(e == 0 for j, e in enumerate(rel) if j != i):
                best = rel[i] if best is None else min(best, rel[i])
        return best

    def killed(self, mono: Monomial) -> bool:
        return any(all(m >= r for m, r in zip(mono, rel)) for rel in self.relations)

    @lru_cache(maxsize=None)
    def standard_monomials(self) -> Tuple[Monomial, ...]:
        bounds = [self._pure_power(i) for i in range(len(self.variables))]
        monos = itertools.product(*(range(b) for b in bounds))
        return tuple(m for m in monos if not self.killed(m))

    def _constant(self) -> Monomial:
        return (0,) * len(self.variables)

    def _normalize(self, terms: Dict[Monomial, Any]) -> Tuple[Tuple[Monomial, Any], ...]:
        zero = self.base._zero()
        return tuple(
            sorted((m, c) for m, c in terms.items() if c != zero and not self.killed(m))
        )

    def _zero(self):
        return ()

    def _from_int(self, k):
        return self._normalize({self._constant(): self.base._from_int(k)})

    def _add(self, a, b):
        terms = dict(a)
        for m, c in b:
            terms[m] = self.base._add(terms[m], c) if m in terms else c
        return self._normalize(terms)

    def _neg(self, a):
        return tuple((m, self.base._neg(c)) for m, c in a)

    def _mul(self, a, b):
        terms: Dict[Monomial, Any] = {}
        for ma, ca in a:
            for mb, cb in b:
                m = tuple(x + y for x, y in zip(ma, mb))
                if self.killed(m):
                    continue
                c = self.base._mul(ca, cb)
                terms[m] = self.base._add(terms[m], c) if m in terms else c
        return self._normalize(terms)

    def _const_coeff(self, a):
        for m, c in a:
            if m == self._constant():
                return c
        return self.base._zero()

    def _is_unit(self, a):
        return self.base._is_unit(self._const_coeff(a))

    def _inv(self, a):
        c0 = self._const_coeff(a)
        c0_inv = self._normalize({self._constant(): self.base._inv(c0)})
        # a = c0 (1 - t) with t nilpotent; a^-1 = c0^-1 (1 + t + t^2 + ...)
        t = self._neg(self._add(self._mul(a, c0_inv), self._neg(self._from_int(1))))
        acc = self._from_int(1)
        power = self._from_int(1)
        for _ in range(self.nilpotency_bound()):
            power = self._mul(power, t)
            if power == self._zero():
                break
            acc = self._add(acc, power)
        return self._mul(acc, c0_inv)

    @property
    def characteristic(self):
        return self.base.characteristic

    def cardinality(self):
        return self.base.cardinality() ** len(self.standard_monomials())

    def _payloads(self):
        monos = self.standard_monomials()
        base_payloads = list(self.base._payloads())
        for coeffs in itertools.product(base_payloads, repeat=len(monos)):
            yield self._normalize(dict(zip(monos, coeffs)))

    def _random(self, rng):
        return self._normalize({m: self.base._random(rng) for m in self.standard_monomials()})

    def nilpotency_bound(self):
        degree = sum(self._pure_power(i) - 1 for i in range(len(self.variables))) + 1
        return self.base.nilpotency_bound() * degree

    def is_reduced(self) -> bool:
        return False

    def gens(self) -> List[RingElem]:
        out = []
        for i in range(len(self.variables)):
            mono = tuple(1 if j == i else 0 for j in range(len(self.variables)))
            out.append(self.elem(self._normalize({mono: self.base._from_int(1)})))
        return out

    def from_base(self, x: RingElem) -> RingElem:
        if x.ring != self.base:
            raise MixedRings("element is not in the base ring")
        return self.elem(self._normalize({self._constant(): x.payload}))

    def coefficient(self, x: RingElem, mono: Monomial) -> RingElem:
        return self.base.elem(dict(x.payload).get(tuple(mono), self.base._zero()))

    def quotient_by(self, monomials: Sequence[Monomial]) -> Tuple[RingDescriptor, Callable[[RingElem], RingElem]]:
        """The ring modulo extra monomials, with its reduction map; collapses to the base when every variable dies."""
        r = len(self.variables)
        linear = {tuple(1 if j == i else 0 for j in range(r)) for i in range(r)}
        if linear <= set(tuple(m) for m in monomials):
            target: RingDescriptor = self.base
            return target, lambda x: self.base.elem(self._const_coeff(x.payload))
        target = QuotientPoly(self.base, self.variables, tuple(sorted(set(self.relations) | {tuple(m) for m in monomials})))

        def _reduce(x: RingElem) -> RingElem:
            return target.elem(target._normalize(dict(x.payload)))

        return target, _reduce

    def hom(self, target: RingDescriptor, images: Sequence[RingElem]) -> Callable[[RingElem], RingElem]:
        """Base-linear ring map sending variable i to images[i]."""
        if isinstance(target, QuotientPoly) and target.base == self.base:
            lift = target.from_base
        elif target == self.base:
            def lift(c: RingElem) -> RingElem:
                return c
        else:
            raise MixedRings("hom target must share the base ring")

        def _map(x: RingElem) -> RingElem:
            acc = target.zero
            for mono, c in x.payload:
                term = lift(self.base.elem(c))
                for img, e in zip(images, mono):
                    if e:
                        term = term * img**e
                acc = acc + term
            return acc

        return _map

    def to_json(self):
        return {
            "kind": "Quotient",
            "base": self.base.to_json(),
            "variables": list(self.variables),
            "relations": [list(r) for r in self.relations],
        }

    def _payload_to_json(self, a):
        return [[list(m), self.base._payload_to_json(c)] for m, c in a]

    def _payload_from_json(self, data):
        return self._normalize(
            {tuple(int(e) for e in m): self.base._payload_from_json(c) for m, c in data}
        )


@lru_cache(maxsize=None)
def _zz_ring(variables: Tuple[str, ...]):
    return poly_ring(",".join(variables), ZZ)[0]


@dataclass(frozen=True)
class IntegerPoly(RingDescriptor):
    variables: Tuple[str, ...]

    kind = "ZZpoly"

    def __post_init__(self) -> None:
        if not self.variables:
            raise BadSpec("IntegerPoly needs at least one variable")

    @property
    def poly_ring(self):
        return _zz_ring(self.variables)

    @property
    def is_finite(self) -> bool:
        return False

    def cardinality(self):
        raise Unenumerable("IntegerPoly is infinite")

    def _zero(self):
        return self.poly_ring.zero

    def _from_int(self, k):
        return self.poly_ring(k)

    def _add(self, a, b):
        return a + b

    def _neg(self, a):
        return -a

    def _mul(self, a, b):
        return a * b

    def _pow(self, a, e):
        return a**e

    def _is_unit(self, a):
        return a == self.poly_ring.one or a == -self.poly_ring.one

    def _inv(self, a):
        return a

    @property
    def characteristic(self):
        return 0

    def _payloads(self):
        raise Unenumerable("IntegerPoly is infinite")

    def _random(self, rng):
        R = self.poly_ring
        acc = R.zero
        for _ in range(3):
            term = R(rng.randint(-3, 3))
            for g in R.gens:
                term *= g ** rng.randint(0, 2)
            acc += term
        return acc

    def nilpotency_bound(self):
        return 1

    def gens(self) -> List[RingElem]:
        return [self.elem(g) for g in self.poly_ring.gens]

    def to_json(self):
        return {"kind": "ZZpoly", "variables": list(self.variables)}

    def _payload_to_json(self, a):
        return [[list(m), int(c)] for m, c in sorted(a.terms())]

    def _payload_from_json(self, data):
        return self.poly_ring.from_dict({tuple(int(e) for e in m): int(c) for m, c in data})


def ring_from_json(data: Dict[str, Any]) -> RingDescriptor:
    kind = data.get("kind")
    if kind == "Fq":
        if "modulus" in data:
            return FiniteField(int(data["p"]), int(data["f"]), tuple(int(c) for c in data["modulus"]))
        return FiniteField.of(int(data["p"]), int(data.get("f", 1)))
    if kind == "Zmod":
        return ZmodPM(int(data["p"]), int(data["m"]))
    if kind == "Quotient":
        return QuotientPoly(
            ring_from_json(data["base"]),
            tuple(data["variables"]),
            tuple(tuple(int(e) for e in r) for r in data["relations"]),
        )
    if kind == "ZZpoly":
        return IntegerPoly(tuple(data["variables"]))
    raise BadSpec(f"unknown ring kind {kind!r}")


@lru_cache(maxsize=None)
def field_embedding(small: FiniteField, large: FiniteField) -> Callable[[RingElem], RingElem]:
    """Embedding F_{p^f} -> F_{p^{fm}} through the first root (enumeration order) of the small modulus."""
    if small.p != large.p or large.f % small.f:
        raise BadSpec(f"F_{small.q} does not embed in F_{large.q}")
    if small == large:
        return lambda x: x
    root = None
    for cand in large.elements():
        acc = large.zero
        for c in reversed(small.modulus):
            acc = acc * cand + c
        if acc.is_zero():
            root = cand
            break
    if root is None:  # pragma: no cover - a finite field always contains its subfields
        raise BadSpec("no root of the small modulus found")

    def _embed(x: RingElem) -> RingElem:
        acc = large.zero
        for c in reversed(x.payload):
            acc = acc * root + c
        return acc

    return _embed
