from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Sequence, Tuple, Union

from .exceptions import BadSpec, MixedRings, NonUnit
from .rings import RingElem
from .witt import WittRing, WittVec

Entry = Union[WittVec, int]


def _perm_sign(perm: Sequence[int]) -> int:
    inversions = sum(1 for i, j in itertools.combinations(range(len(perm)), 2) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


@dataclass(frozen=True)
class MatW:
    """Square matrix over W_n(R)."""

    parent: WittRing
    rows: Tuple[Tuple[WittVec, ...], ...]

    @classmethod
    def from_rows(cls, parent: WittRing, rows: Sequence[Sequence[Entry]]) -> "MatW":
        out = []
        h = len(rows)
        for row in rows:
            if len(row) != h:
                raise BadSpec("matrix must be square")
            conv = []
            for x in row:
                if isinstance(x, int):
                    x = parent.from_int(x)
                elif x.parent != parent:
                    raise MixedRings("matrix entry from a different Witt ring")
                conv.append(x)
            out.append(tuple(conv))
        return cls(parent, tuple(out))

    @classmethod
    def identity(cls, parent: WittRing, h: int) -> "MatW":
        return cls.diag(parent, [parent.one] * h)

    @classmethod
    def zeros(cls, parent: WittRing, h: int) -> "MatW":
        return cls(parent, tuple(tuple(parent.zero for _ in range(h)) for _ in range(h)))

    @classmethod
    def diag(cls, parent: WittRing, entries: Sequence[Entry]) -> "MatW":
        h = len(entries)
        rows = [[entries[i] if i == j else 0 for j in range(h)] for i in range(h)]
        return cls.from_rows(parent, rows)

    @classmethod
    def random(cls, parent: WittRing, h: int, rng: random.Random) -> "MatW":
        return cls(parent, tuple(tuple(parent.random_element(rng) for _ in range(h)) for _ in range(h)))

    @classmethod
    def random_invertible(cls, parent: WittRing, h: int, rng: random.Random) -> "MatW":
        while True:
            m = cls.random(parent, h, rng)
            if m.is_invertible():
                return m

    @property
    def h(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return self.parent.n

    def __getitem__(self, ij: Tuple[int, int]) -> WittVec:
        i, j = ij
        return self.rows[i][j]

    def entries(self):
        for i, row in enumerate(self.rows):
            for j, x in enumerate(row):
                yield i, j, x

    def map(self, fn: Callable[[int, int, WittVec], WittVec], parent: Optional[WittRing] = None) -> "MatW":
        target = parent or self.parent
        rows = [[fn(i, j, x) for j, x in enumerate(row)] for i, row in enumerate(self.rows)]
        return MatW.from_rows(target, rows)

    def _check(self, other: "MatW") -> None:
        if other.parent != self.parent or other.h != self.h:
            raise MixedRings("matrices over different Witt rings or sizes")

    def __add__(self, other: "MatW") -> "MatW":
        self._check(other)
        return MatW(self.parent, tuple(
            tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(self.rows, other.rows)
        ))

    def __neg__(self) -> "MatW":
        return MatW(self.parent, tuple(tuple(-a for a in r) for r in self.rows))

    def __sub__(self, other: "MatW") -> "MatW":
        return self + (-other)

    def __mul__(self, other: Union["MatW", WittVec, int]) -> "MatW":
        if isinstance(other, (WittVec, int)):
            return MatW(self.parent, tuple(tuple(a * other for a in r) for r in self.rows))
        self._check(other)
        h = self.h
        cols = [[other.rows[k][j] for k in range(h)] for j in range(h)]
        out = []
        for row in self.rows:
            new_row = []
            for col in cols:
                acc = self.parent.zero
                for a, b in zip(row, col):
                    if a.is_zero() or b.is_zero():
                        continue
                    acc = acc + a * b
                new_row.append(acc)
            out.append(tuple(new_row))
        return MatW(self.parent, tuple(out))

    def __rmul__(self, other: Union[WittVec, int]) -> "MatW":
        return self * other

    def transpose(self) -> "MatW":
        return MatW(self.parent, tuple(zip(*self.rows)))

    def is_zero(self) -> bool:
        return all(x.is_zero() for _, _, x in self.entries())

    def det(self) -> WittVec:
        h = self.h
        acc = self.parent.zero
        for perm in itertools.permutations(range(h)):
            term = self.parent.from_int(_perm_sign(perm))
            for i in range(h):
                term = term * self.rows[i][perm[i]]
                if term.is_zero():
                    break
            acc = acc + term
        return acc

    def minor(self, i: int, j: int) -> "MatW":
        rows = [r[:j] + r[j + 1:] for k, r in enumerate(self.rows) if k != i]
        return MatW(self.parent, tuple(rows))

    def adjugate(self) -> "MatW":
        h = self.h
        if h == 1:
            return MatW.identity(self.parent, 1)
        rows = []
        for i in range(h):
            row = []
            for j in range(h):
                cof = self.minor(j, i).det()
                row.append(-cof if (i + j) % 2 else cof)
            rows.append(tuple(row))
        return MatW(self.parent, tuple(rows))

    def is_invertible(self) -> bool:
        return self.det().is_unit()

    def inverse(self) -> "MatW":
        """Gauss-Jordan with unit pivots; W_n(R) is local for the rings used here."""
        h = self.h
        a = [list(r) for r in self.rows]
        inv = [list(r) for r in MatW.identity(self.parent, h).rows]
        for col in range(h):
            pivot = next((r for r in range(col, h) if a[r][col].is_unit()), None)
            if pivot is None:
                raise NonUnit(f"no unit pivot in column {col}")
            a[col], a[pivot] = a[pivot], a[col]
            inv[col], inv[pivot] = inv[pivot], inv[col]
            u = a[col][col].try_inv()
            a[col] = [x * u for x in a[col]]
            inv[col] = [x * u for x in inv[col]]
            for r in range(h):
                if r == col or a[r][col].is_zero():
                    continue
                c = a[r][col]
                a[r] = [x - c * y for x, y in zip(a[r], a[col])]
                inv[r] = [x - c * y for x, y in zip(inv[r], inv[col])]
        return MatW(self.parent, tuple(tuple(r) for r in inv))

    def truncate(self, m: int) -> "MatW":
        return MatW(self.parent.with_length(m), tuple(tuple(x.truncate(m) for x in r) for r in self.rows))

    def pad(self, m: int) -> "MatW":
        return MatW(self.parent.with_length(m), tuple(tuple(x.pad(m) for x in r) for r in self.rows))

    def frobenius(self) -> "MatW":
        """Entrywise length-dropping F."""
        return MatW(self.parent.with_length(self.n - 1), tuple(tuple(x.frobenius() for x in r) for r in self.rows))

    def sigma(self) -> "MatW":
        """Entrywise same-length Frobenius over a characteristic-p base."""
        return MatW(self.parent, tuple(tuple(x.frobenius_same_length() for x in r) for r in self.rows))

    def sigma_inverse(self) -> "MatW":
        return MatW(self.parent, tuple(tuple(x.sigma_inverse() for x in r) for r in self.rows))

    def times_p_power(self, e: int) -> "MatW":
        return MatW(self.parent, tuple(tuple(x.times_p_power(e) for x in r) for r in self.rows))

    def map_coefficients(self, fn: Callable[[RingElem], RingElem], target: WittRing) -> "MatW":
        return MatW(target, tuple(tuple(x.map(fn, target) for x in r) for r in self.rows))

    def w0(self) -> List[List[RingElem]]:
        return [[x.coeffs[0] for x in r] for r in self.rows]

    def key(self) -> Tuple[Any, ...]:
        """Sortable canonical key."""
        return tuple(
            tuple(repr(c.to_json()) for c in x.coeffs) for r in self.rows for x in r
        )

    def to_json(self) -> List[List[List[Any]]]:
        return [[[c.to_json() for c in x.coeffs] for x in r] for r in self.rows]

    def __repr__(self) -> str:
        return f"MatW({self.to_json()!r})"


@dataclass(frozen=True)
class PMat:
    """p^(-shift) * mat, an element of GL_h(W[1/p]) at finite precision."""

    mat: MatW
    shift: int = 0

    @property
    def h(self) -> int:
        return self.mat.h

    @property
    def n(self) -> int:
        return self.mat.n

    def __mul__(self, other: Union["PMat", MatW]) -> "PMat":
        if isinstance(other, MatW):
            return PMat(self.mat * other, self.shift)
        return PMat(self.mat * other.mat, self.shift + other.shift)

    def __rmul__(self, other: MatW) -> "PMat":
        return PMat(other * self.mat, self.shift)

    def sigma(self) -> "PMat":
        return PMat(self.mat.sigma(), self.shift)

    def sigma_inverse(self) -> "PMat":
        return PMat(self.mat.sigma_inverse(), self.shift)

    def equals(self, other: "PMat") -> bool:
        """Compares p^{s'} M with p^{s} M' at the common length."""
        n = min(self.n, other.n)
        a, b = self.mat.truncate(n), other.mat.truncate(n)
        d = other.shift - self.shift
        if d >= 0:
            return a.times_p_power(d) == b
        return a == b.times_p_power(-d)

    def to_json(self) -> dict:
        return {"shift": self.shift, "mat": self.mat.to_json()}
