from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Dict, List, Sequence, Tuple, Union

import sympy
from sympy import Matrix, Poly, Symbol, sympify

from .exceptions import BadSpec, NotInHmu, NotLocal, NotInSubgroup
from .matrices import MatW
from .rings import FiniteField, QuotientPoly, RingElem, ZmodPM
from .witt import WittRing, WittVec

IntMatrix = Tuple[Tuple[int, ...], ...]
Terms = Tuple[Tuple[Tuple[int, ...], int], ...]


def _unit_matrix(h: int, i: int, j: int) -> IntMatrix:
    return tuple(tuple(1 if (r, c) == (i, j) else 0 for c in range(h)) for r in range(h))


def _flat(m: IntMatrix) -> List[int]:
    return [x for row in m for x in row]


@dataclass(frozen=True)
class GroupSpec:
    """GL_h with a 0/1 weight vector, optionally cut down by polynomial equations."""

    h: int
    weights: Tuple[int, ...]
    subgroup_eqs: Tuple[str, ...] = ()
    lie_basis: Tuple[IntMatrix, ...] = ()

    def __post_init__(self) -> None:
        if self.h < 1 or len(self.weights) != self.h:
            raise BadSpec("weights must have length h")
        if any(w not in (0, 1) for w in self.weights):
            raise BadSpec("only minuscule weights in {0, 1} are supported")
        if self.subgroup_eqs and not self.lie_basis:
            raise BadSpec("a subgroup needs an explicit lie_basis")
        if not self.lie_basis:
            basis = tuple(_unit_matrix(self.h, i, j) for i in range(self.h) for j in range(self.h))
            object.__setattr__(self, "lie_basis", basis)
        for X in self.lie_basis:
            if len(X) != self.h or any(len(r) != self.h for r in X):
                raise BadSpec("lie_basis entries must be h x h")
            if len({self.weight_of(i, j) for i in range(self.h) for j in range(self.h) if X[i][j]}) > 1:
                raise BadSpec("lie_basis elements must be weight-homogeneous")
        if self.subgroup_eqs:
            _compiled_equations(self)
            self._check_bracket_closed()

    @classmethod
    def gl(cls, h: int, d: int) -> "GroupSpec":
        return cls(h, tuple([0] * d + [1] * (h - d)))

    @classmethod
    def sl(cls, h: int, d: int) -> "GroupSpec":
        basis = [_unit_matrix(h, i, j) for i in range(h) for j in range(h) if i != j]
        for i in range(h - 1):
            basis.append(tuple(
                tuple((1 if r == c == i else -1 if r == c == i + 1 else 0) for c in range(h))
                for r in range(h)
            ))
        return cls(h, tuple([0] * d + [1] * (h - d)), ("det - 1",), tuple(basis))

    @property
    def d(self) -> int:
        return sum(1 for w in self.weights if w == 0)

    @property
    def dim(self) -> int:
        return len(self.lie_basis)

    @property
    def is_gl(self) -> bool:
        return not self.subgroup_eqs

    def weight_of(self, i: int, j: int) -> int:
        return self.weights[i] - self.weights[j]

    def upos(self) -> List[Tuple[int, int]]:
        """Positions of the opposite unipotent radical (weight -1)."""
        return [(i, j) for i in range(self.h) for j in range(self.h) if self.weight_of(i, j) == -1]

    def mu_p(self, parent: WittRing) -> MatW:
        return MatW.diag(parent, [parent.p**w for w in self.weights])

    def _check_bracket_closed(self) -> None:
        basis = Matrix([_flat(X) for X in self.lie_basis])
        rank = basis.rank()
        for X, Y in itertools.combinations(self.lie_basis, 2):
            mx, my = Matrix(X), Matrix(Y)
            br = list(mx * my - my * mx)
            if Matrix.vstack(basis, Matrix([br])).rank() != rank:
                raise BadSpec("lie_basis is not closed under the bracket")

    def to_json(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"h": self.h, "weights": list(self.weights)}
        if self.subgroup_eqs:
            data["subgroup_eqs"] = list(self.subgroup_eqs)
            data["lie_basis"] = [[list(r) for r in X] for X in self.lie_basis]
        return data

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "GroupSpec":
        h = int(data["h"])
        weights = tuple(int(w) for w in data["weights"])
        eqs = tuple(str(e) for e in data.get("subgroup_eqs", []))
        basis = tuple(
            tuple(tuple(int(x) for x in row) for row in X) for X in data.get("lie_basis", [])
        )
        return cls(h, weights, eqs, basis)


def entry_symbols(h: int) -> List[Symbol]:
    return [Symbol(f"x{i}{j}") for i in range(h) for j in range(h)] + [Symbol("dinv")]


@lru_cache(maxsize=None)
def _compiled_equations(spec: GroupSpec) -> Tuple[Terms, ...]:
    gens = entry_symbols(spec.h)
    det = Matrix(spec.h, spec.h, gens[:-1]).det()
    out = []
    for eq in spec.subgroup_eqs:
        try:
            expr = sympify(eq, locals={s.name: s for s in gens} | {"det": det})
            poly = Poly(sympy.expand(expr), *gens, domain="ZZ")
        except (sympy.SympifyError, sympy.polys.polyerrors.PolynomialError, TypeError) as exc:
            raise BadSpec(f"cannot parse subgroup equation {eq!r}: {exc}") from exc
        out.append(tuple((tuple(m), int(c)) for m, c in poly.terms()))
    return tuple(out)


def _eval_terms(terms: Terms, values: Sequence[Any], from_int: Callable[[int], Any]) -> Any:
    acc = from_int(0)
    for mono, c in terms:
        term = from_int(c)
        for v, e in zip(values, mono):
            if e:
                term = term * v**e
        acc = acc + term
    return acc


def ring_det(rows: Sequence[Sequence[RingElem]]) -> RingElem:
    h = len(rows)
    ring = rows[0][0].ring
    acc = ring.zero
    for perm in itertools.permutations(range(h)):
        inv = sum(1 for a, b in itertools.combinations(range(h), 2) if perm[a] > perm[b])
        term = ring.from_int(-1 if inv % 2 else 1)
        for i in range(h):
            term = term * rows[i][perm[i]]
        acc = acc + term
    return acc


def subgroup_membership(g: MatW, spec: GroupSpec) -> bool:
    if spec.is_gl:
        return True
    values = [x for row in g.rows for x in row] + [g.det().try_inv()]
    return all(
        _eval_terms(terms, values, g.parent.from_int).is_zero()
        for terms in _compiled_equations(spec)
    )


def parabolic_membership(g0: Sequence[Sequence[RingElem]], spec: GroupSpec) -> bool:
    for i in range(spec.h):
        for j in range(spec.h):
            if spec.weight_of(i, j) < 0 and not g0[i][j].is_zero():
                return False
    if spec.is_gl:
        return True
    ring = g0[0][0].ring
    values = [x for row in g0 for x in row] + [ring_det(g0).try_inv()]
    return all(_eval_terms(t, values, ring.from_int).is_zero() for t in _compiled_equations(spec))


MatrixLike = Union[MatW, List[List[RingElem]]]


def lie_projection_pi(X: MatrixLike, spec: GroupSpec) -> MatrixLike:
    """Keeps the weight -1 entries; the kernel is Lie P_mu."""
    if isinstance(X, MatW):
        zero = X.parent.zero
        return X.map(lambda i, j, x: x if spec.weight_of(i, j) == -1 else zero)
    return [
        [x if spec.weight_of(i, j) == -1 else x.ring.zero for j, x in enumerate(row)]
        for i, row in enumerate(X)
    ]


def in_hmu(H: MatW, spec: GroupSpec) -> bool:
    return all(H[i, j].in_ideal() for i, j in spec.upos())


def divided_frobenius(H: MatW, spec: GroupSpec) -> MatW:
    """Phi_{G,mu}: V^-1, F or pF entrywise by weight difference; W_n -> W_{n-1}."""
    out_parent = H.parent.with_length(H.n - 1)
    rows = []
    for i in range(spec.h):
        row = []
        for j in range(spec.h):
            x = H[i, j]
            w = spec.weight_of(i, j)
            if w == -1:
                if not x.in_ideal():
                    raise NotInHmu(f"entry ({i},{j}) has nonzero w_0")
                row.append(x.shift_down())
            elif w == 0:
                row.append(x.frobenius())
            else:
                row.append(x.frobenius().times_p_power(1))
        rows.append(tuple(row))
    return MatW(out_parent, tuple(rows))


def conjugation_formula_holds(H: MatW, spec: GroupSpec) -> bool:
    """p * Phi(H) equals mu(p) F(H) mu(p)^-1 scaled by p, over a p-torsion-free base."""
    phi = divided_frobenius(H, spec)
    F = H.frobenius()
    p = H.parent.p
    for i in range(spec.h):
        for j in range(spec.h):
            lhs = phi[i, j] * p
            rhs = F[i, j] * p ** (1 + spec.weight_of(i, j))
            if lhs != rhs:
                return False
    return True


def _is_local(parent: WittRing) -> bool:
    base = parent.base
    while isinstance(base, QuotientPoly):
        base = base.base
    return isinstance(base, (FiniteField, ZmodPM))


def _block(H: MatW, rows: Sequence[int], cols: Sequence[int]) -> List[List[WittVec]]:
    return [[H[i, j] for j in cols] for i in rows]


def _mm(A: List[List[WittVec]], B: List[List[WittVec]], zero: WittVec) -> List[List[WittVec]]:
    if not A or not B:
        return [[zero] * (len(B[0]) if B else 0) for _ in A]
    return [
        [sum((A[i][k] * B[k][j] for k in range(len(B))), zero) for j in range(len(B[0]))]
        for i in range(len(A))
    ]


def h_mu_factor(H: MatW, spec: GroupSpec) -> Tuple[MatW, MatW]:
    """H = Hp Hu with Hp in L+P_mu and Hu unipotent on the weight -1 block."""
    if not _is_local(H.parent):
        raise NotLocal("factorisation needs a local coefficient ring with p nilpotent")
    if not in_hmu(H, spec):
        raise NotInHmu("H is not in H^mu")
    A = [i for i, w in enumerate(spec.weights) if w == 0]
    B = [i for i, w in enumerate(spec.weights) if w == 1]
    parent, zero = H.parent, H.parent.zero
    if not A or not B:
        return H, MatW.identity(parent, spec.h)
    H_AA = MatW(parent, tuple(tuple(r) for r in _block(H, A, A)))
    N = _mm([list(r) for r in H_AA.inverse().rows], _block(H, A, B), zero)
    BAN = _mm(_block(H, B, A), N, zero)
    Hp = [[zero] * spec.h for _ in range(spec.h)]
    Hu = [[parent.one if i == j else zero for j in range(spec.h)] for i in range(spec.h)]
    for a, i in enumerate(A):
        for j in A:
            Hp[i][j] = H[i, j]
        for c, j in enumerate(B):
            Hu[i][j] = N[a][c]
    for b, i in enumerate(B):
        for j in A:
            Hp[i][j] = H[i, j]
        for c, j in enumerate(B):
            Hp[i][j] = H[i, j] - BAN[b][c]
    return MatW.from_rows(parent, Hp), MatW.from_rows(parent, Hu)


@lru_cache(maxsize=None)
def _coordinate_map(spec: GroupSpec, p: int) -> Tuple[Tuple[Tuple[int, int], ...], Tuple[Tuple[Fraction, ...], ...]]:
    """Positions whose restriction of the basis is invertible mod p, with that inverse over Q."""
    r = spec.dim
    flat = [_flat(X) for X in spec.lie_basis]
    for cols in itertools.combinations(range(spec.h * spec.h), r):
        sub = Matrix([[row[c] for c in cols] for row in flat])
        det = sub.det()
        if det % p != 0:
            inv = sub.inv()
            positions = tuple(divmod(c, spec.h) for c in cols)
            entries = tuple(
                tuple(Fraction(int(sympy.fraction(v)[0]), int(sympy.fraction(v)[1])) for v in inv.row(k))
                for k in range(r)
            )
            return positions, entries
    raise BadSpec(f"lie_basis is not a direct summand of gl_h at p={p}")


def _from_fraction(value: Fraction, from_int: Callable[[int], Any]) -> Any:
    num = from_int(value.numerator)
    if value.denominator == 1:
        return num
    return num * from_int(value.denominator).try_inv()


def lie_coordinates(X: MatrixLike, spec: GroupSpec, p: int) -> List[Any]:
    """Coordinates of X in lie_basis; X must lie in the span."""
    positions, inv = _coordinate_map(spec, p)
    if isinstance(X, MatW):
        vals = [X[i, j] for i, j in positions]
        from_int = X.parent.from_int
        zero = X.parent.zero
    else:
        vals = [X[i][j] for i, j in positions]
        from_int = vals[0].ring.from_int
        zero = vals[0].ring.zero
    coords = []
    # c . B_P = X_P, so c = X_P . B_P^-1
    for k in range(spec.dim):
        acc = zero
        for l, v in enumerate(vals):
            coef = inv[l][k]
            if coef:
                acc = acc + v * _from_fraction(coef, from_int)
        coords.append(acc)
    return coords


def lie_element(coords: Sequence[Any], spec: GroupSpec, zero: Any) -> List[List[Any]]:
    out = [[zero] * spec.h for _ in range(spec.h)]
    for c, X in zip(coords, spec.lie_basis):
        for i in range(spec.h):
            for j in range(spec.h):
                if X[i][j]:
                    out[i][j] = out[i][j] + c * X[i][j]
    return out


def check_hmu_element(H: MatW, spec: GroupSpec) -> None:
    if not in_hmu(H, spec):
        raise NotInHmu("H has a weight -1 entry outside I(R)")
    if not subgroup_membership(H, spec):
        raise NotInSubgroup("H fails the subgroup equations")
