from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from sympy.polys.domains import QQ, ZZ
from sympy.polys.rings import PolyElement, PolyRing, ring as poly_ring

from .exceptions import BadSpec, IntegralityFailure

logger = logging.getLogger(__name__)

_cache_dir: Optional[str] = None


def configure_cache(path: Optional[str]) -> None:
    """Directory for the JSON copies of derived polynomials; None keeps them in memory only."""
    global _cache_dir
    _cache_dir = path or None


@lru_cache(maxsize=None)
def _rings(n: int) -> Tuple[PolyRing, PolyRing]:
    names = ",".join([f"x{i}" for i in range(n)] + [f"y{i}" for i in range(n)])
    return poly_ring(names, QQ)[0], poly_ring(names, ZZ)[0]


@dataclass(frozen=True)
class UniversalWittPolys:
    """S, P, N and Frobenius polynomials of W_n in the variables x0..x{n-1}, y0..y{n-1}."""

    p: int
    n: int
    sum_polys: Tuple[PolyElement, ...]
    prod_polys: Tuple[PolyElement, ...]
    neg_polys: Tuple[PolyElement, ...]
    frob_polys: Tuple[PolyElement, ...]

    @property
    def ring(self) -> PolyRing:
        return _rings(self.n)[1]

    def xs(self) -> List[PolyElement]:
        return list(self.ring.gens[: self.n])

    def ys(self) -> List[PolyElement]:
        return list(self.ring.gens[self.n :])

    def ghost(self, k: int, coords: Sequence[PolyElement]) -> PolyElement:
        p = self.p
        return sum(
            (p**i * coords[i] ** (p ** (k - i)) for i in range(k + 1)), self.ring.zero
        )

    def to_json(self) -> Dict[str, Any]:
        def enc(polys):
            return [[[list(m), int(c)] for m, c in sorted(f.terms())] for f in polys]

        return {
            "p": self.p,
            "n": self.n,
            "sum": enc(self.sum_polys),
            "prod": enc(self.prod_polys),
            "neg": enc(self.neg_polys),
            "frob": enc(self.frob_polys),
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "UniversalWittPolys":
        R = _rings(int(data["n"]))[1]

        def dec(items):
            return tuple(
                R.from_dict({tuple(m): int(c) for m, c in terms}) for terms in items
            )

        return cls(
            int(data["p"]),
            int(data["n"]),
            dec(data["sum"]),
            dec(data["prod"]),
            dec(data["neg"]),
            dec(data["frob"]),
        )


def _integral(f: PolyElement, target: PolyRing, what: str) -> PolyElement:
    coeffs: Dict[Tuple[int, ...], int] = {}
    for mono, c in f.terms():
        if QQ.denom(c) != 1:
            raise IntegralityFailure(f"{what}: coefficient {c} is not an integer")
        coeffs[mono] = int(QQ.numer(c))
    return target.from_dict(coeffs)


def _solve_ghost(
    p: int, count: int, target: Callable[[int], PolyElement]
) -> List[PolyElement]:
    # Q_k = (target_k - sum_{i<k} p^i Q_i^(p^(k-i))) / p^k
    out: List[PolyElement] = []
    for k in range(count):
        acc = target(k)
        for i, q in enumerate(out):
            acc -= p**i * q ** (p ** (k - i))
        out.append(acc * QQ(1, p**k))
    return out


def _derive(p: int, n: int) -> UniversalWittPolys:
    RQ, RZ = _rings(n)
    xs, ys = RQ.gens[:n], RQ.gens[n:]

    def w(k: int, coords) -> PolyElement:
        return sum((p**i * coords[i] ** (p ** (k - i)) for i in range(k + 1)), RQ.zero)

    S = _solve_ghost(p, n, lambda k: w(k, xs) + w(k, ys))
    P = _solve_ghost(p, n, lambda k: w(k, xs) * w(k, ys))
    N = _solve_ghost(p, n, lambda k: -w(k, xs))
    F = _solve_ghost(p, n - 1, lambda k: w(k + 1, xs))
    return UniversalWittPolys(
        p,
        n,
        tuple(_integral(f, RZ, f"S{k}") for k, f in enumerate(S)),
        tuple(_integral(f, RZ, f"P{k}") for k, f in enumerate(P)),
        tuple(_integral(f, RZ, f"N{k}") for k, f in enumerate(N)),
        tuple(_integral(f, RZ, f"F{k}") for k, f in enumerate(F)),
    )


def _cache_path(p: int, n: int) -> Optional[str]:
    if not _cache_dir:
        return None
    return os.path.join(_cache_dir, f"witt-polys-p{p}-n{n}.json")


def _load_cached(path: str, p: int, n: int) -> Optional[UniversalWittPolys]:
    """Polynomials from the disk cache, or None when the file is unreadable or fails the ghost check."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            polys = UniversalWittPolys.from_json(json.load(f))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        logger.warning("ignoring unreadable polynomial cache %s: %s", path, exc)
        return None
    if (polys.p, polys.n) != (p, n) or not verify_ghost_identities(polys):
        logger.warning("ignoring polynomial cache %s: ghost identities fail", path)
        return None
    logger.debug("loaded universal polynomials p=%d n=%d from %s", p, n, path)
    return polys


@lru_cache(maxsize=None)
def derive_universal_polys(p: int, n: int) -> UniversalWittPolys:
    if n < 1:
        raise BadSpec(f"Witt length must be >= 1, got {n}")
    path = _cache_path(p, n)
    if path and os.path.exists(path):
        polys = _load_cached(path, p, n)
        if polys is not None:
            return polys

    logger.debug("deriving universal polynomials p=%d n=%d", p, n)
    polys = _derive(p, n)
    if path:
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(polys.to_json(), f)
    return polys


def verify_ghost_identities(polys: UniversalWittPolys) -> bool:
    """Checks w_k(S) = w_k(x)+w_k(y), w_k(P) = w_k(x)w_k(y), w_k(N) = -w_k(x), w_k(F) = w_{k+1}(x)."""
    xs, ys = polys.xs(), polys.ys()
    for k in range(polys.n):
        wx, wy = polys.ghost(k, xs), polys.ghost(k, ys)
        if polys.ghost(k, polys.sum_polys) != wx + wy:
            return False
        if polys.ghost(k, polys.prod_polys) != wx * wy:
            return False
        if polys.ghost(k, polys.neg_polys) != -wx:
            return False
        if k < polys.n - 1 and polys.ghost(k, polys.frob_polys) != polys.ghost(k + 1, xs):
            return False
    return True


def evaluate(poly: PolyElement, values: Sequence[Any], from_int: Callable[[int], Any]) -> Any:
    """Evaluates an integer polynomial at ring values; values[i] goes to generator i."""
    acc = from_int(0)
    powers: Dict[Tuple[int, int], Any] = {}
    for mono, c in poly.terms():
        term = from_int(int(c))
        for i, e in enumerate(mono):
            if not e:
                continue
            key = (i, e)
            if key not in powers:
                powers[key] = values[i] ** e
            term = term * powers[key]
        acc = acc + term
    return acc
