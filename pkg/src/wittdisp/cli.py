from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List

from .config import GroupConfig, JobConfig, SearchConfig, WittConfig
from .deform import SquareZeroData, enumerate_lifts, gmzcf_solve_trace, universal_deformation
from .displays import (
    PrecisionBudget,
    adjoint_slopes,
    cartan_membership,
    newton_slopes,
    phi_conjugate,
    phi_orbits,
    sigma_orbits,
)
from .exceptions import BadSpec, PreconditionError, ResourceCap, WittDispError
from .groups import GroupSpec
from .matrices import MatW, PMat
from .polys import configure_cache
from .rings import FiniteField, RingDescriptor, ring_from_json
from .rz import BasePoint, adlv_count_table, adlv_enumerate, quasi_isogeny_search
from .serialize import (
    coset_to_json,
    display_from_json,
    display_to_json,
    dumps,
    envelope,
    error_to_json,
    pmat_to_json,
    slopes_to_json,
)
from .witt import WittRing, WittVec

logger = logging.getLogger(__name__)


def _load_json(value: str) -> Any:
    """JSON text, a path to a JSON file, or '-' for stdin."""
    if value == "-":
        return json.load(sys.stdin)
    if os.path.exists(value):
        with open(value, "r", encoding="utf-8") as f:
            return json.load(f)
    try:
        return json.loads(value)
    except json.JSONDecodeError as exc:
        raise BadSpec(f"not JSON and not a file: {value!r}") from exc


def _parse_vec(parent: WittRing, data: Any) -> WittVec:
    if isinstance(data, int):
        return parent.from_int(data)
    if isinstance(data, dict):
        data = data["coeffs"]
    base = parent.base
    coeffs = [base.from_int(c) if isinstance(c, int) else base.element_from_json(c) for c in data]
    if len(coeffs) > parent.n:
        raise BadSpec(f"{len(coeffs)} coordinates given for length {parent.n}")
    return parent.vec(coeffs + [base.zero] * (parent.n - len(coeffs)))


def _parse_matrix(parent: WittRing, data: Any) -> MatW:
    if isinstance(data, dict):
        data = data.get("rows", data.get("mat"))
    return MatW.from_rows(parent, [[_parse_vec(parent, x) for x in row] for row in data])


def _build_config(args) -> JobConfig:
    cfg = JobConfig(witt=WittConfig(), group=GroupConfig(), search=SearchConfig())
    for name in ("p", "f", "n", "guard"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg.witt, name, value)
    for name in ("h", "d", "subgroup"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg.group, name, value)
    if getattr(args, "weights", None):
        cfg.group.weights = [int(w) for w in _load_json(args.weights)]
    search_flags = {
        "window": "window",
        "extension": "extension",
        "max_extension": "max_extension",
        "cap": "orbit_cap",
        "entry_digits": "entry_digits",
        "threads": "threads",
        "seed": "seed",
    }
    for flag, name in search_flags.items():
        value = getattr(args, flag, None)
        if value is not None:
            setattr(cfg.search, name, value)
    cfg.output = getattr(args, "output", None)
    cfg.cache_dir = getattr(args, "cache_dir", None)
    return cfg.validate()


def _group_spec(cfg: JobConfig) -> GroupSpec:
    g = cfg.group
    weights = tuple(g.weight_vector())
    if g.subgroup is None:
        return GroupSpec(g.h, weights)
    if g.subgroup.upper() == "SL":
        base = GroupSpec.sl(g.h, g.d)
        return GroupSpec(g.h, weights, base.subgroup_eqs, base.lie_basis)
    return GroupSpec.from_json(_load_json(g.subgroup))


def _field(cfg: JobConfig) -> FiniteField:
    return FiniteField.of(cfg.witt.p, cfg.witt.f)


def _parent(cfg: JobConfig, n: int = None) -> WittRing:
    return WittRing.over(_field(cfg), n or cfg.witt.n)


def _budget(cfg: JobConfig) -> PrecisionBudget:
    return PrecisionBudget(cfg.witt.n, cfg.witt.guard)


# verbs


def _cmd_witt(args, cfg: JobConfig) -> Dict[str, Any]:
    base: RingDescriptor = ring_from_json(_load_json(args.ring)) if args.ring else _field(cfg)
    parent = WittRing.over(base, cfg.witt.n, cfg.witt.p)
    x = _parse_vec(parent, _load_json(args.x)) if args.x else parent.zero
    y = _parse_vec(parent, _load_json(args.y)) if args.y else parent.zero
    op = args.op
    if op == "ghost":
        return envelope("witt", {"op": op, "k": args.k, "result": x.ghost(args.k).to_json()})
    if op == "add":
        out = x + y
    elif op == "sub":
        out = x - y
    elif op == "mul":
        out = x * y
    elif op == "neg":
        out = -x
    elif op == "inv":
        out = x.try_inv()
    elif op == "frob":
        out = x.frobenius_same_length() if parent.char_p else x.frobenius()
    elif op == "ver":
        out = x.verschiebung(keep_length=True)
    else:
        out = parent.teichmuller(x.coeffs[0])
    return envelope("witt", {"op": op, "result": out.to_json()})


def _cmd_phi(args, cfg: JobConfig) -> Dict[str, Any]:
    D = display_from_json(_load_json(args.display))
    H = _parse_matrix(D.parent.with_length(D.n + 1), _load_json(args.H))
    return display_to_json(phi_conjugate(D, H))


def _cmd_classify(args, cfg: JobConfig) -> Dict[str, Any]:
    spec = _group_spec(cfg)
    parent = _parent(cfg)
    cap = cfg.search.orbit_cap
    phi = phi_orbits(spec, parent, cap)
    sigma = sigma_orbits(spec, parent, cap)
    return envelope("classify", {
        "phi_orbits": len(phi),
        "sigma_orbits": len(sigma),
        "agree": len(phi) == len(sigma),
        "representatives": [orbit[0].to_json() for orbit in phi],
        "label": f"counts over F_{_field(cfg).q} at length {parent.n}",
    })


def _cmd_slopes(args, cfg: JobConfig) -> Dict[str, Any]:
    budget = _budget(cfg)
    if args.display:
        D = display_from_json(_load_json(args.display))
        if args.adjoint:
            return slopes_to_json(adjoint_slopes(D, PrecisionBudget(D.n, cfg.witt.guard)))
        return slopes_to_json(newton_slopes(D.b(), budget=PrecisionBudget(D.n, cfg.witt.guard)))
    if args.adjoint:
        raise BadSpec("adjoint slopes need --display")
    if not args.b:
        raise BadSpec("give --b or --display")
    b = PMat(_parse_matrix(_parent(cfg), _load_json(args.b)), args.shift)
    return slopes_to_json(newton_slopes(b, budget=budget))


def _cmd_cartan(args, cfg: JobConfig) -> Dict[str, Any]:
    b = PMat(_parse_matrix(_parent(cfg), _load_json(args.b)), args.shift)
    return envelope("cartan", {"member": cartan_membership(b, _group_spec(cfg))})


def _u_from_b(b: MatW, spec: GroupSpec) -> MatW:
    n = b.n - 1

    def _column(i: int, j: int, x: WittVec) -> WittVec:
        if not spec.weights[j]:
            return x.truncate(n)
        if not x.in_ideal():
            raise BadSpec(f"b[{i},{j}] is not divisible by p")
        return x.shift_down().sigma_inverse()

    return b.map(_column, b.parent.with_length(n))


def _base_point(args, cfg: JobConfig, spec: GroupSpec) -> BasePoint:
    parent = _parent(cfg)
    if args.u:
        u = _parse_matrix(parent, _load_json(args.u))
    elif args.b:
        u = _u_from_b(_parse_matrix(parent.with_length(parent.n + 1), _load_json(args.b)), spec)
    else:
        u = MatW.identity(parent, spec.h)
    return BasePoint(u, spec)


def _cmd_adlv(args, cfg: JobConfig) -> Any:
    spec = _group_spec(cfg)
    base = _base_point(args, cfg, spec)
    s = cfg.search
    if args.table:
        rows = adlv_count_table(base, s.max_extension, s.window, _budget(cfg), s.threads, s.orbit_cap)
        lines = ["m\tfixed-point count"] + [f"{m}\t{c}" for m, c in rows]
        return "\n".join(lines)
    cosets = adlv_enumerate(base, s.extension, s.window, _budget(cfg), s.threads, s.orbit_cap)
    return envelope("adlv", {
        "count": len(cosets),
        "cosets": [coset_to_json(c) for c in cosets],
        "extension": s.extension,
        "window": s.window,
        "label": f"fixed-point count at extension {s.extension}",
    })


def _cmd_qisog(args, cfg: JobConfig) -> Dict[str, Any]:
    D1 = display_from_json(_load_json(args.display1))
    D2 = display_from_json(_load_json(args.display2))
    g = quasi_isogeny_search(D1, D2, cfg.search.entry_digits, cfg.witt.guard, cfg.search.orbit_cap)
    return envelope("qisog", {"found": g is not None, "g": pmat_to_json(g) if g is not None else None})


def _cmd_deform(args, cfg: JobConfig) -> Dict[str, Any]:
    spec = _group_spec(cfg)
    data = SquareZeroData.dual_numbers(_field(cfg))
    if args.deform_cmd == "solve":
        parent = data.witt(cfg.witt.n)
        U = _parse_matrix(parent, _load_json(args.U))
        Uprime = _parse_matrix(parent, _load_json(args.Uprime))
        h, steps = gmzcf_solve_trace(U, Uprime, data, spec)
        return envelope("gmzcf", {"h": h.to_json(), "iterations": steps})
    U0 = _parse_matrix(_parent(cfg), _load_json(args.U0))
    if args.deform_cmd == "lifts":
        lifts = enumerate_lifts(U0, data, spec)
        return envelope("lifts", {"count": len(lifts), "lifts": [D.to_json() for D in lifts]})
    return display_to_json(universal_deformation(U0, args.N, spec))


def _cmd_selftest(args, cfg: JobConfig) -> Dict[str, Any]:
    from .selftest import run_all

    report = run_all(cfg.search.seed, names=args.only or None, quick=args.quick, threads=cfg.search.threads)
    return envelope("selftest", report)


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0)
    common.add_argument("--p", type=int)
    common.add_argument("--f", type=int)
    common.add_argument("--n", type=int, help="Witt length")
    common.add_argument("--guard", type=int)
    common.add_argument("--h", type=int)
    common.add_argument("--d", type=int)
    common.add_argument("--weights", help="JSON 0/1 list, overrides --d")
    common.add_argument("--subgroup", help="'SL' or a GroupSpec JSON file")
    common.add_argument("--window", type=int)
    common.add_argument("--extension", "--m", dest="extension", type=int)
    common.add_argument("--max-extension", type=int)
    common.add_argument("--cap", type=int, help="enumeration cap")
    common.add_argument("--entry-digits", type=int)
    common.add_argument("--threads", type=int, help="number of worker threads")
    common.add_argument("--seed", type=int)
    common.add_argument("--cache-dir")
    common.add_argument("--output", "-o")
    return common


def _build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="wittdisp")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_witt = sub.add_parser("witt", parents=[common], help="Witt vector arithmetic")
    p_witt.add_argument("op", choices=["add", "sub", "mul", "neg", "inv", "frob", "ver", "ghost", "teich"])
    p_witt.add_argument("--x")
    p_witt.add_argument("--y")
    p_witt.add_argument("--k", type=int, default=0)
    p_witt.add_argument("--ring", help="ring descriptor JSON; default F_{p^f}")

    p_phi = sub.add_parser("phi", parents=[common], help="Phi-conjugate a display")
    p_phi.add_argument("--display", required=True)
    p_phi.add_argument("--H", required=True, help="matrix at length n+1")

    sub.add_parser("classify", parents=[common], help="count Phi-orbits and sigma-classes")

    p_slopes = sub.add_parser("slopes", parents=[common], help="Newton slopes")
    p_slopes.add_argument("--b")
    p_slopes.add_argument("--shift", type=int, default=0)
    p_slopes.add_argument("--display")
    p_slopes.add_argument("--adjoint", action="store_true")

    p_cartan = sub.add_parser("cartan", parents=[common], help="Cartan double coset membership")
    p_cartan.add_argument("--b", required=True)
    p_cartan.add_argument("--shift", type=int, default=0)

    p_adlv = sub.add_parser("adlv", parents=[common], help="affine Deligne-Lusztig cosets")
    p_adlv.add_argument("--u", help="u with b = u mu(p); default identity")
    p_adlv.add_argument("--b", help="b itself at length n+1; weight-1 columns must be divisible by p")
    p_adlv.add_argument("--precision", dest="n", type=int)
    p_adlv.add_argument("--table", action="store_true", help="plain-text counts for m = 1..max-extension")

    p_qisog = sub.add_parser("qisog", parents=[common], help="search a quasi-isogeny")
    p_qisog.add_argument("--display1", required=True)
    p_qisog.add_argument("--display2", required=True)

    p_deform = sub.add_parser("deform", help="deformations over dual numbers")
    dsub = p_deform.add_subparsers(dest="deform_cmd", required=True)
    d_solve = dsub.add_parser("solve", parents=[common])
    d_solve.add_argument("--U", required=True)
    d_solve.add_argument("--Uprime", required=True)
    d_lifts = dsub.add_parser("lifts", parents=[common])
    d_lifts.add_argument("--U0", required=True)
    d_univ = dsub.add_parser("universal", parents=[common])
    d_univ.add_argument("--U0", required=True)
    d_univ.add_argument("--N", type=int, default=2)

    p_self = sub.add_parser("selftest", parents=[common], help="run the seeded property suite")
    p_self.add_argument("--quick", action="store_true")
    p_self.add_argument("--only", nargs="*")
    return parser


_COMMANDS = {
    "witt": _cmd_witt,
    "phi": _cmd_phi,
    "classify": _cmd_classify,
    "slopes": _cmd_slopes,
    "cartan": _cmd_cartan,
    "adlv": _cmd_adlv,
    "qisog": _cmd_qisog,
    "deform": _cmd_deform,
    "selftest": _cmd_selftest,
}


def _emit(payload: Any, output: str = None) -> None:
    text = payload if isinstance(payload, str) else dumps(payload)
    if output:
        with open(output, "w", encoding="utf-8") as f:
            f.write(text + "\n")
    else:
        print(text)


def main(argv: List[str] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    verbose = getattr(args, "verbose", 0)
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        cfg = _build_config(args)
        configure_cache(cfg.resolved_cache_dir())
        result = _COMMANDS[args.cmd](args, cfg)
    except ResourceCap as exc:
        _emit(error_to_json(exc))
        return 3
    except PreconditionError as exc:
        _emit(error_to_json(exc))
        return 2
    except WittDispError as exc:
        _emit(error_to_json(exc))
        return 1

    _emit(result, cfg.output)
    if args.cmd == "selftest" and not result.get("ok", False):
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
