"""Command line front end.

Subcommands: m3, hochschild-delta, cup, realisable, localize, local-global,
gamma, demo.  Inputs are factory names ("cyclic:3", "product:2,2",
"tate:cyclic:3") or JSON files; output is deterministic JSON on stdout.
Exit codes: 0 success, 2 window overflow, 3 invalid input.

OBSTRUCT_WINDOW overrides the default window; --cache-dir reuses results
keyed by a hash of the canonicalised request.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from .graded import (
    GradedAlgebraPresentation,
    ModulePresentation,
    ComputedModule,
    WindowOverflowError,
    parse_element,
)
from .hochschild import (
    HochschildCochain,
    coboundary_solve,
    cup,
    delta,
    delta_violations,
    realisability_verdict,
    yoneda,
)
from .localise import graded_primes, local_global_check, localise_algebra

EXIT_OK = 0
EXIT_WINDOW = 2
EXIT_INVALID = 3


def _default_window(args) -> int:
    if args.window is not None:
        return args.window
    env = os.environ.get("OBSTRUCT_WINDOW")
    return int(env) if env else 8


def _emit(args, request: dict, result: dict) -> None:
    if args.cache_dir:
        key = hashlib.sha256(json.dumps(request, sort_keys=True).encode()).hexdigest()
        path = Path(args.cache_dir) / f"{key}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(result, sort_keys=True, indent=1))
    out = json.dumps(result, sort_keys=True, indent=1)
    if args.output:
        Path(args.output).write_text(out)
    else:
        print(out)


def _cached(args, request: dict):
    if not args.cache_dir:
        return None
    key = hashlib.sha256(json.dumps(request, sort_keys=True).encode()).hexdigest()
    path = Path(args.cache_dir) / f"{key}.json"
    if path.exists():
        return json.loads(path.read_text())
    return None


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SystemExit(f"cannot read JSON input {path!r}: {exc}") from exc


def _cochain_from_json(algebra: GradedAlgebraPresentation, data: dict) -> HochschildCochain:
    out = HochschildCochain(algebra, data["arity"], data["internal_degree"])
    for entry in data.get("values", []):
        t = tuple(next(iter(parse_element(algebra, s))) for s in entry["tuple"])
        val = {}
        for term in entry["value"]:
            w = next(iter(parse_element(algebra, term["word"])))
            val[w] = algebra.field(term["coeff"])
        out.set_value(t, val)
    return out


def _generic_dga_m3(data: dict, window: int) -> dict:
    """m3 for a dg algebra given by explicit tables (JSON file input).

    The table is reported in class coordinates; without a presented
    cohomology ring only the identically-zero case yields a class verdict.
    """
    import numpy as np

    from .dgcore import CochainComplex, DgAlgebra, cohomology
    from .kadeishvili import secondary_multiplication

    cx = CochainComplex.from_json(data)
    p = cx.p
    tables = {}
    for d1, i, d2, j, k, v in data.get("multiplication", []):
        key = (d1, d2)
        if key not in tables:
            tables[key] = np.zeros((cx.dim(d1), cx.dim(d2), cx.dim(d1 + d2)), dtype=np.int64)
        tables[key][i, j, k] = v % p
    dga = DgAlgebra(cx, unit=np.array(data["unit"], dtype=np.int64), tables=tables)
    _, split = cohomology(cx)
    top = min(window, cx.trusted[1])
    transfer = secondary_multiplication(dga, split, top)
    table = [
        {"classes": [[n1, i1], [n2, i2], [n3, i3]], "value": [int(c) for c in cls]}
        for (n1, i1, n2, i2, n3, i3), cls in sorted(transfer.m3.items())
    ]
    result = {"m3_classes": table, "zero": not table}
    if not table:
        result["verdict"] = "TRIVIAL_UP_TO_WINDOW"
        result["witness"] = {}
    else:
        result["verdict"] = "UNDECIDED"
        result["note"] = "class verdicts need a presented cohomology ring; use a factory name"
    return result


def cmd_m3(args) -> int:
    window = _default_window(args)
    request = {"cmd": "m3", "ref": args.ref, "window": window}
    hit = _cached(args, request)
    if hit is not None:
        _emit(args, request, hit)
        return EXIT_OK
    if Path(args.ref).exists():
        result = _generic_dga_m3(_load_json(args.ref), window)
        _emit(args, request, result)
        return EXIT_OK
    from .groupcohom import CyclicGroupData, factory, mu_G, mu_product

    target = factory(args.ref, window)
    if isinstance(target, CyclicGroupData):
        m3, verdict = mu_G(target)
    elif target[0] == "product":
        m3, verdict = mu_product(target[1], window)
    else:
        raise SystemExit("m3 expects a cyclic group, a product, or a dg algebra file")
    cocycle_ok = not delta_violations(m3)
    result = {
        "ref": args.ref,
        "window": window,
        "m3": m3.to_json(),
        "cocycle": cocycle_ok,
        "class": verdict.to_json(),
    }
    _emit(args, request, result)
    return EXIT_OK


def cmd_hochschild_delta(args) -> int:
    data = _load_json(args.input)
    algebra = GradedAlgebraPresentation.from_json(data["algebra"])
    phi = _cochain_from_json(algebra, data["cochain"])
    dphi = delta(phi)
    result = {
        "input_is_cocycle": not dphi.values,
        "delta": dphi.to_json(),
    }
    _emit(args, {"cmd": "hochschild-delta", "input": data}, result)
    return EXIT_OK


def cmd_cup(args) -> int:
    data = _load_json(args.input)
    algebra = GradedAlgebraPresentation.from_json(data["algebra"])
    zeta = _cochain_from_json(algebra, data["zeta"])
    eta = _cochain_from_json(algebra, data["eta"])
    c = cup(zeta, eta)
    y = yoneda(zeta, eta, lifting="delta")
    result = {
        "cup": c.to_json(),
        "yoneda_delta_lifting_agrees": y.values == c.values,
    }
    _emit(args, {"cmd": "cup", "input": data}, result)
    return EXIT_OK


def cmd_realisable(args) -> int:
    window = _default_window(args)
    from .groupcohom import CyclicGroupData, factory, m3_cochain

    target = factory(args.ref, window)
    if not isinstance(target, CyclicGroupData):
        raise SystemExit("realisable expects a cyclic group reference")
    module_data = _load_json(args.module)
    request = {"cmd": "realisable", "ref": args.ref, "module": module_data, "window": window}
    hit = _cached(args, request)
    if hit is not None:
        _emit(args, request, hit)
        return EXIT_OK

    def builder(w):
        phi = m3_cochain(CyclicGroupData(target.p, target.n, w))
        pres = ModulePresentation.from_json(module_data, algebra=phi.algebra)
        return ComputedModule(pres), phi

    verdict = realisability_verdict(builder, window)
    result = {"ref": args.ref, "window": window, "verdict": verdict.to_json()}
    _emit(args, request, result)
    return EXIT_OK


def cmd_localize(args) -> int:
    window = _default_window(args)
    from .groupcohom import CyclicGroupData, factory, group_cohomology_ring

    if Path(args.ref).exists():
        ring = GradedAlgebraPresentation.from_json(_load_json(args.ref))
    else:
        target = factory(args.ref, window)
        if not isinstance(target, CyclicGroupData):
            raise SystemExit("localize expects a cyclic group reference or an algebra file")
        ring = group_cohomology_ring(CyclicGroupData(target.p, target.n, window))
    if args.at_prime:
        primes = graded_primes(ring)
        wanted = set(args.at_prime.split(","))
        chosen = next((pr for pr in primes if set(pr.names()) == wanted), None)
        if chosen is None:
            raise SystemExit(f"no graded prime with generators {sorted(wanted)}")
        invert = [ring.gen_names[g] for g in range(len(ring.generators))
                  if g not in chosen.generators and ring.gen_degrees[g] != 0]
    else:
        invert = args.invert
    loc = localise_algebra(ring, invert, window=window)
    dims = {str(d): loc.algebra.dim(d) for d in range(-window, window + 1) if loc.algebra.dim(d)}
    result = {
        "inverted": invert,
        "collapsed": loc.collapsed,
        "presentation": loc.algebra.to_json(),
        "dims": dims,
    }
    _emit(args, {"cmd": "localize", "ref": args.ref, "invert": invert, "window": window}, result)
    return EXIT_OK


def cmd_local_global(args) -> int:
    window = _default_window(args)
    from .groupcohom import CyclicGroupData, factory, m3_cochain

    target = factory(args.ref, window)
    if not isinstance(target, CyclicGroupData):
        raise SystemExit("local-global expects a cyclic group reference")
    module_data = _load_json(args.module)

    def mu(w):
        return m3_cochain(CyclicGroupData(target.p, target.n, w))

    pres = ModulePresentation.from_json(module_data, algebra=mu(window).algebra)
    table = local_global_check(pres, mu, window)
    result = {
        "ref": args.ref,
        "window": window,
        "global": table["global"].to_json(),
        "primes": [
            {"prime": row["prime"], "maximal": row["maximal"], "verdict": row["verdict"].to_json()}
            for row in table["primes"]
        ],
    }
    _emit(args, {"cmd": "local-global", "ref": args.ref, "module": module_data, "window": window}, result)
    return EXIT_OK


def cmd_gamma(args) -> int:
    window = _default_window(args)
    from .groupcohom import CyclicGroupData, factory, mu_G_tate

    target = factory(args.ref, window)
    if isinstance(target, tuple) and target[0] == "tate":
        data = target[1]
    elif isinstance(target, CyclicGroupData):
        data = target
    else:
        raise SystemExit("gamma expects cyclic:r or tate:cyclic:r")
    request = {"cmd": "gamma", "ref": args.ref, "window": window}
    hit = _cached(args, request)
    if hit is not None:
        _emit(args, request, hit)
        return EXIT_OK
    verdict = mu_G_tate(CyclicGroupData(data.p, data.n, window))
    result = {"ref": args.ref, "window": window,
              "laurent_window": [-window, window], "verdict": verdict.to_json()}
    _emit(args, request, result)
    return EXIT_OK


def cmd_demo(args) -> int:
    from .acceptance import run_all

    results = run_all(jobs=args.jobs)
    all_ok = True
    for r in results:
        status = "PASS" if r["passed"] and r["within_budget"] else "FAIL"
        all_ok &= status == "PASS"
        print(f"[{status}] criterion {r['id']:>2} ({r['elapsed']:6.2f}s <= {r['budget_seconds']:.0f}s): "
              f"{r['description']}")
        print(f"        {r['details']}")
    if args.output:
        Path(args.output).write_text(json.dumps(results, sort_keys=True, indent=1))
    return EXIT_OK if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obstruct",
        description="Exact A-infinity / Hochschild obstruction calculator for graded algebras",
    )
    parser.add_argument("--window", type=int, default=None, help="degree window (default 8 or OBSTRUCT_WINDOW)")
    parser.add_argument("--output", default=None, help="write JSON to this path instead of stdout")
    parser.add_argument("--cache-dir", default=None, help="content-addressed result cache directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("m3", help="secondary multiplication and its class verdict")
    p.add_argument("ref", help="cyclic:r, product:r1,r2,..., or a dg algebra JSON file")
    p.set_defaults(fn=cmd_m3)

    p = sub.add_parser("hochschild-delta", help="apply the Hochschild differential to a cochain file")
    p.add_argument("input", help="JSON with {algebra, cochain}")
    p.set_defaults(fn=cmd_hochschild_delta)

    p = sub.add_parser("cup", help="cup product of two cochains, with the Yoneda cross-check")
    p.add_argument("input", help="JSON with {algebra, zeta, eta}")
    p.set_defaults(fn=cmd_cup)

    p = sub.add_parser("realisable", help="realisability verdict for a finitely presented module")
    p.add_argument("module", help="module presentation JSON file")
    p.add_argument("ref", help="cyclic:r")
    p.set_defaults(fn=cmd_realisable)

    p = sub.add_parser("localize", help="ring of fractions of a cohomology ring")
    p.add_argument("ref", help="cyclic:r or an algebra JSON file")
    p.add_argument("--invert", nargs="+", default=[], help="homogeneous elements to invert")
    p.add_argument("--at-prime", default=None, help="comma-separated prime generators; inverts the complement")
    p.set_defaults(fn=cmd_localize)

    p = sub.add_parser("local-global", help="per-prime realisability table")
    p.add_argument("module", help="module presentation JSON file")
    p.add_argument("ref", help="cyclic:r")
    p.set_defaults(fn=cmd_local_global)

    p = sub.add_parser("gamma", help="Tate-side verdict via the Gamma map")
    p.add_argument("ref", help="tate:cyclic:r or cyclic:r")
    p.set_defaults(fn=cmd_gamma)

    p = sub.add_parser("demo", help="run the full acceptance table")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers for independent cases")
    p.set_defaults(fn=cmd_demo)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except WindowOverflowError as exc:
        print(f"window overflow: {exc}", file=sys.stderr)
        return EXIT_WINDOW
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return EXIT_INVALID
        raise
    except (KeyError, ValueError, FileNotFoundError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
