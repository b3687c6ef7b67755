"""Command-line front end.

Verbs: series, sw, witten, dim, verify, blowdown, logt, audit.  Exit codes:
0 success, 1 a verification or comparison failed, 2 usage or spec parse
error, 3 semantic error (well-formed input rejected by the mathematics).
Output is deterministic byte for byte for a given invocation; --format
structured emits the documented JSON encodings instead of text.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional

from .catalog import (
    EllipticSpec,
    LogSpec,
    SpecParseError,
    _elliptic_on,
    _horikawa_ambient,
    _w_ambient,
    adjunction_audit,
    donaldson_closed_form,
    donaldson_pipeline,
    parse_spec,
    render,
    sw_closed_form,
)
from .exppoly import ExpKernel, exact_div, sinh_c
from .lattice import (
    ChainConfig,
    IntersectionLattice,
    RelClass,
    boundary,
    plumbing_inverse,
    plumbing_matrix,
    rel_pairing,
)
from .linalg import identity, mat_eq, mat_mul
from .moduli import CanonicalClass, dim_report, verify_boundary_value_lemmas
from .reporting import CheckReport
from .serialize import (
    blowdown_to_obj,
    fraction_str,
    lattice_to_obj,
    series_to_obj,
    swmap_to_obj,
)
from .swinv import witten_check, witten_exponent
from .transform import (
    ManifoldSeries,
    formal_log_coefficients,
    log_transform,
    nodal_log_pipeline,
    taut_blowdown,
    verify_nodal_matrix_identity,
)

# ---------------------------------------------------------------------------
# Text rendering


def _class_text(lattice: IntersectionLattice, coeffs) -> str:
    bits = []
    for name, c in zip(lattice.basis_names, coeffs):
        if not c:
            continue
        mag = name if abs(c) == 1 else f"{abs(c)}*{name}"
        bits.append(("-" if c < 0 else "+", mag))
    if not bits:
        return "0"
    sign, mag = bits[0]
    out = ("-" if sign == "-" else "") + mag
    for sign, mag in bits[1:]:
        out += sign + mag
    return out


def _compact_kernel(k: ExpKernel) -> Optional[str]:
    terms = k.sorted_terms()
    if len(terms) == 1 and not any(terms[0][0]):
        return fraction_str(terms[0][1])
    if len(terms) != 2:
        return None
    (neg_key, neg_c), (pos_key, pos_c) = terms
    if tuple(-x for x in pos_key) != neg_key:
        return None
    if neg_c == pos_c:
        scale, fn = 2 * pos_c, "cosh"
    elif neg_c == -pos_c:
        scale, fn = 2 * pos_c, "sinh"
    else:
        return None
    arg = _class_text(k.lattice, pos_key)
    lead = "" if scale == 1 else f"{fraction_str(scale)}*"
    return f"{lead}{fn}({arg})"


def _print_series(m: ManifoldSeries) -> None:
    print(f"basis: {' '.join(m.lattice.basis_names)}")
    print(f"gram: {json.dumps(lattice_to_obj(m.lattice)['gram'])}")
    compact = _compact_kernel(m.kernel)
    if compact is not None:
        print(f"kernel: {compact}")
    else:
        terms = m.kernel.sorted_terms()
        print(f"kernel ({len(terms)} terms):")
        for key, c in terms:
            print(f"  {fraction_str(c)} * e^({_class_text(m.lattice, key)})")
    print(f"e: {m.euler}  sigma: {m.signature}  b_plus: {m.b_plus}")


def _emit(args, obj: dict, text) -> None:
    if args.format == "structured":
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        text()


# ---------------------------------------------------------------------------
# Commands


def cmd_series(args) -> int:
    spec = parse_spec(args.spec)
    build = donaldson_pipeline if args.route == "pipeline" else donaldson_closed_form
    m = build(spec)
    obj = {"spec": render(spec), "route": args.route, **series_to_obj(m)}

    def text():
        print(f"spec: {render(spec)}")
        print(f"route: {args.route}")
        _print_series(m)

    _emit(args, obj, text)
    return 0


def cmd_sw(args) -> int:
    spec = parse_spec(args.spec)
    m = sw_closed_form(spec)
    obj = {"spec": render(spec), **swmap_to_obj(m)}

    def text():
        print(f"spec: {render(spec)}")
        print(f"basis: {' '.join(m.lattice.basis_names)}")
        print(f"gram: {json.dumps(lattice_to_obj(m.lattice)['gram'])}")
        print(f"classes ({len(m.values)}):")
        for key in sorted(m.values):
            print(f"  {_class_text(m.lattice, key)}: {m.values[key]}")
        print(f"e: {m.euler}  sigma: {m.signature}  b_plus: {m.b_plus}")

    _emit(args, obj, text)
    return 0


def cmd_witten(args) -> int:
    spec = parse_spec(args.spec)
    series = donaldson_closed_form(spec)
    swmap = sw_closed_form(spec)
    ok = witten_check(series, swmap)
    c = witten_exponent(swmap.euler, swmap.signature)
    obj = {
        "spec": render(spec),
        "pass": ok,
        "exponent": c,
        "series": series_to_obj(series),
        "sw": swmap_to_obj(swmap),
    }

    def text():
        tag = "PASS" if ok else "FAIL"
        print(f"{tag} witten {render(spec)} (exponent {c})")

    _emit(args, obj, text)
    return 0 if ok else 1


def cmd_dim(args) -> int:
    p = args.p
    if args.canonical is not None:
        t, b = args.canonical
        e = CanonicalClass(p, t, b).rel_class()
    else:
        e = RelClass(p, tuple(args.delta))
    rep = dim_report(e)
    obj = {
        "p": p,
        "delta": list(e.delta_coords()),
        "e_square": fraction_str(rep.e_square),
        "boundary": rep.boundary.value,
        "modulus": rep.boundary.modulus,
        "reduced_boundary": rep.reduced_boundary,
        "dim": rep.dim,
    }

    def text():
        print(f"p: {p}")
        print(f"delta: {tuple(e.delta_coords())}")
        print(f"e_square: {fraction_str(rep.e_square)}")
        print(f"boundary: {rep.boundary.value} (mod {rep.boundary.modulus})")
        print(f"reduced_boundary: {rep.reduced_boundary}")
        print(f"dim: {rep.dim}")

    _emit(args, obj, text)
    return 0


# ---------------------------------------------------------------------------
# Verification suites


def _suite_lattice(p_max: int) -> list[CheckReport]:
    out = []
    for p in range(2, p_max + 1):
        pm = [[Fraction(x) for x in row] for row in plumbing_matrix(p)]
        out.append(
            CheckReport(
                "plumbing-inverse", mat_eq(mat_mul(pm, plumbing_inverse(p)), identity(p - 1)), p=p
            )
        )
        diag = Fraction(-(p * p - p - 1), p * p)
        off = Fraction(p + 1, p * p)
        bad = []
        units = [
            RelClass(p, tuple(1 if k == i else 0 for k in range(p - 1)))
            for i in range(p - 1)
        ]
        for i in range(p - 1):
            for j in range(p - 1):
                want = diag if i == j else off
                if rel_pairing(units[i], units[j]) != want:
                    bad.append([i + 1, j + 1])
        out.append(CheckReport("relative-pairing", not bad, p=p, counterexamples=bad))
        gok = True
        for j in range(1, p):
            gj = RelClass(
                p, tuple(1 if k == j - 1 else 0 for k in range(p - 1)), basis="gamma"
            )
            if boundary(gj).value != j % (p * p):
                gok = False
            if RelClass(p, gj.delta_coords()).gamma_coords() != gj.gamma_coords():
                gok = False
        out.append(CheckReport("boundary-gamma", gok, p=p))
    return out


def _suite_lemmas(p_max: int, t_max: int, box: int) -> list[CheckReport]:
    out = []
    for p in range(2, p_max + 1):
        out.extend(verify_boundary_value_lemmas(p, t_max=t_max, box=box))
    return out


def _e2_series() -> ManifoldSeries:
    lat = IntersectionLattice(["f"], [[0]])
    return ManifoldSeries(ExpKernel(lat, {(0,): Fraction(1)}), 24, -16)


def _suite_identities(p_max: int) -> list[CheckReport]:
    out = []
    for p in range(2, p_max + 1):
        out.append(CheckReport("nodal-matrix", verify_nodal_matrix_identity(p), p=p))
        ladder = formal_log_coefficients(p)
        ok = (
            [e for e, _ in ladder] == list(range(p - 1, -p, -2))
            and all(c == 1 for _, c in ladder)
            and sum(c for _, c in ladder) == p
        )
        out.append(CheckReport("ladder-coefficients", ok, p=p))
    e2 = _e2_series()
    f = e2.lattice.basis_class("f")
    for p in range(2, min(p_max, 7) + 1):
        same = nodal_log_pipeline(e2, f, p).kernel == log_transform(e2, f, p).kernel
        out.append(CheckReport("log-pipeline-match", same, p=p))
    for p in range(2, min(p_max, 7) + 1):
        for q in range(p + 1, min(p_max, 7) + 1):
            if Fraction(p, q).denominator != q:
                continue
            closed = donaldson_closed_form(EllipticSpec(2, ((p, q),)))
            u = closed.lattice.basis_class(closed.lattice.basis_names[0])
            lp = exact_div(sinh_c(u * (p * q)), sinh_c(u * q))
            lq = exact_div(sinh_c(u * (p * q)), sinh_c(u * p))
            out.append(
                CheckReport(
                    "ponq-multiplicativity",
                    closed.kernel == lp * lq,
                    p=p,
                    parameters={"q": q},
                )
            )
    for p in (3, 5, 7):
        two_first = log_transform(e2, f, 2)
        route_a = log_transform(two_first, two_first.lattice.basis_class("f_2"), p)
        p_first = log_transform(e2, f, p)
        route_b = log_transform(p_first, p_first.lattice.basis_class(f"f_{p}"), 2)
        closed = donaldson_closed_form(EllipticSpec(2, ((2 * p, 1),)))
        odd_ladder = {
            (j,): Fraction(1) for j in range(-(2 * p - 1), 2 * p, 2)
        }
        ok = (
            route_a == route_b
            and route_a.kernel == closed.kernel
            and route_a.kernel.terms == odd_ladder
        )
        out.append(CheckReport("double-expansion", ok, p=p))
    return out


def _witten_specs() -> list[str]:
    specs = [f"E({n})" for n in range(2, 7)]
    for n in range(2, 6):
        specs += [f"E({n};{pq})" for pq in ("2", "3", "2,3", "2,5", "3,4", "3,5")]
    specs += [f"W({n})" for n in range(1, 9)]
    specs += [f"Y({n})" for n in range(4, 9)]
    specs += [f"H({n})" for n in range(4, 9)]
    return specs


def _suite_witten() -> list[CheckReport]:
    import warnings

    out = []
    for s in _witten_specs():
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ok = witten_check(donaldson_closed_form(s), sw_closed_form(s))
        out.append(CheckReport("witten", ok, parameters={"spec": s}))
    return out


_SUITES = ("lattice", "lemmas", "identities", "witten", "all")


def cmd_verify(args) -> int:
    reports: list[CheckReport] = []
    suite = args.suite
    if suite in ("lattice", "all"):
        reports += _suite_lattice(args.p_max if args.p_max is not None else 12)
    if suite in ("lemmas", "all"):
        reports += _suite_lemmas(
            args.p_max if args.p_max is not None else 6, args.t_max, args.box
        )
    if suite in ("identities", "all"):
        reports += _suite_identities(args.p_max if args.p_max is not None else 7)
    if suite in ("witten", "all"):
        reports += _suite_witten()
    passed = all(r.passed for r in reports)
    obj = {
        "suite": suite,
        "checks": [r.to_obj() for r in reports],
        "pass": passed,
    }

    def text():
        for r in reports:
            print(r.line())
        print(f"{sum(1 for r in reports if r.passed)}/{len(reports)} checks passed")

    _emit(args, obj, text)
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# Blowdown walkthroughs


def _run_blowdown_steps(series, configs):
    steps = []
    m = series
    for cfg, image in configs:
        pre = m.lattice
        spheres = [pre.basis_class(nm) for nm in cfg[1]]
        result = taut_blowdown(m, ChainConfig(cfg[0], pre, spheres), image_names=image)
        steps.append((cfg, pre, result))
        m = result.series
    return steps, m


def cmd_blowdown(args) -> int:
    spec = parse_spec(args.spec)
    if args.sections is not None:
        if spec != EllipticSpec(4):
            raise ValueError("--sections requires the spec E(4): the disjoint square -4 sections live there")
        n = args.sections
        if not 1 <= n <= 8:
            raise ValueError("section count must be between 1 and 8 (simple connectivity bound)")
        series = _elliptic_on(_w_ambient(n), 4)
        configs = [((2, [f"s{i}"]), ["k"]) for i in range(1, n + 1)]
    else:
        steps_wanted = args.horikawa
        if not isinstance(spec, EllipticSpec) or spec.pairs:
            raise ValueError("--horikawa requires a plain E(n) spec")
        n = spec.n
        if n < 4:
            raise ValueError("Horikawa-type blowdowns need n >= 4 (chain order n-2 >= 2)")
        p = n - 2
        series = _elliptic_on(_horikawa_ambient(n), n)
        a = [f"a{i}" for i in range(1, p - 1)]
        b = [f"b{i}" for i in range(1, p - 1)]
        configs = [((p, a + ["s"]), ["lam"])]
        if steps_wanted == 2:
            configs.append(((p, b + ["t"]), ["k"]))
    steps, final = _run_blowdown_steps(series, configs)
    obj = {
        "spec": render(spec),
        "steps": [
            {
                "order": cfg[0],
                "chain": cfg[1],
                "basis": list(pre.basis_names),
                **blowdown_to_obj(result),
            }
            for cfg, pre, result in steps
        ],
        "series": series_to_obj(final),
    }

    def text():
        print(f"spec: {render(spec)}")
        for i, (cfg, pre, result) in enumerate(steps, start=1):
            order, chain = cfg
            print(f"step {i}: blow down order-{order} chain ending at {chain[-1]}")
            post = result.series.lattice
            for rec in result.class_map:
                src = _class_text(pre, rec.source)
                if rec.status == "kept":
                    img = _class_text(post, rec.image)
                    print(
                        f"  {src}: kept (boundary {rec.residue} mod {order * order}) -> {img}"
                    )
                else:
                    print(f"  {src}: dropped (boundary {rec.residue} mod {order * order})")
        _print_series(final)

    _emit(args, obj, text)
    return 0


def cmd_logt(args) -> int:
    spec = LogSpec(parse_spec(args.spec), args.p)
    m = donaldson_closed_form(spec)
    obj = {"spec": render(spec), "route": "closed", **series_to_obj(m)}

    def text():
        print(f"spec: {render(spec)}")
        print("route: closed")
        _print_series(m)

    _emit(args, obj, text)
    return 0


def cmd_audit(args) -> int:
    spec = parse_spec(args.spec)
    reports = adjunction_audit(spec)
    passed = all(r.passed for r in reports)
    obj = {
        "spec": render(spec),
        "checks": [r.to_obj() for r in reports],
        "pass": passed,
    }

    def text():
        for r in reports:
            print(r.line())

    _emit(args, obj, text)
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# Argument plumbing


def _canonical_pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected t,b")
    return int(parts[0]), int(parts[1])


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected a comma-separated integer list") from exc


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="blowdown",
        description="Exact series kernels, basic-class maps, and chain-blowdown checks.",
    )
    sub = top.add_subparsers(dest="verb", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")

    p = sub.add_parser("series", parents=[common], help="series kernel of a catalog spec")
    p.add_argument("spec")
    p.add_argument("--route", choices=("closed", "pipeline"), default="closed")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("sw", parents=[common], help="basic-class map of a covered spec")
    p.add_argument("spec")
    p.set_defaults(func=cmd_sw)

    p = sub.add_parser("witten", parents=[common], help="compare the two calculi on a spec")
    p.add_argument("spec")
    p.set_defaults(func=cmd_witten)

    p = sub.add_parser("dim", parents=[common], help="moduli dimension of a relative class")
    p.add_argument("--p", type=int, required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--canonical", type=_canonical_pair, metavar="T,B")
    group.add_argument("--delta", type=_int_list, metavar="C1,C2,...")
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=_SUITES)
    p.add_argument("--p-max", dest="p_max", type=int, default=None)
    p.add_argument("--box", type=int, default=4)
    p.add_argument("--t-max", dest="t_max", type=int, default=2)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser(
        "blowdown", parents=[common], help="replay chain blowdowns with their class maps"
    )
    p.add_argument("spec")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--sections", type=int, metavar="N")
    group.add_argument("--horikawa", type=int, choices=(1, 2))
    p.set_defaults(func=cmd_blowdown)

    p = sub.add_parser("logt", parents=[common], help="log transform of a catalog spec")
    p.add_argument("spec")
    p.add_argument("p", type=int)
    p.set_defaults(func=cmd_logt)

    p = sub.add_parser("audit", parents=[common], help="characteristic-number audit")
    p.add_argument("spec")
    p.set_defaults(func=cmd_audit)
    return top


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        return 0 if code == 0 else 2
    try:
        return args.func(args)
    except SpecParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
