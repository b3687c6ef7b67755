"""Named-family catalog with dual construction routes.

Each catalog entry is a symbolic spec (elliptic surfaces with multiple fibers,
the octic-double-plane family H, its bisecting cousins Y, the section-blowdown
family W, plus blowup / log-transform / homology-ball-sum combinators).  For
every spec the series kernel is available two independent ways: a closed form
assembled by exact division of hyperbolic-sine ladders, and a pipeline that
replays the surgeries through the transform module.  Their exact agreement is
the main cross-check this package exists to run.  Basic-class maps follow the
same split where the transfer theorems cover the family.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Optional, Union

from .exppoly import ExpKernel, cosh_c, exact_div, one, sinh_c
from .lattice import ChainConfig, HClass, IntersectionLattice, pairing
from .reporting import CheckReport
from .swinv import SWMap, sw_blowup, sw_en, sw_log_transform, sw_taut_blowdown
from .transform import (
    ManifoldSeries,
    blowup,
    connected_sum_hp,
    log_transform,
    taut_blowdown,
)


# ---------------------------------------------------------------------------
# Spec expression tree


@dataclass(frozen=True)
class EllipticSpec:
    """E(n) with zero, one, or three (p, q) pairs of fiber multiplicities."""

    n: int
    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n >= 2 required (b+ >= 3)")
        if len(self.pairs) not in (0, 1, 3):
            raise ValueError("elliptic spec takes zero, one, or three multiplicity pairs")
        for p, q in self.pairs:
            if p < 1 or q < 1:
                raise ValueError("fiber multiplicities must be >= 1")
            if gcd(p, q) != 1:
                raise ValueError(f"fiber multiplicities {p} and {q} must be coprime")


@dataclass(frozen=True)
class WSpec:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("W(n) needs n >= 1")
        if self.n > 8:
            raise ValueError(
                f"W({self.n}) rejected: simple connectivity is only guaranteed for n <= 8"
            )


@dataclass(frozen=True)
class YSpec:
    n: int

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("Y(n) needs n >= 4 (chain order n-2 >= 2)")


@dataclass(frozen=True)
class HSpec:
    n: int

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("H(n) needs n >= 4 (chain order n-2 >= 2)")


@dataclass(frozen=True)
class BlowupSpec:
    base: "ManifoldSpec"
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("blowup count must be >= 1")


@dataclass(frozen=True)
class LogSpec:
    base: "ManifoldSpec"
    p: int

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("log transform order must be >= 1")


@dataclass(frozen=True)
class HpSumSpec:
    base: "ManifoldSpec"
    p: int

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("homology-ball sum order must be >= 1")


ManifoldSpec = Union[EllipticSpec, WSpec, YSpec, HSpec, BlowupSpec, LogSpec, HpSumSpec]


def render(spec: ManifoldSpec) -> str:
    """Canonical source form of a spec tree (parse(render(s)) == s)."""
    if isinstance(spec, EllipticSpec):
        bits = []
        for p, q in spec.pairs:
            bits.append(f";{p}" if q == 1 and len(spec.pairs) == 1 else f";{p},{q}")
        return f"E({spec.n}{''.join(bits)})"
    if isinstance(spec, WSpec):
        return f"W({spec.n})"
    if isinstance(spec, YSpec):
        return f"Y({spec.n})"
    if isinstance(spec, HSpec):
        return f"H({spec.n})"
    if isinstance(spec, BlowupSpec):
        return f"blowup({render(spec.base)},{spec.k})"
    if isinstance(spec, LogSpec):
        return f"logt({render(spec.base)},{spec.p})"
    if isinstance(spec, HpSumSpec):
        return f"hpsum({render(spec.base)},{spec.p})"
    raise TypeError(f"not a manifold spec: {spec!r}")


# ---------------------------------------------------------------------------
# Parsing


class SpecParseError(ValueError):
    """Malformed spec text; .pos is the character offset of the problem."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


_TOKEN = re.compile(r"\s*(\d+|[A-Za-z]+|[();,])")


def _tokenize(text: str) -> list[tuple[str, int]]:
    out = []
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:
            if not text[i:].strip():
                break
            bad = text[i:].lstrip()
            raise SpecParseError(f"unexpected character {bad[0]!r}", len(text) - len(bad))
        out.append((m.group(1), m.start(1)))
        i = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def _pos(self) -> int:
        return self.toks[self.i][1] if self.i < len(self.toks) else len(self.text)

    def peek(self) -> Optional[str]:
        return self.toks[self.i][0] if self.i < len(self.toks) else None

    def take(self, expected: Optional[str] = None) -> str:
        if self.i >= len(self.toks):
            want = f", expected {expected!r}" if expected else ""
            raise SpecParseError(f"unexpected end of spec{want}", len(self.text))
        tok, pos = self.toks[self.i]
        if expected is not None and tok != expected:
            raise SpecParseError(f"expected {expected!r}, found {tok!r}", pos)
        self.i += 1
        return tok

    def integer(self) -> int:
        pos = self._pos()
        tok = self.take()
        if not tok.isdigit():
            raise SpecParseError(f"expected an integer, found {tok!r}", pos)
        return int(tok)

    def spec(self) -> ManifoldSpec:
        pos = self._pos()
        head = self.take()
        if head == "E":
            self.take("(")
            n = self.integer()
            groups: list[list[int]] = []
            while self.peek() == ";":
                self.take(";")
                group = [self.integer()]
                if self.peek() == ",":
                    self.take(",")
                    group.append(self.integer())
                groups.append(group)
            self.take(")")
            if not groups:
                return EllipticSpec(n)
            if len(groups) == 1:
                p = groups[0][0]
                q = groups[0][1] if len(groups[0]) == 2 else 1
                return EllipticSpec(n, ((p, q),))
            if len(groups) == 3 and all(len(g) == 2 for g in groups):
                return EllipticSpec(n, tuple((g[0], g[1]) for g in groups))
            raise SpecParseError(
                "elliptic spec takes E(n), E(n;p), E(n;p,q), or E(n;p1,q1;p2,q2;p3,q3)", pos
            )
        if head in ("W", "Y", "H"):
            self.take("(")
            n = self.integer()
            self.take(")")
            return {"W": WSpec, "Y": YSpec, "H": HSpec}[head](n)
        if head in ("blowup", "logt", "hpsum"):
            self.take("(")
            base = self.spec()
            self.take(",")
            arg = self.integer()
            self.take(")")
            node = {"blowup": BlowupSpec, "logt": LogSpec, "hpsum": HpSumSpec}[head]
            return node(base, arg)
        raise SpecParseError(f"unknown spec name {head!r}", pos)


def parse_spec(text: str) -> ManifoldSpec:
    parser = _Parser(text)
    if parser.peek() is None:
        raise SpecParseError("empty spec", 0)
    spec = parser.spec()
    if parser.peek() is not None:
        raise SpecParseError(f"trailing input {parser.peek()!r}", parser._pos())
    return spec


def _as_spec(spec: Union[str, ManifoldSpec]) -> ManifoldSpec:
    return parse_spec(spec) if isinstance(spec, str) else spec


# ---------------------------------------------------------------------------
# Shared builders


def _kernel_pow(k: ExpKernel, n: int) -> ExpKernel:
    out = one(k.lattice)
    for _ in range(n):
        out = out * k
    return out


def _elliptic_on(lat: IntersectionLattice, n: int) -> ManifoldSeries:
    """The fiber-power series sinh^{n-2}(f) placed on a lattice whose first
    basis direction is the fiber f."""
    f = lat.basis_class(lat.basis_names[0])
    return ManifoldSeries(_kernel_pow(sinh_c(f), n - 2), 12 * n, -8 * n)


def _w_ambient(n: int) -> IntersectionLattice:
    """Fiber direction plus n pairwise-disjoint square -4 section directions."""
    names = ["f"] + [f"s{i}" for i in range(1, n + 1)]
    rank = n + 1
    gram = [[Fraction(0)] * rank for _ in range(rank)]
    for i in range(1, rank):
        gram[0][i] = gram[i][0] = Fraction(1)
        gram[i][i] = Fraction(-4)
    return IntersectionLattice(names, gram)


def _horikawa_ambient(n: int) -> IntersectionLattice:
    """Fiber direction plus two disjoint blowdown chains of order n-2.

    Each chain consists of n-4 interior square -2 directions and one section
    of square -n meeting the fiber once; the two chains are orthogonal to
    each other.
    """
    p = n - 2
    a = [f"a{i}" for i in range(1, p - 1)]
    b = [f"b{i}" for i in range(1, p - 1)]
    names = ["f"] + a + ["s"] + b + ["t"]
    rank = len(names)
    idx = {nm: k for k, nm in enumerate(names)}
    gram = [[Fraction(0)] * rank for _ in range(rank)]

    def put(x, y, v):
        gram[idx[x]][idx[y]] = gram[idx[y]][idx[x]] = Fraction(v)

    for chain, end in ((a, "s"), (b, "t")):
        for k, nm in enumerate(chain):
            put(nm, nm, -2)
            if k + 1 < len(chain):
                put(nm, chain[k + 1], 1)
        if chain:
            put(chain[-1], end, 1)
        put(end, end, -n)
        put("f", end, 1)
    return IntersectionLattice(names, gram)


def _horikawa_chain(lat: IntersectionLattice, interior: list[str], end: str) -> list[HClass]:
    return [lat.basis_class(nm) for nm in interior + [end]]


def _y_lattice(n: int) -> IntersectionLattice:
    """Carrier after blowing down one of the two chains: the image class lam
    of square n-3 meeting the remaining section t in n-2, next to the intact
    second chain."""
    p = n - 2
    b = [f"b{i}" for i in range(1, p - 1)]
    names = ["lam"] + b + ["t"]
    rank = len(names)
    idx = {nm: k for k, nm in enumerate(names)}
    gram = [[Fraction(0)] * rank for _ in range(rank)]

    def put(x, y, v):
        gram[idx[x]][idx[y]] = gram[idx[y]][idx[x]] = Fraction(v)

    put("lam", "lam", n - 3)
    put("lam", "t", n - 2)
    for k, nm in enumerate(b):
        put(nm, nm, -2)
        if k + 1 < len(b):
            put(nm, b[k + 1], 1)
    if b:
        put(b[-1], "t", 1)
    put("t", "t", -n)
    return IntersectionLattice(names, gram)


# ---------------------------------------------------------------------------
# Donaldson series, closed form and pipeline


def _apply_log(
    m: ManifoldSeries, fiber: Optional[tuple[int, int]], p: int
) -> tuple[ManifoldSeries, tuple[int, int]]:
    if fiber is None:
        raise ValueError("spec has no fiber class to log-transform along")
    idx, mult = fiber
    s = HClass(m.lattice, tuple(mult if i == idx else 0 for i in range(m.lattice.rank)))
    out = log_transform(m, s, p)
    return out, (idx, mult * (p // gcd(mult, p)))


def _eval_series(
    spec: ManifoldSpec, route: str
) -> tuple[ManifoldSeries, Optional[tuple[int, int]]]:
    """Evaluate a spec to (series, fiber direction).  fiber is (index, mult)
    with fiber class = mult * basis[index], or None once no fiber survives."""
    if isinstance(spec, EllipticSpec):
        orders = [o for pair in spec.pairs for o in pair]
        if route == "closed":
            n_total = lcm(*orders) if orders else 1
            name = "f" if n_total == 1 else f"f_{n_total}"
            lat = IntersectionLattice([name], [[0]])
            u = lat.basis_class(name)
            num = _kernel_pow(sinh_c(u * n_total), spec.n - 2 + len(orders))
            den = one(lat)
            for o in orders:
                den = den * sinh_c(u * (n_total // o))
            kernel = exact_div(num, den)
            return ManifoldSeries(kernel, 12 * spec.n, -8 * spec.n), (0, n_total)
        m = _elliptic_on(IntersectionLattice(["f"], [[0]]), spec.n)
        fiber = (0, 1)
        for o in orders:
            m, fiber = _apply_log(m, fiber, o)
        return m, fiber
    if isinstance(spec, WSpec):
        n = spec.n
        if route == "closed":
            lat = IntersectionLattice(["k"], [[n]])
            kernel = cosh_c(lat.basis_class("k")).scale(Fraction(2) ** (n - 1))
            return ManifoldSeries(kernel, 48 - n, -32 + n), None
        m = _elliptic_on(_w_ambient(n), 4)
        for i in range(1, n + 1):
            cfg = ChainConfig(2, m.lattice, [m.lattice.basis_class(f"s{i}")])
            m = taut_blowdown(m, cfg, image_names=["k"]).series
        return m, None
    if isinstance(spec, (YSpec, HSpec)):
        n = spec.n
        steps = 1 if isinstance(spec, YSpec) else 2
        if route == "closed":
            wave = cosh_c if n % 2 == 0 else sinh_c
            if steps == 1:
                lat = _y_lattice(n)
                kernel = wave(lat.basis_class("lam"))
                return ManifoldSeries(kernel, 11 * n + 3, -7 * n - 3), None
            lat = IntersectionLattice(["k"], [[2 * n - 6]])
            kernel = wave(lat.basis_class("k")).scale(Fraction(2) ** (n - 3))
            return ManifoldSeries(kernel, 10 * n + 6, -6 * n - 6), None
        p = n - 2
        lat = _horikawa_ambient(n)
        m = _elliptic_on(lat, n)
        a = [f"a{i}" for i in range(1, p - 1)]
        cfg = ChainConfig(p, m.lattice, _horikawa_chain(m.lattice, a, "s"))
        m = taut_blowdown(m, cfg, image_names=["lam"]).series
        if steps == 2:
            b = [f"b{i}" for i in range(1, p - 1)]
            cfg = ChainConfig(p, m.lattice, _horikawa_chain(m.lattice, b, "t"))
            m = taut_blowdown(m, cfg, image_names=["k"]).series
        return m, None
    if isinstance(spec, BlowupSpec):
        m, fiber = _eval_series(spec.base, route)
        return blowup(m, spec.k), fiber
    if isinstance(spec, LogSpec):
        m, fiber = _eval_series(spec.base, route)
        return _apply_log(m, fiber, spec.p)
    if isinstance(spec, HpSumSpec):
        m, fiber = _eval_series(spec.base, route)
        return connected_sum_hp(m, spec.p), fiber
    raise TypeError(f"not a manifold spec: {spec!r}")


def donaldson_closed_form(spec: Union[str, ManifoldSpec]) -> ManifoldSeries:
    """Series from the printed closed forms: exact division of sinh ladders
    for the elliptic family, explicit sinh/cosh forms for W, Y, and H."""
    return _eval_series(_as_spec(spec), "closed")[0]


def donaldson_pipeline(spec: Union[str, ManifoldSpec]) -> ManifoldSeries:
    """Series rebuilt through the surgery pipeline: fiber powers seeded on the
    ambient model, then log transforms and chain blowdowns step by step."""
    return _eval_series(_as_spec(spec), "pipeline")[0]


# ---------------------------------------------------------------------------
# Basic-class maps


def _sw_eval(spec: ManifoldSpec) -> tuple[SWMap, Optional[tuple[int, int]]]:
    if isinstance(spec, EllipticSpec):
        if len(spec.pairs) == 3:
            raise ValueError(
                f"{render(spec)} is outside the basic-class covered family "
                f"(three-pair transforms collide)"
            )
        m = sw_en(spec.n)
        fiber = (0, 1)
        for pair in spec.pairs:
            for o in pair:
                idx, mult = fiber
                s = HClass(m.lattice, tuple(mult if i == idx else 0 for i in range(m.lattice.rank)))
                m = sw_log_transform(m, s, o)
                fiber = (idx, mult * (o // gcd(mult, o)))
        return m, fiber
    if isinstance(spec, WSpec):
        n = spec.n
        lat = _w_ambient(n)
        pad = (0,) * n
        values = {(c,) + pad: v for (c,), v in sw_en(4).values.items()}
        m = SWMap(lat, values, 48, -32)
        for i in range(1, n + 1):
            cfg = ChainConfig(2, m.lattice, [m.lattice.basis_class(f"s{i}")])
            m = sw_taut_blowdown(m, cfg, image_names=["k"])
        return m, None
    if isinstance(spec, (YSpec, HSpec)):
        n = spec.n
        p = n - 2
        lat = _horikawa_ambient(n)
        pad = (0,) * (lat.rank - 1)
        values = {(c,) + pad: v for (c,), v in sw_en(n).values.items()}
        m = SWMap(lat, values, 12 * n, -8 * n)
        a = [f"a{i}" for i in range(1, p - 1)]
        cfg = ChainConfig(p, m.lattice, _horikawa_chain(m.lattice, a, "s"))
        m = sw_taut_blowdown(m, cfg, image_names=["lam"])
        if isinstance(spec, HSpec):
            b = [f"b{i}" for i in range(1, p - 1)]
            cfg = ChainConfig(p, m.lattice, _horikawa_chain(m.lattice, b, "t"))
            m = sw_taut_blowdown(m, cfg, image_names=["k"])
        return m, None
    if isinstance(spec, BlowupSpec):
        m, fiber = _sw_eval(spec.base)
        for _ in range(spec.k):
            m = sw_blowup(m)
        return m, fiber
    if isinstance(spec, LogSpec):
        m, fiber = _sw_eval(spec.base)
        if fiber is None:
            raise ValueError("spec has no fiber class to log-transform along")
        idx, mult = fiber
        s = HClass(m.lattice, tuple(mult if i == idx else 0 for i in range(m.lattice.rank)))
        m = sw_log_transform(m, s, spec.p)
        return m, (idx, mult * (spec.p // gcd(mult, spec.p)))
    if isinstance(spec, HpSumSpec):
        raise ValueError(
            f"{render(spec)} is outside the basic-class covered family "
            f"(no value-transfer rule for homology-ball sums)"
        )
    raise TypeError(f"not a manifold spec: {spec!r}")


def sw_closed_form(spec: Union[str, ManifoldSpec]) -> SWMap:
    """Basic-class map for specs inside the covered family: the elliptic map
    transported through blowups, log transforms, and chain blowdowns."""
    return _sw_eval(_as_spec(spec))[0]


def sw_covered(spec: Union[str, ManifoldSpec]) -> bool:
    """True when sw_closed_form is defined for the spec."""
    node = _as_spec(spec)
    if isinstance(node, EllipticSpec):
        return len(node.pairs) != 3
    if isinstance(node, (WSpec, YSpec, HSpec)):
        return True
    if isinstance(node, (BlowupSpec, LogSpec)):
        return sw_covered(node.base)
    return False


# ---------------------------------------------------------------------------
# Audit


def adjunction_audit(spec: Union[str, ManifoldSpec]) -> list[CheckReport]:
    """Characteristic-number consistency for a spec: every basic class must
    have square 3*signature + 2*euler (zero-dimensional moduli), the elliptic
    family must sit at canonical square zero, and the H and Y families must
    land on their Noether / bisecting lines."""
    node = _as_spec(spec)
    series = donaldson_closed_form(node)
    target = 3 * series.signature + 2 * series.euler
    bad = [list(k.coeffs) for k in series.basic_classes() if pairing(k, k) != target]
    params = {"spec": render(node), "expected_square": target}
    reports = [
        CheckReport("basic-class-square", not bad, parameters=params, counterexamples=bad)
    ]
    c2 = series.euler
    if isinstance(node, EllipticSpec):
        reports.append(
            CheckReport(
                "elliptic-canonical-square-zero",
                target == 0,
                parameters={"spec": render(node), "c1_sq": target},
            )
        )
    if isinstance(node, HSpec):
        reports.append(
            CheckReport(
                "noether-line",
                5 * target - c2 + 36 == 0,
                parameters={"spec": render(node), "c1_sq": target, "c2": c2},
            )
        )
    if isinstance(node, YSpec):
        reports.append(
            CheckReport(
                "bisecting-line",
                11 * target - c2 + 36 == 0,
                parameters={"spec": render(node), "c1_sq": target, "c2": c2},
            )
        )
    return reports
