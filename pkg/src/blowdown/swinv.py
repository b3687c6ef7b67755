"""Seiberg-Witten basic-class maps and their surgery transforms.

An SWMap is the finite support of an integer-valued function on characteristic
classes, carried together with the characteristic numbers of the underlying
series.  The transforms mirror the kernel-level surgeries of .transform but
transport plain integer values instead of formal-sum coefficients: blowup adds
an exceptional direction and splits each class into a pair, the log transform
fans each class into p translates along the refined fiber, and the chain
blowdown keeps exactly the classes meeting the end sphere fully, with values
unchanged (no power-of-two factor on this side).  witten_kernel converts a map
into an exponential-sum kernel, scaled by a power of two fixed by the
characteristic numbers, for exact comparison against the series calculus.
"""

from __future__ import annotations

import warnings
from fractions import Fraction
from math import comb, gcd
from typing import Iterable, Mapping, Optional, Sequence, Union

from .exppoly import ExpKernel, refined_lattice
from .lattice import (
    ChainConfig,
    HClass,
    IntersectionLattice,
    is_characteristic,
    pairing,
)
from .transform import (
    ManifoldSeries,
    _blown_down_lattice,
    _fiber_direction,
    _fresh_names,
    _rebase,
    _refined_name,
    restrict_class,
)

KeyLike = Union[HClass, tuple]


class SWMap:
    """Finite support of a basic-class function, with characteristic numbers.

    values maps exponent coordinate tuples to nonzero integers; every key must
    be characteristic.  b_plus is determined by (euler, signature) through the
    simply connected relation e + sigma = 2 + 2*b_plus and must be odd and at
    least 3.  With the simple-type flag set (the default), every key must sit
    in a zero-dimensional moduli space: sw_dim(key) = 0.
    """

    __slots__ = ("lattice", "values", "euler", "signature", "simple_type")

    def __init__(
        self,
        lattice: IntersectionLattice,
        values: Union[Mapping[KeyLike, int], Iterable[tuple[KeyLike, int]]],
        euler: int,
        signature: int,
        simple_type: bool = True,
    ):
        if (euler + signature - 2) % 2:
            raise ValueError("euler + signature must be even (simply connected model)")
        b = (euler + signature - 2) // 2
        if b < 3 or b % 2 == 0:
            raise ValueError(f"b_plus must be odd and >= 3, got {b}")
        items = values.items() if isinstance(values, Mapping) else values
        acc: dict[tuple[int, ...], int] = {}
        for key, v in items:
            if isinstance(key, HClass):
                if key.lattice != lattice:
                    raise ValueError("lattice mismatch: key does not live in the given lattice")
                key = key.coeffs
            else:
                key = tuple(int(x) for x in key)
                if len(key) != lattice.rank:
                    raise ValueError(f"key {key} does not match lattice rank {lattice.rank}")
            v = Fraction(v)
            if v.denominator != 1:
                raise ValueError(f"value for class {key} must be an integer, got {v}")
            acc[key] = acc.get(key, 0) + int(v)
        clean = {key: v for key, v in acc.items() if v}
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(self, "values", clean)
        object.__setattr__(self, "euler", int(euler))
        object.__setattr__(self, "signature", int(signature))
        object.__setattr__(self, "simple_type", bool(simple_type))
        for key in clean:
            cls = HClass(lattice, key)
            if not is_characteristic(lattice, cls):
                raise ValueError(f"basic class {key} is not characteristic")
            if self.simple_type and sw_dim(self, cls) != 0:
                raise ValueError(
                    f"simple type requires a zero-dimensional moduli space, "
                    f"but class {key} has dimension {sw_dim(self, cls)}"
                )

    def __setattr__(self, name, value):
        raise AttributeError("SWMap is immutable")

    @property
    def b_plus(self) -> int:
        return (self.euler + self.signature - 2) // 2

    def classes(self):
        for key in sorted(self.values):
            yield HClass(self.lattice, key), self.values[key]

    def basic_classes(self) -> list[HClass]:
        return [cls for cls, _ in self.classes()]

    def value(self, cls: KeyLike) -> int:
        key = cls.coeffs if isinstance(cls, HClass) else tuple(cls)
        return self.values.get(key, 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SWMap):
            return NotImplemented
        return (
            self.lattice == other.lattice
            and self.values == other.values
            and self.euler == other.euler
            and self.signature == other.signature
            and self.simple_type == other.simple_type
        )

    def __hash__(self):
        return hash((self.lattice, tuple(sorted(self.values.items())), self.euler, self.signature))

    def __len__(self) -> int:
        return len(self.values)

    def __repr__(self) -> str:
        bits = [f"{k}: {v}" for k, v in sorted(self.values.items())]
        return f"SWMap({{{', '.join(bits)}}}, e={self.euler}, sigma={self.signature})"


def sw_dim(m: SWMap, cls: KeyLike) -> Fraction:
    """Expected moduli dimension (cls^2 - (3*signature + 2*euler)) / 4."""
    if not isinstance(cls, HClass):
        cls = HClass(m.lattice, tuple(int(x) for x in cls))
    if cls.lattice != m.lattice:
        raise ValueError("lattice mismatch: class does not live in the map's lattice")
    if not is_characteristic(m.lattice, cls):
        raise ValueError(f"class {cls.coeffs} is not characteristic")
    return (pairing(cls, cls) - (3 * m.signature + 2 * m.euler)) / 4


def sw_simple_type(m: SWMap) -> bool:
    """True iff every basic class has expected dimension zero."""
    return all(sw_dim(m, cls) == 0 for cls, _ in m.classes())


def sw_en(n: int) -> SWMap:
    """The relatively minimal elliptic map without multiple fibers: values
    (-1)^r C(n-2, r) on (n-2-2r) times the fiber, zero elsewhere."""
    if n < 2:
        raise ValueError("n >= 2 required (b+ >= 3)")
    lat = IntersectionLattice(["f"], [[0]])
    values = {(n - 2 - 2 * r,): (-1) ** r * comb(n - 2, r) for r in range(n - 1)}
    return SWMap(lat, values, 12 * n, -8 * n)


def sw_blowup(
    m: SWMap, k_levels: Sequence[int] = (0,), name: Optional[str] = None
) -> SWMap:
    """One blowup: adds an exceptional square -1 direction e and, for every
    class L and every admissible level k (those with dim(L) - k(k+1) >= 0),
    the classes L +- (2k+1)e with L's value.  Simple type admits only k=0."""
    levels = sorted(set(int(k) for k in k_levels))
    if not levels or levels[0] < 0:
        raise ValueError("blowup levels must be integers >= 0")
    lat = m.lattice
    if name is None:
        name = _fresh_names(lat, "e", 1)[0]
    elif name in lat.basis_names:
        raise ValueError(f"exceptional name {name!r} is already a basis name")
    n = lat.rank
    gram = [[lat.gram[i][j] if i < n and j < n else Fraction(0) for j in range(n + 1)] for i in range(n + 1)]
    gram[n][n] = Fraction(-1)
    new_lat = IntersectionLattice(list(lat.basis_names) + [name], gram)
    values: dict[tuple[int, ...], int] = {}
    for key in sorted(m.values):
        v = m.values[key]
        dim = sw_dim(m, key)
        for k in levels:
            if dim - k * (k + 1) < 0:
                continue
            for sign in (1, -1):
                nk = key + (sign * (2 * k + 1),)
                if nk in values:
                    raise ValueError("blowup target collision: distinct classes map to the same class")
                values[nk] = v
    return SWMap(new_lat, values, m.euler + 1, m.signature - 1, m.simple_type)


def sw_log_transform(
    m: SWMap, s: HClass, p: int, new_name: Optional[str] = None
) -> SWMap:
    """Order-p logarithmic transform along the fiber class s.

    Every basic class must pair to zero with s.  The fiber direction is refined
    so s/p becomes integral and each class L fans into L + j*(s/p) for
    j = p-1, p-3, ..., -(p-1), all carrying L's value.  Distinct classes whose
    fans meet would need their values reconciled; that case raises instead.
    """
    if p < 1:
        raise ValueError("log transform order must be >= 1")
    idx, mult = _fiber_direction(m.lattice, m.basic_classes(), s)
    d = p // gcd(mult, p)
    lat = m.lattice
    if d > 1:
        old = lat.basis_class(lat.basis_names[idx])
        name = new_name if new_name is not None else _refined_name(lat.basis_names[idx], d)
        lat = refined_lattice(lat, old, d, name)
    step = mult * d // p
    values: dict[tuple[int, ...], int] = {}
    for key in sorted(m.values):
        v = m.values[key]
        for j in range(p - 1, -p, -2):
            nk = list(key)
            nk[idx] = nk[idx] * d + j * step
            nk = tuple(nk)
            if nk in values:
                raise ValueError(
                    "log transform target collision: distinct classes map to the same class"
                )
            values[nk] = v
    return SWMap(lat, values, m.euler, m.signature, m.simple_type)


def sw_taut_blowdown(
    m: SWMap, c: ChainConfig, image_names: Optional[Sequence[str]] = None
) -> SWMap:
    """Rational blowdown of a chain configuration tautly embedded with respect
    to every basic class.

    Classes pairing to +-p with the end sphere extend across the blowdown and
    keep their values; their squares gain exactly p-1.  Classes pairing to zero
    drop (their extension would violate the odd-multiplicity constraint on a
    characteristic lift).  Classes with intermediate pairing have no lift at
    all; they are dropped with a warning since no value transfer is available
    for them in either direction.
    """
    if c.ambient != m.lattice:
        raise ValueError("configuration does not live in the map's lattice")
    p = c.p
    end = c.spheres[-1]
    for kappa, _ in m.classes():
        if any(pairing(kappa, u) != 0 for u in c.spheres[:-1]) or abs(pairing(kappa, end)) > p:
            raise ValueError("configuration is not tautly embedded for the basic classes")
    survivors: list[tuple[tuple[Fraction, ...], int]] = []
    for kappa, v in m.classes():
        a = int(pairing(kappa, end))
        if abs(a) == p:
            r = restrict_class(c, kappa)
            if not r.boundary.in_subgroup(p):
                raise ValueError(
                    f"class {kappa.coeffs} meets the end sphere fully but does not extend "
                    f"(boundary {r.boundary.value} mod {p * p})"
                )
            if r.square != pairing(kappa, kappa) + (p - 1):
                raise RuntimeError("extension square does not shift by p-1 on a taut survivor")
            survivors.append((tuple(r.extension.coeffs), v))
        elif a != 0:
            warnings.warn(
                f"dropping class {kappa.coeffs}: pairing {a} with the end sphere admits "
                f"no extension across the blowdown"
            )
    lat, basis = _blown_down_lattice(c, [ext for ext, _ in survivors], image_names)
    values: dict[tuple[int, ...], int] = {}
    for ext, v in survivors:
        img = _rebase(ext, basis, lat)
        if img in values:
            raise ValueError("blowdown target collision: distinct classes map to the same class")
        values[img] = v
    return SWMap(lat, values, m.euler - (p - 1), m.signature + (p - 1), m.simple_type)


def sw_dim_shift(p: int, mult: int) -> Fraction:
    """Moduli-dimension shift (mult^2 - 1)(p - 1)/4 for a class whose extension
    meets the end sphere with odd multiplicity mult; even mult is impossible
    for a characteristic lift and raises."""
    if mult % 2 == 0:
        raise ValueError("end-sphere multiplicity must be odd for a characteristic lift")
    return Fraction((mult * mult - 1) * (p - 1), 4)


def witten_exponent(euler: int, signature: int) -> int:
    """The power of two 2 + (7*euler + 11*signature)/4 relating the two
    calculi; raises when the characteristic numbers make it non-integral."""
    num = 7 * euler + 11 * signature
    if num % 4:
        raise ValueError(
            f"exponent 2 + ({num})/4 is not an integer for e={euler}, sigma={signature}"
        )
    return 2 + num // 4


def witten_kernel(m: SWMap) -> ExpKernel:
    """The exponential-sum kernel 2^c sum_L value(L) e^L predicted to equal
    the series kernel, with c = witten_exponent(euler, signature)."""
    c = witten_exponent(m.euler, m.signature)
    scale = Fraction(2) ** c
    return ExpKernel(m.lattice, {key: scale * v for key, v in m.values.items()})


def witten_check(series: ManifoldSeries, m: SWMap) -> bool:
    """Exact equality of the series kernel with the predicted kernel of the
    basic-class map, support included."""
    if series.lattice != m.lattice:
        raise ValueError("lattice mismatch between the series and the basic-class map")
    if (series.euler, series.signature) != (m.euler, m.signature):
        raise ValueError("characteristic numbers differ between the series and the map")
    predicted = witten_kernel(m)
    return predicted == series.kernel and set(predicted.terms) == set(series.kernel.terms)
