"""Surgery transforms on series kernels.

Implements the kernel-level effect of the standard cut-and-paste operations:
blowup (connected sum with a reversed projective plane), rational blowdown of a
taut chain configuration, the twist route for the length-one (p=2) blowdown,
logarithmic transform along a square-zero fiber direction, and the two model
blowdowns built from a nodal fiber (the log-transform pipeline and the
homology-ball connected sum).  Characteristic-number bookkeeping rides along:
blowup (e+1, sigma-1), chain blowdown (e-(p-1), sigma+(p-1)), log transform
neutral.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from .exppoly import ExpKernel, exact_div, refine_lattice, sinh_c, twist, zero
from .lattice import (
    ChainConfig,
    HClass,
    IntersectionLattice,
    QClass,
    RelClass,
    Residue,
    boundary,
    is_characteristic,
    pairing,
    plumbing_inverse,
    plumbing_matrix,
)
from .linalg import hnf_rows_rational, identity, mat_inverse, mat_mul, mat_vec, span_coords


@dataclass(frozen=True)
class ManifoldSeries:
    """A simple-type series kernel with its characteristic numbers.

    b_plus is determined by (euler, signature) through the simply connected
    relation e + sigma = 2 + 2*b_plus and must be odd and at least 3.  Every
    kernel exponent must be characteristic for the lattice.
    """

    kernel: ExpKernel
    euler: int
    signature: int
    simple_type: bool = True

    def __post_init__(self):
        if (self.euler + self.signature - 2) % 2:
            raise ValueError("euler + signature must be even (simply connected model)")
        b = self.b_plus
        if b < 3 or b % 2 == 0:
            raise ValueError(f"b_plus must be odd and >= 3, got {b}")
        for kappa, _ in self.kernel.classes():
            if not is_characteristic(self.lattice, kappa):
                raise ValueError(f"kernel class {kappa.coeffs} is not characteristic")

    @property
    def lattice(self) -> IntersectionLattice:
        return self.kernel.lattice

    @property
    def b_plus(self) -> int:
        return (self.euler + self.signature - 2) // 2

    def basic_classes(self) -> list[HClass]:
        return [kappa for kappa, _ in self.kernel.classes()]


@dataclass(frozen=True)
class ClassRecord:
    """Audit entry for one input class under a blowdown."""

    source: tuple[int, ...]
    status: str  # "kept" or "dropped"
    residue: int
    extension: Optional[tuple[Fraction, ...]] = None
    image: Optional[tuple[int, ...]] = None

    def to_obj(self) -> dict:
        from .serialize import fraction_str

        obj = {"source": list(self.source), "status": self.status, "residue": self.residue}
        if self.extension is not None:
            obj["extension"] = [fraction_str(x) for x in self.extension]
        if self.image is not None:
            obj["image"] = list(self.image)
        return obj


@dataclass(frozen=True)
class BlowdownResult:
    series: ManifoldSeries
    class_map: tuple[ClassRecord, ...] = field(default_factory=tuple)


class RestrictedClass:
    """Result of pushing a class off a chain configuration.

    extension: the ambient rational class kappa + sum x_i u_i orthogonal to
        every sphere of the configuration.
    square: its self-pairing.
    boundary: the class of the relative restriction in Z_{p^2}; the extension
        descends to the blowdown exactly when this lies in the index-p subgroup.
    """

    __slots__ = ("extension", "square", "boundary")

    def __init__(self, extension: QClass, square: Fraction, boundary: Residue):
        self.extension = extension
        self.square = square
        self.boundary = boundary


def _fresh_names(lattice: IntersectionLattice, stem: str, count: int) -> list[str]:
    taken = set(lattice.basis_names)
    out = []
    i = 1
    while len(out) < count:
        name = f"{stem}{i}"
        if name not in taken:
            out.append(name)
            taken.add(name)
        i += 1
    return out


def blowup(m: ManifoldSeries, k: int = 1, names: Optional[Sequence[str]] = None) -> ManifoldSeries:
    """Add k exceptional square -1 directions and multiply the kernel by
    the product of their cosh factors; euler += k, signature -= k."""
    if k < 1:
        raise ValueError("blowup count must be >= 1")
    lat = m.lattice
    if names is None:
        names = _fresh_names(lat, "e", k)
    elif len(names) != k or len(set(names)) != k:
        raise ValueError("need k distinct exceptional names")
    n = lat.rank
    new_names = list(lat.basis_names) + list(names)
    gram = [[lat.gram[i][j] if i < n and j < n else Fraction(0) for j in range(n + k)] for i in range(n + k)]
    for i in range(n, n + k):
        gram[i][i] = Fraction(-1)
    new_lat = IntersectionLattice(new_names, gram)
    kernel = ExpKernel(new_lat, {key + (0,) * k: c for key, c in m.kernel.terms.items()})
    for i in range(k):
        exc = new_lat.basis_class(names[i])
        kernel = kernel * ExpKernel(new_lat, [(exc.coeffs, Fraction(1, 2)), ((-exc).coeffs, Fraction(1, 2))])
    return ManifoldSeries(kernel, m.euler + k, m.signature - k, m.simple_type)


def check_adjunction(m: ManifoldSeries, u: HClass, positive_double_points: int = 0) -> list[HClass]:
    """Classes violating 2*points - 2 >= u^2 + |class . u| for the sphere class u."""
    if u.lattice != m.lattice:
        raise ValueError("lattice mismatch: sphere class not in the series lattice")
    if not any(u.coeffs):
        raise ValueError("sphere class must be nontrivial")
    bound = 2 * positive_double_points - 2
    usq = pairing(u, u)
    out = []
    for kappa, _ in m.kernel.classes():
        if bound < usq + abs(pairing(kappa, u)):
            out.append(kappa)
    return out


def check_sphere_relation(m: ManifoldSeries, u: HClass) -> bool:
    """Kernel identity forced by an embedded sphere u with no positive double
    points: over the violating classes with kappa.u = -u^2,

        sum a e^{kappa+u}  -  (-1)^{(1+b_plus)/2} sum a e^{-kappa-u}  =  0.
    """
    violators = check_adjunction(m, u, 0)
    usq = pairing(u, u)
    for kappa in violators:
        if abs(pairing(kappa, u)) != abs(usq):
            raise ValueError("violating classes do not all satisfy class.u = +-u^2")
    neg = [kappa for kappa in violators if pairing(kappa, u) == -usq]
    if usq != 0 and 2 * len(neg) != len(violators):
        raise ValueError("violating classes do not split evenly between the two signs")
    sign = -1 if ((1 + m.b_plus) // 2) % 2 else 1
    rel = zero(m.lattice)
    for kappa in neg:
        a = m.kernel.coeff(kappa)
        # the two exponents can coincide (kappa = -u); list input sums them
        rel = rel + ExpKernel(m.lattice, [((kappa + u).coeffs, a), (((-kappa) - u).coeffs, -sign * a)])
    return not rel


def check_taut(m: ManifoldSeries, c: ChainConfig) -> bool:
    """True iff every kernel class pairs to 0 with the interior spheres and to
    at most p in absolute value with the end sphere."""
    if c.ambient != m.lattice:
        raise ValueError("configuration does not live in the series lattice")
    for kappa, _ in m.kernel.classes():
        if any(pairing(kappa, u) != 0 for u in c.spheres[:-1]):
            return False
        if abs(pairing(kappa, c.spheres[-1])) > c.p:
            return False
    return True


def restrict_class(c: ChainConfig, kappa: HClass) -> RestrictedClass:
    """Solve (kappa + sum x_i u_i) . u_j = 0 and report the orthogonal
    extension, its square, and the boundary class of the relative restriction."""
    if kappa.lattice != c.ambient:
        raise ValueError("class does not live in the configuration's ambient lattice")
    p = c.p
    g = [pairing(kappa, u) for u in c.spheres]
    if any(v.denominator != 1 for v in g):
        raise ValueError("class pairs non-integrally with the configuration")
    g = [int(v) for v in g]
    pinv = [[Fraction(x) for x in row] for row in plumbing_inverse(p)]
    x = mat_vec(pinv, [Fraction(-v) for v in g])
    ext = kappa.as_q()
    for xi, u in zip(x, c.spheres):
        ext = ext + u.as_q() * xi
    sq = pairing(ext, ext)
    bdry = boundary(RelClass(p, tuple(g), basis="gamma"))
    return RestrictedClass(ext, sq, bdry)


def _orthogonal_unit_indices(c: ChainConfig) -> list[int]:
    amb = c.ambient
    out = []
    for i in range(amb.rank):
        unit = amb.basis_class(amb.basis_names[i])
        if all(pairing(unit, u) == 0 for u in c.spheres):
            out.append(i)
    return out


def _blown_down_lattice(
    c: ChainConfig,
    extensions: Sequence[tuple[Fraction, ...]],
    image_names: Optional[Sequence[str]],
) -> tuple[IntersectionLattice, list[tuple[Fraction, ...]]]:
    """Canonical basis for the group generated by the surviving extensions and
    the ambient unit directions orthogonal to the configuration.

    Returns the new lattice and its basis vectors in ambient coordinates.  Rows
    that land exactly on an ambient unit vector keep that name; the remaining
    rows are named from image_names (in row order), with k1, k2, ... as the
    fallback.
    """
    amb = c.ambient
    gens: list[tuple[Fraction, ...]] = [tuple(Fraction(x) for x in ext) for ext in extensions]
    unit_idx = _orthogonal_unit_indices(c)
    for i in unit_idx:
        gens.append(tuple(Fraction(1 if j == i else 0) for j in range(amb.rank)))
    gens = [g for g in gens if any(g)]
    if not gens:
        raise ValueError(
            "blown-down lattice model is empty; the ambient model needs a direction "
            "disjoint from the configuration"
        )
    basis = hnf_rows_rational(gens)
    names: list[str] = []
    fresh = list(image_names) if image_names is not None else []
    auto = 0
    for row in basis:
        ones = [j for j, v in enumerate(row) if v]
        if len(ones) == 1 and row[ones[0]] == 1:
            names.append(amb.basis_names[ones[0]])
            continue
        if fresh:
            names.append(fresh.pop(0))
        else:
            auto += 1
            names.append(f"k{auto}")
    if len(set(names)) != len(names):
        raise ValueError(f"image names collide with surviving ambient names: {names}")
    gram = [
        [sum(a * amb.gram[i][j] * b for i, a in enumerate(u) for j, b in enumerate(v) if a and b)
         or Fraction(0)
         for v in basis]
        for u in basis
    ]
    return IntersectionLattice(names, gram), basis


def _rebase(
    ext: tuple[Fraction, ...], basis: list[tuple[Fraction, ...]], lattice: IntersectionLattice
) -> tuple[int, ...]:
    coords = span_coords([list(b) for b in basis], list(ext))
    if coords is None or any(x.denominator != 1 for x in coords):
        raise RuntimeError("extension class is not integral on the blown-down lattice")
    return tuple(int(x) for x in coords)


def taut_blowdown(
    m: ManifoldSeries, c: ChainConfig, image_names: Optional[Sequence[str]] = None
) -> BlowdownResult:
    """Rational blowdown of a tautly embedded chain configuration.

    Classes pairing to +-p with the end sphere survive with coefficient scaled
    by 2^(p-1) and square increased by p-1; all others drop.  Surviving
    extensions must descend (boundary class in the index-p subgroup).
    """
    if not m.simple_type:
        raise ValueError("taut blowdown requires a simple-type series")
    if not check_taut(m, c):
        raise ValueError("configuration is not tautly embedded for this kernel")
    p = c.p
    end = c.spheres[-1]
    outcomes: list[tuple[tuple[int, ...], Optional[tuple[Fraction, ...]], Fraction, int]] = []
    for kappa, a in m.kernel.classes():
        r = restrict_class(c, kappa)
        if abs(pairing(kappa, end)) == p:
            if not r.boundary.in_subgroup(p):
                raise ValueError(
                    f"class {kappa.coeffs} meets the end sphere fully but does not extend "
                    f"(boundary {r.boundary.value} mod {p * p})"
                )
            if r.square != pairing(kappa, kappa) + (p - 1):
                raise RuntimeError("extension square does not shift by p-1 on a taut survivor")
            outcomes.append((kappa.coeffs, tuple(r.extension.coeffs), a, r.boundary.value))
        else:
            outcomes.append((kappa.coeffs, None, a, r.boundary.value))
    lat, basis = _blown_down_lattice(c, [o[1] for o in outcomes if o[1] is not None], image_names)
    terms: dict[tuple[int, ...], Fraction] = {}
    scale = Fraction(2) ** (p - 1)
    records: list[ClassRecord] = []
    for source, ext, a, res in outcomes:
        if ext is None:
            records.append(ClassRecord(source, "dropped", res))
            continue
        img = _rebase(ext, basis, lat)
        terms[img] = terms.get(img, Fraction(0)) + scale * a
        records.append(ClassRecord(source, "kept", res, ext, img))
    series = ManifoldSeries(
        ExpKernel(lat, terms), m.euler - (p - 1), m.signature + (p - 1), m.simple_type
    )
    return BlowdownResult(series, tuple(records))


def p2_blowdown(
    m: ManifoldSeries, sigma: HClass, image_names: Optional[Sequence[str]] = None
) -> BlowdownResult:
    """Blowdown of a single square -4 sphere via the coefficient twist:
    the new kernel is K - twist(K, sigma), classes then pushed off the sphere.

    Agrees with taut_blowdown whenever the sphere is taut (|class.sigma| <= 2),
    but is defined without that hypothesis.
    """
    if sigma.lattice != m.lattice:
        raise ValueError("lattice mismatch: sphere class not in the series lattice")
    if pairing(sigma, sigma) != -4:
        raise ValueError("the sphere class must have square -4")
    c = ChainConfig(2, m.lattice, [sigma])
    k2 = m.kernel - twist(m.kernel, sigma)
    records: list[ClassRecord] = []
    extensions: list[tuple[Fraction, ...]] = []
    kept: list[tuple[HClass, tuple[Fraction, ...], Fraction, int]] = []
    for kappa, a in m.kernel.classes():
        r = restrict_class(c, kappa)
        a2 = k2.coeff(kappa)
        if a2:
            if not r.boundary.in_subgroup(2):
                raise ValueError(f"class {kappa.coeffs} does not extend across the blowdown")
            extensions.append(tuple(r.extension.coeffs))
            kept.append((kappa, tuple(r.extension.coeffs), a2, r.boundary.value))
        else:
            records.append(ClassRecord(kappa.coeffs, "dropped", r.boundary.value))
    lat, basis = _blown_down_lattice(c, extensions, image_names)
    terms: dict[tuple[int, ...], Fraction] = {}
    for kappa, ext, a2, res in kept:
        img = _rebase(ext, basis, lat)
        terms[img] = terms.get(img, Fraction(0)) + a2
        records.append(ClassRecord(kappa.coeffs, "kept", res, ext, img))
    series = ManifoldSeries(ExpKernel(lat, terms), m.euler - 1, m.signature + 1, m.simple_type)
    return BlowdownResult(series, tuple(records))


_SUFFIX = re.compile(r"^(.*)_(\d+)$")


def _refined_name(old: str, divisor: int) -> str:
    match = _SUFFIX.match(old)
    if match:
        return f"{match.group(1)}_{int(match.group(2)) * divisor}"
    return f"{old}_{divisor}"


def _fiber_direction(
    lattice: IntersectionLattice, classes: Sequence[HClass], s: HClass
) -> tuple[int, int]:
    """Validate a fiber class: positive multiple of a single square-zero basis
    direction, orthogonal to every supplied class.  Returns (index, multiple)."""
    if s.lattice != lattice:
        raise ValueError("lattice mismatch: fiber class not in the series lattice")
    nonzero = [(i, v) for i, v in enumerate(s.coeffs) if v]
    if len(nonzero) != 1 or nonzero[0][1] < 1:
        raise ValueError("fiber class must be a positive multiple of one basis direction")
    idx, mult = nonzero[0]
    if lattice.gram[idx][idx] != 0:
        raise ValueError("fiber direction must have square zero")
    for kappa in classes:
        if pairing(kappa, s) != 0:
            raise ValueError(f"class {kappa.coeffs} is not orthogonal to the fiber")
    return idx, mult


def log_transform(
    m: ManifoldSeries, s: HClass, p: int, new_name: Optional[str] = None
) -> ManifoldSeries:
    """Order-p logarithmic transform along the fiber class s.

    The fiber direction is refined so s/p becomes integral and the kernel is
    multiplied by the p-term ladder e^{(p-1)s/p} + e^{(p-3)s/p} + ... +
    e^{-(p-1)s/p}.  Euler number and signature are unchanged.
    """
    if p < 1:
        raise ValueError("log transform order must be >= 1")
    idx, mult = _fiber_direction(m.lattice, m.basic_classes(), s)
    d = p // gcd(mult, p)
    kernel = m.kernel
    if d > 1:
        old = m.lattice.basis_class(m.lattice.basis_names[idx])
        name = new_name if new_name is not None else _refined_name(m.lattice.basis_names[idx], d)
        kernel = refine_lattice(kernel, old, d, name)
    lat = kernel.lattice
    step = mult * d // p
    ladder = {}
    for j in range(p):
        key = [0] * lat.rank
        key[idx] = (p - 1 - 2 * j) * step
        ladder[tuple(key)] = Fraction(1)
    return ManifoldSeries(kernel * ExpKernel(lat, ladder), m.euler, m.signature, m.simple_type)


def formal_log_coefficients(p: int) -> list[tuple[int, Fraction]]:
    """Coefficients of sinh(p*u)/sinh(u) as (exponent, coefficient) pairs,
    exponent descending.  Computed by exact Laurent division on a scratch
    rank-1 lattice, not written down: the all-ones answer is a theorem here."""
    if p < 1:
        raise ValueError("order must be >= 1")
    scratch = IntersectionLattice(["u"], [[Fraction(0)]])
    u = scratch.basis_class("u")
    q = exact_div(sinh_c(u * p), sinh_c(u))
    return sorted(((key[0], c) for key, c in q.terms.items()), reverse=True)


def _exceptional_chain_spheres(
    lat: IntersectionLattice, exc_names: Sequence[str], s_coeffs: Optional[tuple[int, ...]]
) -> list[HClass]:
    """The chain of length p-1 carried by p-1 exceptional directions: interior
    spheres are consecutive differences, the end sphere is (optionally a fiber
    class) minus twice the first exceptional direction minus the rest."""
    p = len(exc_names) + 1
    e = [lat.basis_class(n) for n in exc_names]
    spheres = [e[p - (i + 1) - 1] - e[p - i - 1] for i in range(1, p - 1)]
    end = e[0] * (-2)
    for i in range(1, p - 1):
        end = end - e[i]
    if s_coeffs is not None:
        end = end + HClass(lat, s_coeffs)
    spheres.append(end)
    return spheres


def verify_nodal_matrix_identity(p: int) -> bool:
    """Exact checks of the linear algebra behind the nodal-chain extension:
    with A the change-of-basis matrix of the exceptional chain,
    P (A^t)^{-1} = -A, A^t P^{-1} A = -I, and the end coordinate of
    P^{-1} A (1,...,1) equals (p-1)/p."""
    if p < 2:
        raise ValueError("need p >= 2")
    n = p - 1
    a = [[Fraction(0)] * n for _ in range(n)]
    for i in range(1, p - 1):
        a[i - 1][p - (i + 1) - 1] = Fraction(1)
        a[i - 1][p - i - 1] = Fraction(-1)
    a[n - 1][0] = Fraction(-2)
    for j in range(1, n):
        a[n - 1][j] = Fraction(-1)
    pm = [[Fraction(x) for x in row] for row in plumbing_matrix(p)]
    at = [list(col) for col in zip(*a)]
    neg_a = [[-x for x in row] for row in a]
    if mat_mul(pm, mat_inverse(at)) != neg_a:
        return False
    pinv = [[Fraction(x) for x in row] for row in plumbing_inverse(p)]
    prod = mat_mul(mat_mul(at, pinv), a)
    if prod != [[-x for x in row] for row in identity(n)]:
        return False
    x = mat_vec(pinv, mat_vec(a, [Fraction(1)] * n))
    return x[n - 1] == Fraction(p - 1, p)


def _sign_vectors(n: int):
    for bits in range(1 << n):
        yield tuple(1 if bits & (1 << i) else -1 for i in range(n))


def nodal_log_pipeline(m: ManifoldSeries, s: HClass, p: int) -> ManifoldSeries:
    """Order-p log transform built the long way: blow up p-1 times, form the
    exceptional chain ending on the fiber, push every blown-up class off the
    chain (each extension must come out as source + (signed count / p) * fiber
    with boundary p * signed count), and reassemble with the division-derived
    ladder coefficients.  Must agree with log_transform exactly.
    """
    if p < 2:
        raise ValueError("need p >= 2")
    idx, mult = _fiber_direction(m.lattice, m.basic_classes(), s)
    up = blowup(m, p - 1)
    lat_up = up.lattice
    exc_names = lat_up.basis_names[m.lattice.rank :]
    s_up = tuple(s.coeffs) + (0,) * (p - 1)
    spheres = _exceptional_chain_spheres(lat_up, exc_names, s_up)
    config = ChainConfig(p, lat_up, spheres)
    s_q = HClass(lat_up, s_up).as_q()
    support: set[tuple[tuple[int, ...], int]] = set()
    for kappa, _ in m.kernel.classes():
        for eps in _sign_vectors(p - 1):
            kj = HClass(lat_up, tuple(kappa.coeffs) + eps)
            r = restrict_class(config, kj)
            total = sum(eps)
            want = QClass(
                lat_up,
                tuple(
                    Fraction(kc) + Fraction(total, p) * sc
                    for kc, sc in zip(tuple(kappa.coeffs) + (0,) * (p - 1), s_q.coeffs)
                ),
            )
            if r.extension != want:
                raise RuntimeError(
                    f"nodal extension mismatch: got {r.extension.coeffs}, expected {want.coeffs}"
                )
            if r.boundary.value != (p * total) % (p * p) or not r.boundary.in_subgroup(p):
                raise RuntimeError("nodal extension boundary is not p times the signed count")
            support.add((kappa.coeffs, total))
    d = p // gcd(mult, p)
    kernel = m.kernel
    if d > 1:
        old = m.lattice.basis_class(m.lattice.basis_names[idx])
        kernel = refine_lattice(kernel, old, d, _refined_name(m.lattice.basis_names[idx], d))
    lat = kernel.lattice
    step = mult * d // p
    ladder_coeffs = dict(formal_log_coefficients(p))
    terms: dict[tuple[int, ...], Fraction] = {}
    for source, total in sorted(support):
        b = ladder_coeffs.get(total)
        if b is None:
            raise RuntimeError(f"extension multiplicity {total} missing from the ladder")
        key = list(source)
        key[idx] = key[idx] * d + total * step
        a = m.kernel.coeff(source)
        terms[tuple(key)] = terms.get(tuple(key), Fraction(0)) + a * b
    assembled = ExpKernel(lat, terms)
    return ManifoldSeries(assembled, m.euler, m.signature, m.simple_type)


def connected_sum_hp(m: ManifoldSeries, p: int) -> ManifoldSeries:
    """Connected sum with the homology ball double H_p, realized as blowing up
    p-1 times and blowing down the exceptional chain that misses the fiber.
    Every extension equals its source class, so the kernel just scales by the
    ladder total p; euler and signature are unchanged."""
    if p < 1:
        raise ValueError("order must be >= 1")
    if p == 1:
        return m
    up = blowup(m, p - 1)
    lat_up = up.lattice
    exc_names = lat_up.basis_names[m.lattice.rank :]
    spheres = _exceptional_chain_spheres(lat_up, exc_names, None)
    config = ChainConfig(p, lat_up, spheres)
    for kappa, _ in m.kernel.classes():
        for eps in _sign_vectors(p - 1):
            kj = HClass(lat_up, tuple(kappa.coeffs) + eps)
            r = restrict_class(config, kj)
            want = QClass(
                lat_up, tuple(Fraction(x) for x in tuple(kappa.coeffs) + (0,) * (p - 1))
            )
            if r.extension != want:
                raise RuntimeError("homology-ball extension should equal its source class")
            if not r.boundary.in_subgroup(p):
                raise RuntimeError("homology-ball extension boundary not divisible by p")
    total = sum(c for _, c in formal_log_coefficients(p))
    return ManifoldSeries(m.kernel.scale(total), m.euler, m.signature, m.simple_type)
