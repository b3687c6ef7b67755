"""Finite formal sums of exponentials of lattice classes.

A series kernel is sum_s a_s e^{kappa_s} with rational a_s and kappa_s integral
classes in a fixed lattice; the gaussian prefactor exp(Q/2) of a full series is
implicit and never stored.  Multiplication convolves exponents
(e^kappa e^lambda = e^{kappa+lambda}); division is supported exactly when all
exponents involved sit on one rank-1 direction, which is the only case the
surgery formulas need (fiber-direction factors like sinh(pu)/sinh(u)).
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterator, Mapping, Sequence, Union

from .lattice import HClass, IntersectionLattice, QClass, pairing

Scalar = Union[int, Fraction]


class ExpKernel:
    __slots__ = ("lattice", "terms")

    def __init__(self, lattice: IntersectionLattice, terms: Mapping = ()):
        clean: dict[tuple[int, ...], Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for key, coeff in items:
            if isinstance(key, HClass):
                if key.lattice != lattice:
                    raise ValueError("lattice mismatch: term class not in the kernel lattice")
                key = key.coeffs
            key = tuple(int(k) for k in key)
            if len(key) != lattice.rank:
                raise ValueError("exponent length does not match lattice rank")
            c = Fraction(coeff)
            if c:
                clean[key] = clean.get(key, Fraction(0)) + c
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(self, "terms", {k: v for k, v in clean.items() if v})

    def __setattr__(self, name, value):
        raise AttributeError("ExpKernel is immutable")

    # -- basic protocol ----------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExpKernel)
            and self.lattice == other.lattice
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.lattice, tuple(self.sorted_terms())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return sorted(self.terms.items())

    def classes(self) -> Iterator[tuple[HClass, Fraction]]:
        for key, coeff in self.sorted_terms():
            yield HClass(self.lattice, key), coeff

    def __repr__(self) -> str:
        if not self.terms:
            return "ExpKernel(0)"
        bits = [f"{c}*e^{k}" for k, c in self.sorted_terms()]
        return "ExpKernel(" + " + ".join(bits) + ")"

    # -- ring operations ----------------------------------------------------

    def _check(self, other: "ExpKernel") -> None:
        if self.lattice != other.lattice:
            raise ValueError("lattice mismatch between kernels")

    def __add__(self, other: "ExpKernel") -> "ExpKernel":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Fraction(0)) + c
        return ExpKernel(self.lattice, out)

    def __sub__(self, other: "ExpKernel") -> "ExpKernel":
        return self + (-other)

    def __neg__(self) -> "ExpKernel":
        return ExpKernel(self.lattice, {k: -c for k, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, ExpKernel):
            self._check(other)
            out: dict[tuple[int, ...], Fraction] = {}
            for k1, c1 in self.terms.items():
                for k2, c2 in other.terms.items():
                    key = tuple(a + b for a, b in zip(k1, k2))
                    out[key] = out.get(key, Fraction(0)) + c1 * c2
            return ExpKernel(self.lattice, out)
        return self.scale(other)

    def __rmul__(self, other) -> "ExpKernel":
        return self.scale(other)

    def scale(self, k: Scalar) -> "ExpKernel":
        k = Fraction(k)
        return ExpKernel(self.lattice, {key: k * c for key, c in self.terms.items()})

    def coeff(self, cls: Union[HClass, tuple]) -> Fraction:
        key = cls.coeffs if isinstance(cls, HClass) else tuple(cls)
        return self.terms.get(key, Fraction(0))


def one(lattice: IntersectionLattice) -> ExpKernel:
    return ExpKernel(lattice, {(0,) * lattice.rank: Fraction(1)})


def zero(lattice: IntersectionLattice) -> ExpKernel:
    return ExpKernel(lattice, {})


def exp_c(kappa: HClass) -> ExpKernel:
    return ExpKernel(kappa.lattice, {kappa.coeffs: Fraction(1)})


def sinh_c(kappa: HClass) -> ExpKernel:
    """(e^kappa - e^{-kappa}) / 2; the zero class gives the zero kernel."""
    return ExpKernel(
        kappa.lattice,
        [(kappa.coeffs, Fraction(1, 2)), ((-kappa).coeffs, Fraction(-1, 2))],
    )


def cosh_c(kappa: HClass) -> ExpKernel:
    return ExpKernel(
        kappa.lattice,
        [(kappa.coeffs, Fraction(1, 2)), ((-kappa).coeffs, Fraction(1, 2))],
    )


def coeff_sum(k: ExpKernel) -> Fraction:
    """Evaluation that sends every e^kappa to 1."""
    return sum(k.terms.values(), Fraction(0))


def parity(k: ExpKernel) -> str:
    """"even" if a_{-kappa} = a_kappa for all terms, "odd" if negated,
    else "neither".  The zero kernel counts as even."""
    even = all(k.terms.get(tuple(-x for x in key)) == c for key, c in k.terms.items())
    if even:
        return "even"
    odd = all(k.terms.get(tuple(-x for x in key)) == -c for key, c in k.terms.items())
    return "odd" if odd else "neither"


def twist(k: ExpKernel, c: Union[HClass, QClass]) -> ExpKernel:
    """Coefficient twist a_s -> a_s (-1)^{(c^2 + kappa_s . c)/2}.

    Every exponent (c^2 + kappa_s . c) must be an even integer.
    """
    if c.lattice != k.lattice:
        raise ValueError("lattice mismatch: twisting class not in the kernel lattice")
    csq = pairing(c, c)
    out = {}
    for key, a in k.terms.items():
        kc = pairing(HClass(k.lattice, key), c)
        val = csq + kc
        if val.denominator != 1 or int(val) % 2:
            raise ValueError(f"twist undefined for class {key}: exponent {val} is not even")
        out[key] = a if (int(val) // 2) % 2 == 0 else -a
    return ExpKernel(k.lattice, out)


def directional_derivative(k: ExpKernel, u: Union[HClass, QClass]) -> ExpKernel:
    """a_s e^{kappa_s} -> a_s (kappa_s . u) e^{kappa_s}; a derivation."""
    if u.lattice != k.lattice:
        raise ValueError("lattice mismatch: direction not in the kernel lattice")
    return ExpKernel(
        k.lattice,
        {key: a * pairing(HClass(k.lattice, key), u) for key, a in k.terms.items()},
    )


def _collinear_multiples(direction_pool: Sequence[tuple[int, ...]]) -> tuple[tuple[int, ...], dict]:
    """Primitive common direction d and the multiple of d each vector equals."""
    nonzero = [v for v in direction_pool if any(v)]
    first = min(nonzero)
    g = gcd(*[abs(x) for x in first])
    d = tuple(x // g for x in first)
    lead = next(i for i, x in enumerate(d) if x)
    mult = {}
    for v in direction_pool:
        k, r = divmod(v[lead], d[lead])
        if r or any(x != k * dx for x, dx in zip(v, d)):
            raise ValueError("exponents are not collinear: no common rank-1 direction")
        mult[v] = k
    return d, mult


def exact_div(a: ExpKernel, b: ExpKernel) -> ExpKernel:
    """Exact quotient a / b for kernels supported on one rank-1 direction.

    Both kernels become Laurent polynomials in x = e^d for the primitive common
    direction d; the quotient must come out exact (zero remainder), otherwise
    this raises.
    """
    a._check(b)
    if not b.terms:
        raise ZeroDivisionError("division by the zero kernel")
    if not a.terms:
        return zero(a.lattice)
    pool = list(a.terms) + list(b.terms)
    if not any(any(v) for v in pool):
        (bk, bc), = b.terms.items()
        return a.scale(Fraction(1) / bc)
    d, mult = _collinear_multiples(pool)
    pa = {mult[k]: c for k, c in a.terms.items()}
    pb = {mult[k]: c for k, c in b.terms.items()}
    lo_a, hi_a = min(pa), max(pa)
    lo_b, hi_b = min(pb), max(pb)
    da, db = hi_a - lo_a, hi_b - lo_b
    if da < db:
        raise ValueError("inexact division: numerator support is too narrow")
    rem = [pa.get(lo_a + i, Fraction(0)) for i in range(da + 1)]
    den = [pb.get(lo_b + i, Fraction(0)) for i in range(db + 1)]
    quot = [Fraction(0)] * (da - db + 1)
    for i in range(da, db - 1, -1):
        c = rem[i] / den[db]
        quot[i - db] = c
        if c:
            for j in range(db + 1):
                rem[i - db + j] -= c * den[j]
    if any(rem):
        raise ValueError("inexact division: nonzero remainder")
    shift = lo_a - lo_b
    out = {}
    for i, c in enumerate(quot):
        if c:
            out[tuple((i + shift) * x for x in d)] = c
    return ExpKernel(a.lattice, out)


def refined_lattice(
    lattice: IntersectionLattice, old: HClass, divisor: int, new_name: str
) -> IntersectionLattice:
    """Replace the basis direction `old` by a 1/divisor fraction of itself.

    `old` must be exactly one of the basis vectors.  The new primitive vector
    nu satisfies old = divisor * nu; pairings scale accordingly.
    """
    if old.lattice != lattice:
        raise ValueError("lattice mismatch: direction not in this lattice")
    if divisor < 1:
        raise ValueError("divisor must be a positive integer")
    ones = [i for i, c in enumerate(old.coeffs) if c]
    if len(ones) != 1 or old.coeffs[ones[0]] != 1:
        raise ValueError("refinement direction must be a basis vector")
    idx = ones[0]
    names = list(lattice.basis_names)
    if new_name != names[idx] and new_name in names:
        raise ValueError(f"basis name {new_name!r} already in use")
    names[idx] = new_name
    gram = [list(row) for row in lattice.gram]
    for j in range(lattice.rank):
        gram[idx][j] /= divisor
        gram[j][idx] = gram[idx][j]
    gram[idx][idx] = lattice.gram[idx][idx] / (divisor * divisor)
    return IntersectionLattice(names, gram)


def refine_lattice(
    k: ExpKernel, old: HClass, divisor: int, new_name: str
) -> ExpKernel:
    """Re-express a kernel on the refinement old = divisor * new basis vector.

    Exponent coordinates along the refined direction are multiplied by the
    divisor, staying integral by construction.
    """
    lat = refined_lattice(k.lattice, old, divisor, new_name)
    idx = next(i for i, c in enumerate(old.coeffs) if c)
    out = {}
    for key, c in k.terms.items():
        nk = list(key)
        nk[idx] *= divisor
        out[tuple(nk)] = c
    return ExpKernel(lat, out)
