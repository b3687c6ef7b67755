"""Intersection lattices, homology classes, and the blowdown plumbing chain.

The chain configuration of order p is the linear plumbing of p-1 embedded
spheres u_1, ..., u_{p-1} with squares -2, ..., -2, -(p+2) and consecutive
intersection 1.  Its boundary is the lens space L(p^2, p-1), and rational
blowdown replaces a neighborhood of the chain by a rational ball.  This module
carries the integral bookkeeping for that surgery:

* the plumbing intersection matrix P(p) and its closed-form inverse,
* relative second homology of the chain in the dual gamma basis
  (gamma_k . u_l = delta_{kl}) and the difference basis delta_i = gamma_i -
  gamma_{i-1}, which is where class enumeration happens,
* the boundary map onto Z_{p^2} and its fold onto {0, ..., floor(p^2/2)},
* characteristic-ness tests used throughout the series calculus.

All pairings are exact fractions.  Classes carry their lattice and arithmetic
across different lattices is an error, never a coercion.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

from .linalg import mat_eq, mat_mul

Scalar = Union[int, Fraction]


class IntersectionLattice:
    """A free Z-module with named basis and a symmetric rational pairing."""

    __slots__ = ("basis_names", "gram", "_index")

    def __init__(self, basis_names: Sequence[str], gram: Sequence[Sequence[Scalar]]):
        names = tuple(basis_names)
        if len(names) < 1:
            raise ValueError("lattice rank must be at least 1")
        if len(set(names)) != len(names):
            raise ValueError("basis names must be distinct")
        g = tuple(tuple(Fraction(x) for x in row) for row in gram)
        if len(g) != len(names) or any(len(row) != len(names) for row in g):
            raise ValueError("gram matrix shape does not match basis")
        for i in range(len(names)):
            for j in range(i):
                if g[i][j] != g[j][i]:
                    raise ValueError("gram matrix must be symmetric")
        object.__setattr__(self, "basis_names", names)
        object.__setattr__(self, "gram", g)
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    def __setattr__(self, name, value):
        raise AttributeError("IntersectionLattice is immutable")

    @property
    def rank(self) -> int:
        return len(self.basis_names)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IntersectionLattice)
            and self.basis_names == other.basis_names
            and self.gram == other.gram
        )

    def __hash__(self) -> int:
        return hash((self.basis_names, self.gram))

    def __repr__(self) -> str:
        return f"IntersectionLattice({list(self.basis_names)})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"no basis vector named {name!r}") from None

    def zero(self) -> "HClass":
        return HClass(self, (0,) * self.rank)

    def basis_class(self, name: str) -> "HClass":
        coeffs = [0] * self.rank
        coeffs[self.index(name)] = 1
        return HClass(self, tuple(coeffs))

    def combo(self, terms: Mapping[str, int]) -> "HClass":
        coeffs = [0] * self.rank
        for name, c in terms.items():
            coeffs[self.index(name)] = int(c)
        return HClass(self, tuple(coeffs))

    def qcombo(self, terms: Mapping[str, Scalar]) -> "QClass":
        coeffs = [Fraction(0)] * self.rank
        for name, c in terms.items():
            coeffs[self.index(name)] = Fraction(c)
        return QClass(self, tuple(coeffs))


def diagonal_lattice(names: Sequence[str], squares: Sequence[Scalar]) -> IntersectionLattice:
    n = len(names)
    gram = [[squares[i] if i == j else 0 for j in range(n)] for i in range(n)]
    return IntersectionLattice(names, gram)


def _check_same_lattice(a, b) -> None:
    if a.lattice != b.lattice:
        raise ValueError("lattice mismatch: classes live in different lattices")


@dataclass(frozen=True)
class HClass:
    """Integral class: integer coordinates in the lattice basis."""

    lattice: IntersectionLattice
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.lattice.rank:
            raise ValueError("coordinate length does not match lattice rank")
        if not all(isinstance(c, int) for c in self.coeffs):
            raise TypeError("HClass coordinates must be ints")

    def __add__(self, other: "HClass") -> "HClass":
        _check_same_lattice(self, other)
        return HClass(self.lattice, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "HClass") -> "HClass":
        _check_same_lattice(self, other)
        return HClass(self.lattice, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "HClass":
        return HClass(self.lattice, tuple(-a for a in self.coeffs))

    def __mul__(self, k: Scalar):
        if isinstance(k, int):
            return HClass(self.lattice, tuple(k * a for a in self.coeffs))
        return QClass(self.lattice, tuple(Fraction(k) * a for a in self.coeffs))

    __rmul__ = __mul__

    def as_q(self) -> "QClass":
        return QClass(self.lattice, tuple(Fraction(a) for a in self.coeffs))

    def dot(self, other) -> Fraction:
        return pairing(self, other)

    def square(self) -> Fraction:
        return pairing(self, self)


@dataclass(frozen=True)
class QClass:
    """Rational class: used for extensions of classes across a blowdown."""

    lattice: IntersectionLattice
    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.lattice.rank:
            raise ValueError("coordinate length does not match lattice rank")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))

    def __add__(self, other) -> "QClass":
        _check_same_lattice(self, other)
        return QClass(self.lattice, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other) -> "QClass":
        _check_same_lattice(self, other)
        return QClass(self.lattice, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "QClass":
        return QClass(self.lattice, tuple(-a for a in self.coeffs))

    def __mul__(self, k: Scalar) -> "QClass":
        return QClass(self.lattice, tuple(Fraction(k) * a for a in self.coeffs))

    __rmul__ = __mul__

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def as_h(self) -> HClass:
        if not self.is_integral():
            raise ValueError("class is not integral")
        return HClass(self.lattice, tuple(int(c) for c in self.coeffs))

    def dot(self, other) -> Fraction:
        return pairing(self, other)

    def square(self) -> Fraction:
        return pairing(self, self)


def pairing(a: Union[HClass, QClass], b: Union[HClass, QClass]) -> Fraction:
    """Intersection pairing a . b through the lattice gram matrix."""
    _check_same_lattice(a, b)
    g = a.lattice.gram
    total = Fraction(0)
    for i, ai in enumerate(a.coeffs):
        if not ai:
            continue
        row = g[i]
        for j, bj in enumerate(b.coeffs):
            if bj:
                total += ai * row[j] * bj
    return total


def is_characteristic(lattice: IntersectionLattice, c: Union[HClass, QClass]) -> bool:
    """True when c . x = x . x (mod 2) for every basis vector x.

    Requires the relevant pairings to be integers; a class pairing fractionally
    with some basis vector is never characteristic here.
    """
    if c.lattice != lattice:
        raise ValueError("lattice mismatch: class does not live in this lattice")
    g = lattice.gram
    for i in range(lattice.rank):
        dot = sum((c.coeffs[j] * g[i][j] for j in range(lattice.rank) if c.coeffs[j]), Fraction(0))
        sq = g[i][i]
        if dot.denominator != 1 or sq.denominator != 1:
            return False
        if (int(dot) - int(sq)) % 2:
            return False
    return True


@dataclass(frozen=True)
class Residue:
    """An element of Z_m that refuses arithmetic across different moduli."""

    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus <= 0:
            raise ValueError("modulus must be positive")
        object.__setattr__(self, "value", self.value % self.modulus)

    def _check(self, other: "Residue") -> None:
        if self.modulus != other.modulus:
            raise ValueError(
                f"modulus mismatch: Z_{self.modulus} vs Z_{other.modulus}"
            )

    def __add__(self, other: "Residue") -> "Residue":
        self._check(other)
        return Residue(self.value + other.value, self.modulus)

    def __sub__(self, other: "Residue") -> "Residue":
        self._check(other)
        return Residue(self.value - other.value, self.modulus)

    def __neg__(self) -> "Residue":
        return Residue(-self.value, self.modulus)

    def reduced(self) -> int:
        """Fold onto {0, ..., floor(m/2)} by identifying r with m - r."""
        return min(self.value, self.modulus - self.value) if self.value else 0

    def in_subgroup(self, k: int) -> bool:
        """Membership in the subgroup kZ_m (k must divide m)."""
        if self.modulus % k:
            raise ValueError(f"{k} does not divide the modulus {self.modulus}")
        return self.value % k == 0


# ---------------------------------------------------------------------------
# Plumbing chain data


@lru_cache(maxsize=None)
def _plumbing_cached(p: int) -> tuple[tuple[int, ...], ...]:
    n = p - 1
    rows = []
    for i in range(n):
        row = [0] * n
        row[i] = -(p + 2) if i == n - 1 else -2
        if i > 0:
            row[i - 1] = 1
        if i < n - 1:
            row[i + 1] = 1
        rows.append(tuple(row))
    return tuple(rows)


def plumbing_matrix(p: int) -> list[list[int]]:
    """Intersection matrix of the order-p chain: tridiagonal, diagonal
    (-2, ..., -2, -(p+2)), off-diagonal 1.  Size (p-1) x (p-1)."""
    if p < 2:
        raise ValueError("chain order p must be at least 2")
    return [list(row) for row in _plumbing_cached(p)]


@lru_cache(maxsize=None)
def _plumbing_inverse_cached(p: int) -> tuple[tuple[Fraction, ...], ...]:
    n = p - 1
    rows = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            a, b = (i, j) if j <= i else (j, i)
            row.append(Fraction(-b) + Fraction(a * b * (p + 1), p * p))
        rows.append(tuple(row))
    return tuple(rows)


def plumbing_inverse(p: int) -> list[list[Fraction]]:
    """Closed-form inverse of plumbing_matrix(p):
    entry (i, j) = -j + i j (p+1)/p^2 for j <= i, symmetric."""
    if p < 2:
        raise ValueError("chain order p must be at least 2")
    return [list(row) for row in _plumbing_inverse_cached(p)]


def chain_lattice(p: int) -> IntersectionLattice:
    """The chain's own second homology in the sphere basis u_1, ..., u_{p-1}."""
    names = [f"u{i}" for i in range(1, p)]
    return IntersectionLattice(names, plumbing_matrix(p))


class ChainConfig:
    """An order-p chain embedded in an ambient lattice.

    spheres[0], ..., spheres[p-2] are the classes of u_1, ..., u_{p-1}; their
    mutual pairings must reproduce plumbing_matrix(p) exactly.
    """

    __slots__ = ("p", "ambient", "spheres")

    def __init__(self, p: int, ambient: IntersectionLattice, spheres: Sequence[HClass]):
        if p < 2:
            raise ValueError("chain order p must be at least 2")
        if len(spheres) != p - 1:
            raise ValueError(f"order-{p} chain needs {p - 1} sphere classes")
        for s in spheres:
            if s.lattice != ambient:
                raise ValueError("lattice mismatch: sphere class not in the ambient lattice")
        want = plumbing_matrix(p)
        got = [[pairing(a, b) for b in spheres] for a in spheres]
        if not mat_eq(got, want):
            raise ValueError("sphere pairings do not form the order-%d plumbing chain" % p)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "spheres", tuple(spheres))

    def __setattr__(self, name, value):
        raise AttributeError("ChainConfig is immutable")


# ---------------------------------------------------------------------------
# Relative classes of the chain


_BASES = ("delta", "gamma")


@dataclass(frozen=True)
class RelClass:
    """A class in the relative second homology of the order-p chain.

    Coordinates are in the delta basis by default (delta_1 = gamma_1,
    delta_i = gamma_i - gamma_{i-1}); the gamma basis is dual to the spheres.
    """

    p: int
    coeffs: tuple[int, ...]
    basis: str = "delta"

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("chain order p must be at least 2")
        if self.basis not in _BASES:
            raise ValueError(f"unknown basis {self.basis!r}; expected one of {_BASES}")
        if len(self.coeffs) != self.p - 1:
            raise ValueError(f"expected {self.p - 1} coordinates for p={self.p}")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    def delta_coords(self) -> tuple[int, ...]:
        if self.basis == "delta":
            return self.coeffs
        # gamma_j = delta_1 + ... + delta_j, so delta_i coefficient is the
        # tail sum of gamma coefficients from i on.
        g = self.coeffs
        n = len(g)
        out = []
        tail = 0
        for i in reversed(range(n)):
            tail += g[i]
            out.append(tail)
        return tuple(reversed(out))

    def gamma_coords(self) -> tuple[int, ...]:
        if self.basis == "gamma":
            return self.coeffs
        a = self.coeffs + (0,)
        return tuple(a[i] - a[i + 1] for i in range(self.p - 1))


def basis_convert(e: RelClass, to: str) -> RelClass:
    if to == "delta":
        return RelClass(e.p, e.delta_coords(), "delta")
    if to == "gamma":
        return RelClass(e.p, e.gamma_coords(), "gamma")
    raise ValueError(f"unknown basis {to!r}; expected one of {_BASES}")


def rel_pairing(a: RelClass, b: RelClass) -> Fraction:
    """Pairing on relative classes.

    In delta coordinates the matrix is ((p+1)/p^2) J - I, i.e. diagonal
    -(p^2 - p - 1)/p^2 and off-diagonal (p+1)/p^2; equivalently the gamma
    basis pairs by the inverse plumbing matrix.
    """
    if a.p != b.p:
        raise ValueError(f"chain order mismatch: p={a.p} vs p={b.p}")
    x = a.delta_coords()
    y = b.delta_coords()
    sx = sum(x)
    sy = sum(y)
    dot = sum(u * v for u, v in zip(x, y))
    return Fraction((a.p + 1) * sx * sy, a.p * a.p) - dot


def boundary(e: RelClass) -> Residue:
    """Boundary onto H_1 of the lens space: sum of delta coordinates mod p^2.
    In particular gamma_j maps to j."""
    return Residue(sum(e.delta_coords()), e.p * e.p)


def boundary_residue_class(e: RelClass) -> int:
    """Boundary folded onto {0, ..., floor(p^2/2)} (orientation fold)."""
    return boundary(e).reduced()
