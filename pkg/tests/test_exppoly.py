import random
from fractions import Fraction

import pytest

from blowdown.exppoly import (
    ExpKernel,
    coeff_sum,
    cosh_c,
    directional_derivative,
    exact_div,
    exp_c,
    one,
    parity,
    refine_lattice,
    refined_lattice,
    sinh_c,
    twist,
    zero,
)
from blowdown.lattice import IntersectionLattice, diagonal_lattice

LAT = IntersectionLattice(["f", "s"], [[0, 1], [1, -4]])


def _random_kernel(rng, lat=LAT, span=3, nterms=4):
    terms = {}
    for _ in range(nterms):
        key = tuple(rng.randint(-span, span) for _ in range(lat.rank))
        terms[key] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    return ExpKernel(lat, terms)


def test_construction_and_coeff():
    k = ExpKernel(LAT, {(1, 0): Fraction(2), (0, 0): Fraction(0)})
    assert len(k) == 1  # zero coefficients drop
    assert k.coeff((1, 0)) == 2
    assert k.coeff(LAT.basis_class("f")) == 2
    assert k.coeff((5, 5)) == 0
    assert not zero(LAT)
    assert one(LAT).coeff((0, 0)) == 1


def test_kernel_immutable():
    k = one(LAT)
    with pytest.raises(AttributeError):
        k.terms = {}


def test_ring_axioms_random():
    rng = random.Random(3)
    for _ in range(8):
        a = _random_kernel(rng)
        b = _random_kernel(rng)
        c = _random_kernel(rng)
        assert a + b == b + a
        assert a * b == b * a
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * one(LAT) == a
        assert a + zero(LAT) == a
        assert a - a == zero(LAT)
        assert a.scale(Fraction(3, 2)) == a * Fraction(3, 2)


def test_mul_is_exponent_convolution():
    f = LAT.basis_class("f")
    s = LAT.basis_class("s")
    k = exp_c(f) * exp_c(s)
    assert k.sorted_terms() == [((1, 1), Fraction(1))]
    sq = (exp_c(f) + exp_c(-f)) * (exp_c(f) + exp_c(-f))
    assert sq.coeff((0, 0)) == 2


def test_hyperbolic_identity():
    v = LAT.combo({"f": 1, "s": 2})
    assert cosh_c(v) * cosh_c(v) - sinh_c(v) * sinh_c(v) == one(LAT)
    assert sinh_c(LAT.zero()) == zero(LAT)
    assert parity(sinh_c(v)) == "odd"
    assert parity(cosh_c(v)) == "even"
    assert parity(exp_c(v)) == "neither"
    assert parity(zero(LAT)) == "even"


def test_coeff_sum_multiplicative():
    rng = random.Random(5)
    for _ in range(6):
        a = _random_kernel(rng)
        b = _random_kernel(rng)
        assert coeff_sum(a * b) == coeff_sum(a) * coeff_sum(b)


def test_twist_involution_and_error():
    rng = random.Random(9)
    s = LAT.basis_class("s")
    for _ in range(6):
        # keys with even pairing against s: s^2 = -4, f.s = 1 so use even f parts
        terms = {
            (2 * rng.randint(-2, 2), rng.randint(-2, 2)): Fraction(rng.randint(1, 4))
            for _ in range(3)
        }
        k = ExpKernel(LAT, terms)
        assert twist(twist(k, s), s) == k
    bad = exp_c(LAT.basis_class("f"))  # f.s = 1, s^2 = -4: exponent odd
    with pytest.raises(ValueError):
        twist(bad, s)


def test_directional_derivative_leibniz():
    rng = random.Random(13)
    u = LAT.combo({"f": 2, "s": 1})
    for _ in range(6):
        a = _random_kernel(rng)
        b = _random_kernel(rng)
        lhs = directional_derivative(a * b, u)
        rhs = directional_derivative(a, u) * b + a * directional_derivative(b, u)
        assert lhs == rhs
    # odd kernels have even derivative and vice versa
    v = LAT.combo({"f": 1, "s": 2})
    assert parity(directional_derivative(sinh_c(v), u)) == "even"


def test_exact_div_roundtrip():
    lat = diagonal_lattice(["x"], [0])
    x = lat.basis_class("x")
    rng = random.Random(17)
    for _ in range(8):
        a = ExpKernel(
            lat,
            {(rng.randint(-6, 6),): Fraction(rng.randint(-4, 4)) for _ in range(4)},
        )
        b = sinh_c(x * rng.randint(1, 3)) + cosh_c(x * rng.randint(1, 2))
        if not a or not b:
            continue
        assert exact_div(a * b, b) == a


def test_exact_div_multidirection_collinear():
    # divisor support must lie on one rank-1 direction of the full lattice
    f = LAT.basis_class("f")
    s = LAT.basis_class("s")
    num = sinh_c(f * 2 + s * 4)
    den = sinh_c(f + s * 2)
    q = exact_div(num, den)
    assert q == cosh_c(f + s * 2) * 2


def test_exact_div_errors():
    lat = diagonal_lattice(["x"], [0])
    x = lat.basis_class("x")
    with pytest.raises(ZeroDivisionError):
        exact_div(one(lat), zero(lat))
    with pytest.raises(ValueError):
        exact_div(exp_c(x), cosh_c(x) * 2)  # remainder is nonzero
    f = LAT.basis_class("f")
    s = LAT.basis_class("s")
    with pytest.raises(ValueError):
        exact_div(one(LAT), exp_c(f) + exp_c(s) + exp_c(-f - s))  # not collinear


def test_refine_lattice_composition():
    lat = diagonal_lattice(["f"], [0])
    f = lat.basis_class("f")
    k = sinh_c(f) + one(lat)
    single = refine_lattice(k, f, 6, "f_6")
    halfway = refine_lattice(k, f, 2, "f_2")
    double = refine_lattice(halfway, halfway.lattice.basis_class("f_2"), 3, "f_6")
    assert tuple(single.lattice.basis_names) == ("f_6",)
    assert single == double


def test_refined_lattice_gram_scaling():
    lat = IntersectionLattice(["f", "s"], [[4, 2], [2, -4]])
    new = refined_lattice(lat, lat.basis_class("f"), 2, "f_2")
    assert tuple(new.basis_names) == ("f_2", "s")
    # f = 2 f_2 so f_2^2 = 4/4 = 1 and f_2.s = 2/2 = 1
    assert new.gram[0][0] == 1
    assert new.gram[0][1] == 1
    assert new.gram[1][1] == -4
