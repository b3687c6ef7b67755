import warnings
from fractions import Fraction
from math import comb

import pytest

from blowdown.exppoly import ExpKernel, sinh_c
from blowdown.lattice import ChainConfig, IntersectionLattice, diagonal_lattice
from blowdown.swinv import (
    SWMap,
    sw_blowup,
    sw_dim,
    sw_dim_shift,
    sw_en,
    sw_log_transform,
    sw_simple_type,
    sw_taut_blowdown,
    witten_check,
    witten_exponent,
    witten_kernel,
)
from blowdown.transform import ManifoldSeries

F = diagonal_lattice(["f"], [0])
FS = IntersectionLattice(["f", "s"], [[0, 1], [1, -4]])


def test_swmap_validation():
    with pytest.raises(ValueError):
        SWMap(F, {(0,): 1}, 23, -16)  # odd e + sigma
    with pytest.raises(ValueError):
        SWMap(F, {(0,): 1}, 6, -4)  # b_plus = 0
    with pytest.raises(ValueError):
        SWMap(F, {(0,): Fraction(1, 2)}, 24, -16)
    with pytest.raises(ValueError):
        SWMap(FS, {(1, 0): 1}, 48, -32)  # not characteristic
    lat = diagonal_lattice(["k"], [2])
    with pytest.raises(ValueError):
        SWMap(lat, {(2,): 1}, 46, -30)  # dimension 3/2
    with pytest.raises(ValueError):
        SWMap(lat, {(3,): 1}, 46, -30)  # dimension 4 under simple type
    m = SWMap(lat, {(3,): 1}, 46, -30, simple_type=False)
    assert sw_dim(m, (3,)) == 4
    assert not sw_simple_type(m)


def test_swmap_merges_and_drops():
    m = SWMap(F, [((0,), 2), ((0,), -2), ((2,), 1)], 24, -16)
    assert m.values == {(2,): 1}
    assert m.value((0,)) == 0
    assert len(m) == 1


def test_sw_en_binomials():
    for n in range(2, 7):
        m = sw_en(n)
        assert (m.euler, m.signature) == (12 * n, -8 * n)
        want = {}
        for r in range(n - 1):
            want[(n - 2 - 2 * r,)] = (-1) ** r * comb(n - 2, r)
        want = {k: v for k, v in want.items() if v}
        assert m.values == want
        assert sw_simple_type(m)
        assert all(sw_dim(m, c) == 0 for c in m.basic_classes())
    with pytest.raises(ValueError):
        sw_en(1)


def test_sw_blowup_levels():
    m = sw_blowup(sw_en(2))
    assert tuple(m.lattice.basis_names) == ("f", "e1")
    assert m.values == {(0, 1): 1, (0, -1): 1}
    assert (m.euler, m.signature) == (25, -17)
    # level 1 needs dimension at least k(k+1) = 2, so it contributes nothing
    m = sw_blowup(sw_en(3), k_levels=(0, 1))
    assert m.values == {(1, 1): 1, (1, -1): 1, (-1, 1): -1, (-1, -1): -1}
    with pytest.raises(ValueError):
        sw_blowup(sw_en(2), k_levels=(-1,))


def test_sw_log_transform_examples():
    out = sw_log_transform(sw_en(2), F.basis_class("f"), 3)
    assert tuple(out.lattice.basis_names) == ("f_3",)
    assert out.values == {(2,): 1, (0,): 1, (-2,): 1}
    assert (out.euler, out.signature) == (24, -16)
    m3 = sw_en(3)
    out = sw_log_transform(m3, m3.lattice.basis_class("f"), 2)
    assert out.values == {(3,): 1, (1,): 1, (-1,): -1, (-3,): -1}


def test_sw_log_transform_collision():
    m = SWMap(F, {(1,): 1, (2,): 1}, 24, -16)
    with pytest.raises(ValueError):
        sw_log_transform(m, F.basis_class("f"), 2)


def test_sw_taut_blowdown_w_route():
    vals = {(2, 0): 1, (0, 0): -2, (-2, 0): 1}
    m = SWMap(FS, vals, 48, -32)
    out = sw_taut_blowdown(m, ChainConfig(2, FS, [FS.basis_class("s")]), image_names=["k"])
    assert tuple(out.lattice.basis_names) == ("k",)
    assert out.lattice.gram[0][0] == 1
    assert out.values == {(1,): 1, (-1,): 1}  # values carried unchanged
    assert (out.euler, out.signature) == (47, -31)


def test_sw_taut_blowdown_partial_pairing_warns():
    # order-3 chain: one -2 sphere then the -5 end sphere meeting the fiber
    lat = IntersectionLattice(
        ["f", "a", "s"], [[0, 0, 1], [0, -2, 1], [1, 1, -5]]
    )
    vals = {(3, 0, 0): 1, (1, 0, 0): -3, (-1, 0, 0): 3, (-3, 0, 0): -1}
    m = SWMap(lat, vals, 60, -40)
    cfg = ChainConfig(3, lat, [lat.basis_class("a"), lat.basis_class("s")])
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        out = sw_taut_blowdown(m, cfg, image_names=["lam"])
    assert len(caught) == 2  # the two middle classes admit no extension
    assert set(out.values.values()) == {1, -1}
    assert len(out) == 2
    assert (out.euler, out.signature) == (58, -38)


def test_sw_taut_blowdown_rejects_untaut():
    vals = {(6, 0): 1, (-6, 0): 1}
    m = SWMap(FS, vals, 48, -32)
    with pytest.raises(ValueError):
        sw_taut_blowdown(m, ChainConfig(2, FS, [FS.basis_class("s")]))


def test_sw_dim_shift():
    assert sw_dim_shift(2, 1) == 0
    assert sw_dim_shift(5, 1) == 0
    assert sw_dim_shift(2, 3) == 2
    assert sw_dim_shift(3, 5) == 12
    with pytest.raises(ValueError):
        sw_dim_shift(3, 2)


def test_witten_exponent():
    assert witten_exponent(24, -16) == 0
    assert witten_exponent(36, -24) == -1
    assert witten_exponent(48, -32) == -2
    with pytest.raises(ValueError):
        witten_exponent(25, -16)


def test_witten_kernel_and_check():
    m3 = sw_en(3)
    f = m3.lattice.basis_class("f")
    assert witten_kernel(m3) == sinh_c(f)
    series = ManifoldSeries(sinh_c(f), 36, -24)
    assert witten_check(series, m3)
    # corrupt one value: same support, wrong kernel
    bad = SWMap(m3.lattice, {(1,): 2, (-1,): -1}, 36, -24)
    assert not witten_check(series, bad)
    with pytest.raises(ValueError):
        witten_check(ManifoldSeries(sinh_c(f), 36, -24), sw_en(4))  # charnum mismatch
    g_lat = diagonal_lattice(["g"], [0])
    other = ManifoldSeries(sinh_c(g_lat.basis_class("g")), 36, -24)
    with pytest.raises(ValueError):
        witten_check(other, m3)  # lattice mismatch
