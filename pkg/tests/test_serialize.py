import json
import warnings
from fractions import Fraction

import pytest

from blowdown.catalog import donaldson_closed_form, sw_closed_form
from blowdown.exppoly import ExpKernel
from blowdown.lattice import IntersectionLattice
from blowdown.serialize import (
    blowdown_to_obj,
    fraction_parse,
    fraction_str,
    kernel_from_obj,
    kernel_to_obj,
    lattice_from_obj,
    lattice_to_obj,
    series_from_obj,
    series_to_obj,
    swmap_from_obj,
    swmap_to_obj,
)


def test_fraction_strings():
    assert fraction_str(Fraction(3)) == "3"
    assert fraction_str(Fraction(-7, 2)) == "-7/2"
    assert fraction_str(5) == "5"
    assert fraction_parse("3") == 3
    assert fraction_parse("-7/2") == Fraction(-7, 2)
    assert fraction_parse(4) == 4
    with pytest.raises(ValueError):
        fraction_parse("a/b")


def test_lattice_roundtrip():
    lat = IntersectionLattice(["f", "s"], [[0, 1], [1, -4]])
    obj = lattice_to_obj(lat)
    assert obj["basis"] == ["f", "s"]
    assert lattice_from_obj(obj) == lat
    # rational gram entries serialize as strings
    half = IntersectionLattice(["x"], [[Fraction(1, 2)]])
    assert lattice_from_obj(lattice_to_obj(half)) == half


def test_kernel_and_series_roundtrip():
    for s in ("E(2;2,3)", "W(3)", "Y(5)"):
        m = donaldson_closed_form(s)
        assert kernel_from_obj(kernel_to_obj(m.kernel)) == m.kernel
        back = series_from_obj(series_to_obj(m))
        assert back == m
        # object survives JSON text encoding
        again = series_from_obj(json.loads(json.dumps(series_to_obj(m))))
        assert again == m


def test_swmap_roundtrip():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for s in ("E(2;3)", "W(2)", "H(5)"):
            m = sw_closed_form(s)
            back = swmap_from_obj(json.loads(json.dumps(swmap_to_obj(m))))
            assert back == m


def test_blowdown_obj_shape():
    from blowdown.catalog import _elliptic_on, _w_ambient
    from blowdown.lattice import ChainConfig
    from blowdown.transform import taut_blowdown

    m = _elliptic_on(_w_ambient(1), 4)
    res = taut_blowdown(m, ChainConfig(2, m.lattice, [m.lattice.basis_class("s1")]), ["k"])
    obj = blowdown_to_obj(res)
    assert set(obj) == {"series", "class_map"}
    statuses = {rec["status"] for rec in obj["class_map"]}
    assert statuses == {"kept", "dropped"}
    kept = next(r for r in obj["class_map"] if r["status"] == "kept")
    assert set(kept) == {"source", "status", "residue", "extension", "image"}
    json.dumps(obj)  # fully JSON-encodable
