import cmath
import math

import numpy as np
import pytest

from hepnc.psk import (
    DifferenceConstellation,
    bit_patterns,
    difference_constellation,
    make_psk,
    make_scheme,
    map_bits,
)


@pytest.mark.parametrize("order", [2, 4, 8, 16, 32])
def test_symmetric_psk_points(order):
    c = make_psk(order)
    assert c.order == order
    assert c.bits_per_symbol == int(math.log2(order))
    pts = c.array()
    assert pts.shape == (order,)
    assert np.allclose(np.abs(pts), 1.0, atol=1e-12)
    # symmetric placement: point k sits at phase (2k+1)*pi/M
    for k in range(order):
        expected = cmath.exp(1j * (2 * k + 1) * math.pi / order)
        assert abs(c.point(k) - expected) < 1e-12


def test_bpsk_is_plus_minus_j():
    c = make_psk(2)
    assert abs(c.point(0) - 1j) < 1e-12
    assert abs(c.point(1) + 1j) < 1e-12


@pytest.mark.parametrize("bad", [0, 1, 3, 6, 12, -4, True])
def test_make_psk_rejects_non_power_of_two(bad):
    with pytest.raises((ValueError, TypeError)):
        make_psk(bad)


def test_map_bits_msb_first():
    c = make_psk(4)
    assert map_bits((0, 0), c) == c.point(0)
    assert map_bits((0, 1), c) == c.point(1)
    assert map_bits((1, 0), c) == c.point(2)
    assert map_bits((1, 1), c) == c.point(3)


def test_map_bits_rejects_wrong_length():
    c = make_psk(8)
    with pytest.raises(ValueError):
        map_bits((0, 1), c)


def test_bit_patterns_natural():
    pats = bit_patterns(8, "natural")
    assert pats.shape == (8, 3)
    for k in range(8):
        assert int("".join(map(str, pats[k])), 2) == k


def test_bit_patterns_gray_adjacent_differ_by_one_bit():
    pats = bit_patterns(16, "gray")
    for k in range(16):
        a, b = pats[k], pats[(k + 1) % 16]
        assert int(np.sum(a != b)) == 1


def test_difference_constellation_matches_brute_force():
    """Closed-form rings must equal the raw pairwise-difference set."""
    for order in (2, 4, 8, 16):
        c = make_psk(order)
        ds = difference_constellation(c)
        brute = [0j]
        for l in range(order):
            for m in range(order):
                if l == m:
                    continue
                v = c.point(l) - c.point(m)
                if not any(abs(v - u) < 1e-9 for u in brute):
                    brute.append(v)
        got = list(ds.values)
        assert len(got) == len(brute)
        for v in got:
            assert any(abs(v - b) < 1e-9 for b in brute)


def test_difference_constellation_ring_structure():
    ds = difference_constellation(make_psk(8))
    assert len(ds.nonzero_values()) == 8 * 8 // 2
    for n in range(1, 5):
        ring = ds.ring(n)
        assert len(ring) == 8
        for p in ring:
            assert abs(p.magnitude - 2 * math.sin(n * math.pi / 8)) < 1e-12


def test_difference_constellation_bpsk_degenerate():
    ds = difference_constellation(make_psk(2))
    vals = sorted(ds.values, key=lambda z: z.imag)
    assert len(vals) == 3
    assert abs(vals[0] + 2j) < 1e-12
    assert abs(vals[1]) < 1e-12
    assert abs(vals[2] - 2j) < 1e-12


def test_difference_values_start_with_zero():
    ds = difference_constellation(make_psk(4))
    assert ds.values[0] == 0j
    assert isinstance(ds, DifferenceConstellation)


def test_scheme_pair_properties():
    sch = make_scheme(8, 2)
    assert (sch.m1, sch.m2) == (8, 2)
    assert sch.delta == 2
    assert sch.label() == "8x2"


def test_scheme_rejects_smaller_first_order():
    with pytest.raises(ValueError):
        make_scheme(2, 4)
