import itertools

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aidct.ring import (
    BASIS,
    INT64_MAX,
    ONE,
    PRODUCT_TENSOR,
    TABLE_I,
    TABLE_I_SCALE,
    Z1,
    Z1Z2,
    Z2,
    ZERO,
    AIQuad,
    basis_product_table,
    decode_array,
    decode_exact,
    default_precision,
    quad_add,
    quad_mul,
    quad_mul_array,
)

from .conftest import oracle_decode, oracle_z

component = st.integers(min_value=-1000, max_value=1000)
quads = st.builds(AIQuad, component, component, component, component)


@pytest.mark.parametrize(
    "p, q, expected",
    [
        ((1, 2, 3, 4), (0, 0, 0, 0), (1, 2, 3, 4)),
        ((1, 0, 0, 0), (0, 1, 0, 0), (1, 1, 0, 0)),
        ((2, -1, 5, 3), (-2, 1, -5, -3), (0, 0, 0, 0)),
    ],
)
def test_quad_add_examples(p, q, expected):
    assert quad_add(AIQuad(*p), AIQuad(*q)) == AIQuad(*expected)


@pytest.mark.parametrize(
    "p, q, expected",
    [
        (Z1, Z2, (0, 0, 0, 1)),
        (Z1, Z1, (4, 0, 0, 1)),
        (Z1Z2, Z1Z2, (8, 0, 0, 0)),
        (Z2, Z2, (4, 0, 0, -1)),
        (Z1, Z1Z2, (0, 2, 2, 0)),
        (Z2, Z1Z2, (0, 2, -2, 0)),
    ],
)
def test_quad_mul_examples(p, q, expected):
    got = quad_mul(p, q)
    assert got == AIQuad(*expected)
    with mpmath.workdps(40):
        assert abs(oracle_decode(expected) - oracle_decode(p) * oracle_decode(q)) < mpmath.mpf(10) ** -30


def test_decode_examples():
    assert decode_exact(ZERO) == 0
    assert mpmath.nstr(decode_exact(Z1Z2, 30), 11) == "2.8284271247"
    assert mpmath.nstr(decode_exact(AIQuad(4, 0, 0, 1), 30), 11) == "6.8284271247"
    with mpmath.workdps(40):
        assert abs(decode_exact(Z1Z2, 30) - 2 * mpmath.sqrt(2)) < mpmath.mpf(10) ** -29


def test_decode_precision_floor():
    with pytest.raises(ValueError):
        decode_exact(ONE, 14)
    assert decode_exact(ONE, 15) == 1


def test_precision_env_override(monkeypatch):
    monkeypatch.setenv("AIDCT_PRECISION", "50")
    assert default_precision() == 50
    monkeypatch.setenv("AIDCT_PRECISION", "10")
    with pytest.raises(ValueError):
        default_precision()


def test_decode_is_deterministic():
    q = AIQuad(3, -7, 11, 5)
    assert decode_exact(q, 30) == decode_exact(q, 30)


def test_overflow_is_reported():
    big = AIQuad(INT64_MAX, 0, 0, 0)
    with pytest.raises(OverflowError):
        quad_add(big, ONE)
    with pytest.raises(OverflowError):
        quad_mul(AIQuad(0, 2**62, 0, 0), Z1)
    with pytest.raises(OverflowError):
        AIQuad(2**63, 0, 0, 0)
    with pytest.raises(TypeError):
        AIQuad(1.5, 0, 0, 0)


def test_basis_table_symmetric():
    table = basis_product_table()
    for i, j in itertools.product(range(4), repeat=2):
        assert table[i][j] == table[j][i]


def test_basis_table_matches_oracle():
    table = basis_product_table()
    with mpmath.workdps(40):
        for i, j in itertools.product(range(4), repeat=2):
            want = oracle_decode(BASIS[i]) * oracle_decode(BASIS[j])
            got = oracle_decode(table[i][j])
            assert mpmath.almosteq(got, want, rel_eps=mpmath.mpf(10) ** -12, abs_eps=0)


def test_product_tensor_matches_table():
    table = basis_product_table()
    for i, j in itertools.product(range(4), repeat=2):
        assert tuple(PRODUCT_TENSOR[i, j]) == table[i][j].astuple()


@pytest.mark.parametrize("p, q, r", list(itertools.product(BASIS, repeat=3)))
def test_basis_commutative_associative(p, q, r):
    assert quad_mul(p, q) == quad_mul(q, p)
    assert quad_mul(quad_mul(p, q), r) == quad_mul(p, quad_mul(q, r))


def test_table_one_encodes_scaled_cosines():
    # keys name the cosine combination; values are 4x that real number
    mpmath.mp.dps, saved = 40, mpmath.mp.dps
    expected = {
        "cos(4pi/16)": mpmath.cos(4 * mpmath.pi / 16),
        "cos(2pi/16)-cos(6pi/16)": mpmath.cos(2 * mpmath.pi / 16) - mpmath.cos(6 * mpmath.pi / 16),
        "cos(6pi/16)": mpmath.cos(6 * mpmath.pi / 16),
        "cos(2pi/16)+cos(6pi/16)": mpmath.cos(2 * mpmath.pi / 16) + mpmath.cos(6 * mpmath.pi / 16),
    }
    assert TABLE_I_SCALE == 4
    for name, q in TABLE_I.items():
        assert abs(oracle_decode(q) - TABLE_I_SCALE * expected[name]) < 1e-25
    mpmath.mp.dps = saved


@settings(max_examples=300, deadline=None)
@given(quads, quads)
def test_ring_homomorphism(p, q):
    dp, dq = decode_exact(p, 30), decode_exact(q, 30)
    with mpmath.workdps(120):
        assert decode_exact(quad_add(p, q), 30) - (dp + dq) == 0
        prod = dp * dq
        assert abs(decode_exact(quad_mul(p, q), 30) - prod) <= 1e-9 * (1 + abs(prod))


@settings(max_examples=200, deadline=None)
@given(quads, quads)
def test_quad_mul_commutes(p, q):
    assert quad_mul(p, q) == quad_mul(q, p)


@settings(max_examples=100, deadline=None)
@given(quads, quads, quads)
def test_quad_mul_associates(p, q, r):
    assert quad_mul(quad_mul(p, q), r) == quad_mul(p, quad_mul(q, r))


@settings(max_examples=100, deadline=None)
@given(st.lists(quads, min_size=1, max_size=16), st.lists(quads, min_size=1, max_size=16))
def test_array_product_matches_scalar(ps, qs):
    n = min(len(ps), len(qs))
    p = np.array([x.astuple() for x in ps[:n]])
    q = np.array([x.astuple() for x in qs[:n]])
    got = quad_mul_array(p, q)
    for k in range(n):
        assert tuple(got[k]) == quad_mul(ps[k], qs[k]).astuple()


def test_decode_array_matches_oracle(rng):
    q = rng.integers(-(10**6), 10**6, size=(200, 4))
    got = decode_array(q, 30)
    for row, value in zip(q, got):
        assert value == pytest.approx(float(oracle_decode(row)), rel=1e-15, abs=1e-9)


def test_z_oracle_agrees_with_radicals():
    z1, z2, _ = oracle_z()
    with mpmath.workdps(40):
        r2 = mpmath.sqrt(2)
        assert abs(z1 - (mpmath.sqrt(2 + r2) + mpmath.sqrt(2 - r2))) < mpmath.mpf(10) ** -35
        assert abs(z2 - (mpmath.sqrt(2 + r2) - mpmath.sqrt(2 - r2))) < mpmath.mpf(10) ** -35
