import math

import numpy as np
import pytest

from quathol import diffops
from quathol.diffops import DomainMarginError, Stencil
from quathol.fields import (
    Field,
    constant_field,
    coordinate_field,
    holomorphic_monomial,
    polynomial_field,
    random_polynomial_field,
    right_scaled,
    u_hyperholomorphic_from,
)
from quathol.quaternion import I, J, K, ONE, Quaternion, ThetaFrame, ThetaPoint

RNG = np.random.default_rng(7)
FRAME = ThetaFrame(0.8)
P0 = ThetaPoint.from_coords(FRAME, [0.12, -0.31, 0.27, 0.05])


class _Ball:
    def __init__(self, center, radius):
        self.center = center
        self.radius = radius


def test_d_left_constant_is_zero():
    f = constant_field(FRAME, Quaternion(3, -1, 2, 7))
    assert diffops.d_left(f, FRAME, P0).norm() <= 1e-12


def test_d_left_kills_holomorphic_monomial_every_theta():
    for theta in (0.0, 1.1, 2.9, 4.2):
        frame = ThetaFrame(theta)
        p = ThetaPoint.from_coords(frame, [0.4, 0.1, -0.2, 0.3])
        f = holomorphic_monomial(2, 1).as_field(frame)
        assert diffops.d_left(f, frame, p).norm() <= 1e-10
        fd = diffops.d_left(f, frame, p, use_analytic=False)
        assert fd.norm() <= 1e-5


def test_d_left_coordinate():
    f = coordinate_field(FRAME, 0)
    assert (diffops.d_left(f, FRAME, P0) - ONE).norm() <= 1e-12
    # d c1 -> psi1 = i, d c2 -> psi2, d c3 -> psi3
    for k in (1, 2, 3):
        g = coordinate_field(FRAME, k)
        assert (diffops.d_left(g, FRAME, P0) - FRAME.psi[k]).norm() <= 1e-12


def test_d_right_constant_and_coordinates():
    f = constant_field(FRAME, Quaternion(1, 1, 1, 1))
    assert diffops.d_right(f, FRAME, P0).norm() <= 1e-12
    # z1 is annihilated on the right: 1 + i*i = 0
    z1 = holomorphic_monomial(1, 0).as_field(FRAME)
    assert diffops.d_right(z1, FRAME, P0).norm() <= 1e-10


def test_d_right_z2_and_z2bar():
    # conj(z2) is right-annihilated; z2 itself gives 2 i e^{i theta} j
    def pair_conj_z2(w1, w2):
        return np.conjugate(w2), np.zeros_like(w2)

    fbar = Field(FRAME, pair_conj_z2)
    assert diffops.d_right(fbar, FRAME, P0).norm() <= 1e-9

    z2 = holomorphic_monomial(0, 1).as_field(FRAME)
    expect = 2.0 * (I * Quaternion.from_pair(FRAME.phase, 0) * J)
    got = diffops.d_right(z2, FRAME, P0)
    assert (got - expect).norm() <= 1e-9


def test_d_u_reduces_and_shifts():
    u = Quaternion(0.3, -0.2, 0.5, 0.1)
    f = random_polynomial_field(FRAME, 2, RNG)
    assert (diffops.d_u_left(f, Quaternion(), FRAME, P0)
            - diffops.d_left(f, FRAME, P0)).norm() <= 1e-13
    one = constant_field(FRAME, ONE)
    assert (diffops.d_u_left(one, u, FRAME, P0) - u).norm() <= 1e-12
    assert (diffops.d_r_u(one, u, FRAME, P0) - u).norm() <= 1e-12


def test_d_u_kills_exponential_images():
    u = Quaternion(0.4, 0.7, -0.3, 0.2)
    h = holomorphic_monomial(1, 0).as_field(FRAME)
    f = u_hyperholomorphic_from(h, u)
    assert diffops.d_u_left(f, u, FRAME, P0).norm() <= 1e-12  # analytic partials
    st = Stencil(h=1e-3)
    assert diffops.d_u_left(f, u, FRAME, P0, st, use_analytic=False).norm() <= 1e-5


def test_d_conj_left():
    f = constant_field(FRAME, Quaternion(1, 2, 3, 4))
    assert diffops.d_conj_left(f, FRAME, P0).norm() <= 1e-12
    c1 = coordinate_field(FRAME, 1)
    assert (diffops.d_conj_left(c1, FRAME, P0) + I).norm() <= 1e-12


def test_laplacian_basics():
    harmonic = polynomial_field(FRAME, {(2, 0, 0, 0): ONE, (0, 2, 0, 0): -ONE})
    assert diffops.laplacian(harmonic, P0).norm() <= 1e-8
    csq = polynomial_field(FRAME, {(2, 0, 0, 0): ONE})
    assert (diffops.laplacian(csq, P0) - Quaternion(2)).norm() <= 1e-7
    norm2 = polynomial_field(FRAME, {(2, 0, 0, 0): ONE, (0, 2, 0, 0): ONE,
                                     (0, 0, 2, 0): ONE, (0, 0, 0, 2): ONE})
    assert (diffops.laplacian(norm2, P0) - Quaternion(8)).norm() <= 1e-7


def _factorization_gap(f, point, h, right=False):
    st = Stencil(h=h)
    inner = diffops.d_conj_right_grid if right else diffops.d_conj_left_grid
    g = Field(FRAME, diffops.operator_pair_fn(inner, f, FRAME, st, use_analytic=False))
    outer = diffops.d_right if right else diffops.d_left
    dd = outer(g, FRAME, point, st, use_analytic=False)
    lap = diffops.laplacian(f, point, Stencil(h=1e-4))
    return (dd - lap).norm()


def test_laplacian_factorization_left_and_right():
    f = polynomial_field(FRAME, {
        (3, 0, 0, 0): Quaternion(1, 0.5, 0, 0),
        (0, 2, 1, 0): Quaternion(0, 1, -1, 2),
        (1, 1, 1, 1): Quaternion(0.3, 0, 0.7, 0),
        (0, 0, 0, 4): Quaternion(0, 0, 0, 1),
    })
    for right in (False, True):
        g1 = _factorization_gap(f, P0, 2e-2, right)
        g2 = _factorization_gap(f, P0, 1e-2, right)
        assert g2 <= 1e-3
        ratio = g1 / g2
        assert 2.5 <= ratio <= 6.0


def test_transcendental_factorization():
    # f = e^{c0} sin(c1), harmonic in (c0, c1)
    def pair(w1, w2):
        return np.exp(w1.real) * np.sin(w1.imag) + 0j * w1, np.zeros_like(w1)

    f = Field(FRAME, pair)
    st = Stencil(h=1e-3)
    g = Field(FRAME, diffops.operator_pair_fn(diffops.d_conj_left_grid, f, FRAME, st))
    dd = diffops.d_left(g, FRAME, P0, st)
    lap = diffops.laplacian(f, P0, st)
    assert (dd - lap).norm() <= 1e-5


def test_right_scalar_linearity():
    f = random_polynomial_field(FRAME, 3, RNG)
    q = Quaternion(0.2, -1.0, 0.4, 0.9)
    lhs = diffops.d_left(right_scaled(f, q), FRAME, P0)
    rhs = diffops.d_left(f, FRAME, P0) * q
    assert (lhs - rhs).norm() <= 1e-10 * max(1.0, rhs.norm())


def test_order4_stencil_is_more_accurate():
    def pair(w1, w2):
        return np.exp(w1.real + 0.5 * w2.imag) + 0j * w1, np.zeros_like(w1)

    f = Field(FRAME, pair)
    e2 = diffops.d_left(f, FRAME, P0, Stencil(h=1e-2, order=2), use_analytic=False)
    e4 = diffops.d_left(f, FRAME, P0, Stencil(h=1e-2, order=4), use_analytic=False)
    exact = diffops.d_left(f, FRAME, P0, Stencil(h=1e-5, order=4), use_analytic=False)
    assert (e4 - exact).norm() < (e2 - exact).norm()


def test_margin_check():
    ball = _Ball(ThetaPoint.from_coords(FRAME, [0, 0, 0, 0]), 0.3)
    f = constant_field(FRAME, ONE)
    edge = ThetaPoint.from_coords(FRAME, [0.2999, 0, 0, 0])
    with pytest.raises(DomainMarginError):
        diffops.d_left(f, FRAME, edge, Stencil(h=1e-3), domain=ball)
    inside = ThetaPoint.from_coords(FRAME, [0.1, 0, 0, 0])
    diffops.d_left(f, FRAME, inside, Stencil(h=1e-3), domain=ball)


def test_stencil_validation():
    with pytest.raises(ValueError):
        Stencil(h=-1.0)
    with pytest.raises(ValueError):
        Stencil(order=3)
