import math

import numpy as np
import pytest

from quathol import diffops, quadrature
from quathol.fields import random_polynomial_field
from quathol.quadrature import (
    ball4_volume_rule,
    ball_volume,
    box4_volume_rule,
    chunked_sum,
    integrate_pair,
    integrate_scalar,
    load_rule,
    pairwise_sum,
    punctured_ball_rule,
    save_rule,
    sigma_at,
    sphere3_surface_rule,
    sphere_area,
)
from quathol.quaternion import Quaternion, ThetaFrame, ThetaPoint, pair_mul

RNG = np.random.default_rng(11)
FRAME = ThetaFrame(0.6)
ORIGIN = ThetaPoint.from_coords(FRAME, [0, 0, 0, 0])


def even_moment_oracle(radius, exponents):
    """Analytic ball moment of prod c_k^(2 a_k) via sphere gamma moments."""
    a = exponents
    p = sum(a)
    sphere = 2.0 * math.prod(math.gamma(ai + 0.5) for ai in a) / math.gamma(p + 2)
    return sphere * radius ** (2 * p + 4) / (2 * p + 4)


def node_coords(rule):
    return np.column_stack([rule.w1.real, rule.w1.imag, rule.w2.real, rule.w2.imag])


def test_ball_volume_and_basic_moments():
    rule = ball4_volume_rule(ORIGIN, 1.0, level=6)
    assert abs(rule.total_weight() - math.pi ** 2 / 2) <= 1e-12
    c = node_coords(rule)
    assert abs(integrate_scalar(rule, c[:, 0])) <= 1e-12
    r2 = np.sum(c * c, axis=1)
    assert abs(integrate_scalar(rule, r2) - math.pi ** 2 / 3) <= 1e-12


def test_ball_polynomial_exactness_matches_declared_degree():
    level = 5
    rule = ball4_volume_rule(ORIGIN, 0.8, level=level)
    assert rule.descriptor["degree"] == 2 * level
    c = node_coords(rule)
    for _ in range(12):
        a = RNG.integers(0, 3, size=4)
        while 2 * int(a.sum()) > 2 * level:
            a = RNG.integers(0, 3, size=4)
        vals = np.prod(c ** (2 * a), axis=1)
        expect = even_moment_oracle(0.8, list(map(int, a)))
        assert abs(integrate_scalar(rule, vals) - expect) <= 1e-12 * max(1.0, expect)
    # odd powers integrate to exact zero by symmetry
    vals = c[:, 0] ** 3 * c[:, 2] ** 2
    assert abs(integrate_scalar(rule, vals)) <= 1e-13


def test_ball_rule_offcenter_and_node_count():
    center = ThetaPoint.from_coords(FRAME, [0.3, -0.2, 0.1, 0.5])
    rule = ball4_volume_rule(center, 0.5, level=4)
    assert abs(rule.total_weight() - ball_volume(0.5)) <= 1e-12
    assert rule.n_nodes == (4 + 2) * (4 + 1) * (2 * 4 + 1) ** 2
    d = rule.distances_to(center)
    assert np.all(d > 0.0)
    assert np.all(d <= 0.5 + 1e-12)


def test_smooth_integrand_convergence():
    def f(rule):
        c = node_coords(rule)
        return np.exp(c[:, 0]) * np.cos(c[:, 1] + 0.5 * c[:, 3])

    ref = integrate_scalar(ball4_volume_rule(ORIGIN, 1.0, 16), f(ball4_volume_rule(ORIGIN, 1.0, 16)))
    errs = []
    for level in (3, 4, 5, 6):
        rule = ball4_volume_rule(ORIGIN, 1.0, level)
        errs.append(abs(integrate_scalar(rule, f(rule)) - ref))
    for e1, e2, lo, hi in zip(errs, errs[1:], (3, 4, 5), (4, 5, 6)):
        if e2 < 1e-15:
            continue
        order = math.log(e1 / e2) / math.log(hi / lo)
        assert order >= 4.0


def test_box_rule():
    bounds = [[-0.5, 0.5], [0.0, 1.0], [-1.0, 0.25], [0.2, 0.9]]
    rule = box4_volume_rule(FRAME, bounds, level=3)
    vol = math.prod(hi - lo for lo, hi in bounds)
    assert abs(rule.total_weight() - vol) <= 1e-12
    c = node_coords(rule)
    got = integrate_scalar(rule, c[:, 1] ** 2)
    expect = vol / (bounds[1][1] - bounds[1][0]) * (bounds[1][1] ** 3 - bounds[1][0] ** 3) / 3
    assert abs(got - expect) <= 1e-12


def test_sphere_area_and_moments():
    rule = sphere3_surface_rule(ORIGIN, 1.0, level=6)
    assert abs(rule.total_weight() - 2 * math.pi ** 2) <= 1e-11
    assert abs(rule.total_weight() - sphere_area(1.0)) <= 1e-11
    c = node_coords(rule)
    assert abs(integrate_scalar(rule, c[:, 0])) <= 1e-13
    assert abs(integrate_scalar(rule, c[:, 0] ** 2) - math.pi ** 2 / 2) <= 1e-11


def test_sphere_normals():
    center = ThetaPoint.from_coords(FRAME, [0.1, 0.2, -0.3, 0.0])
    rule = sphere3_surface_rule(center, 0.7, level=5)
    norms = np.linalg.norm(rule.normals, axis=1)
    assert np.max(np.abs(norms - 1.0)) <= 1e-13
    outward = np.einsum("ij,ij->i", rule.normals, node_coords(rule) - center.c)
    assert np.all(outward > 0.0)


def test_sigma_at_and_closed_surface():
    rule = sphere3_surface_rule(ORIGIN, 1.0, level=4)
    # node with normal ~ (1, 0, 0, 0) maps to weight * 1
    idx = int(np.argmax(rule.normals[:, 0]))
    nu = sigma_at(rule, idx)
    n = rule.normals[idx]
    expect = FRAME.embed(n) * rule.weights[idx]
    assert (nu - expect).norm() <= 1e-14
    with pytest.raises(IndexError):
        sigma_at(rule, rule.n_nodes)
    # closed-surface area form sums to the zero quaternion
    a, b = rule.sigma_pairs()
    total = integrate_pair(rule, (a, b))
    assert total.norm() <= 1e-12


def test_punctured_rule():
    rule = ball4_volume_rule(ORIGIN, 1.0, level=8)
    outside = ThetaPoint.from_coords(FRAME, [2.0, 0, 0, 0])
    same = punctured_ball_rule(rule, outside, 0.25)
    assert same.n_nodes == rule.n_nodes
    tiny = punctured_ball_rule(rule, ORIGIN, 1e-9)
    assert tiny.n_nodes == rule.n_nodes

    with pytest.raises(ValueError):
        punctured_ball_rule(rule, ORIGIN, 10.0)

    eps = 0.1
    cut = punctured_ball_rule(rule, ORIGIN, eps)
    assert cut.descriptor["excised_weight"] > 0.0
    r = np.sqrt(np.abs(cut.w1) ** 2 + np.abs(cut.w2) ** 2)
    got = integrate_scalar(cut, r ** -3.0)
    expect = 2 * math.pi ** 2 * (1 - eps)
    assert abs(got - expect) <= 0.03 * expect


def test_stokes_identity_polynomial_exact():
    # boundary vs volume for random polynomial fields: product-rule exactness
    # makes the residual pure roundoff
    center = ThetaPoint.from_coords(FRAME, [0.05, 0.0, -0.1, 0.2])
    vol = ball4_volume_rule(center, 0.6, level=5)
    surf = sphere3_surface_rule(center, 0.6, level=5)
    f = random_polynomial_field(FRAME, 2, RNG)
    g = random_polynomial_field(FRAME, 2, RNG)

    sa, sb = surf.sigma_pairs()
    g1, g2 = g.pair(surf.w1, surf.w2)
    f1, f2 = f.pair(surf.w1, surf.w2)
    t1, t2 = pair_mul(g1, g2, sa, sb)
    t1, t2 = pair_mul(t1, t2, f1, f2)
    lhs = integrate_pair(surf, (t1, t2))

    df = diffops.d_left_grid(f, FRAME, vol.w1, vol.w2)
    drg = diffops.d_right_grid(g, FRAME, vol.w1, vol.w2)
    gv = g.pair(vol.w1, vol.w2)
    fv = f.pair(vol.w1, vol.w2)
    a1, a2 = pair_mul(gv[0], gv[1], df[0], df[1])
    b1, b2 = pair_mul(drg[0], drg[1], fv[0], fv[1])
    rhs = integrate_pair(vol, (a1 + b1, a2 + b2))
    scale = max(1.0, lhs.norm())
    assert (lhs - rhs).norm() <= 1e-10 * scale


def test_pairwise_sum_deterministic_and_accurate():
    x = RNG.normal(size=100001)
    s1 = pairwise_sum(x)
    s2 = pairwise_sum(x.copy())
    assert s1 == s2
    assert abs(s1 - math.fsum(x)) <= 1e-9
    assert pairwise_sum(np.zeros(0)) == 0.0
    assert chunked_sum(x, 1) == s1
    assert abs(chunked_sum(x, 7) - s1) <= 1e-9


def test_rule_serialization_roundtrip(tmp_path):
    vol = ball4_volume_rule(ORIGIN, 0.9, level=3)
    path = tmp_path / "vol.qrule"
    save_rule(vol, path)
    back = load_rule(path)
    assert back.kind == "volume"
    assert back.frame == FRAME
    assert np.array_equal(back.weights, vol.weights)
    assert np.array_equal(back.w1, vol.w1)
    assert back.descriptor["radius"] == vol.descriptor["radius"]

    surf = sphere3_surface_rule(ORIGIN, 0.9, level=3)
    spath = tmp_path / "surf.qrule"
    save_rule(surf, spath)
    sback = load_rule(spath)
    assert sback.kind == "surface"
    assert np.array_equal(sback.normals, surf.normals)
    assert np.array_equal(sback.weights, surf.weights)
