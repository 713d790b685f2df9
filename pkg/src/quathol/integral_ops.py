"""Cauchy kernels, boundary/volume integral identities and the volume
potential transform.

Kernel convention.  The unweighted kernel used everywhere is

    K(x) = conj(x) / (2 pi^2 |x|^4),

whose chart form at x = q1 + i e^{i theta} j q2 is
[conj(q1) - i e^{i theta} conj(q2) j] / (2 pi^2 |x|^4).  With the
discretized area form (sum_k n_k psi_k) dS this is the unique phase that
reproduces boundary values for every frame angle; it also factors through
the Laplacian fundamental solution, which the volume-moment identity
below exploits.  The weighted kernel multiplies by the real scalar
e^{<u, x>}.

Orientation.  Boundary formulas (Cauchy, Borel-Pompieu, Stokes) use
K(zeta - z); the volume potential that right-inverts the perturbed
operator must use K(z - zeta), i.e. the negative of the boundary kernel.
Both orientations are checked against each other by the test suite.

Weakly singular volume integrals are handled by singularity subtraction
(the subtracted mean reduces to a smooth boundary integral), a small
fixed excision whose node mask is shared across finite-difference
stencils, and two-point Richardson extrapolation in the excision radius.
"""

from __future__ import annotations

import math

import numpy as np

from . import diffops
from .diffops import DomainMarginError, Stencil
from .fields import Field, polynomial_field
from .quaternion import (
    Quaternion,
    ThetaPoint,
    exp_weight_grid,
    pair_mul,
    pairing_grid,
)
from .quadrature import (
    chunked_sum,
    integrate_pair,
    sphere3_surface_rule,
)

TWO_PI_SQ = 2.0 * math.pi ** 2


class CoincidentPointError(ZeroDivisionError):
    """Kernel evaluated at coincident points."""


class KernelSpec:
    """Frame plus perturbation parameter u of the kernel family.

    The complex parameters (alpha, beta) are the chart coordinates of u:
    u = alpha + i e^{i theta} j beta.  Both views address the same u.
    """

    def __init__(self, frame, u=None):
        self.frame = frame
        self.u = u if u is not None else Quaternion()

    @classmethod
    def from_alpha_beta(cls, frame, alpha, beta):
        u = ThetaPoint.from_pair(frame, alpha, beta).embed()
        return cls(frame, u)

    @property
    def alpha_beta(self):
        c = self.frame.coords(self.u)
        return complex(c[0], c[1]), complex(c[2], c[3])

    def __repr__(self):
        return "KernelSpec(theta=%g, u=%r)" % (self.frame.theta, self.u)


def _diff_pairs(z, w1, w2):
    z1, z2 = z.pair
    return np.asarray(w1, dtype=complex) - z1, np.asarray(w2, dtype=complex) - z2


def kernel_pairs(spec, w1, w2, z, orientation=+1):
    """Weighted kernel e^{<u, zeta-z>} K(+-(zeta - z)) at chart nodes.

    orientation +1 is the boundary kernel K(zeta - z), -1 the volume
    potential kernel K(z - zeta).
    """
    q1, q2 = _diff_pairs(z, w1, w2)
    r2 = np.abs(q1) ** 2 + np.abs(q2) ** 2
    if np.min(r2) == 0.0:
        raise CoincidentPointError("kernel requires zeta != z")
    weight = exp_weight_grid(spec.u, spec.frame, q1, q2)
    scale = orientation * weight / (TWO_PI_SQ * r2 * r2)
    a = scale * np.conjugate(q1)
    b = scale * (-1j * spec.frame.phase) * np.conjugate(q2)
    return a, b


def cauchy_kernel(spec, zeta, z):
    """K^u(zeta - z) as a Quaternion."""
    w1, w2 = zeta.pair
    a, b = kernel_pairs(spec, np.asarray(w1), np.asarray(w2), z)
    return Quaternion.from_pair(complex(a), complex(b))


def kernel_K1_K2(spec, zeta, z):
    """Complex-pair split of the weighted kernel for complex data.

    Returns (K1, K2) with K1 = W conj(d1), K2 = W conj(d2), where
    (d1, d2) is the chart difference and W the weighted scalar prefactor;
    the quaternionic kernel decomposes as K = K1 - i e^{i theta} j conj(K2).
    """
    z1w, z2w = zeta.pair
    q1, q2 = _diff_pairs(z, np.asarray(z1w), np.asarray(z2w))
    r2 = np.abs(q1) ** 2 + np.abs(q2) ** 2
    if np.min(r2) == 0.0:
        raise CoincidentPointError("kernel requires zeta != z")
    weight = exp_weight_grid(spec.u, spec.frame, q1, q2)
    scale = weight / (TWO_PI_SQ * r2 * r2)
    return complex(scale * np.conjugate(q1)), complex(scale * np.conjugate(q2))


def cauchy_kernel_field(spec, z0, orientation=+1):
    """zeta -> K^u(zeta - z0) as a Field (partials left to stencils)."""
    def pair(w1, w2):
        return kernel_pairs(spec, w1, w2, z0, orientation)

    return Field(spec.frame, pair, smoothness="Cinf")


def _require_off_surface(surface, z):
    d = surface.descriptor
    center = ThetaPoint.from_coords(surface.frame, d["center"])
    gap = abs(z.distance(center) - d["radius"])
    if gap < surface.spacing:
        raise DomainMarginError(
            "probe within %g of the surface; node spacing is %g" % (gap, surface.spacing))


def cauchy_integral(spec, f, surface, z, chunks=1):
    """Boundary reproduction integral: sum K^u(zeta-z) sigma(zeta) f(zeta).

    Converges to f(z) for certified kernel-class fields at interior z and
    to 0 at exterior z.
    """
    _require_off_surface(surface, z)
    ka, kb = kernel_pairs(spec, surface.w1, surface.w2, z)
    sa, sb = surface.sigma_pairs()
    f1, f2 = f.pair(surface.w1, surface.w2)
    t1, t2 = pair_mul(ka, kb, sa, sb)
    t1, t2 = pair_mul(t1, t2, f1, f2)
    t1 = t1 * surface.weights
    t2 = t2 * surface.weights
    return Quaternion.from_pair(complex(chunked_sum(t1, chunks)), complex(chunked_sum(t2, chunks)))


# ---------------------------------------------------------------------------
# volume potential machinery
# ---------------------------------------------------------------------------

def _ball_boundary_rule(volume):
    d = volume.descriptor
    if d.get("kind") != "ball":
        raise ValueError("volume-moment subtraction needs a ball rule")
    center = ThetaPoint.from_coords(volume.frame, d["center"])
    return sphere3_surface_rule(center, d["radius"], d["level"])


def kernel_volume_moment(boundary, z, orientation=+1):
    """integral over the ball of K(+-(zeta - z)) d mu, as a boundary integral.

    K = (conjugate basis gradient) of the Laplacian fundamental solution
    -1/(4 pi^2 |x|^2), so the divergence theorem turns the weakly singular
    volume integral into a smooth boundary one:

        int_Omega K(zeta - z) dmu = -(1/4 pi^2) int_bd conj(m)/|zeta-z|^2 dS.
    """
    q1, q2 = _diff_pairs(z, boundary.w1, boundary.w2)
    r2 = np.abs(q1) ** 2 + np.abs(q2) ** 2
    sa, sb = boundary.sigma_pairs()  # embedded normal times 1 (weights separate)
    ca, cb = np.conjugate(sa), -sb
    scale = -orientation / (2.0 * TWO_PI_SQ * r2)
    return integrate_pair(boundary, (scale * ca, scale * cb))


def _default_epsilon(volume):
    return 3.0 * volume.descriptor.get("spacing", 0.05)


def teodorescu(spec, f, volume, z, epsilon=None, mask_center=None,
               richardson=True, subtract=True, chunks=1):
    """Volume potential T f(z) = int e^{<u, zeta-z>} K(z - zeta) f(zeta) dmu.

    This orientation makes the perturbed left operator a left inverse:
    D_u (T f) = f.  `mask_center` fixes the excision mask at a reference
    point so stencil sweeps see a z-independent node set.
    """
    if epsilon is None:
        epsilon = _default_epsilon(volume)
    center = mask_center if mask_center is not None else z
    dist = volume.distances_to(center)

    ka, kb = kernel_pairs(spec, volume.w1, volume.w2, z, orientation=-1)
    f1, f2 = f.pair(volume.w1, volume.w2)
    if subtract:
        # integrate K(z-zeta) (g(zeta) - g(z)) with g = e^{<u, zeta-z>} f;
        # the subtracted mean is an exact smooth boundary integral
        g0a, g0b = f.value_pair(z)
        w = exp_weight_grid(spec.u, spec.frame, *_diff_pairs(z, volume.w1, volume.w2))
        # K already carries the weight; divide it out of the constant part
        base = kernel_pairs(spec, volume.w1, volume.w2, z, orientation=-1)
        unweighted_a = base[0] / w
        unweighted_b = base[1] / w
        t1, t2 = pair_mul(ka, kb, f1, f2)
        c1, c2 = pair_mul(unweighted_a, unweighted_b,
                          np.full_like(t1, g0a), np.full_like(t2, g0b))
        i1 = (t1 - c1) * volume.weights
        i2 = (t2 - c2) * volume.weights
    else:
        t1, t2 = pair_mul(ka, kb, f1, f2)
        i1 = t1 * volume.weights
        i2 = t2 * volume.weights

    def masked_sum(eps):
        keep = dist > eps
        if not np.any(keep):
            raise ValueError("excision at epsilon=%g leaves no nodes" % eps)
        return (complex(chunked_sum(i1[keep], chunks)),
                complex(chunked_sum(i2[keep], chunks)))

    s1, s2 = masked_sum(epsilon)
    if richardson:
        d1, d2 = masked_sum(2.0 * epsilon)
        s1 = (4.0 * s1 - d1) / 3.0
        s2 = (4.0 * s2 - d2) / 3.0
    value = Quaternion.from_pair(s1, s2)

    if subtract:
        boundary = _ball_boundary_rule(volume)
        moment = kernel_volume_moment(boundary, z, orientation=-1)
        value = value + Quaternion.from_pair(g0a, g0b).__rmul__(1.0) * 0 + _left_mul_pair(moment, (g0a, g0b))
    return value


def _left_mul_pair(q, pair):
    a, b = pair_mul(q.z1, q.z2, pair[0], pair[1])
    return Quaternion.from_pair(complex(a), complex(b))


def du_teodorescu_residual(spec, f, volume, z, stencil=None, epsilon=None,
                           richardson=True):
    """Relative error of D_u(T f)(z) against f(z).

    T is evaluated on the finite-difference stencil with a shared
    excision mask centered at z, then the perturbed operator is assembled
    from those quaternion values.
    """
    if stencil is None:
        stencil = Stencil()
    h = stencil.h

    def T_at(point):
        return teodorescu(spec, f, volume, point, epsilon=epsilon,
                          mask_center=z, richardson=richardson)

    parts = []
    for k in range(4):
        plus = T_at(z.shifted(k, +h))
        minus = T_at(z.shifted(k, -h))
        diff = (plus - minus) * (0.5 / h)
        parts.append((diff.z1, diff.z2))
    da, db = 0j, 0j
    e = spec.frame.phase
    basis = ((1.0, 0.0), (1j, 0.0), (0.0, 1j * e), (0.0, e))
    for (A, B), (g1, g2) in zip(basis, parts):
        a, b = pair_mul(A, B, g1, g2)
        da += a
        db += b
    tz = T_at(z)
    ua, ub = pair_mul(spec.u.z1, spec.u.z2, tz.z1, tz.z2)
    got = Quaternion.from_pair(complex(da + ua), complex(db + ub))
    want = f.at(z)
    return (got - want).norm(), want.norm()


def borel_pompieu_residual(spec, f, surface, volume, z, stencil=None,
                           epsilon=None, richardson=True, chunks=1):
    """|boundary term - volume term - f(z)| for arbitrary C1 fields.

    The volume term integrates K^u(zeta-z) (D_u f)(zeta) with the same
    subtraction-plus-excision scheme as the volume potential.
    """
    surf_term = cauchy_integral(spec, f, surface, z, chunks=chunks)

    if epsilon is None:
        epsilon = _default_epsilon(volume)
    dist = volume.distances_to(z)
    ka, kb = kernel_pairs(spec, volume.w1, volume.w2, z, orientation=+1)
    df = diffops.d_u_left_grid(f, spec.u, spec.frame, volume.w1, volume.w2,
                               stencil=stencil)
    q = diffops.d_u_left(f, spec.u, spec.frame, z, stencil=stencil)
    g0 = (q.z1, q.z2)
    w = exp_weight_grid(spec.u, spec.frame, *_diff_pairs(z, volume.w1, volume.w2))
    t1, t2 = pair_mul(ka, kb, df[0], df[1])
    c1, c2 = pair_mul(ka / w, kb / w, np.full_like(t1, g0[0]), np.full_like(t2, g0[1]))
    i1 = (t1 - c1) * volume.weights
    i2 = (t2 - c2) * volume.weights

    def masked(eps):
        keep = dist > eps
        return complex(chunked_sum(i1[keep], chunks)), complex(chunked_sum(i2[keep], chunks))

    s1, s2 = masked(epsilon)
    if richardson:
        d1, d2 = masked(2.0 * epsilon)
        s1 = (4.0 * s1 - d1) / 3.0
        s2 = (4.0 * s2 - d2) / 3.0
    vol_term = Quaternion.from_pair(s1, s2)
    boundary = _ball_boundary_rule(volume)
    moment = kernel_volume_moment(boundary, z, orientation=+1)
    vol_term = vol_term + _left_mul_pair(moment, g0)

    return (surf_term - vol_term - f.at(z)).norm()


def t_split(spec, f, volume, z, epsilon=None, richardson=True):
    """Componentwise volume potential (T1, T2) with T f = T1 + T2 j.

    The split is algebraic: the two complex components of the quaternion
    integrand are accumulated separately over the same excised nodes.
    """
    if epsilon is None:
        epsilon = _default_epsilon(volume)
    q1, q2 = _diff_pairs(z, volume.w1, volume.w2)
    r2 = np.abs(q1) ** 2 + np.abs(q2) ** 2
    weight = exp_weight_grid(spec.u, spec.frame, q1, q2)
    W = weight / (TWO_PI_SQ * r2 * r2)
    f1, f2 = f.pair(volume.w1, volume.w2)
    e = spec.frame.phase
    integ1 = -W * (np.conjugate(q1) * f1 + 1j * e * np.conjugate(q2) * np.conjugate(f2))
    integ2 = -W * (np.conjugate(q1) * f2 - 1j * e * np.conjugate(q2) * np.conjugate(f1))
    dist = volume.distances_to(z)

    def masked(eps):
        keep = dist > eps
        if not np.any(keep):
            raise ValueError("excision at epsilon=%g leaves no nodes" % eps)
        w = volume.weights[keep]
        return (complex(chunked_sum(integ1[keep] * w, 1)),
                complex(chunked_sum(integ2[keep] * w, 1)))

    s1, s2 = masked(epsilon)
    if richardson:
        d1, d2 = masked(2.0 * epsilon)
        s1 = (4.0 * s1 - d1) / 3.0
        s2 = (4.0 * s2 - d2) / 3.0
    return s1, s2


def t_pair_alpha_beta(spec, F, volume, z, epsilon=None, mask_center=None,
                      richardson=True):
    """The two complex potentials attached to a C-valued density.

    (T1, T2) are the complex components of the quaternionic volume
    potential of F viewed as a field with vanishing j-part, reported in
    the split normalization T1 = -int K1 F dmu, T2 = -int K2 conj(F) dmu
    (K1, K2 the complex kernel pair).  They satisfy the first-order
    inverse system checked by `t_pair_system_residual`.
    """
    f = F.as_field(spec.frame) if hasattr(F, "as_field") else F
    value = teodorescu(spec, f, volume, z, epsilon=epsilon,
                       mask_center=mask_center, richardson=richardson)
    # value = T1 + (i e^{i theta} T2^) j with T2^ = -i e^{-i theta} * (j part)
    t1 = value.z1
    t2 = complex(1j * np.conjugate(spec.frame.phase) * value.z2) * -1.0
    t2 = -t2
    return t1, t2


def t_pair_system_residual(spec, F, volume, z, h=1e-3, epsilon=None):
    """Residual of the inverse system satisfied by the complex pair.

    With D1 = 2 d/dconj(z1) + alpha and D2 = 2 d/dz2 + conj(beta):

        D1[T1] + D2[conj(T2)] = F,
        D1[T2] - D2[conj(T1)] = 0.

    Derivatives are central differences with a shared excision mask.
    Returns (residual1, residual2, |F(z)|).
    """
    alpha, beta = spec.alpha_beta

    def tpair(point):
        return t_pair_alpha_beta(spec, F, volume, point, epsilon=epsilon,
                                 mask_center=z)

    vals = {}
    for k in range(4):
        vals[(k, +1)] = tpair(z.shifted(k, +h))
        vals[(k, -1)] = tpair(z.shifted(k, -h))
    t1_0, t2_0 = tpair(z)

    def wirt(idx):
        d = [(vals[(k, +1)][idx] - vals[(k, -1)][idx]) / (2 * h) for k in range(4)]
        dz1 = 0.5 * (d[0] - 1j * d[1])
        dz1b = 0.5 * (d[0] + 1j * d[1])
        dz2 = 0.5 * (d[2] - 1j * d[3])
        dz2b = 0.5 * (d[2] + 1j * d[3])
        return dz1, dz1b, dz2, dz2b

    dT1 = wirt(0)
    dT2 = wirt(1)
    z1, z2 = z.pair
    Fz = complex(F.values(z1, z2)) if hasattr(F, "values") else F.at(z).z1
    # conj(T2) derivatives follow from T2's by conjugation and slot swap
    dconjT2_dz2 = np.conjugate(dT2[3])
    dconjT1_dz2 = np.conjugate(dT1[3])
    eq1 = (2 * dT1[1] + alpha * t1_0) + (2 * dconjT2_dz2 + np.conjugate(beta) * np.conjugate(t2_0)) - Fz
    eq2 = (2 * dT2[1] + alpha * t2_0) - (2 * dconjT1_dz2 + np.conjugate(beta) * np.conjugate(t1_0))
    return abs(eq1), abs(eq2), abs(Fz)


def stokes_residual(spec, f, g, surface, volume, stencil=None, chunks=1):
    """|boundary weighted form - volume weighted form|.

    Boundary: int f nu_u g with nu_u = e^{2<u,zeta>} sigma; volume:
    int [(D_{r,u} f) g + f (D_u g)] e^{2<u,zeta>} dmu.
    """
    wS = exp_weight_grid(spec.u, spec.frame, surface.w1, surface.w2, scale=2.0)
    sa, sb = surface.sigma_pairs()
    fs = f.pair(surface.w1, surface.w2)
    gs = g.pair(surface.w1, surface.w2)
    t1, t2 = pair_mul(fs[0], fs[1], sa, sb)
    t1, t2 = pair_mul(t1, t2, gs[0], gs[1])
    lhs = integrate_pair(surface, (wS * t1, wS * t2), chunks)

    wV = exp_weight_grid(spec.u, spec.frame, volume.w1, volume.w2, scale=2.0)
    drf = diffops.d_r_u_grid(f, spec.u, spec.frame, volume.w1, volume.w2, stencil)
    dg = diffops.d_u_left_grid(g, spec.u, spec.frame, volume.w1, volume.w2, stencil)
    gv = g.pair(volume.w1, volume.w2)
    fv = f.pair(volume.w1, volume.w2)
    a1, a2 = pair_mul(drf[0], drf[1], gv[0], gv[1])
    b1, b2 = pair_mul(fv[0], fv[1], dg[0], dg[1])
    rhs = integrate_pair(volume, (wV * (a1 + b1), wV * (a2 + b2)), chunks)
    return (lhs - rhs).norm()


def valuation_kernel_field(spec, z):
    """The smooth integrand e^{-<u, zeta+z>} N(zeta) of the interior bound.

    N is the conjugate chart numerator (conj(d1), -i e^{i theta} conj(d2));
    the field carries exact partials, so applying the right perturbed
    operator to it is cheap and accurate.
    """
    frame = spec.frame
    z1, z2 = z.pair
    e = frame.phase
    coeffs = {
        (0, 0, 0, 0): Quaternion.from_pair(-np.conjugate(z1), 1j * e * np.conjugate(z2)),
        (1, 0, 0, 0): Quaternion.from_pair(1.0, 0.0),
        (0, 1, 0, 0): Quaternion.from_pair(-1j, 0.0),
        (0, 0, 1, 0): Quaternion.from_pair(0.0, -1j * e),
        (0, 0, 0, 1): Quaternion.from_pair(0.0, -e),
    }
    numerator = polynomial_field(frame, coeffs)
    from .fields import exp_scaled
    field = exp_scaled(numerator, spec.u, scale=-1.0)
    # constant factor e^{-<u, z>}
    from .quaternion import exp_weight
    const = exp_weight(spec.u, z, frame, scale=-1.0)

    def pair(w1, w2):
        a, b = field.pair(w1, w2)
        return const * a, const * b

    def partials(w1, w2):
        return [(const * a, const * b) for a, b in field.partials(w1, w2)]

    return Field(frame, pair, partials, smoothness="Cinf")
