"""Evaluable function handles and certified test-function generators.

A Field is an H-valued function of chart pairs (w1, w2) in a fixed frame,
represented by its value pair f = f1 + f2*j.  A ComplexField is a C-valued
function of (z1, z2).  Both optionally carry exact derivative handles;
when absent, operators downstream fall back to central differences, which
keeps discretization error separable from formula error.

Generators produce members of the operator kernels together with their
exact partials:

* holomorphic monomials z1^m z2^n annihilated by the frame operator for
  every theta;
* their negative-exponential images, annihilated by the u-perturbed
  operator;
* complex families satisfying the first-order (alpha, beta) system
  d f / d conj(z1) = -alpha f, d f / d conj(z2) = -beta f.

Residual checkers measure how far a function is from the corresponding
kernel by finite differences at a prescribed step, so certification is
always at stencil resolution.
"""

from __future__ import annotations

import numpy as np

from . import diffops
from .quaternion import Quaternion, as_coords, pair_mul


class Field:
    """H-valued function of chart pairs, with optional exact partials.

    pair_fn(w1, w2) -> (f1, f2) must broadcast over numpy arrays;
    partials_fn(w1, w2) -> [(g1, g2)]*4 returns the psi-coordinate
    partials in the same pair form.
    """

    def __init__(self, frame, pair_fn, partials_fn=None, smoothness="C1"):
        self.frame = frame
        self._pair = pair_fn
        self._partials = partials_fn
        self.smoothness = smoothness

    def pair(self, w1, w2):
        return self._pair(np.asarray(w1, dtype=complex), np.asarray(w2, dtype=complex))

    @property
    def has_partials(self):
        return self._partials is not None

    def partials(self, w1, w2):
        if self._partials is None:
            raise ValueError("field carries no analytic partials")
        return self._partials(np.asarray(w1, dtype=complex), np.asarray(w2, dtype=complex))

    def value_pair(self, point):
        f1, f2 = self.pair(*point.pair)
        return complex(f1), complex(f2)

    def at(self, point):
        return Quaternion.from_pair(*self.value_pair(point))


class ComplexField:
    """C-valued function of (z1, z2) with optional Wirtinger handles.

    wirtinger_fn(z1, z2) -> (d/dz1, d/dconj(z1), d/dz2, d/dconj(z2)).
    """

    def __init__(self, fn, wirtinger_fn=None, smoothness="C1"):
        self._fn = fn
        self._wirtinger = wirtinger_fn
        self.smoothness = smoothness

    def values(self, z1, z2):
        return self._fn(np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex))

    def __call__(self, z1, z2):
        return self.values(z1, z2)

    @property
    def has_wirtinger(self):
        return self._wirtinger is not None

    def wirtinger(self, z1, z2):
        if self._wirtinger is None:
            raise ValueError("complex field carries no analytic derivatives")
        return self._wirtinger(np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex))

    def as_field(self, frame):
        """View as an H-valued field with vanishing j-part."""
        fn = self._fn

        def pair(w1, w2):
            v = fn(w1, w2)
            return v, np.zeros_like(v)

        partials = None
        if self._wirtinger is not None:
            wirt = self._wirtinger

            def partials(w1, w2):
                d1, d1b, d2, d2b = wirt(w1, w2)
                zero = np.zeros_like(d1)
                return [(d1 + d1b, zero), (1j * (d1 - d1b), zero),
                        (d2 + d2b, zero), (1j * (d2 - d2b), zero)]

        return Field(frame, pair, partials, smoothness=self.smoothness)


# ---------------------------------------------------------------------------
# constructors and algebra on handles
# ---------------------------------------------------------------------------

def constant_field(frame, q):
    a, b = q.z1, q.z2

    def pair(w1, w2):
        shape = np.broadcast(w1, w2).shape
        return np.full(shape, a, dtype=complex), np.full(shape, b, dtype=complex)

    def partials(w1, w2):
        shape = np.broadcast(w1, w2).shape
        zero = np.zeros(shape, dtype=complex)
        return [(zero, zero)] * 4

    return Field(frame, pair, partials, smoothness="Cinf")


def coordinate_field(frame, k):
    """The scalar psi-coordinate c_k as an H-valued field."""
    if k not in (0, 1, 2, 3):
        raise ValueError("coordinate index must be 0..3")

    def pair(w1, w2):
        w = w1 if k < 2 else w2
        c = w.real if k % 2 == 0 else w.imag
        return c.astype(complex), np.zeros_like(w, dtype=complex)

    def partials(w1, w2):
        shape = np.broadcast(w1, w2).shape
        zero = np.zeros(shape, dtype=complex)
        one = np.ones(shape, dtype=complex)
        out = [(zero, zero) for _ in range(4)]
        out[k] = (one, zero)
        return out

    return Field(frame, pair, partials, smoothness="Cinf")


def add_fields(f, g):
    if f.frame is not g.frame and f.frame != g.frame:
        raise ValueError("fields live in different frames")

    def pair(w1, w2):
        a1, b1 = f.pair(w1, w2)
        a2, b2 = g.pair(w1, w2)
        return a1 + a2, b1 + b2

    partials = None
    if f.has_partials and g.has_partials:
        def partials(w1, w2):
            pf = f.partials(w1, w2)
            pg = g.partials(w1, w2)
            return [(a1 + a2, b1 + b2) for (a1, b1), (a2, b2) in zip(pf, pg)]

    return Field(f.frame, pair, partials)


def right_scaled(f, q):
    """f * q for a constant quaternion q (right-module scaling)."""
    qa, qb = q.z1, q.z2

    def pair(w1, w2):
        a, b = f.pair(w1, w2)
        return pair_mul(a, b, qa, qb)

    partials = None
    if f.has_partials:
        def partials(w1, w2):
            return [pair_mul(g1, g2, qa, qb) for g1, g2 in f.partials(w1, w2)]

    return Field(f.frame, pair, partials, smoothness=f.smoothness)


def exp_scaled(f, u, scale=1.0):
    """e^{scale * <u, z>} * f with exact product-rule partials.

    The weight is a real scalar, so it multiplies both pair components;
    its psi-coordinate partials are scale * u_k times the weight.
    """
    frame = f.frame
    cu = as_coords(u, frame)
    u1 = complex(cu[0], cu[1])
    u2 = complex(cu[2], cu[3])

    def weight(w1, w2):
        arg = (np.conjugate(u1) * w1).real + (np.conjugate(u2) * w2).real
        return np.exp(scale * arg)

    def pair(w1, w2):
        w = weight(w1, w2)
        a, b = f.pair(w1, w2)
        return w * a, w * b

    partials = None
    if f.has_partials:
        def partials(w1, w2):
            w = weight(w1, w2)
            a, b = f.pair(w1, w2)
            out = []
            for k, (g1, g2) in enumerate(f.partials(w1, w2)):
                uk = scale * cu[k]
                out.append((w * (g1 + uk * a), w * (g2 + uk * b)))
            return out

    return Field(frame, pair, partials, smoothness=f.smoothness)


def u_hyperholomorphic_from(h, u, frame=None):
    """Image z -> e^{-<u,z>} h(z) of a frame-kernel member h.

    If h is annihilated by the frame operator, the image is annihilated by
    the u-perturbed operator; membership is certified downstream by
    residual checks, not here.
    """
    if frame is not None and frame != h.frame:
        raise ValueError("frame mismatch")
    return exp_scaled(h, u, scale=-1.0)


def holomorphic_monomial(m, n):
    """(z1, z2) -> z1^m z2^n with exact Wirtinger derivatives."""
    if m < 0 or n < 0:
        raise ValueError("monomial exponents must be nonnegative")

    def fn(z1, z2):
        return z1 ** m * z2 ** n

    def wirt(z1, z2):
        zero = np.zeros(np.broadcast(z1, z2).shape, dtype=complex)
        d1 = m * z1 ** (m - 1) * z2 ** n if m else zero
        d2 = n * z1 ** m * z2 ** (n - 1) if n else zero
        return d1, zero, d2, zero

    return ComplexField(fn, wirt, smoothness="Cinf")


def alpha_beta_holomorphic_from(h, alpha, beta):
    """(z1, z2) -> e^{-(alpha conj(z1) + beta conj(z2))} h(z1, z2).

    For holomorphic h this solves the (alpha, beta) first-order system
    exactly in exact arithmetic.
    """
    alpha = complex(alpha)
    beta = complex(beta)

    def weight(z1, z2):
        return np.exp(-(alpha * np.conjugate(z1) + beta * np.conjugate(z2)))

    def fn(z1, z2):
        return weight(z1, z2) * h.values(z1, z2)

    wirt = None
    if h.has_wirtinger:
        def wirt(z1, z2):
            w = weight(z1, z2)
            v = h.values(z1, z2)
            d1, d1b, d2, d2b = h.wirtinger(z1, z2)
            return (w * d1, w * (d1b - alpha * v),
                    w * d2, w * (d2b - beta * v))

    return ComplexField(fn, wirt, smoothness=h.smoothness)


def polynomial_field(frame, coeffs):
    """Polynomial in the psi-coordinates with quaternion coefficients.

    coeffs maps exponent tuples (a0, a1, a2, a3) to Quaternion values;
    the monomial acts as a real scalar times the coefficient, so exact
    partials follow from the exponent rule.
    """
    terms = [(tuple(int(e) for e in expo), q.z1, q.z2) for expo, q in coeffs.items()]

    def coords(w1, w2):
        return w1.real, w1.imag, w2.real, w2.imag

    def pair(w1, w2):
        c = coords(w1, w2)
        shape = np.broadcast(w1, w2).shape
        f1 = np.zeros(shape, dtype=complex)
        f2 = np.zeros(shape, dtype=complex)
        for expo, qa, qb in terms:
            mono = np.ones(shape)
            for k in range(4):
                if expo[k]:
                    mono = mono * c[k] ** expo[k]
            f1 += mono * qa
            f2 += mono * qb
        return f1, f2

    def partials(w1, w2):
        c = coords(w1, w2)
        shape = np.broadcast(w1, w2).shape
        out = []
        for k in range(4):
            g1 = np.zeros(shape, dtype=complex)
            g2 = np.zeros(shape, dtype=complex)
            for expo, qa, qb in terms:
                if not expo[k]:
                    continue
                mono = np.full(shape, float(expo[k]))
                for l in range(4):
                    e = expo[l] - (1 if l == k else 0)
                    if e:
                        mono = mono * c[l] ** e
                g1 += mono * qa
                g2 += mono * qb
            out.append((g1, g2))
        return out

    return Field(frame, pair, partials, smoothness="Cinf")


def random_polynomial_field(frame, degree, rng, scale=1.0):
    coeffs = {}
    for a0 in range(degree + 1):
        for a1 in range(degree + 1 - a0):
            for a2 in range(degree + 1 - a0 - a1):
                for a3 in range(degree + 1 - a0 - a1 - a2):
                    coeffs[(a0, a1, a2, a3)] = Quaternion.from_components(
                        rng.normal(0.0, scale, size=4))
    return polynomial_field(frame, coeffs)


def random_holomorphic_poly(degree, rng, scale=1.0):
    """Random holomorphic polynomial in (z1, z2) with complex coefficients."""
    parts = []
    for m in range(degree + 1):
        for n in range(degree + 1 - m):
            c = complex(*rng.normal(0.0, scale, size=2))
            parts.append((c, m, n))

    def fn(z1, z2):
        return sum(c * z1 ** m * z2 ** n for c, m, n in parts)

    def wirt(z1, z2):
        zero = np.zeros(np.broadcast(z1, z2).shape, dtype=complex)
        d1 = sum((c * m * z1 ** (m - 1) * z2 ** n for c, m, n in parts if m), zero)
        d2 = sum((c * n * z1 ** m * z2 ** (n - 1) for c, m, n in parts if n), zero)
        return d1, zero, d2, zero

    return ComplexField(fn, wirt, smoothness="Cinf")


# ---------------------------------------------------------------------------
# residual checkers
# ---------------------------------------------------------------------------

def cr_residual_theta_u(f, u, frame, point, h, domain=None):
    """Residual of the first-order system for the u-perturbed operator.

    Evaluates the perturbed operator by central differences at step h
    (analytic handles are deliberately ignored so the reported order is
    the stencil's) and returns the larger modulus of the two complex-pair
    components, which vanish together exactly when f is in the kernel.
    """
    st = diffops.Stencil(h=h, order=2)
    q = diffops.d_u_left(f, u, frame, point, st, domain=domain, use_analytic=False)
    return max(abs(q.z1), abs(q.z2))


def _wirtinger_fd(F, z1, z2, h):
    """Central-difference Wirtinger derivatives of a ComplexField at a point."""
    z1 = complex(z1)
    z2 = complex(z2)
    d0 = (F.values(z1 + h, z2) - F.values(z1 - h, z2)) / (2 * h)
    d1 = (F.values(z1 + 1j * h, z2) - F.values(z1 - 1j * h, z2)) / (2 * h)
    d2 = (F.values(z1, z2 + h) - F.values(z1, z2 - h)) / (2 * h)
    d3 = (F.values(z1, z2 + 1j * h) - F.values(z1, z2 - 1j * h)) / (2 * h)
    dz1 = 0.5 * (d0 - 1j * d1)
    dz1b = 0.5 * (d0 + 1j * d1)
    dz2 = 0.5 * (d2 - 1j * d3)
    dz2b = 0.5 * (d2 + 1j * d3)
    return complex(dz1), complex(dz1b), complex(dz2), complex(dz2b)


def cr_residual_alpha_beta(f, alpha, beta, point, h):
    """Residual of d f/dconj(z1) = -alpha f, d f/dconj(z2) = -beta f."""
    z1, z2 = point
    _, d1b, _, d2b = _wirtinger_fd(f, z1, z2, h)
    v = complex(f.values(z1, z2))
    return max(abs(d1b + alpha * v), abs(d2b + beta * v))


def cr_residual_anti_alpha_beta(g, alpha, beta, point, h):
    """Residual of the companion system d g/dconj(z1) = -alpha g,
    d g/dz2 = -conj(beta) g."""
    z1, z2 = point
    _, d1b, d2, _ = _wirtinger_fd(g, z1, z2, h)
    v = complex(g.values(z1, z2))
    return max(abs(d1b + alpha * v), abs(d2 + np.conjugate(beta) * v))
