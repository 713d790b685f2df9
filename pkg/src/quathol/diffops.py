"""Finite-difference realizations of the frame Cauchy-Riemann operators.

The canonical left operator is the four-partials form

    D f = d f/dc0 + i df/dc1 + psi2 df/dc2 + psi3 df/dc3,

with derivatives taken in the psi-coordinates of the frame; the right
variant multiplies the basis on the right, conjugate variants use the
conjugated basis, and the u-perturbed operators add u*f (resp. f*u).
All operators use a field's analytic partial handles when present and
fall back to central differences otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quaternion import Quaternion, pair_mul


class DomainMarginError(ValueError):
    """Evaluation point is too close to the domain boundary for the stencil."""


@dataclass(frozen=True)
class Stencil:
    """Central-difference stencil; order 2 or 4."""

    h: float = 1e-3
    order: int = 2

    def __post_init__(self):
        if self.h <= 0.0:
            raise ValueError("stencil step must be positive")
        if self.order not in (2, 4):
            raise ValueError("stencil order must be 2 or 4")

    @property
    def reach(self):
        return self.h * (1 if self.order == 2 else 2)


def require_interior(point, domain, margin):
    """Raise unless point lies in `domain` (ball-like) with the given margin.

    `domain` is any object with .center (ThetaPoint) and .radius; None
    disables the check.
    """
    if domain is None:
        return
    gap = domain.radius - point.distance(domain.center)
    if gap < margin:
        raise DomainMarginError(
            "point within %g of the boundary; stencil needs margin %g" % (gap, margin))


# chart-pair shifts realising a step along psi-coordinate k
_SHIFTS = ((1.0, 0.0), (1j, 0.0), (0.0, 1.0), (0.0, 1j))


def partials_grid(f, w1, w2, stencil=None, use_analytic=True):
    """The four psi-coordinate partials of f on a grid of chart pairs.

    Returns a list of four (g1, g2) complex pairs.  Uses f's analytic
    handles when available unless use_analytic=False.
    """
    if use_analytic and getattr(f, "has_partials", False):
        return f.partials(w1, w2)
    if stencil is None:
        stencil = Stencil()
    w1 = np.asarray(w1, dtype=complex)
    w2 = np.asarray(w2, dtype=complex)
    h = stencil.h
    out = []
    for s1, s2 in _SHIFTS:
        if stencil.order == 2:
            p1, p2 = f.pair(w1 + h * s1, w2 + h * s2)
            m1, m2 = f.pair(w1 - h * s1, w2 - h * s2)
            out.append(((p1 - m1) / (2 * h), (p2 - m2) / (2 * h)))
        else:
            p1a, p2a = f.pair(w1 + h * s1, w2 + h * s2)
            m1a, m2a = f.pair(w1 - h * s1, w2 - h * s2)
            p1b, p2b = f.pair(w1 + 2 * h * s1, w2 + 2 * h * s2)
            m1b, m2b = f.pair(w1 - 2 * h * s1, w2 - 2 * h * s2)
            out.append(((-p1b + 8 * p1a - 8 * m1a + m1b) / (12 * h),
                        (-p2b + 8 * p2a - 8 * m2a + m2b) / (12 * h)))
    return out


def _basis_pairs(frame, conjugate=False):
    e = frame.phase
    pairs = ((1.0, 0.0), (1j, 0.0), (0.0, 1j * e), (0.0, e))
    if conjugate:
        pairs = tuple((np.conjugate(a), -b) for a, b in pairs)
    return pairs


def _assemble(frame, parts, side, conjugate=False):
    a_tot, b_tot = 0.0, 0.0
    for (A, B), (g1, g2) in zip(_basis_pairs(frame, conjugate), parts):
        if side == "left":
            a, b = pair_mul(A, B, g1, g2)
        else:
            a, b = pair_mul(g1, g2, A, B)
        a_tot = a_tot + a
        b_tot = b_tot + b
    return a_tot, b_tot


def d_left_grid(f, frame, w1, w2, stencil=None, use_analytic=True):
    return _assemble(frame, partials_grid(f, w1, w2, stencil, use_analytic), "left")


def d_right_grid(f, frame, w1, w2, stencil=None, use_analytic=True):
    return _assemble(frame, partials_grid(f, w1, w2, stencil, use_analytic), "right")


def d_conj_left_grid(f, frame, w1, w2, stencil=None, use_analytic=True):
    return _assemble(frame, partials_grid(f, w1, w2, stencil, use_analytic), "left", conjugate=True)


def d_conj_right_grid(f, frame, w1, w2, stencil=None, use_analytic=True):
    return _assemble(frame, partials_grid(f, w1, w2, stencil, use_analytic), "right", conjugate=True)


def d_u_left_grid(f, u, frame, w1, w2, stencil=None, use_analytic=True):
    """(D + u)(f) on a grid: left operator plus left multiplication by u."""
    a, b = d_left_grid(f, frame, w1, w2, stencil, use_analytic)
    f1, f2 = f.pair(w1, w2)
    ua, ub = pair_mul(u.z1, u.z2, f1, f2)
    return a + ua, b + ub


def d_r_u_grid(f, u, frame, w1, w2, stencil=None, use_analytic=True):
    """Right operator plus right multiplication by u."""
    a, b = d_right_grid(f, frame, w1, w2, stencil, use_analytic)
    f1, f2 = f.pair(w1, w2)
    ua, ub = pair_mul(f1, f2, u.z1, u.z2)
    return a + ua, b + ub


# ---------------------------------------------------------------------------
# pointwise wrappers
# ---------------------------------------------------------------------------

def _point_eval(grid_fn, f, frame, point, stencil, domain, use_analytic, extra=()):
    if stencil is None:
        stencil = Stencil()
    require_interior(point, domain, stencil.reach)
    w1, w2 = point.pair
    a, b = grid_fn(f, *extra, frame, np.asarray(w1), np.asarray(w2), stencil, use_analytic) \
        if extra else grid_fn(f, frame, np.asarray(w1), np.asarray(w2), stencil, use_analytic)
    return Quaternion.from_pair(complex(a), complex(b))


def d_left(f, frame, point, stencil=None, domain=None, use_analytic=True):
    return _point_eval(d_left_grid, f, frame, point, stencil, domain, use_analytic)


def d_right(f, frame, point, stencil=None, domain=None, use_analytic=True):
    return _point_eval(d_right_grid, f, frame, point, stencil, domain, use_analytic)


def d_conj_left(f, frame, point, stencil=None, domain=None, use_analytic=True):
    return _point_eval(d_conj_left_grid, f, frame, point, stencil, domain, use_analytic)


def d_conj_right(f, frame, point, stencil=None, domain=None, use_analytic=True):
    return _point_eval(d_conj_right_grid, f, frame, point, stencil, domain, use_analytic)


def d_u_left(f, u, frame, point, stencil=None, domain=None, use_analytic=True):
    return _point_eval(d_u_left_grid, f, frame, point, stencil, domain, use_analytic, extra=(u,))


def d_r_u(f, u, frame, point, stencil=None, domain=None, use_analytic=True):
    return _point_eval(d_r_u_grid, f, frame, point, stencil, domain, use_analytic, extra=(u,))


def laplacian(f, point, stencil=None, domain=None):
    """Componentwise 4D Laplacian by second central differences."""
    if stencil is None:
        stencil = Stencil()
    require_interior(point, domain, stencil.reach)
    w1, w2 = point.pair
    h = stencil.h
    c1, c2 = f.pair(np.asarray(w1), np.asarray(w2))
    a_tot, b_tot = 0.0 + 0j, 0.0 + 0j
    for s1, s2 in _SHIFTS:
        p1, p2 = f.pair(np.asarray(w1 + h * s1), np.asarray(w2 + h * s2))
        m1, m2 = f.pair(np.asarray(w1 - h * s1), np.asarray(w2 - h * s2))
        if stencil.order == 2:
            a_tot += (p1 - 2 * c1 + m1) / (h * h)
            b_tot += (p2 - 2 * c2 + m2) / (h * h)
        else:
            p1b, p2b = f.pair(np.asarray(w1 + 2 * h * s1), np.asarray(w2 + 2 * h * s2))
            m1b, m2b = f.pair(np.asarray(w1 - 2 * h * s1), np.asarray(w2 - 2 * h * s2))
            a_tot += (-p1b + 16 * p1 - 30 * c1 + 16 * m1 - m1b) / (12 * h * h)
            b_tot += (-p2b + 16 * p2 - 30 * c2 + 16 * m2 - m2b) / (12 * h * h)
    return Quaternion.from_pair(complex(a_tot), complex(b_tot))


def operator_pair_fn(op_grid, f, frame, stencil=None, use_analytic=True):
    """Close an operator over f as a plain chart-pair callable.

    Lets callers wrap e.g. the conjugate operator of f as a new field and
    compose operators (Laplacian factorization checks).
    """
    def pair(w1, w2):
        return op_grid(f, frame, w1, w2, stencil, use_analytic)
    return pair
