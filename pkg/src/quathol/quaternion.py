"""Quaternion algebra over theta-structural frames.

Everything downstream works in the complex-pair picture: a quaternion
q = x0 + x1*i + x2*j + x3*k is the pair (z1, z2) with z1 = x0 + i*x1,
z2 = x2 + i*x3 and q = z1 + z2*j.  Products follow

    (a1 + b1 j)(a2 + b2 j) = (a1 a2 - b1 conj(b2)) + (a1 b2 + b1 conj(a2)) j,

which is the Hamilton product (i j = -j i = k, j k = -k j = i,
k i = -i k = j).  A frame angle theta fixes the orthonormal basis
psi = (1, i, i e^{i theta} j, e^{i theta} j); geometric data (points,
normals, quadrature nodes) is always addressed by psi-coordinates and
embedded into H only when values are needed.
"""

from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi

# |exponent| above this bound would overflow/underflow float64 weights.
EXP_ARG_BOUND = 700.0


class WeightOverflowError(ArithmeticError):
    """Exponential weight argument exceeded the configured bound."""


# ---------------------------------------------------------------------------
# vectorised complex-pair arithmetic (hot path: quadrature grids)
# ---------------------------------------------------------------------------

def pair_mul(a1, b1, a2, b2):
    """Hamilton product in complex-pair form, elementwise on arrays."""
    return a1 * a2 - b1 * np.conjugate(b2), a1 * b2 + b1 * np.conjugate(a2)


def pair_conj(a, b):
    return np.conjugate(a), -b


def pair_right_j(a, b):
    """(a + b j) * j = -b + a j."""
    return -b, a


def pair_abs2(a, b):
    return (a * np.conjugate(a)).real + (b * np.conjugate(b)).real


def pair_abs(a, b):
    return np.sqrt(pair_abs2(a, b))


class Quaternion:
    """Immutable quaternion x0 + x1*i + x2*j + x3*k."""

    __slots__ = ("x0", "x1", "x2", "x3")

    def __init__(self, x0=0.0, x1=0.0, x2=0.0, x3=0.0):
        object.__setattr__(self, "x0", float(x0))
        object.__setattr__(self, "x1", float(x1))
        object.__setattr__(self, "x2", float(x2))
        object.__setattr__(self, "x3", float(x3))

    def __setattr__(self, name, value):
        raise AttributeError("Quaternion is immutable")

    @classmethod
    def from_pair(cls, z1, z2):
        z1 = complex(z1)
        z2 = complex(z2)
        return cls(z1.real, z1.imag, z2.real, z2.imag)

    @classmethod
    def from_components(cls, c):
        c0, c1, c2, c3 = (float(v) for v in c)
        return cls(c0, c1, c2, c3)

    # -- views ------------------------------------------------------------
    @property
    def z1(self):
        return complex(self.x0, self.x1)

    @property
    def z2(self):
        return complex(self.x2, self.x3)

    @property
    def pair(self):
        return self.z1, self.z2

    def components(self):
        return np.array([self.x0, self.x1, self.x2, self.x3])

    @property
    def re(self):
        return self.x0

    # -- algebra ----------------------------------------------------------
    def conj(self):
        return Quaternion(self.x0, -self.x1, -self.x2, -self.x3)

    def norm2(self):
        return self.x0 * self.x0 + self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3

    def norm(self):
        return math.sqrt(self.norm2())

    def inverse(self):
        n2 = self.norm2()
        if n2 == 0.0:
            raise ZeroDivisionError("inverse of zero quaternion")
        c = self.conj()
        return Quaternion(c.x0 / n2, c.x1 / n2, c.x2 / n2, c.x3 / n2)

    def __add__(self, other):
        other = _coerce(other)
        return Quaternion(self.x0 + other.x0, self.x1 + other.x1,
                          self.x2 + other.x2, self.x3 + other.x3)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return Quaternion(self.x0 - other.x0, self.x1 - other.x1,
                          self.x2 - other.x2, self.x3 - other.x3)

    def __rsub__(self, other):
        return _coerce(other).__sub__(self)

    def __neg__(self):
        return Quaternion(-self.x0, -self.x1, -self.x2, -self.x3)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            s = float(other)
            return Quaternion(self.x0 * s, self.x1 * s, self.x2 * s, self.x3 * s)
        other = _coerce(other)
        a, b = pair_mul(self.z1, self.z2, other.z1, other.z2)
        return Quaternion.from_pair(a, b)

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self.__mul__(other)
        return _coerce(other).__mul__(self)

    def __truediv__(self, s):
        if isinstance(s, (int, float)):
            return self * (1.0 / float(s))
        return self * _coerce(s).inverse()

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return (self.x0, self.x1, self.x2, self.x3) == (other.x0, other.x1, other.x2, other.x3)

    def __hash__(self):
        return hash((self.x0, self.x1, self.x2, self.x3))

    def __repr__(self):
        return "Quaternion(%g, %g, %g, %g)" % (self.x0, self.x1, self.x2, self.x3)


def _coerce(x):
    if isinstance(x, Quaternion):
        return x
    if isinstance(x, (int, float)):
        return Quaternion(float(x))
    if isinstance(x, complex):
        return Quaternion(x.real, x.imag)
    raise TypeError("cannot interpret %r as a quaternion" % (x,))


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


class ThetaFrame:
    """Structural frame psi = (1, i, i e^{i theta} j, e^{i theta} j).

    The basis is orthonormal in R^4 for every theta; psi-coordinates of a
    point z are written (c0, c1, c2, c3), equivalently the chart pair
    (w1, w2) = (c0 + i c1, c2 + i c3) with z = w1 + i e^{i theta} j w2.
    """

    __slots__ = ("theta", "psi", "_phase")

    def __init__(self, theta=0.0):
        object.__setattr__(self, "theta", float(theta) % TWO_PI)
        phase = complex(math.cos(self.theta), math.sin(self.theta))
        object.__setattr__(self, "_phase", phase)
        psi = (ONE, I,
               Quaternion.from_pair(0.0, 1j * phase),
               Quaternion.from_pair(0.0, phase))
        object.__setattr__(self, "psi", psi)

    def __setattr__(self, name, value):
        raise AttributeError("ThetaFrame is immutable")

    @property
    def phase(self):
        """e^{i theta} as a python complex."""
        return self._phase

    # chart pair (w1, w2) -> value pair (a, b) with a + b j = embedded point
    def pair_embed(self, w1, w2):
        return w1, 1j * self._phase * np.conjugate(w2)

    # value pair -> chart pair; the map is its own inverse in the b slot
    def pair_coords(self, a, b):
        return a, 1j * self._phase * np.conjugate(b)

    def embed(self, coords):
        c = np.asarray(coords, dtype=float)
        a, b = self.pair_embed(complex(c[0], c[1]), complex(c[2], c[3]))
        return Quaternion.from_pair(a, b)

    def coords(self, q):
        w1, w2 = self.pair_coords(q.z1, q.z2)
        return np.array([w1.real, w1.imag, w2.real, w2.imag])

    def __eq__(self, other):
        return isinstance(other, ThetaFrame) and other.theta == self.theta

    def __hash__(self):
        return hash(("ThetaFrame", self.theta))

    def __repr__(self):
        return "ThetaFrame(theta=%g)" % self.theta


class ThetaPoint:
    """Point of H addressed by psi-coordinates of a fixed frame."""

    __slots__ = ("frame", "c")

    def __init__(self, frame, c0=0.0, c1=0.0, c2=0.0, c3=0.0):
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "c", np.array([c0, c1, c2, c3], dtype=float))

    def __setattr__(self, name, value):
        raise AttributeError("ThetaPoint is immutable")

    @classmethod
    def from_coords(cls, frame, coords):
        c = np.asarray(coords, dtype=float)
        return cls(frame, c[0], c[1], c[2], c[3])

    @classmethod
    def from_pair(cls, frame, w1, w2):
        w1 = complex(w1)
        w2 = complex(w2)
        return cls(frame, w1.real, w1.imag, w2.real, w2.imag)

    @classmethod
    def from_quaternion(cls, frame, q):
        return cls.from_coords(frame, frame.coords(q))

    @property
    def pair(self):
        return complex(self.c[0], self.c[1]), complex(self.c[2], self.c[3])

    def embed(self):
        return self.frame.embed(self.c)

    def shifted(self, k, delta):
        c = self.c.copy()
        c[k] += delta
        return ThetaPoint.from_coords(self.frame, c)

    def distance(self, other):
        # psi-coordinates are orthonormal, so this is the R^4 distance
        return float(np.linalg.norm(self.c - other.c))

    def __repr__(self):
        return "ThetaPoint(%g, %g, %g, %g; theta=%g)" % (*self.c, self.frame.theta)


def as_coords(x, frame):
    """psi-coordinate vector of a Quaternion or ThetaPoint."""
    if isinstance(x, ThetaPoint):
        return x.c
    if isinstance(x, Quaternion):
        return frame.coords(x)
    return frame.coords(_coerce(x))


def theta_pairing(u, z, frame):
    """Real pairing <u, z>: Euclidean dot product of psi-coordinates.

    Because the basis is orthonormal this equals Re(u * conj(z)) for
    quaternion arguments, but the coordinate form is kept as the
    definition.
    """
    return float(np.dot(as_coords(u, frame), as_coords(z, frame)))


def exp_weight(u, z, frame, scale=1.0):
    """Scalar weight e^{scale * <u, z>}; raises if the exponent is unsafe."""
    arg = scale * theta_pairing(u, z, frame)
    if abs(arg) > EXP_ARG_BOUND:
        raise WeightOverflowError("weight exponent %g exceeds bound %g" % (arg, EXP_ARG_BOUND))
    return math.exp(arg)


def pairing_grid(u, frame, w1, w2):
    """<u, z> for a grid of chart pairs (w1, w2), vectorised.

    Equals Re(conj(u1) w1 + conj(u2) w2) where (u1, u2) are the chart
    coordinates of u in the same frame.
    """
    cu = as_coords(u, frame)
    u1 = complex(cu[0], cu[1])
    u2 = complex(cu[2], cu[3])
    return (np.conjugate(u1) * np.asarray(w1)).real + (np.conjugate(u2) * np.asarray(w2)).real


def exp_weight_grid(u, frame, w1, w2, scale=1.0):
    arg = scale * pairing_grid(u, frame, w1, w2)
    m = float(np.max(np.abs(arg))) if np.size(arg) else 0.0
    if m > EXP_ARG_BOUND:
        raise WeightOverflowError("weight exponent %g exceeds bound %g" % (m, EXP_ARG_BOUND))
    return np.exp(arg)
