"""Deterministic quadrature rules on 4-balls, boxes and 3-spheres.

Ball and sphere rules are product rules in hyperspherical (Hopf-form)
coordinates:

    w1 = c1 + r sqrt(1-u) e^{i phi1},   w2 = c2 + r sqrt(u) e^{i phi2},

with Gauss-Legendre nodes in r and u and equispaced periodic nodes in
phi1, phi2 (volume element r^3 dr du dphi1 dphi2 / 2).  Nonzero moments
of coordinate monomials reduce to polynomials in u and r, so a level-L
rule integrates every polynomial of total degree <= 2L exactly; odd
moments vanish exactly by node symmetry.

Summation order is a fixed pairwise (adjacent-fold) tree, so results are
bitwise reproducible run to run; chunked variants used by parallel
drivers are deterministic for a fixed chunk count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .quaternion import Quaternion, ThetaFrame, ThetaPoint

PI = math.pi


@dataclass(frozen=True)
class Ball:
    """Ball descriptor in psi-coordinates."""

    center: ThetaPoint
    radius: float

    @property
    def frame(self):
        return self.center.frame

    def contains(self, point, margin=0.0):
        return point.distance(self.center) <= self.radius - margin


def ball_volume(radius):
    return PI * PI * radius ** 4 / 2.0


def sphere_area(radius):
    return 2.0 * PI * PI * radius ** 3


def pairwise_sum(values):
    """Adjacent-fold pairwise reduction along the leading axis."""
    a = np.asarray(values)
    if a.shape[0] == 0:
        return a.dtype.type(0)
    n = a.shape[0]
    while n > 1:
        m = n // 2
        s = a[0:2 * m:2] + a[1:2 * m:2]
        if n % 2:
            s = np.concatenate([s, a[2 * m:2 * m + 1]], axis=0)
        a = s
        n = a.shape[0]
    return a[0]


def chunked_sum(values, chunks):
    """Pairwise-sum each contiguous chunk, then pairwise-combine.

    Deterministic for a fixed chunk count; chunks=1 reproduces
    pairwise_sum bit for bit.
    """
    a = np.asarray(values)
    if chunks <= 1 or a.shape[0] <= chunks:
        return pairwise_sum(a)
    bounds = np.linspace(0, a.shape[0], chunks + 1, dtype=int)
    partial = [pairwise_sum(a[lo:hi]) for lo, hi in zip(bounds[:-1], bounds[1:])]
    return pairwise_sum(np.stack(partial))


class VolumeRule:
    """Nodes (chart pairs), 4-volume weights and a descriptor."""

    kind = "volume"

    def __init__(self, frame, w1, w2, weights, descriptor):
        self.frame = frame
        self.w1 = np.asarray(w1, dtype=complex)
        self.w2 = np.asarray(w2, dtype=complex)
        self.weights = np.asarray(weights, dtype=float)
        self.descriptor = dict(descriptor)

    @property
    def n_nodes(self):
        return self.weights.shape[0]

    def total_weight(self):
        return float(pairwise_sum(self.weights))

    def node_point(self, index):
        return ThetaPoint.from_pair(self.frame, self.w1[index], self.w2[index])

    def distances_to(self, point):
        p1, p2 = point.pair
        return np.sqrt(np.abs(self.w1 - p1) ** 2 + np.abs(self.w2 - p2) ** 2)


class SurfaceRule:
    """Boundary nodes with scalar 3-area weights and outward unit normals.

    Normals are stored as psi-coordinate 4-vectors; their chart pairs are
    (normals[:,0] + i normals[:,1], normals[:,2] + i normals[:,3]).
    """

    kind = "surface"

    def __init__(self, frame, w1, w2, weights, normals, descriptor):
        self.frame = frame
        self.w1 = np.asarray(w1, dtype=complex)
        self.w2 = np.asarray(w2, dtype=complex)
        self.weights = np.asarray(weights, dtype=float)
        self.normals = np.asarray(normals, dtype=float)
        self.descriptor = dict(descriptor)

    @property
    def n_nodes(self):
        return self.weights.shape[0]

    def total_weight(self):
        return float(pairwise_sum(self.weights))

    def normal_pairs(self):
        n = self.normals
        return n[:, 0] + 1j * n[:, 1], n[:, 2] + 1j * n[:, 3]

    def sigma_pairs(self):
        """Embedded area form: value pair of (sum_k n_k psi_k) per node."""
        m1, m2 = self.normal_pairs()
        return self.frame.pair_embed(m1, m2)

    @property
    def spacing(self):
        return self.descriptor.get("spacing", 0.0)


def _gauss01(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _angular_grid(level):
    n_u = level + 1
    n_phi = 2 * level + 1
    u, wu = _gauss01(n_u)
    phi = np.arange(n_phi) * (2.0 * PI / n_phi)
    wphi = 2.0 * PI / n_phi
    U, P1, P2 = np.meshgrid(u, phi, phi, indexing="ij")
    WU = np.meshgrid(wu, phi, phi, indexing="ij")[0]
    dir1 = np.sqrt(1.0 - U) * np.exp(1j * P1)
    dir2 = np.sqrt(U) * np.exp(1j * P2)
    w_ang = 0.5 * WU * wphi * wphi
    return dir1.ravel(), dir2.ravel(), w_ang.ravel()


def ball4_volume_rule(center, radius, level):
    """Product rule over the ball; exact for polynomials of degree <= 2*level."""
    if radius <= 0.0 or level < 1:
        raise ValueError("radius must be positive and level >= 1")
    frame = center.frame
    c1, c2 = center.pair
    n_r = level + 2
    r, wr = _gauss01(n_r)
    r = r * radius
    wr = wr * radius
    d1, d2, w_ang = _angular_grid(level)
    R, D1 = np.meshgrid(r, d1, indexing="ij")
    WA = np.meshgrid(wr, w_ang, indexing="ij")
    D2 = np.meshgrid(r, d2, indexing="ij")[1]
    w1 = c1 + R * D1
    w2 = c2 + R * D2
    weights = WA[0] * R ** 3 * WA[1]
    descriptor = {
        "kind": "ball", "center": list(center.c), "radius": float(radius),
        "level": int(level), "degree": 2 * level, "theta": frame.theta,
        "spacing": float(radius / n_r),
    }
    return VolumeRule(frame, w1.ravel(), w2.ravel(), weights.ravel(), descriptor)


def box4_volume_rule(frame, bounds, level):
    """Gauss-Legendre product rule on an axis-aligned box in psi-coordinates."""
    bounds = np.asarray(bounds, dtype=float)
    if bounds.shape != (4, 2):
        raise ValueError("bounds must be a 4x2 array of (lo, hi)")
    n = level + 2
    x01, w01 = _gauss01(n)
    axes, wts = [], []
    for k in range(4):
        lo, hi = bounds[k]
        axes.append(lo + (hi - lo) * x01)
        wts.append((hi - lo) * w01)
    C = np.meshgrid(*axes, indexing="ij")
    W = np.meshgrid(*wts, indexing="ij")
    w1 = C[0] + 1j * C[1]
    w2 = C[2] + 1j * C[3]
    weights = W[0] * W[1] * W[2] * W[3]
    descriptor = {
        "kind": "box", "bounds": bounds.tolist(), "level": int(level),
        "degree": 2 * n - 1, "theta": frame.theta,
        "spacing": float(np.max(bounds[:, 1] - bounds[:, 0]) / n),
    }
    return VolumeRule(frame, w1.ravel(), w2.ravel(), weights.ravel(), descriptor)


def sphere3_surface_rule(center, radius, level):
    """Product rule on the 3-sphere; outward unit normals at every node."""
    if radius <= 0.0 or level < 1:
        raise ValueError("radius must be positive and level >= 1")
    frame = center.frame
    c1, c2 = center.pair
    d1, d2, w_ang = _angular_grid(level)
    w1 = c1 + radius * d1
    w2 = c2 + radius * d2
    weights = radius ** 3 * w_ang
    normals = np.column_stack([d1.real, d1.imag, d2.real, d2.imag])
    descriptor = {
        "kind": "sphere", "center": list(center.c), "radius": float(radius),
        "level": int(level), "degree": 2 * level, "theta": frame.theta,
        "spacing": float(radius * 2.0 * PI / (2 * level + 1)),
    }
    return SurfaceRule(frame, w1, w2, weights, normals, descriptor)


def punctured_ball_rule(rule, singularity, epsilon):
    """Drop volume nodes within epsilon of the singular point."""
    if epsilon < 0.0:
        raise ValueError("epsilon must be nonnegative")
    dist = rule.distances_to(singularity)
    keep = dist > epsilon
    if not np.any(keep):
        raise ValueError("excision at epsilon=%g leaves no nodes" % epsilon)
    excised = float(pairwise_sum(rule.weights[~keep])) if np.any(~keep) else 0.0
    descriptor = dict(rule.descriptor)
    descriptor.update({
        "excised_at": list(singularity.c), "epsilon": float(epsilon),
        "excised_weight": excised, "parent_nodes": rule.n_nodes,
    })
    return VolumeRule(rule.frame, rule.w1[keep], rule.w2[keep],
                      rule.weights[keep], descriptor)


# ---------------------------------------------------------------------------
# integration helpers
# ---------------------------------------------------------------------------

def integrate_scalar(rule, values, chunks=1):
    return chunked_sum(np.asarray(values) * rule.weights, chunks)


def integrate_pair(rule, pair_values, chunks=1):
    f1, f2 = pair_values
    s1 = chunked_sum(np.asarray(f1) * rule.weights, chunks)
    s2 = chunked_sum(np.asarray(f2) * rule.weights, chunks)
    return Quaternion.from_pair(complex(s1), complex(s2))


def sigma_at(rule, index, frame=None):
    """Discretized area form at a node: (sum_k n_k psi_k) times the weight."""
    if not 0 <= index < rule.n_nodes:
        raise IndexError("node index out of range")
    frame = frame or rule.frame
    n = rule.normals[index]
    nu = frame.embed(n)
    return nu * float(rule.weights[index])


# ---------------------------------------------------------------------------
# flat-file cache format: one text header line, then little-endian float64
# records (coords[4], weight[, normal[4]]) per node
# ---------------------------------------------------------------------------

_MAGIC = "quathol-rule v1"


def save_rule(rule, path):
    header = {
        "magic": _MAGIC, "kind": rule.kind, "theta": rule.frame.theta,
        "n_nodes": int(rule.n_nodes), "descriptor": rule.descriptor,
    }
    coords = np.column_stack([rule.w1.real, rule.w1.imag, rule.w2.real, rule.w2.imag])
    cols = [coords, rule.weights[:, None]]
    if rule.kind == "surface":
        cols.append(rule.normals)
    table = np.ascontiguousarray(np.hstack(cols), dtype="<f8")
    with open(path, "wb") as fh:
        fh.write((json.dumps(header, sort_keys=True) + "\n").encode("utf-8"))
        fh.write(table.tobytes())


def load_rule(path):
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        if header.get("magic") != _MAGIC:
            raise ValueError("not a quathol rule file")
        raw = fh.read()
    n = header["n_nodes"]
    ncols = 9 if header["kind"] == "surface" else 5
    table = np.frombuffer(raw, dtype="<f8").reshape(n, ncols)
    frame = ThetaFrame(header["theta"])
    w1 = table[:, 0] + 1j * table[:, 1]
    w2 = table[:, 2] + 1j * table[:, 3]
    weights = table[:, 4]
    if header["kind"] == "surface":
        return SurfaceRule(frame, w1, w2, weights, table[:, 5:9], header["descriptor"])
    return VolumeRule(frame, w1, w2, weights, header["descriptor"])
