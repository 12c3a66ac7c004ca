"""SL(2,R), its universal cover, and the lifted projective action.

A point of RP(1) is written (sin phi : cos phi), so angles live on the
universal cover R of RP(1) and g acts on the column vector (sin phi, cos phi).
An element of the universal cover is stored as (g, psi0) where psi0 is the
lifted image of the angle 0.  The matrix g is the image in SL(2,R): its sign is
fixed by requiring g (0, 1)^T to point along (sin psi0, cos psi0).
"""
import math
from dataclasses import dataclass

import numpy as np

from . import jets
from .errors import BoundaryAmbiguous

J1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
J2 = np.array([[1.0, 0.0], [0.0, -1.0]])
J3 = np.array([[0.0, 1.0], [0.0, 0.0]])
I2 = np.eye(2)

CLASS_TOL = 1e-9


def det(g):
    return g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]


def inv(g):
    """Inverse of a determinant-one matrix."""
    return np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]])


def bracket(x, y):
    return x @ y - y @ x


def exp_sl2(x, t=1.0):
    """exp(tX) for traceless X via the closed form in det X."""
    x = np.asarray(x, dtype=float) * t
    d = det(x)
    if d > 1e-300:
        w = math.sqrt(d)
        return math.cos(w) * I2 + (math.sin(w) / w) * x
    if d < -1e-300:
        w = math.sqrt(-d)
        return math.cosh(w) * I2 + (math.sinh(w) / w) * x
    return I2 + x


def exp_sl2_path(x, t):
    """exp(tX) for an array of times t; shape (2, 2, len(t))."""
    t = np.asarray(t, dtype=float)
    d = det(np.asarray(x, dtype=float))
    if d > 0:
        w = math.sqrt(d) * t
        a = np.cos(w)
        b = np.where(w == 0, t, np.sin(w) / math.sqrt(d))
    elif d < 0:
        w = math.sqrt(-d) * t
        a = np.cosh(w)
        b = np.where(w == 0, t, np.sinh(w) / math.sqrt(-d))
    else:
        a = np.ones_like(t)
        b = t
    return I2[:, :, None] * a + np.asarray(x)[:, :, None] * b


def random_sl2(rng, scale=1.0):
    """A random group element, exp of a Gaussian algebra element times a rotation."""
    x = rng.normal(scale=scale, size=3)
    return exp_sl2(x[0] * J2 + x[1] * (J3 + J3.T)) @ exp_sl2(J1, x[2] * math.pi)


def random_algebra(rng, scale=1.0):
    a, b, c = rng.normal(scale=scale, size=3)
    return np.array([[a, b], [c, -a]])


def metric(x, y):
    """<X, Y> = 2 tr(XY)."""
    return 2.0 * float(np.trace(x @ y))


def cartan3_permutation_sum(x, y, z):
    """Cartan 3-form (1/6) tr(theta ^ [theta, theta]) evaluated directly.

    [theta, theta](u, v) = 2[theta(u), theta(v)], and the wedge of a 1-form
    with a 2-form is the alternating sum over the three (1, 2)-shuffles.
    """
    def br2(u, v):
        return 2.0 * bracket(u, v)
    val = (np.trace(x @ br2(y, z)) - np.trace(y @ br2(x, z)) + np.trace(z @ br2(x, y)))
    return float(val) / 6.0


def cartan3(x, y, z):
    """eta(X, Y, Z) on left-trivialized tangents; collapses to tr(X[Y, Z])."""
    return float(np.trace(x @ bracket(y, z)))


def _angle(v0, v1):
    return np.arctan2(v0, v1)


def lifted_action_matrix(g, psi0, phi):
    """Lift of the projective action of g with 0 -> psi0, at angles phi (vectorized).

    With phi = k pi + r, r in [0, pi), the increment f(r) - f(0) lies in [0, pi)
    and equals the oriented angle from g(0,1) to g(sin r, cos r).  Since
    det g = 1 that angle has sine proportional to sin r >= 0, so
    atan2(sin r, <g e, g v>) resolves the branch without subdivision.
    """
    phi = np.asarray(phi, dtype=float)
    k = np.floor(phi / np.pi)
    r = phi - k * np.pi
    s, c = np.sin(r), np.cos(r)
    w0 = np.array([g[0, 1], g[1, 1]])
    w1 = g[0, 0] * s + g[0, 1] * c
    w2 = g[1, 0] * s + g[1, 1] * c
    n0 = w0 @ w0
    dot = (w0[0] * w1 + w0[1] * w2) / n0
    # |w0| |w| sin(delta) = sin r  (determinant one)
    delta = np.arctan2(s / n0, dot)
    return psi0 + delta + k * np.pi


def _canonical_sign(g, psi0):
    v = np.array([g[0, 1], g[1, 1]])
    if v[0] * math.sin(psi0) + v[1] * math.cos(psi0) < 0:
        return -g
    return g


@dataclass(frozen=True, eq=False)
class Sl2TildeElement:
    g: np.ndarray
    psi0: float

    def __post_init__(self):
        g = np.array(self.g, dtype=float).reshape(2, 2)
        if abs(det(g) - 1.0) > 1e-9 * max(1.0, np.abs(g).max() ** 2):
            raise ValueError(f"determinant {det(g)} is not one")
        psi0 = float(self.psi0)
        b, d = g[0, 1], g[1, 1]
        nrm = math.hypot(b, d)
        if abs(math.sin(psi0) * d / nrm - math.cos(psi0) * b / nrm) > 1e-8:
            raise ValueError("psi0 is not a lift of the projective image of 0")
        g = _canonical_sign(g, psi0)
        g.setflags(write=False)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "psi0", psi0)

    @classmethod
    def lift(cls, g, near=0.0):
        """The lift of g whose psi0 is the branch closest to `near`."""
        g = np.asarray(g, dtype=float)
        raw = math.atan2(g[0, 1], g[1, 1])
        psi0 = raw + math.pi * round((near - raw) / math.pi)
        return cls(g, psi0)

    @classmethod
    def identity(cls):
        return cls(I2, 0.0)

    def __call__(self, phi):
        return lifted_action_matrix(self.g, self.psi0, phi)

    def __matmul__(self, other):
        return compose(self, other)

    def inverse(self):
        return invert(self)

    def power(self, k):
        out = Sl2TildeElement.identity()
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            out = compose(base, out)
        return out

    def action_jet(self, phi_jet):
        """Jet of f(phi(x)) given the jet of phi(x); f the lifted action."""
        s, c = jets.sincos(phi_jet)
        w = jets.matvec(self.g, np.stack([s, c], axis=1))
        out = jets.arg_vector(w)
        out[0] = self(phi_jet[0])
        return out

    def close_to(self, other, tol=1e-10):
        return (abs(self.psi0 - other.psi0) < tol
                and np.abs(self.g - other.g).max() < tol)

    def to_json(self):
        return {"g": [[float(v) for v in row] for row in self.g], "psi0": self.psi0}

    @classmethod
    def from_json(cls, data):
        return cls(np.array(data["g"], dtype=float), data["psi0"])

    def __repr__(self):
        return f"Sl2TildeElement(g={self.g.tolist()}, psi0={self.psi0!r})"


def lifted_action(h, phi):
    return h(phi)


def compose(h1, h2):
    return Sl2TildeElement(h1.g @ h2.g, float(h1(h2.psi0)))


def invert(h):
    """Inverse element: f^{-1}(0) solves f(y) = 0."""
    gi = inv(h.g)
    raw = math.atan2(gi[0, 1], gi[1, 1])
    # f^{-1}(0) lies within pi of -psi0 since |f(y) - y - psi0| < pi fails only
    # by the bounded oscillation; pick the branch with f(y) closest to 0.
    base = raw + math.pi * round((-h.psi0 - raw) / math.pi)
    best = min((base + m * math.pi for m in (-2, -1, 0, 1, 2)), key=lambda y: abs(h(y)))
    return Sl2TildeElement(gi, best)


def rotation(alpha):
    """r_alpha: the endpoint of the path exp(t alpha J1), t in [0, 1]."""
    return Sl2TildeElement(exp_sl2(J1, alpha), alpha)


def hyperbolic(beta, n=0):
    """h_{beta, n} = r_{pi n} h_{beta, 0}."""
    return compose(rotation(math.pi * n), Sl2TildeElement(exp_sl2(J2, beta), 0.0))


def parabolic(sign, n=0):
    """p_n^{+-} = r_{pi n} p_0^{+-} with p_0^{+-} the endpoint of exp(+-t J3)."""
    sign = 1 if sign > 0 else -1
    p0 = Sl2TildeElement(exp_sl2(J3, sign), math.atan(sign))
    return compose(rotation(math.pi * n), p0)


# --------------------------------------------------------------- classification

@dataclass(frozen=True)
class ConjClass:
    kind: str  # "central" | "elliptic" | "hyperbolic" | "parabolic"
    n: int = 0
    alpha: float = None
    beta: float = None
    sign: int = None

    @classmethod
    def central(cls, n):
        return cls("central", n=int(n))

    @classmethod
    def elliptic(cls, alpha):
        return cls("elliptic", n=int(math.floor(alpha / math.pi)), alpha=float(alpha))

    @classmethod
    def hyperbolic(cls, beta, n):
        return cls("hyperbolic", n=int(n), beta=float(beta))

    @classmethod
    def parabolic(cls, sign, n):
        return cls("parabolic", n=int(n), sign=1 if sign > 0 else -1)

    def to_json(self):
        if self.kind == "central":
            return {"type": "central", "n": self.n}
        if self.kind == "elliptic":
            return {"type": "elliptic", "alpha": self.alpha}
        if self.kind == "hyperbolic":
            return {"type": "hyperbolic", "beta": self.beta, "n": self.n}
        return {"type": "parabolic", "sign": "+" if self.sign > 0 else "-", "n": self.n}

    def same_as(self, other, tol=1e-6):
        if self.kind != other.kind or self.n != other.n:
            return False
        if self.kind == "elliptic":
            return abs(self.alpha - other.alpha) < tol
        if self.kind == "hyperbolic":
            return abs(self.beta - other.beta) < tol
        if self.kind == "parabolic":
            return self.sign == other.sign
        return True

    def representative(self):
        if self.kind == "central":
            return rotation(math.pi * self.n)
        if self.kind == "elliptic":
            return rotation(self.alpha)
        if self.kind == "hyperbolic":
            return hyperbolic(self.beta, self.n)
        return parabolic(self.sign, self.n)

    def in_positive_list(self):
        """Membership in the list of classes making up the positive subset."""
        if self.kind in ("central", "elliptic"):
            return self.n >= 1 if self.kind == "central" else self.alpha > 0
        if self.kind == "hyperbolic":
            return self.n >= 0
        return self.n > 0 or (self.n == 0 and self.sign > 0)


def _displacement_samples(h, m=1024):
    phi = np.arange(m) * (np.pi / m)
    return phi, h(phi) - phi


def translation_number_iterated(h, iterations=2 ** 14):
    """Weighted Birkhoff average of the displacement along one orbit of 0.

    The smooth bump weight makes the average converge rapidly when the lifted
    action is conjugate to a translation; in general the error is O(1/N).
    """
    f = h
    phi = np.empty(iterations + 1)
    phi[0] = 0.0
    g, psi0 = f.g, f.psi0
    for i in range(iterations):
        phi[i + 1] = lifted_action_matrix(g, psi0, phi[i])
    steps = np.diff(phi)
    t = (np.arange(iterations) + 0.5) / iterations
    w = np.exp(-1.0 / (t * (1.0 - t)))
    return float((w * steps).sum() / w.sum() / np.pi)


def _trace_kind(h, tol=CLASS_TOL):
    tr = abs(np.trace(h.g))
    if tr < 2.0 - tol:
        return "elliptic"
    if tr > 2.0 + tol:
        return "hyperbolic"
    sgn = 1.0 if np.trace(h.g) > 0 else -1.0
    if np.abs(h.g - sgn * I2).max() < 1e-9:
        return "central"
    return "parabolic"


def _fixed_point_winding(h):
    """(f(p) - p)/pi at a fixed direction p of the projective action (an integer)."""
    phi, disp = _displacement_samples(h, 4096)
    resid = np.mod(disp + np.pi / 2, np.pi) - np.pi / 2
    i = int(np.argmin(np.abs(resid)))
    return int(round(disp[i] / np.pi))


def _elliptic_alpha(h):
    """Exact rotation parameter alpha of an elliptic element (not a multiple of pi)."""
    g = h.g
    a0 = math.acos(max(-1.0, min(1.0, 0.5 * np.trace(g))))
    base = a0 if g[0, 1] > 0 else -a0
    _, disp = _displacement_samples(h)
    mid = 0.5 * (disp.max() + disp.min())
    k = round((mid - base) / (2 * math.pi))
    return base + 2 * math.pi * k


def translation_number(h):
    """Translation number of h, exact from the class data where possible."""
    kind = _trace_kind(h)
    if kind == "central":
        return round(h.psi0 / math.pi)
    if kind == "elliptic":
        return _elliptic_alpha(h) / math.pi
    return _fixed_point_winding(h)


def classify(h):
    kind = _trace_kind(h)
    tr = abs(np.trace(h.g))
    if kind == "central":
        n = h.psi0 / math.pi
        if abs(n - round(n)) > 1e-9:
            raise BoundaryAmbiguous(f"central matrix with psi0/pi = {n}")
        return ConjClass.central(round(n))
    if kind == "elliptic":
        return ConjClass.elliptic(_elliptic_alpha(h))
    n = _fixed_point_winding(h)
    if kind == "hyperbolic":
        return ConjClass.hyperbolic(math.acosh(tr / 2.0), n)
    _, disp = _displacement_samples(h)
    off = disp - n * math.pi
    i = int(np.argmax(np.abs(off)))
    return ConjClass.parabolic(1 if off[i] > 0 else -1, n)


def in_positive_subset(h, tol=1e-12):
    _, disp = _displacement_samples(h)
    return bool(disp.max() > tol)
