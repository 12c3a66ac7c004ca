"""Developing maps gamma = (sin phi : cos phi), their potentials and monodromies.

A DevelopingMap evaluates Taylor jets of the angle phi at arbitrary points.
The base evaluator covers one period [0, 1]; everything else comes from the
quasi-periodicity phi(x + k) = h^k . phi(x) with the lifted monodromy h.
Sources: exponential group paths, Hill ODE solutions, the two group actions,
and raw samples (local polynomial interpolation).
"""
import math
from dataclasses import dataclass

import numpy as np

from . import jets
from .circle import MonotoneGridFunction, grid
from .errors import (NotImmersion, NotQuasiPeriodic, MonodromyMismatch,
                     PositiveTranslationNumber, ZeroTranslationNumber)
from .hill import HillPotential, potential_jet, solve_hill
from .sl2 import (Sl2TildeElement, classify, exp_sl2, exp_sl2_path, in_positive_subset,
                  inv, translation_number)

JET_ORDER = 6


class DevelopingMap:
    """Angle function of a developing map together with its lifted monodromy."""

    def __init__(self, base_jet, monodromy, grid_size=256, validate=True, source=None):
        self._base = base_jet
        self.monodromy = monodromy
        self.grid_size = int(grid_size)
        self.source = source
        self._powers = {0: Sl2TildeElement.identity(), 1: monodromy}
        self._phi = None
        if validate:
            self.validate()

    # -- evaluation --------------------------------------------------------
    def _power(self, k):
        if k not in self._powers:
            step = self.monodromy if k > 0 else self.monodromy.inverse()
            prev = self._power(k - 1 if k > 0 else k + 1)
            self._powers[k] = step @ prev
        return self._powers[k]

    def base_jet(self, x, k=JET_ORDER):
        return self._base(np.atleast_1d(np.asarray(x, dtype=float)), k)

    def jet(self, x, k=JET_ORDER):
        """Taylor jet of phi at arbitrary real points x; shape (k+1, len(x))."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        shift = np.floor(x).astype(int)
        out = np.empty((k + 1, len(x)))
        for s in np.unique(shift):
            sel = shift == s
            j = self._base(x[sel] - s, k)
            if s:
                j = self._power(int(s)).action_jet(j)
            out[:, sel] = j
        return out

    def __call__(self, x):
        return self.jet(x, 0)[0]

    @property
    def phi(self):
        """Samples of phi at k/N, k = 0..N (both endpoints)."""
        if self._phi is None:
            n = self.grid_size
            x = np.arange(n + 1) / n
            self._phi = self.base_jet(x, 0)[0]
        return self._phi

    def lift_jet(self, x, k=JET_ORDER - 1):
        """Jet of the normalized lift (phi')^{-1/2} (sin phi, cos phi); (k+1, 2, M)."""
        return lift_from_phi_jet(self.jet(x, k + 1))

    # -- validation --------------------------------------------------------
    def validate(self, seam_tol=1e-8):
        n = self.grid_size
        x = np.arange(n + 1) / n
        j = self.base_jet(x, 1)
        if not np.all(j[1] > 0):
            raise NotImmersion(f"phi' has minimum {j[1].min():.3e}")
        at_one = self.base_jet(np.array([1.0]))
        extended = self.monodromy.action_jet(self.base_jet(np.array([0.0])))
        scale = np.maximum(1.0, np.abs(extended[:, 0]))
        if abs(at_one[0, 0] - extended[0, 0]) > seam_tol:
            raise NotQuasiPeriodic(
                f"seam mismatch {at_one[0, 0] - extended[0, 0]:.3e}")
        if np.max(np.abs(at_one[:4, 0] - extended[:4, 0]) / scale[:4]) > 1e-7:
            raise NotQuasiPeriodic("derivatives do not match across the seam")
        if not in_positive_subset(self.monodromy):
            raise NotImmersion("monodromy outside the positive subset")

    def to_json(self):
        return {"phi": [float(v) for v in self.phi], "monodromy": self.monodromy.to_json()}

    @classmethod
    def from_json(cls, data):
        phi = np.asarray(data["phi"], dtype=float)
        return from_samples(phi, Sl2TildeElement.from_json(data["monodromy"]))


def lift_from_phi_jet(phi):
    s, c = jets.sincos(phi)
    r = jets.power(jets.deriv(phi), -0.5)
    k = jets.order(r)
    return np.stack([jets.mul(r, s[: k + 1]), jets.mul(r, c[: k + 1])], axis=1)


def _resolve_branch(raw, reference, period):
    return raw + period * np.round((reference - raw) / period)


# ------------------------------------------------------------- group paths

@dataclass(frozen=True, eq=False)
class GroupPathSpec:
    """gamma(x) = prod_i exp(c_i(x) X_i) . (sin phi0 : cos phi0), c_i(x) = x or 1."""
    factors: list
    phi0: float = 0.0

    def __post_init__(self):
        fs = []
        for X, mode in self.factors:
            X = np.array(X, dtype=float)
            if abs(np.trace(X)) > 1e-12:
                raise ValueError("factor matrices must be traceless")
            if mode not in ("x", "const"):
                raise ValueError(f"unknown factor mode {mode!r}")
            fs.append((X, mode))
        object.__setattr__(self, "factors", fs)

    def matrix_jet(self, x, k):
        """Jet of the product matrix P(x); shape (k+1, 2, 2, M)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = None
        for X, mode in self.factors:
            if mode == "x":
                e = exp_sl2_path(X, x)
                fj = np.empty((k + 1, 2, 2, len(x)))
                fj[0] = e
                xp = np.eye(2)
                for n in range(1, k + 1):
                    xp = xp @ X / n
                    fj[n] = np.einsum("ij,jk...->ik...", xp, e)
            else:
                fj = np.zeros((k + 1, 2, 2, len(x)))
                fj[0] = exp_sl2(X)[:, :, None]
            out = fj if out is None else jets.matmul(out, fj)
        if out is None:
            out = np.zeros((k + 1, 2, 2, len(x)))
            out[0] = np.eye(2)[:, :, None]
        return out

    def vector_jet(self, x, k):
        v0 = np.array([math.sin(self.phi0), math.cos(self.phi0)])
        return np.einsum("kij...,j->ki...", self.matrix_jet(x, k), v0)

    def to_json(self):
        return {"factors": [{"X": X.tolist(), "mode": m} for X, m in self.factors],
                "phi0": self.phi0}

    @classmethod
    def from_json(cls, data):
        return cls([(np.array(f["X"], dtype=float), f.get("mode", "x"))
                    for f in data["factors"]], data.get("phi0", 0.0))


def from_group_path(spec, n=256, validate=True):
    """Developing map of an exponential group path."""
    m = max(4 * n, 1024)
    xr = np.linspace(0.0, 1.0, m + 1)
    w = spec.vector_jet(xr, 1)
    raw = np.arctan2(w[0, 0], w[0, 1])
    ref = np.unwrap(raw)
    # angle increments between reference points must stay small for the unwrap
    if np.max(np.abs(np.diff(ref))) > 1.0:
        raise NotImmersion("group path turns too fast for the reference grid")
    offset = _resolve_branch(ref[0], spec.phi0, math.pi) - ref[0]

    def base(x, k):
        wj = spec.vector_jet(x, k)
        phi = jets.arg_vector(wj)
        phi[0] = _resolve_branch(phi[0], np.interp(x, xr, ref), 2 * math.pi) + offset
        return phi

    p0 = spec.matrix_jet(np.array([0.0]), 0)[0, :, :, 0]
    p1 = spec.matrix_jet(np.array([1.0]), 0)[0, :, :, 0]
    h = p1 @ inv(p0)
    # quasi-periodicity: P(x+1) v0 must be parallel to H P(x) v0
    xs = np.array([0.17, 0.5, 0.83])
    a = spec.vector_jet(xs + 1.0, 0)[0]
    b = np.einsum("ij,j...->i...", h, spec.vector_jet(xs, 0)[0])
    cross = (a[0] * b[1] - a[1] * b[0]) / (np.hypot(*a) * np.hypot(*b))
    if np.max(np.abs(cross)) > 1e-9:
        raise NotQuasiPeriodic("group path is not quasi-periodic")
    phi_0 = base(np.array([0.0]), 0)[0, 0]
    phi_1 = base(np.array([1.0]), 0)[0, 0]
    mono = Sl2TildeElement.lift(h)
    shift = round((phi_1 - mono(phi_0)) / math.pi) * math.pi
    mono = Sl2TildeElement(h, mono.psi0 + shift)
    return DevelopingMap(base, mono, n, validate=validate, source=("group_path", spec))


def exponential_path(A, phi0=0.0, n=256):
    """gamma(x) = exp(xA) . (sin phi0 : cos phi0)."""
    return from_group_path(GroupPathSpec([(A, "x")], phi0), n)


# ----------------------------------------------------------- Hill solutions

def from_hill_solution(sol, validate=True):
    """Developing map of the ratio (u1 : u2) of the normalized fundamental system."""
    nodes = sol.frames[:, 1, :]
    ang = np.unwrap(np.arctan2(nodes[:, 0], nodes[:, 1]))
    steps = sol.steps

    def base(x, k):
        u = sol.u_jet(x, k)
        phi = jets.arg_vector(u)
        i = np.clip(np.rint(x * steps).astype(int), 0, steps)
        phi[0] = _resolve_branch(phi[0], ang[i], 2 * math.pi)
        return phi

    mono = Sl2TildeElement(sol.monodromy_matrix.T, ang[-1])
    return DevelopingMap(base, mono, sol.grid_size, validate=validate, source=("hill", sol))


def from_potential(T, steps=None, check=True):
    return from_hill_solution(solve_hill(T, steps, check=check))


# -------------------------------------------------------------- raw samples

def from_samples(phi, monodromy, stencil=10):
    """Developing map from N+1 samples, with local polynomial jets.

    Uses a `stencil`-point Lagrange polynomial on the quasi-periodically extended
    sample array; accuracy is that of a high-order finite-difference scheme.
    """
    phi = np.asarray(phi, dtype=float)
    n = len(phi) - 1
    half = stencil // 2
    inner = phi[:-1]
    after = monodromy(inner[: half + 1])
    before = monodromy.inverse()(inner[n - half:])
    ext = np.concatenate([before, inner, after])  # index offset `half`

    def base(x, k):
        x = np.asarray(x, dtype=float)
        start = np.clip(np.floor(x * n).astype(int) - half + 1, -half, n + 1 - stencil + half)
        idx = start[:, None] + np.arange(stencil)[None, :]
        nodes = idx / n
        vals = ext[idx + half]
        t = (nodes - x[:, None]) * n
        vander = t[:, :, None] ** np.arange(stencil)[None, None, :]
        coef = np.linalg.solve(vander, vals[:, :, None])[:, :, 0]
        out = np.zeros((k + 1, len(x)))
        for p in range(min(k + 1, stencil)):
            out[p] = coef[:, p] * n ** p
        return out

    return DevelopingMap(base, monodromy, n, validate=True, source=("samples", phi))


# ------------------------------------------------------------ projections

def hill_of(gamma):
    """Hill potential (phi')^2 + S(phi)/2 sampled on the grid."""
    n = gamma.grid_size
    x = np.arange(n + 1) / n
    t = potential_jet(gamma.base_jet(x, 3))[0]
    if abs(t[-1] - t[0]) > 1e-6 * max(1.0, abs(t[0])):
        raise NotQuasiPeriodic(f"potential is not periodic ({t[-1] - t[0]:.3e})")
    return HillPotential(t[:-1])


p_of = hill_of


def potential_jet_at(gamma, x, k=2):
    return potential_jet(gamma.jet(x, k + 3))


def normalized_lift(gamma):
    """Samples (u1, u2) at k/N, k = 0..N, with the sign rule u2(0) >= 0."""
    n = gamma.grid_size
    u = gamma.lift_jet(np.arange(n + 1) / n, 2)[0]
    if u[1, 0] < 0 or (u[1, 0] == 0 and u[0, 0] < 0):
        u = -u
    return u[0], u[1]


def q_of(gamma, check=True, tol=1e-6, steps=None):
    """Lifted monodromy, cross-checked against the Hill ODE of hill_of(gamma)."""
    if check:
        sol = solve_hill(hill_of(gamma), steps)
        u = gamma.lift_jet(np.array([0.0]), 1)
        c = np.array([[u[1, 0, 0], u[0, 0, 0]], [u[1, 1, 0], u[0, 1, 0]]])
        expect = c @ sol.monodromy_matrix.T @ inv(c)
        g = gamma.monodromy.g
        scale = max(1.0, np.abs(g).max())
        err = min(np.abs(g - expect).max(), np.abs(g + expect).max()) / scale
        if err > tol:
            raise MonodromyMismatch(f"ODE monodromy differs by {err:.3e}")
    return gamma.monodromy


# ----------------------------------------------------------------- actions

def act_psl2(g, gamma):
    """(g . gamma)(x) = g . gamma(x), with the lift of g nearest the identity."""
    gt = Sl2TildeElement.lift(np.asarray(g, dtype=float))

    def base(x, k):
        return gt.action_jet(gamma.jet(x, k))

    mono = gt @ gamma.monodromy @ gt.inverse()
    return DevelopingMap(base, mono, gamma.grid_size, validate=False,
                         source=("psl2", g, gamma))


def act_diff(F, gamma):
    """(F . gamma)(x) = gamma(F^{-1}(x)); the monodromy is unchanged."""
    if abs(F.increment - 1.0) > 1e-12:
        raise ValueError("Diff action needs a seam-1 grid function")

    def base(x, k):
        y = F.inverse_jet(x, k)
        return jets.compose(gamma.jet(y[0], k), y)

    return DevelopingMap(base, gamma.monodromy, gamma.grid_size, validate=False,
                         source=("diff", F, gamma))


# ----------------------------------------------------------- stabilizers

def phi_inverse(gamma, y, guess, tol=1e-14, maxiter=100):
    """Solve phi(x) = y (vectorized) by bracketed Newton on the extended map."""
    y = np.asarray(y, dtype=float)
    x = np.array(guess, dtype=float)
    lo = x.copy()
    hi = x.copy()
    step = 0.25
    while True:
        bad = gamma(lo) > y
        if not bad.any():
            break
        lo = np.where(bad, lo - step, lo)
        step *= 2
    step = 0.25
    while True:
        bad = gamma(hi) < y
        if not bad.any():
            break
        hi = np.where(bad, hi + step, hi)
        step *= 2
    x = 0.5 * (lo + hi)
    for _ in range(maxiter):
        j = gamma.jet(x, 1)
        r = j[0] - y
        lo = np.where(r < 0, x, lo)
        hi = np.where(r > 0, x, hi)
        xn = x - r / j[1]
        out = (xn <= lo) | (xn >= hi)
        xn = np.where(out, 0.5 * (lo + hi), xn)
        if np.all(np.abs(xn - x) < tol):
            return xn
        x = xn
    return x


def stabilizer_generator(gamma):
    """F = phi^{-1} o (phi + pi), generator of the stabilizer when tau > 0."""
    if translation_number(gamma.monodromy) <= 1e-12:
        raise ZeroTranslationNumber("stabilizer is trivial when tau = 0")
    n = gamma.grid_size
    x = grid(n)
    phi = gamma.phi[:-1]
    slope = (gamma.phi[-1] - gamma.phi[0])
    guess = x + math.pi / max(slope, 1e-3)
    return MonotoneGridFunction(phi_inverse(gamma, phi + math.pi, guess), 1.0)


def centralizer_lift_stabilizer(gamma, g):
    """F = phi^{-1} o (g~ . phi) for the translation-number-zero lift g~ of g."""
    gt = Sl2TildeElement.lift(np.asarray(g, dtype=float))
    if abs(translation_number(gt)) > 0:
        gt = Sl2TildeElement(gt.g, gt.psi0 - math.pi * translation_number(gt))
    n = gamma.grid_size
    x = grid(n)
    target = gt(gamma.phi[:-1])
    return MonotoneGridFunction(phi_inverse(gamma, target, x), 1.0)


def circle_translation_number(F, iterations=2 ** 14):
    """Translation number lim F^N(0)/N of a seam-1 map, by weighted Birkhoff averaging."""
    c = np.fft.rfft(F.periodic_part) / F.grid_size
    c[1:-1] *= 2.0
    m = np.arange(len(c))
    x = 0.0
    steps = np.empty(iterations)
    for i in range(iterations):
        xn = F.increment * x + (np.exp(2j * np.pi * m * x) @ c).real
        steps[i] = xn - x
        x = xn
    t = (np.arange(iterations) + 0.5) / iterations
    w = np.exp(-1.0 / (t * (1.0 - t)))
    return float((w * steps).sum() / w.sum())


def range_endpoints(gamma, periods=64, tol=1e-4):
    """End points of the range of phi when the translation number vanishes."""
    h = gamma.monodromy
    tau = translation_number(h)
    if tau != 0:
        raise PositiveTranslationNumber(f"translation number {tau} is not zero")
    g = h.g
    evals = np.linalg.eigvals(g).real
    fixed = []
    for lam in sorted(set(np.round(evals, 12))):
        m = g - lam * np.eye(2)
        # kernel direction of the rank-one matrix m
        row = m[0] if np.abs(m[0]).max() >= np.abs(m[1]).max() else m[1]
        v = np.array([-row[1], row[0]])
        fixed.append(math.atan2(v[0], v[1]) % math.pi)
    fixed = sorted(set(np.round(fixed, 14)))
    parabolic = classify(h).kind == "parabolic"

    def orbit(k):
        v = gamma.phi[0]
        step = h if k > 0 else h.inverse()
        out = []
        for _ in range(abs(k)):
            v = float(step(v))
            out.append(v)
        return np.array(out)

    fwd, bwd = orbit(periods), orbit(-periods)

    def limit(seq):
        if not parabolic:
            return seq[-1]
        # phi_k = L + a/k + b/k^2 + ...: three-point Richardson in 1/k
        k = len(seq)
        p1, p2, p4 = seq[k // 4 - 1], seq[k // 2 - 1], seq[k - 1]
        r1 = 2 * p2 - p1
        r2 = 2 * p4 - p2
        return (4 * r2 - r1) / 3

    upper, lower = limit(fwd), limit(bwd)

    def nearest_fixed(v):
        cands = np.array([f + math.pi * round((v - f) / math.pi) for f in fixed])
        return cands[np.argmin(np.abs(cands - v))]

    up_fp, lo_fp = nearest_fixed(upper), nearest_fixed(lower)
    err = max(abs(upper - up_fp), abs(lower - lo_fp))
    return {"lower": float(lower), "upper": float(upper),
            "fixed_lower": float(lo_fp), "fixed_upper": float(up_fp),
            "width": float(up_fp - lo_fp), "fixed_points": [float(f) for f in fixed],
            "error": float(err), "ok": bool(err < tol)}


# ---------------------------------------------------------- classification

def orbit_invariants(T, steps=None):
    """Conjugacy class of the monodromy of the Hill operator d^2 + T."""
    gamma = from_potential(T, steps)
    return classify(q_of(gamma, check=False))
