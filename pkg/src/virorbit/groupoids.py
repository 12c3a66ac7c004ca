"""Multiplicative 2-forms on two action groupoids.

G x G => G (G = SL(2,R) acting on itself by conjugation) carries omega2;
Diff_Z x Hill => Hill carries omega_can.  Arrows compose as
(g1, a1)(g2, a2) = (g1 g2, a2) when a1 = g2 a2 g2^{-1}, with source a and target
g a g^{-1}; likewise (F1, T1)(F2, T2) = (F1 o F2, T2) when T1 = F2 . T2.
"""
from dataclasses import dataclass

import numpy as np

from .circle import MonotoneGridFunction, spectral_derivative
from .hill import HillPotential, coadjoint_action
from .sl2 import cartan3, exp_sl2, inv

GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def pairing(x, y):
    """<X, Y> = 2 tr(XY)."""
    return 2.0 * float(np.trace(x @ y))


def ad(g, x):
    return g @ x @ inv(g)


# ------------------------------------------------------------- G x G => G

@dataclass(frozen=True)
class GroupoidPoint2:
    """Arrow (g, a): a -> g a g^{-1}."""
    g: np.ndarray
    a: np.ndarray

    @property
    def source(self):
        return self.a

    @property
    def target(self):
        return ad(self.g, self.a)


@dataclass(frozen=True)
class Tangent2:
    """Tangent at (g, a): xi = g^{-1} dg and zeta = da a^{-1}."""
    xi: np.ndarray
    zeta: np.ndarray


def alpha(a, zeta):
    """The g-valued 1-form (theta^L + theta^R)/2 at a on da = zeta a."""
    return 0.5 * (inv(a) @ zeta @ a + zeta)


def chi(a, x1, x2):
    """chi(X1, X2) = <(Ad_a - Ad_{a^-1}) X1, X2> / 2."""
    return 0.5 * pairing(ad(a, x1) - ad(inv(a), x1), x2)


def omega2(pt, u, v):
    """omega = -<alpha, theta^L> + chi(theta^L, theta^L)/2 on two tangents."""
    au, av = alpha(pt.a, u.zeta), alpha(pt.a, v.zeta)
    return (-pairing(au, v.xi) + pairing(av, u.xi) + chi(pt.a, u.xi, v.xi))


def compose2(p1, p2, tol=1e-9):
    if np.abs(p1.a - p2.target).max() > tol:
        raise ValueError("arrows are not composable")
    return GroupoidPoint2(p1.g @ p2.g, p2.a)


def composable_tangent(p2, xi1, t2):
    """Tangent of the first factor forced by composability, and of the product."""
    g2, a2 = p2.g, p2.a
    da2 = t2.zeta @ a2
    da1 = g2 @ (t2.xi @ a2 + da2 - a2 @ t2.xi) @ inv(g2)
    a1 = p2.target
    t1 = Tangent2(xi1, da1 @ inv(a1))
    tp = Tangent2(ad(inv(g2), xi1) + t2.xi, t2.zeta)
    return t1, tp


def multiplicativity_residual2(p1, p2, xi1s, t2s):
    """Mult^*omega - pr1^*omega - pr2^*omega on two composable tangents."""
    pp = compose2(p1, p2)
    (t1a, tpa), (t1b, tpb) = (composable_tangent(p2, x, t) for x, t in zip(xi1s, t2s))
    return abs(omega2(pp, tpa, tpb) - omega2(p1, t1a, t1b) - omega2(p2, t2s[0], t2s[1]))


def dexp_left(z, w):
    """exp(-Z) d/ds exp(Z + sW) at s = 0, by Gauss-Legendre in the Duhamel integral."""
    u = 0.5 * (GL_NODES + 1.0)
    out = np.zeros((2, 2))
    for ui, wi in zip(u, GL_WEIGHTS):
        out += 0.5 * wi * exp_sl2(z, -ui) @ w @ exp_sl2(z, ui)
    return out


class Family2:
    """Three-parameter family (g exp(sum t_i X_i), exp(sum t_i Y_i) a) with exact tangents."""

    def __init__(self, g, a, xs, ys):
        self.g, self.a = np.asarray(g, float), np.asarray(a, float)
        self.xs, self.ys = [np.asarray(x, float) for x in xs], [np.asarray(y, float) for y in ys]

    def point(self, t):
        zx = sum(ti * x for ti, x in zip(t, self.xs))
        zy = sum(ti * y for ti, y in zip(t, self.ys))
        return GroupoidPoint2(self.g @ exp_sl2(zx, 1.0), exp_sl2(zy, 1.0) @ self.a)

    def tangent(self, t, i):
        zx = sum(ti * x for ti, x in zip(t, self.xs))
        zy = sum(ti * y for ti, y in zip(t, self.ys))
        xi = dexp_left(zx, self.xs[i])
        # right trivialization of d exp(Z) = exp(Z) dexp_left, times a on the right
        ez = exp_sl2(zy, 1.0)
        zeta = ez @ dexp_left(zy, self.ys[i]) @ inv(ez)
        return Tangent2(xi, zeta)

    def omega(self, t, i, j):
        return omega2(self.point(t), self.tangent(t, i), self.tangent(t, j))

    def theta_left_source(self, t, i):
        p = self.point(t)
        return inv(p.a) @ self.tangent(t, i).zeta @ p.a

    def theta_left_target(self, t, i):
        p = self.point(t)
        tg = self.tangent(t, i)
        g, a = p.g, p.a
        dg = g @ tg.xi
        da = tg.zeta @ a
        gi = inv(g)
        dt = dg @ a @ gi + g @ da @ gi - g @ a @ gi @ dg @ gi
        return inv(p.target) @ dt


def quasi_closed_residual2(fam, eps=1e-4):
    """(d omega, s^*eta - t^*eta) at t = 0 of a 3-parameter Family2."""
    stencil = [(-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)]

    def partial(k, i, j):
        acc = 0.0
        for s, w in stencil:
            t = np.zeros(3)
            t[k] = s * eps
            acc += w * fam.omega(t, i, j)
        return acc / eps

    d = partial(0, 1, 2) - partial(1, 0, 2) + partial(2, 0, 1)
    z = np.zeros(3)
    s_eta = cartan3(*(fam.theta_left_source(z, i) for i in range(3)))
    t_eta = cartan3(*(fam.theta_left_target(z, i) for i in range(3)))
    return d, s_eta - t_eta


# --------------------------------------------------- Diff_Z x Hill => Hill

@dataclass(frozen=True, eq=False)
class CanGroupoidPoint:
    """Arrow (F, T): T -> F . T, where F . T = coadjoint_action(F^{-1}, T)."""
    F: MonotoneGridFunction
    T: HillPotential

    @property
    def source(self):
        return self.T

    @property
    def target(self):
        return act_on_potential(self.F, self.T)


def act_on_potential(F, T):
    """Left action of Diff_Z on Hill potentials."""
    return coadjoint_action(F.inverse(), T)


PRINTED_THIRD = 0.5


def omega_can(pt, dF, dT, third=PRINTED_THIRD):
    """omega_can on tangents given as pairs of arrays (dF_i samples, dT_i samples).

    With m = dF/F' and T the source: int dT ^ m + int T m ^ m' + third * int m''' ^ m.
    """
    d1 = pt.F.derivative(1)
    t = pt.T.resample(pt.F.grid_size).samples
    m = [np.asarray(f) / d1 for f in dF]
    mp = [spectral_derivative(mi, 1) for mi in m]
    m3 = [spectral_derivative(mi, 3) for mi in m]
    dt = [np.asarray(x) for x in dT]

    def wedge(p, q):
        return np.mean(p[0] * q[1] - p[1] * q[0])

    return float(wedge(dt, m) + wedge([t * m[0], t * m[1]], mp) + third * wedge(m3, m))


def can_unit_rho_check(T, v, dT):
    """(omega_can(v^L, (0, dT)) at the unit over T, int dT v).

    The left-invariant field of v is F -> F o exp(-tv); at the unit over T it
    moves F by -v and the source by the infinitesimal action of v.
    """
    T = HillPotential.of(T)
    n = T.grid_size
    pt = CanGroupoidPoint(MonotoneGridFunction.identity(n), T)
    dl = -(spectral_derivative(T.samples, 1) * v.samples
           + 2 * T.samples * spectral_derivative(v.samples, 1)
           + 0.5 * spectral_derivative(v.samples, 3))
    lhs = omega_can(pt, (-v.samples, np.zeros(n)), (dl, dT.samples))
    rhs = float(np.mean(dT.samples * v.samples))
    return lhs, rhs


def can_multiplicativity_residual(F1_family, F2_family, T2_family, eps=1e-4,
                                  third=PRINTED_THIRD):
    """Mult^*omega - pr1^*omega - pr2^*omega on a 2-parameter composable family.

    Each argument maps a parameter pair to a MonotoneGridFunction or potential;
    tangents are obtained by 4-point finite differences.
    """
    stencil = [(-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)]

    def arrows(t):
        F1, F2, T2 = F1_family(t), F2_family(t), HillPotential.of(T2_family(t))
        T1 = act_on_potential(F2, T2)
        prod = CanGroupoidPoint(F1.compose(F2), T2)
        return CanGroupoidPoint(F1, T1), CanGroupoidPoint(F2, T2), prod

    base = arrows((0.0, 0.0))
    tangents = []
    for k in range(2):
        acc = None
        for s, w in stencil:
            t = [0.0, 0.0]
            t[k] = s * eps
            vals = [np.concatenate([p.F.samples, p.T.samples]) for p in arrows(tuple(t))]
            acc = [w * v for v in vals] if acc is None else [a + w * v for a, v in zip(acc, vals)]
        tangents.append([a / eps for a in acc])
    n = base[0].F.grid_size

    def om(idx):
        pt = base[idx]
        dF = (tangents[0][idx][:n], tangents[1][idx][:n])
        dT = (tangents[0][idx][n:], tangents[1][idx][n:])
        return omega_can(pt, dF, dT, third)

    w1, w2, wp = om(0), om(1), om(2)
    return abs(wp - w1 - w2), wp, w1, w2


def fit_third_coefficient(F1_family, F2_family, T2_family, eps=1e-4):
    """Coefficient of the third-derivative term that makes omega_can multiplicative.

    The defect is affine in the coefficient, so two evaluations fix it.
    Returns (coefficient, defect at that coefficient).
    """
    def defect(c):
        _, wp, w1, w2 = can_multiplicativity_residual(F1_family, F2_family, T2_family, eps, c)
        return wp - w1 - w2
    d0, d1 = defect(0.0), defect(1.0)
    if d1 == d0:
        return float("nan"), d0
    c = -d0 / (d1 - d0)
    return c, defect(c)
