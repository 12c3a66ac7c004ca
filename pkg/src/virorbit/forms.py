"""The 1-form Theta and the 2-form varpi_D on developing maps.

Tangent vectors are realized by finite-difference families: a k-parameter
family maps parameter tuples to developing maps, and derivatives along a
coordinate direction use the 4-point central stencil (2-point without
Richardson).  Two-forms are evaluated with the wedge convention
(P Q)(d_i, d_j) = P(d_i) Q(d_j) - P(d_j) Q(d_i).
"""

import numpy as np

from . import jets
from .circle import MonotoneGridFunction, grid, interpolant_jet
from .devmap import JET_ORDER, act_diff, act_psl2, from_potential
from .errors import DegenerateFamily, MonodromyMismatch, VirorbitError
from .hill import HillPotential, concomitant_pointwise, d_L_pointwise, potential_jet
from .sl2 import J1, cartan3, exp_sl2, inv

GAUSS_NODES, GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(16)
GAUSS_PANELS = 8


class DevMapFamily:
    """A k-parameter family of developing maps around a base point."""

    def __init__(self, evaluator, k, eps=1e-4, richardson=True, offset=None, cache=None):
        self.evaluator = evaluator
        self.k = int(k)
        self.eps = float(eps)
        self.richardson = richardson
        self.offset = np.zeros(self.k) if offset is None else np.asarray(offset, float)
        self._cache = {} if cache is None else cache

    def member(self, steps=None):
        """Member at base + eps * steps (steps: integer tuple, default the base)."""
        p = self.offset.copy()
        if steps is not None:
            p = p + self.eps * np.asarray(steps, dtype=float)
        key = tuple(np.round(p / self.eps, 6))
        if key not in self._cache:
            try:
                self._cache[key] = self.evaluator(tuple(p))
            except VirorbitError as exc:
                raise DegenerateFamily(f"member at {key} is invalid: {exc}") from exc
        return self._cache[key]

    @property
    def base(self):
        return self.member()

    def shifted(self, direction, steps):
        off = self.offset.copy()
        off[direction] += steps * self.eps
        return DevMapFamily(self.evaluator, self.k, self.eps, self.richardson, off,
                            self._cache)

    def stencil(self):
        if self.richardson:
            return [(-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12)]
        return [(-1, -0.5), (1, 0.5)]

    def fd(self, quantity, direction):
        """Derivative of quantity(member) along a coordinate direction."""
        out = 0.0
        for s, w in self.stencil():
            steps = np.zeros(self.k, dtype=int)
            steps[direction] = s
            out = out + w * np.asarray(quantity(self.member(steps)))
        return out / self.eps

    def fd_family(self, quantity, direction):
        """Derivative of quantity(shifted family) along a direction."""
        out = 0.0
        for s, w in self.stencil():
            out = out + w * np.asarray(quantity(self.shifted(direction, s)))
        return out / self.eps


# ------------------------------------------------------- family builders

def diffeo_flow(v, t, substeps=16):
    """Time-t flow of the vector field v (a -1-density) as a seam-1 grid function."""
    n = v.grid_size
    x = grid(n).copy()
    h = t / substeps
    for _ in range(substeps):
        k1 = interpolant_jet(v.samples, x, 0)[0]
        k2 = interpolant_jet(v.samples, x + 0.5 * h * k1, 0)[0]
        k3 = interpolant_jet(v.samples, x + 0.5 * h * k2, 0)[0]
        k4 = interpolant_jet(v.samples, x + h * k3, 0)[0]
        x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return MonotoneGridFunction(x, 1.0)


def psl2_op(X):
    """Direction of the generating vector field X_D = d/dt exp(-tX) . gamma."""
    X = np.asarray(X, dtype=float)
    return lambda t, gamma: act_psl2(exp_sl2(X, -t), gamma)


def diff_op(v):
    """Direction of v_D = d/dt gamma o exp(-tv), i.e. the flow of v acting on gamma."""
    return lambda t, gamma: gamma if t == 0 else act_diff(diffeo_flow(v, t), gamma)


def fixed_op(fn):
    return lambda t, gamma: fn(gamma)


def potential_builder(T, Qs, steps=None):
    """Base builder t -> developing map of the potential T + sum t_i Q_i."""
    T = HillPotential.of(T)
    def build(ts):
        s = T.samples + sum(t * q.samples for t, q in zip(ts, Qs))
        return from_potential(HillPotential(s), steps, check=False)
    return build, len(Qs)


def constant_builder(gamma):
    return (lambda ts: gamma), 0


def compose_family(builder, ops, eps=1e-4, richardson=True):
    """Family from a base builder (taking its own parameters) and single-parameter ops.

    builder: (callable(ts) -> DevelopingMap, number of parameters); ops are
    applied in order, each consuming the next parameter.
    """
    build, nb = builder

    def evaluator(params):
        gamma = build(params[:nb])
        for t, op in zip(params[nb:], ops):
            gamma = op(t, gamma)
        return gamma

    return DevMapFamily(evaluator, nb + len(ops), eps, richardson)


# ------------------------------------------------------------------ Theta

def phi_variation_jet(family, direction, x, k=JET_ORDER):
    return family.fd(lambda m: m.jet(x, k), direction)


def theta_jet(family, direction, x, k=JET_ORDER):
    """Jet of Theta(d_direction) = -d phi / phi' at points x (order k - 1)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    dphi = phi_variation_jet(family, direction, x, k)
    p1 = jets.deriv(family.base.jet(x, k))
    return -jets.div(dphi[:k], p1)


def theta(family, direction, x=None):
    """Samples of Theta along a direction (default: the grid k/N, k = 0..N)."""
    if x is None:
        n = family.base.grid_size
        x = np.arange(n + 1) / n
    return theta_jet(family, direction, x, 1)[0]


def upsilon(u1, u2):
    """Upsilon(s) = s (J1 s)^T / 2."""
    s = np.array([u1, u2], dtype=float)
    return 0.5 * np.outer(s, J1 @ s)


def upsilon_pairing(X, u):
    """2 tr(X Upsilon(u)) for lift samples u of shape (2, M)."""
    ju = np.einsum("ij,j...->i...", J1, u)
    xu = np.einsum("ij,j...->i...", X, u)
    return np.einsum("i...,i...->...", ju, xu)


def potential_at(gamma, x, k=2):
    """Jet of the Hill potential of gamma at points x (order k)."""
    return potential_jet(gamma.jet(x, k + 3))


def d_L_theta(family, direction, x):
    """Values of D_L Theta along a direction at points x."""
    th = jets.derivs(theta_jet(family, direction, x))
    tj = jets.derivs(potential_at(family.base, x, 1))
    return d_L_pointwise(tj[0], tj[1], th[0], th[1], th[3])


def potential_variation(family, direction, x):
    return family.fd(lambda m: potential_at(m, x, 0)[0], direction)


# ------------------------------------------------------- monodromy forms

def monodromy_matrix(gamma):
    return np.array(gamma.monodromy.g)


def monodromy_mc(family, direction):
    """(theta^L, theta^R) of the monodromy matrix along a direction."""
    a = monodromy_matrix(family.base)
    da = family.fd(monodromy_matrix, direction)
    ai = inv(a)
    return ai @ da, da @ ai


# ---------------------------------------------------------------- varpi_D

def _quadrature(x0):
    edges = x0 + np.arange(GAUSS_PANELS + 1) / GAUSS_PANELS
    half = 0.5 / GAUSS_PANELS
    mids = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mids[:, None] + half * GAUSS_NODES[None, :]).ravel()
    weights = np.tile(half * GAUSS_WEIGHTS, GAUSS_PANELS)
    return nodes, weights


def _x0_value(family, x0, as_index):
    if as_index:
        return x0 / family.base.grid_size
    return float(x0)


def varpi_D(family, i, j, x0=0, as_index=True):
    """varpi_D(d_i, d_j): the integral over [x0, x0 + 1] plus the boundary term."""
    if i == j:
        return 0.0
    x0 = _x0_value(family, x0, as_index)
    nodes, weights = _quadrature(x0)
    pts = np.concatenate([nodes, [x0, x0 + 1.0]])
    a = jets.derivs(theta_jet(family, i, pts))
    b = jets.derivs(theta_jet(family, j, pts))
    tj = jets.derivs(potential_at(family.base, pts, 1))
    dla = d_L_pointwise(tj[0], tj[1], a[0], a[1], a[3])
    dlb = d_L_pointwise(tj[0], tj[1], b[0], b[1], b[3])
    m = len(nodes)
    integral = np.sum(weights * (dla[:m] * b[0, :m] - dlb[:m] * a[0, :m]))
    p, q = m, m + 1  # x0 and x0 + 1
    t0 = tj[0, p]
    bdry = (2 * t0 * (a[0, p] * b[0, q] - b[0, p] * a[0, q])
            + 0.5 * (a[0, p] * b[2, q] - b[0, p] * a[2, q])
            - 0.5 * (a[1, p] * b[1, q] - b[1, p] * a[1, q])
            + 0.5 * (a[2, p] * b[0, q] - b[2, p] * a[0, q]))
    return float(-integral - bdry)


def varpi_D_density_form(family, i, j, x0=0):
    """Same 2-form through the symmetric concomitant B(Theta_0, kappa^* Theta) (cross-check)."""
    x0 = _x0_value(family, x0, True)
    nodes, weights = _quadrature(x0)
    pts = np.concatenate([nodes, [x0, x0 + 1.0]])
    a = jets.derivs(theta_jet(family, i, pts))
    b = jets.derivs(theta_jet(family, j, pts))
    tj = jets.derivs(potential_at(family.base, pts, 1))
    dla = d_L_pointwise(tj[0], tj[1], a[0], a[1], a[3])
    dlb = d_L_pointwise(tj[0], tj[1], b[0], b[1], b[3])
    m = len(nodes)
    integral = np.sum(weights * (dla[:m] * b[0, :m] - dlb[:m] * a[0, :m]))
    p, q = m, m + 1
    bab = concomitant_pointwise(tj[0, p], a[0, p], a[1, p], a[2, p], b[0, q], b[1, q], b[2, q])
    bba = concomitant_pointwise(tj[0, p], b[0, p], b[1, p], b[2, p], a[0, q], a[1, q], a[2, q])
    return float(-integral - (bab - bba))


# ------------------------------------------------------------ identities

def theta_mc_residual(family, i=0, j=1, x=None):
    """max |dTheta(d_i, d_j) + [Theta_i, Theta_j]| with [a, b] = a b' - b a'."""
    if x is None:
        n = family.base.grid_size
        x = np.arange(n + 1) / n
    ti = theta_jet(family, i, x, 2)
    tj = theta_jet(family, j, x, 2)
    d_i_tj = family.fd_family(lambda f: theta_jet(f, j, x, 2)[0], i)
    d_j_ti = family.fd_family(lambda f: theta_jet(f, i, x, 2)[0], j)
    d_theta = d_i_tj - d_j_ti
    br = ti[0] * tj[1] - tj[0] * ti[1]
    return float(np.max(np.abs(d_theta + br)))


def kappa_shift_residual(family, direction, x=None):
    """max |kappa^*Theta - Theta + 2 tr(q^*theta^L Upsilon(u))| over [0, 1]."""
    gamma = family.base
    if x is None:
        n = gamma.grid_size
        x = np.arange(n + 1) / n
    th0 = theta_jet(family, direction, x, 1)[0]
    th1 = theta_jet(family, direction, x + 1.0, 1)[0]
    thl, _ = monodromy_mc(family, direction)
    u = gamma.lift_jet(x, 0)[0]
    rhs = -upsilon_pairing(thl, u)
    return float(np.max(np.abs(th1 - th0 - rhs)))


def d_l_theta_residuals(family, direction, x=None):
    """(|D_L Theta - dT|, |kappa^* D_L Theta - D_L Theta|) in max norm."""
    if x is None:
        n = family.base.grid_size
        x = np.arange(n) / n
    dlt = d_L_theta(family, direction, x)
    dlt1 = d_L_theta(family, direction, x + 1.0)
    dT = potential_variation(family, direction, x)
    return float(np.max(np.abs(dlt - dT))), float(np.max(np.abs(dlt1 - dlt)))


def psl2_contraction_rhs(family, aux, X):
    """tr(X q^*(theta^L + theta^R)) along the aux direction."""
    thl, thr = monodromy_mc(family, aux)
    return float(np.trace(X @ (thl + thr)))


def diff_contraction_rhs(family, aux, v):
    """-int dT v along the aux direction."""
    n = family.base.grid_size
    x = np.arange(n) / n
    dT = potential_variation(family, aux, x)
    return float(-np.mean(dT * v.samples))


def contraction_psl2_check(gamma, X, aux_builder_or_op, x0=0, eps=1e-4):
    """Residual of iota(X_D) varpi_D = tr(X q^*(theta^L + theta^R)).

    aux is either a single-parameter op (t, gamma) -> gamma or a
    builder (callable, 1); the family is (aux, X) with X applied last.
    """
    fam = _two_direction_family(gamma, aux_builder_or_op, psl2_op(X), eps)
    lhs = varpi_D(fam, 1, 0, x0)
    rhs = psl2_contraction_rhs(fam, 0, X)
    return abs(lhs - rhs), lhs, rhs


def contraction_diff_check(gamma, v, aux_builder_or_op, x0=0, eps=1e-4):
    """Residual of iota(v_D) varpi_D = -int (dT) v."""
    fam = _two_direction_family(gamma, aux_builder_or_op, diff_op(v), eps)
    lhs = varpi_D(fam, 1, 0, x0)
    rhs = diff_contraction_rhs(fam, 0, v)
    return abs(lhs - rhs), lhs, rhs


def _two_direction_family(gamma, aux, op, eps):
    if isinstance(aux, tuple):
        return compose_family(aux, [op], eps)
    return compose_family(constant_builder(gamma), [aux, op], eps)


def exterior_derivative(form, family):
    """d form (d_0, d_1, d_2) for a 2-form evaluator form(family, i, j)."""
    d0 = family.fd_family(lambda f: form(f, 1, 2), 0)
    d1 = family.fd_family(lambda f: form(f, 0, 2), 1)
    d2 = family.fd_family(lambda f: form(f, 0, 1), 2)
    return float(d0 - d1 + d2)


def eta_pullback(family):
    """Cartan 3-form on the left-trivialized monodromy variations."""
    xs = [monodromy_mc(family, i)[0] for i in range(3)]
    return cartan3(*xs)


def varpi_d3_check(family, x0=0):
    """(d varpi_D, q^* eta) on a 3-parameter family."""
    dv = exterior_derivative(lambda f, i, j: varpi_D(f, i, j, x0), family)
    return dv, eta_pullback(family)


def g1_descent_check(gamma, F, X, aux, x0=0, eps=1e-4):
    """Contractions of the two legs (gamma, F.gamma) with the diagonal X_D.

    aux is either a single-parameter op or a builder tuple (then gamma is unused);
    both legs share the aux deformation before F is applied, so their
    monodromies agree along the family.  Returns (|leg1 - leg2|, leg1, leg2).
    """
    if isinstance(aux, tuple):
        build, nb = aux
        if nb != 1:
            raise ValueError("aux builder must take one parameter")
        start = lambda t: build((t,))
    else:
        start = lambda t: aux(t, gamma)
    op = psl2_op(X)
    leg1 = DevMapFamily(lambda p: op(p[1], start(p[0])), 2, eps)
    leg2 = DevMapFamily(lambda p: op(p[1], act_diff(F, start(p[0]))), 2, eps)
    for s in (-2, -1, 1, 2):
        a = leg1.member((s, 0)).monodromy
        b = leg2.member((s, 0)).monodromy
        if not a.close_to(b, 1e-9):
            raise MonodromyMismatch("pair leaves the fiber product")
    w1 = varpi_D(leg1, 1, 0, x0)
    w2 = varpi_D(leg2, 1, 0, x0)
    return abs(w1 - w2), w1, w2
