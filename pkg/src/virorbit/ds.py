"""Drinfeld-Sokolov picture: connections, frames, the loop-group 2-form and the N-gauge slice."""
from dataclasses import dataclass

import numpy as np

from . import jets
from .circle import SampledDensity, interpolant_jet, spectral_derivative
from .errors import NotMonotone, NotOnLevelSet
from .forms import _quadrature, d_L_pointwise, potential_at, theta_jet
from .hill import HillPotential
from .sl2 import inv


def pairing(x, y):
    """<X, Y> = 2 tr(XY), broadcast over trailing sample axes."""
    return 2.0 * np.einsum("ij...,ji...->...", x, y)


@dataclass(frozen=True, eq=False)
class GaugeConnection:
    """Periodic sl2-valued connection coefficients, shape (N, 2, 2)."""
    A: np.ndarray

    def __post_init__(self):
        a = np.array(self.A, dtype=float)
        if a.ndim != 3 or a.shape[1:] != (2, 2):
            raise ValueError("connection samples must have shape (N, 2, 2)")
        if np.abs(a[:, 0, 0] + a[:, 1, 1]).max() > 1e-12:
            raise ValueError("connection is not traceless")
        a.setflags(write=False)
        object.__setattr__(self, "A", a)

    @property
    def grid_size(self):
        return self.A.shape[0]

    def to_json(self):
        return {"grid_size": self.grid_size, "A": self.A.tolist()}

    @classmethod
    def from_json(cls, data):
        c = cls(np.asarray(data["A"], dtype=float))
        if data.get("grid_size", c.grid_size) != c.grid_size:
            raise ValueError("grid_size does not match the sample count")
        return c


def ds_connection(T):
    """A = (0 T; -1 0)."""
    T = HillPotential.of(T)
    a = np.zeros((T.grid_size, 2, 2))
    a[:, 0, 1] = T.samples
    a[:, 1, 0] = -1.0
    return GaugeConnection(a)


def n_gauge_action(chi, A):
    """Gauge action of the unipotent group exp(chi E12) on a traceless connection."""
    c = np.asarray(chi.samples if isinstance(chi, SampledDensity) else chi, dtype=float)
    a = A.A
    a11, a12, a21 = a[:, 0, 0], a[:, 0, 1], a[:, 1, 0]
    out = np.empty_like(a)
    out[:, 0, 0] = a11 + c * a21
    out[:, 0, 1] = a12 - 2 * c * a11 - c ** 2 * a21 - spectral_derivative(c, 1)
    out[:, 1, 0] = a21
    out[:, 1, 1] = -out[:, 0, 0]
    return GaugeConnection(out)


def ds_reduce(A, tol=1e-10):
    """Hill potential of the slice representative of A on the level set A21 = -1."""
    a21 = A.A[:, 1, 0]
    if np.abs(a21 + 1.0).max() > tol:
        raise NotOnLevelSet(f"A21 deviates from -1 by {np.abs(a21 + 1).max():.3e}")
    a11 = A.A[:, 0, 0]
    if not np.any(a11):
        return HillPotential(A.A[:, 0, 1].copy())
    return HillPotential(n_gauge_action(a11, A).A[:, 0, 1])


def diff_to_gauge(F):
    """g = (F'^{1/2}, -F'' F'^{-3/2} / 2; 0, F'^{-1/2}) sampled on the grid."""
    d1 = F.derivative(1)
    if np.any(d1 <= 0):
        raise NotMonotone("F' must be positive")
    d2 = F.derivative(2)
    g = np.zeros((F.grid_size, 2, 2))
    g[:, 0, 0] = np.sqrt(d1)
    g[:, 0, 1] = -0.5 * d2 * d1 ** -1.5
    g[:, 1, 1] = d1 ** -0.5
    return g


def gauge_transform(g, A):
    """g . A = g A g^{-1} - g' g^{-1} for a sampled gauge field g."""
    gp = np.empty_like(g)
    for i in range(2):
        for j in range(2):
            gp[:, i, j] = spectral_derivative(g[:, i, j], 1)
    gi = np.linalg.inv(g)
    out = g @ A.A @ gi - gp @ gi
    # det g = 1 makes the trace vanish up to round-off; remove it exactly
    tr = 0.5 * (out[:, 0, 0] + out[:, 1, 1])
    out[:, 0, 0] -= tr
    out[:, 1, 1] -= tr
    return GaugeConnection(out)


def reparametrize(A, F):
    """Pullback of the connection 1-form A dx under F: A(F(x)) F'(x)."""
    d1 = F.derivative(1)
    out = np.empty_like(A.A)
    for i in range(2):
        for j in range(2):
            out[:, i, j] = interpolant_jet(A.A[:, i, j], F.samples, 0)[0] * d1
    return GaugeConnection(out)


def ds_equivariance_residual(T, F):
    """max |ds_reduce(g_F . F^*A) - coadjoint_action(F, T)| with A = ds_connection(T)."""
    from .hill import coadjoint_action
    A = ds_connection(T)
    red = ds_reduce(gauge_transform(diff_to_gauge(F), reparametrize(A, F)), tol=1e-8)
    return float(np.max(np.abs(red.samples - coadjoint_action(F, T).samples)))


# ------------------------------------------------------------------ frames

@dataclass(frozen=True, eq=False)
class QuasiPeriodicFrame:
    """tau = [[u1', u2'], [u1, u2]] on k/N, k = 0..N; tau(1) = M tau(0)."""
    tau: np.ndarray
    monodromy: object

    @property
    def matrix_monodromy(self):
        return self.tau[-1] @ inv(self.tau[0])


def frame_jet(gamma, x, k=3):
    """Jet of tau at points x, shape (k+1, 2, 2, M)."""
    u = gamma.lift_jet(x, k + 1)
    du = jets.deriv(u)
    return np.stack([du, u[: k + 1]], axis=1)


def frame_of(gamma):
    n = gamma.grid_size
    tau = frame_jet(gamma, np.arange(n + 1) / n, 0)[0]
    return QuasiPeriodicFrame(np.moveaxis(tau, -1, 0), gamma.monodromy)


def _adjugate(m):
    """Inverse of det-1 matrices stored as (..., 2, 2, M) jets."""
    out = np.empty_like(m)
    out[..., 0, 0, :] = m[..., 1, 1, :]
    out[..., 1, 1, :] = m[..., 0, 0, :]
    out[..., 0, 1, :] = -m[..., 0, 1, :]
    out[..., 1, 0, :] = -m[..., 1, 0, :]
    return out


class FrameFamily:
    """Image of a developing-map family under the frame embedding.

    Optional constant matrices act on every frame: tau -> left tau right.
    """

    def __init__(self, family, left=None, right=None):
        self.family = family
        self.left = np.eye(2) if left is None else np.asarray(left, float)
        self.right = np.eye(2) if right is None else np.asarray(right, float)

    def tau_jet(self, member, x, k):
        t = frame_jet(member, x, k)
        return np.einsum("ij,kjlm,ln->kinm", self.left, t, self.right)

    def xi_jet(self, direction, x, k=2):
        """Jet (order k) of xi = d tau tau^{-1} along a direction."""
        dtau = self.family.fd(lambda m: self.tau_jet(m, x, k), direction)
        return jets.matmul(dtau, _adjugate(self.tau_jet(self.family.base, x, k)))

    def connection_at(self, x):
        """A = -tau' tau^{-1} at points x, shape (2, 2, M)."""
        t = self.tau_jet(self.family.base, x, 1)
        return -np.einsum("ijm,jkm->ikm", t[1], _adjugate(t[:1])[0])

    def matrix_monodromy(self, member):
        t0 = self.tau_jet(member, np.array([0.0]), 0)[0, :, :, 0]
        t1 = self.tau_jet(member, np.array([1.0]), 0)[0, :, :, 0]
        return t1 @ inv(t0)


def xi_closed_form(family, direction, x):
    """(-Theta'/2, Theta''/2 + T Theta; -Theta, Theta'/2) from Theta and T."""
    th = jets.derivs(theta_jet(family, direction, x, 3))
    t = potential_at(family.base, x, 0)[0]
    out = np.empty((2, 2, len(np.atleast_1d(x))))
    out[0, 0] = -0.5 * th[1]
    out[0, 1] = 0.5 * th[2] + t * th[0]
    out[1, 0] = -th[0]
    out[1, 1] = 0.5 * th[1]
    return out


def xi_matrix(frames, direction, x=None):
    """(finite-difference xi, closed-form xi) on the grid of [0, 1]."""
    if x is None:
        n = frames.family.base.grid_size
        x = np.arange(n + 1) / n
    return frames.xi_jet(direction, x, 0)[0], xi_closed_form(frames.family, direction, x)


def covariant_xi(frames, direction, x):
    """(xi, d_A xi) with d_A xi = xi' + [A, xi]."""
    j = frames.xi_jet(direction, x, 1)
    a = frames.connection_at(x)
    xi, dxi = j[0], j[1]
    br = np.einsum("ijm,jkm->ikm", a, xi) - np.einsum("ijm,jkm->ikm", xi, a)
    return xi, dxi + br


def integrand_check(frames, i, j, x=None):
    """Pointwise comparison of (1/2)<xi ^ d_A xi> with Theta ^ D_L Theta.

    Returns (max residual, left side, right side) on the points x.
    """
    if x is None:
        n = frames.family.base.grid_size
        x = np.arange(n) / n
    xi_i, cov_i = covariant_xi(frames, i, x)
    xi_j, cov_j = covariant_xi(frames, j, x)
    lhs = 0.5 * (pairing(xi_i, cov_j) - pairing(xi_j, cov_i))
    fam = frames.family
    a = jets.derivs(theta_jet(fam, i, x))
    b = jets.derivs(theta_jet(fam, j, x))
    tj = jets.derivs(potential_at(fam.base, x, 1))
    dla = d_L_pointwise(tj[0], tj[1], a[0], a[1], a[3])
    dlb = d_L_pointwise(tj[0], tj[1], b[0], b[1], b[3])
    rhs = a[0] * dlb - b[0] * dla
    return float(np.max(np.abs(lhs - rhs))), lhs, rhs


def covariant_shape_residual(frames, direction, x=None):
    """max distance of d_A xi from (0, -D_L Theta; 0, 0)."""
    if x is None:
        n = frames.family.base.grid_size
        x = np.arange(n) / n
    _, cov = covariant_xi(frames, direction, x)
    fam = frames.family
    a = jets.derivs(theta_jet(fam, direction, x))
    tj = jets.derivs(potential_at(fam.base, x, 1))
    dla = d_L_pointwise(tj[0], tj[1], a[0], a[1], a[3])
    target = np.zeros_like(cov)
    target[0, 1] = -dla
    return float(np.max(np.abs(cov - target)))


def varpi_P(frames, i, j, x0=0, as_index=True):
    """-(1/2) int <xi ^ d_A xi> over [x0, x0 + 1] - (1/2) <xi_{x0} ^ xi_{x0+1}>."""
    if i == j:
        return 0.0
    base = frames.family.base
    x0 = x0 / base.grid_size if as_index else float(x0)
    nodes, weights = _quadrature(x0)
    pts = np.concatenate([nodes, [x0, x0 + 1.0]])
    xi_i, cov_i = covariant_xi(frames, i, pts)
    xi_j, cov_j = covariant_xi(frames, j, pts)
    m = len(nodes)
    dens = pairing(xi_i, cov_j) - pairing(xi_j, cov_i)
    integral = np.sum(weights * dens[:m])
    p, q = m, m + 1
    bdry = (pairing(xi_i[..., p], xi_j[..., q]) - pairing(xi_j[..., p], xi_i[..., q]))
    return float(-0.5 * integral - 0.5 * bdry)


def frame_q(frames, member, x0=0.0):
    """Loop-group monodromy q with tau(x + 1) = tau(x) q^{-1} (right action of G on frames)."""
    t0 = frames.tau_jet(member, np.array([x0]), 0)[0, :, :, 0]
    t1 = frames.tau_jet(member, np.array([x0 + 1.0]), 0)[0, :, :, 0]
    return inv(t1) @ t0


def frame_q_mc(frames, direction):
    """(theta^L, theta^R) of the loop-group monodromy along a direction."""
    fam = frames.family
    q = frame_q(frames, fam.base)
    dq = fam.fd(lambda m: frame_q(frames, m), direction)
    qi = inv(q)
    return qi @ dq, dq @ qi


def varpi_P_direct(frames, i, j, x0=0, as_index=True):
    """Same 2-form with Xi = tau^{-1} d tau and the boundary term (1/2)<Xi_{x0} ^ q^*theta^L>."""
    if i == j:
        return 0.0
    fam = frames.family
    base = fam.base
    x0 = x0 / base.grid_size if as_index else float(x0)
    nodes, weights = _quadrature(x0)
    pts = np.concatenate([nodes, [x0]])
    tau = frames.tau_jet(base, pts, 1)
    tinv = _adjugate(tau)

    def left_xi(d):
        dtau = fam.fd(lambda m: frames.tau_jet(m, pts, 1), d)
        return jets.matmul(tinv, dtau)

    xi_i, xi_j = left_xi(i), left_xi(j)
    dens = pairing(xi_i[0], xi_j[1]) - pairing(xi_j[0], xi_i[1])
    m = len(nodes)
    integral = np.sum(weights * dens[:m])
    q = frame_q(frames, base, x0)
    qi = inv(q)
    th = [qi @ fam.fd(lambda mm: frame_q(frames, mm, x0), d) for d in (i, j)]
    bdry = pairing(xi_i[0][..., m], th[1]) - pairing(xi_j[0][..., m], th[0])
    return float(-0.5 * integral + 0.5 * bdry)


def psl2_contraction_P(frames, aux, Y):
    """-(1/2) <q^*(theta^L + theta^R), Y> along aux.

    Frames carry the right action tau -> tau g^{-1}, whose generating field for Y
    is d/dt tau exp(tY).  A developing-map direction exp(-tX) . gamma moves frames
    by tau exp(-tX)^T, which is the loop-group direction Y = -X^T.
    """
    thl, thr = frame_q_mc(frames, aux)
    return float(-np.trace((thl + thr) @ Y))
