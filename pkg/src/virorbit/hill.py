"""Hill operators L = d^2 + T, the Virasoro coadjoint action and the Hill ODE."""
from dataclasses import dataclass

import numpy as np

from . import jets
from .circle import (SampledDensity, differentiate, grid,
                     integrate_period, interpolant_jet, resample_samples)
from .errors import StepsTooCoarse, WeightMismatch


class HillPotential(SampledDensity):
    """Weight-2 density T of the Hill operator d^2 + T."""

    def __init__(self, samples):
        super().__init__(2, samples)

    @classmethod
    def of(cls, density):
        if isinstance(density, HillPotential):
            return density
        if density.weight != 2:
            raise WeightMismatch(f"Hill potential needs weight 2, got {density.weight}")
        return cls(density.samples)

    @classmethod
    def constant(cls, value, n=256):
        return cls(np.full(n, float(value)))

    @classmethod
    def from_function(cls, f, n=256):
        return cls(f(grid(n)))


def _require(d, weight):
    if d.weight != weight:
        raise WeightMismatch(f"expected weight {weight}, got {d.weight}")


# ---------------------------------------------------------------- Schwarzian

def schwarzian_from_derivatives(d1, d2, d3):
    return d3 / d1 - 1.5 * (d2 / d1) ** 2


def schwarzian(F):
    """Schwarzian of a monotone grid function, as a weight-2 density."""
    d1, d2, d3 = (F.derivative(p) for p in (1, 2, 3))
    return SampledDensity(2, schwarzian_from_derivatives(d1, d2, d3))


def schwarzian_jet(phi):
    """Jet of S(phi) from the jet of phi (three orders lower)."""
    p1 = jets.deriv(phi)
    p2 = jets.deriv(p1)
    p3 = jets.deriv(p2)
    r = jets.div(p2, p1[: jets.order(p2) + 1])
    return jets.div(p3, p1[: jets.order(p3) + 1]) - 1.5 * jets.mul(r, r)[: jets.order(p3) + 1]


def potential_jet(phi):
    """Jet of the Hill potential (phi')^2 + S(phi)/2 from the jet of phi."""
    s = schwarzian_jet(phi)
    p1 = jets.deriv(phi)[: jets.order(s) + 1]
    return jets.mul(p1, p1) + 0.5 * s


def coadjoint_action(F, T):
    """Potential of F^{-1}.L: T(F(x)) F'(x)^2 + S(F)(x)/2."""
    _require(T, 2)
    if F.grid_size != T.grid_size:
        T = T.resample(F.grid_size)
    d1 = F.derivative(1)
    tf = interpolant_jet(T.samples, F.samples, 0)[0]
    return HillPotential(tf * d1 ** 2 + 0.5 * schwarzian(F).samples)


def pullback(F, Q, weight=2):
    """F^*Q for a weight-r density Q: Q(F(x)) F'(x)^r."""
    if F.grid_size != Q.grid_size:
        Q = Q.resample(F.grid_size)
    return SampledDensity(Q.weight, interpolant_jet(Q.samples, F.samples, 0)[0]
                          * F.derivative(1) ** Q.weight)


# ---------------------------------------------------------- D_L and friends

def lie_derivative(w, v):
    """Lie derivative of the -1-density v along w: w v' - v w'."""
    return SampledDensity(-1, w.samples * differentiate(v).samples
                          - v.samples * differentiate(w).samples)


def d_L(v, T):
    """D_L v = -(T' v + 2 T v' + v'''/2), a weight-2 density."""
    _require(v, -1)
    _require(T, 2)
    v, T = v._match(T)
    tp = differentiate(T).samples
    v1 = differentiate(v).samples
    v3 = differentiate(v, 3).samples
    return SampledDensity(2, -(tp * v.samples + 2 * T.samples * v1 + 0.5 * v3))


def d_L_pointwise(T, dT, v, dv, d3v):
    return -(dT * v + 2 * T * dv + 0.5 * d3v)


def concomitant_pointwise(T, a, da, d2a, b, db, d2b):
    return 2 * T * a * b + 0.5 * (d2a * b - da * db + a * d2b)


def bilinear_concomitant(T, v1, v2, x0):
    """B_{L,x0}(v1, v2) at the grid index x0."""
    _require(v1, -1)
    _require(v2, -1)
    n = T.grid_size
    i = int(x0) % n
    d = [differentiate(v, p).samples[i] if p else v.samples[i]
         for v in (v1, v2) for p in (0, 1, 2)]
    return float(concomitant_pointwise(T.samples[i], *d))


def gelfand_fuchs(v1, v2):
    """c(v1, v2) = (1/2) int v1''' v2."""
    _require(v1, -1)
    _require(v2, -1)
    return 0.5 * integrate_period(differentiate(v1, 3) * v2)


@dataclass(frozen=True, eq=False)
class VirasoroElement:
    v: SampledDensity
    central: float = 0.0

    def __post_init__(self):
        _require(self.v, -1)


def virasoro_bracket(a, b):
    """Bracket with linear part v1 v2' - v2 v1' and central part int (D_0 v1) v2.

    The central term is the cocycle induced by the zero potential, which is
    -gelfand_fuchs(v1, v2); with it evaluate(bracket(a, b), T) = int (D_L v1) v2.
    """
    return VirasoroElement(lie_derivative(a.v, b.v), -gelfand_fuchs(a.v, b.v))


def evaluate(a, T):
    """Affine functional a(L) = int T v + central."""
    _require(T, 2)
    return integrate_period(T * a.v) + a.central


# ------------------------------------------------------------ Hill ODE

def _rk4_propagators(tv, h):
    """One-step RK4 maps for Y' = A(x) Y, A = [[0, -T], [1, 0]].

    tv holds T at 0, h/2, h, 3h/2, ... (2 * steps + 1 values).
    """
    steps = (len(tv) - 1) // 2
    def amat(t):
        a = np.zeros((len(t), 2, 2))
        a[:, 0, 1] = -t
        a[:, 1, 0] = 1.0
        return a
    a0 = amat(tv[0:-1:2])
    am = amat(tv[1::2])
    a1 = amat(tv[2::2])
    eye = np.broadcast_to(np.eye(2), (steps, 2, 2))
    k1 = a0
    k2 = am @ (eye + 0.5 * h * k1)
    k3 = am @ (eye + 0.5 * h * k2)
    k4 = a1 @ (eye + h * k3)
    return eye + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def _prefix_products(s):
    """P_i = S_i S_{i-1} ... S_0 by a doubling scan."""
    p = s.copy()
    d = 1
    while d < len(p):
        p[d:] = p[d:] @ p[:-d].copy()
        d *= 2
    return p


def _integrate(T, steps):
    tv = resample_samples(T.samples, 2 * steps)
    tv = np.append(tv, tv[0])
    prop = _rk4_propagators(tv, 1.0 / steps)
    frames = np.empty((steps + 1, 2, 2))
    frames[0] = np.eye(2)
    frames[1:] = _prefix_products(prop)
    return frames


@dataclass(frozen=True, eq=False)
class HillSolution:
    """Fundamental system with frame [[u1', u2'], [u1, u2]], identity at x = 0."""
    potential: HillPotential
    steps: int
    frames: np.ndarray  # (steps + 1, 2, 2) at x = i / steps

    @property
    def monodromy_matrix(self):
        return self.frames[-1]

    @property
    def grid_size(self):
        return self.potential.grid_size

    def _on_grid(self, row):
        stride = self.steps // self.grid_size
        return self.frames[::stride, row, :]

    @property
    def u1(self):
        return self._on_grid(1)[:, 0]

    @property
    def u2(self):
        return self._on_grid(1)[:, 1]

    @property
    def du1(self):
        return self._on_grid(0)[:, 0]

    @property
    def du2(self):
        return self._on_grid(0)[:, 1]

    def wronskian(self):
        f = self.frames
        return f[:, 1, 0] * f[:, 0, 1] - f[:, 1, 1] * f[:, 0, 0]

    def u_jet(self, x, k, taylor_order=14):
        """Jets of (u1, u2) at points x in [0, 1]; shape (k+1, 2, len(x)).

        Expands the solution in a Taylor series about the nearest node, using the
        recursion (n+2)(n+1) u_{n+2} = -sum T_j u_{n-j}.
        """
        x = np.atleast_1d(np.asarray(x, dtype=float))
        i = np.clip(np.rint(x * self.steps).astype(int), 0, self.steps)
        x0 = i / self.steps
        s = x - x0
        order = max(taylor_order, k + 2)
        tj = interpolant_jet(self.potential.samples, x0, order)
        fr = self.frames[i]  # (M, 2, 2)
        u = np.zeros((order + 1, 2, len(x)))
        u[0] = fr[:, 1, :].T
        u[1] = fr[:, 0, :].T
        for n in range(order - 1):
            acc = sum(tj[j] * u[n - j] for j in range(n + 1))
            u[n + 2] = -acc / ((n + 1) * (n + 2))
        # re-expand about x: coefficient m of the shifted series
        out = np.zeros((k + 1, 2, len(x)))
        from math import comb
        for m in range(k + 1):
            for n in range(m, order + 1):
                out[m] += comb(n, m) * u[n] * s ** (n - m)
        return out


def solve_hill(T, steps=None, check=True, tol=1e-6):
    """Integrate u'' = -T u with fixed-step RK4 (default 16 N steps)."""
    T = HillPotential.of(T)
    n = T.grid_size
    steps = 16 * n if steps is None else int(steps)
    if steps < 4 * n or steps % n:
        raise ValueError("steps must be a multiple of N and at least 4N")
    frames = _integrate(T, steps)
    if check:
        fine = _integrate(T, 2 * steps)
        err = np.abs(fine[-1] - frames[-1]).max() / max(1.0, np.abs(fine[-1]).max())
        if err > tol:
            raise StepsTooCoarse(f"Richardson difference {err:.2e} with {steps} steps")
    return HillSolution(T, steps, frames)
