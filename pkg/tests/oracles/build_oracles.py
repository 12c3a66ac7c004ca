"""Independent reference values, frozen into values.json.

Deliberately does not import virorbit: derivatives come from mpmath at high
precision, ODE monodromies from scipy's DOP853, and algebraic constants from
sympy.  Run from the repository root:

    python3 tests/oracles/build_oracles.py
"""
import json
import os

import mpmath as mp
import numpy as np
import sympy as sp
from scipy.integrate import solve_ivp

mp.mp.dps = 40
HERE = os.path.dirname(os.path.abspath(__file__))
N = 256
STRIDE = 16  # freeze values at every 16th grid point
IDX = list(range(0, N, STRIDE))
XS = [mp.mpf(i) / N for i in IDX]
TWO_PI = 2 * mp.pi


def derivative_exp_sin():
    f = lambda x: mp.e ** mp.sin(TWO_PI * x)
    return [float(mp.diff(f, x)) for x in XS]


def schwarzian_sin(amp=mp.mpf("0.1")):
    F = lambda x: x + amp * mp.sin(TWO_PI * x)
    out = []
    for x in XS:
        d1, d2, d3 = (mp.diff(F, x, k) for k in (1, 2, 3))
        out.append(float(d3 / d1 - mp.mpf(3) / 2 * (d2 / d1) ** 2))
    return out


def diff_to_gauge_entries(amp=mp.mpf("0.05")):
    F = lambda x: x + amp * mp.sin(TWO_PI * x)
    rows = []
    for x in XS:
        d1, d2 = mp.diff(F, x, 1), mp.diff(F, x, 2)
        rows.append([float(mp.sqrt(d1)), float(-d2 / 2 * d1 ** mp.mpf(-1.5)),
                     float(1 / mp.sqrt(d1))])
    return rows


def gelfand_fuchs_sin_cos():
    v1 = lambda x: mp.sin(TWO_PI * x)
    v2 = lambda x: mp.cos(TWO_PI * x)
    return float(mp.quad(lambda x: mp.diff(v1, x, 3) * v2(x) / 2, [0, 1]))


def cartan3_j123():
    """(1/6) tr(theta ^ [theta, theta]) with [theta, theta] = 2 theta ^ theta, as an S3 sum."""
    J = [sp.Matrix([[0, 1], [-1, 0]]), sp.Matrix([[1, 0], [0, -1]]), sp.Matrix([[0, 1], [0, 0]])]
    from sympy.combinatorics import Permutation
    from itertools import permutations
    total = 0
    for p in permutations(range(3)):
        s = Permutation(list(p)).signature()
        total += s * (J[p[0]] * J[p[1]] * J[p[2]]).trace()
    return float(sp.Rational(2, 6) * total)


def _lifted_track(g, psi0, phi, steps=4000):
    """Continuous angle of g (sin t, cos t) for t from 0 to phi, starting at psi0."""
    ang = mp.mpf(psi0)
    prev = None
    for k in range(steps + 1):
        t = phi * k / steps
        w = g * mp.matrix([mp.sin(t), mp.cos(t)])
        a = mp.atan2(w[0], w[1])
        if prev is not None:
            d = a - prev
            d -= mp.pi * 2 * mp.nint(d / (2 * mp.pi))
            ang += d
        prev = a
    return ang


def lifted_parabolic():
    g = mp.matrix([[1, 1], [0, 1]])
    psi0 = mp.pi / 4
    return {"f0": float(_lifted_track(g, psi0, 0)),
            "f_half_pi": float(_lifted_track(g, psi0, mp.pi / 2))}


def _expm(X, t):
    return mp.expm(mp.matrix(X) * t)


def group_path_beta2_n1():
    """gamma(x) = exp(2x J2) exp((2/pi) J3) exp(pi x J1) . (0 : 1)."""
    beta = mp.mpf(2)
    J1 = [[0, 1], [-1, 0]]
    J2 = [[1, 0], [0, -1]]
    J3 = [[0, 1], [0, 0]]

    def P(x):
        return _expm(J2, beta * x) * _expm(J3, beta / mp.pi) * _expm(J1, mp.pi * x)

    # continuous angle of P(x)(0, 1) over one period
    steps = 4000
    ang = mp.mpf(0)
    prev = None
    for k in range(steps + 1):
        w = P(mp.mpf(k) / steps) * mp.matrix([0, 1])
        a = mp.atan2(w[0], w[1])
        if prev is not None:
            d = a - prev
            d -= 2 * mp.pi * mp.nint(d / (2 * mp.pi))
            ang += d
        prev = a
    h = P(1) * mp.inverse(P(0))
    tr = abs(h[0, 0] + h[1, 1])
    # the lifted period map f sends 0 to phi(1) and commutes with phi -> phi + pi
    def f(phi):
        k = mp.floor(phi / mp.pi)
        return _lifted_track(h, ang, phi - k * mp.pi, steps=600) + k * mp.pi
    m = 200
    phi = mp.mpf(0)
    for _ in range(m):
        phi = f(phi)
    tau = phi / (m * mp.pi)
    return {"abs_trace": float(tr), "beta": float(mp.acosh(tr / 2)),
            "phi_one": float(ang), "tau_estimate": float(tau), "n": int(mp.nint(tau))}


def hill_monodromy(T, label):
    sol = solve_ivp(lambda x, y: [y[1], -T(x) * y[0], y[3], -T(x) * y[2]], (0.0, 1.0),
                    [1.0, 0.0, 0.0, 1.0], method="DOP853", rtol=1e-13, atol=1e-14)
    y = sol.y[:, -1]
    # fundamental system with u1(0)=0, u1'(0)=1 and u2(0)=1, u2'(0)=0
    u2, du2, u1, du1 = y
    return {"label": label, "frame": [[du1, du2], [u1, u2]], "trace": du1 + u2}


def main():
    vals = {
        "grid_size": N, "indices": IDX,
        "derivative_exp_sin": derivative_exp_sin(),
        "schwarzian_x_plus_0p1_sin": schwarzian_sin(),
        "diff_to_gauge_x_plus_0p05_sin": diff_to_gauge_entries(),
        "gelfand_fuchs_sin_cos": gelfand_fuchs_sin_cos(),
        "cartan3_J1_J2_J3": cartan3_j123(),
        "lifted_parabolic": lifted_parabolic(),
        "group_path_beta2_n1": group_path_beta2_n1(),
        "hill_monodromy": [
            hill_monodromy(lambda x: 1.0 + 0.5 * np.cos(2 * np.pi * x), "1+0.5cos"),
            hill_monodromy(lambda x: -0.5 + 2.0 * np.sin(2 * np.pi * x) + 0.3 * np.cos(4 * np.pi * x),
                           "-0.5+2sin+0.3cos2"),
            hill_monodromy(lambda x: 30.0 + 3.0 * np.cos(2 * np.pi * x), "30+3cos"),
        ],
    }
    with open(os.path.join(HERE, "values.json"), "w") as fh:
        json.dump(vals, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main()
