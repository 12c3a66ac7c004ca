"""Seeded randomized verification suites.

Every suite maps (rng, config) to one or more case records
{suite, case_id, seed, residual, tolerance, pass} (plus optional details).
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import ds, forms, groupoids
from .circle import MonotoneGridFunction, SampledDensity, grid
from .devmap import (from_potential, hill_of, q_of,
                     stabilizer_generator, circle_translation_number)
from .errors import VirorbitError
from .hill import HillPotential, coadjoint_action, solve_hill
from .sl2 import (Sl2TildeElement, classify, in_positive_subset, random_algebra,
                  random_sl2, translation_number)


@dataclass
class SuiteConfig:
    grid_size: int = 256
    ode_steps: int = None
    eps: float = 1e-4
    tol: float = None
    cases: int = None


@dataclass
class SuiteReport:
    suite: str
    records: list = field(default_factory=list)

    @property
    def passed(self):
        return sum(r["pass"] for r in self.records)

    @property
    def failed(self):
        return len(self.records) - self.passed

    @property
    def ok(self):
        return self.failed == 0

    def to_json(self):
        recs = sorted(self.records, key=lambda r: _case_key(r["case_id"]))
        return {"suite": self.suite, "records": recs,
                "summary": {"cases": len(recs), "passed": self.passed, "failed": self.failed}}


def _case_key(case_id):
    head, _, tail = str(case_id).partition("/")
    return (int(head) if head.isdigit() else 0, tail)


def record(suite, case_id, seed, residual, tolerance, **details):
    residual = float(residual)
    r = {"suite": suite, "case_id": case_id, "seed": int(seed), "residual": residual,
         "tolerance": float(tolerance), "pass": bool(residual <= tolerance)}
    if details:
        r["details"] = {k: _plain(v) for k, v in details.items()}
    return r


def _plain(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    return v


# ------------------------------------------------------------ random data

def random_density(rng, n, weight, amp=0.3, modes=3, mean=0.0):
    x = grid(n)
    s = np.full(n, float(mean))
    for k in range(1, modes + 1):
        a, b = rng.normal(size=2) * amp / k
        s += a * np.cos(2 * np.pi * k * x) + b * np.sin(2 * np.pi * k * x)
    return SampledDensity(weight, s)


def random_potential(rng, n, low=0.3, high=4.0, amp=0.4):
    return HillPotential(random_density(rng, n, 2, amp, 3, rng.uniform(low, high)).samples)


def random_vector_field(rng, n, amp=0.15):
    return random_density(rng, n, -1, amp, 3, rng.uniform(-amp, amp))


def random_diffeo(rng, n, amp=0.04):
    x = grid(n)
    p = np.zeros(n)
    for k in range(1, 3):
        a, b = rng.normal(size=2) * amp / k ** 2
        p += a * np.sin(2 * np.pi * k * x) + b * np.cos(2 * np.pi * k * x)
    return MonotoneGridFunction(x + p + rng.uniform(-0.2, 0.2))


def random_family(rng, cfg, kinds, amp=0.5):
    """Family with one direction per entry of kinds ('potential', 'diff', 'psl2')."""
    n = cfg.grid_size
    T = random_potential(rng, n)
    pots = [k for k in kinds if k == "potential"]
    Qs = [HillPotential(random_density(rng, n, 2, amp, 2, rng.normal() * amp).samples)
          for _ in pots]
    ops = []
    for k in kinds:
        if k == "diff":
            ops.append(forms.diff_op(random_vector_field(rng, n)))
        elif k == "psl2":
            ops.append(forms.psl2_op(random_algebra(rng, 0.6)))
    builder = forms.potential_builder(T, Qs, cfg.ode_steps)
    return forms.compose_family(builder, ops, cfg.eps)


def random_kinds(rng, k, allowed=("potential", "diff", "psl2")):
    kinds = list(rng.choice(allowed, size=k))
    # builders come first so that direction indices follow the order below
    return sorted(kinds, key=lambda s: s != "potential")


def _tol(cfg, default):
    return default if cfg.tol is None else cfg.tol


# ----------------------------------------------------------------- suites

def suite_theta_mc(rng, cfg, cid, seed):
    fam = random_family(rng, cfg, random_kinds(rng, 2))
    return [record("theta-mc", cid, seed, forms.theta_mc_residual(fam), _tol(cfg, 1e-5))]


def suite_theta_contractions(rng, cfg, cid, seed):
    n = cfg.grid_size
    gamma = from_potential(random_potential(rng, n), cfg.ode_steps)
    v = random_vector_field(rng, n)
    X = random_algebra(rng, 0.6)
    fv = forms.compose_family(forms.constant_builder(gamma), [forms.diff_op(v)], cfg.eps)
    fx = forms.compose_family(forms.constant_builder(gamma), [forms.psl2_op(X)], cfg.eps)
    xs = np.arange(n + 1) / n
    rv = np.max(np.abs(forms.theta(fv, 0)[:-1] - v.samples))
    u = gamma.lift_jet(xs, 0)[0]
    rx = np.max(np.abs(forms.theta(fx, 0) - forms.upsilon_pairing(X, u)))
    tol = _tol(cfg, 1e-6)
    return [record("theta-contractions", f"{cid}/diff", seed, rv, tol),
            record("theta-contractions", f"{cid}/psl2", seed, rx, tol)]


def suite_varpi_x0(rng, cfg, cid, seed):
    fam = random_family(rng, cfg, random_kinds(rng, 2))
    n = cfg.grid_size
    x0s = [0] + sorted(int(v) for v in rng.choice(np.arange(1, n), size=7, replace=False))
    vals = [forms.varpi_D(fam, 0, 1, x0) for x0 in x0s]
    return [record("varpi-x0", cid, seed, max(vals) - min(vals), _tol(cfg, 1e-6),
                   value=vals[0], x0=x0s)]


def _aux(rng, cfg, gamma_kind):
    n = cfg.grid_size
    T = random_potential(rng, n)
    if gamma_kind == "potential":
        Q = HillPotential(random_density(rng, n, 2, 0.5, 2, rng.normal() * 0.5).samples)
        return forms.potential_builder(T, [Q], cfg.ode_steps), None
    gamma = from_potential(T, cfg.ode_steps)
    if gamma_kind == "diff":
        return forms.diff_op(random_vector_field(rng, n)), gamma
    return forms.psl2_op(random_algebra(rng, 0.6)), gamma


def _base_for(aux, gamma):
    return aux[0](()) if isinstance(aux, tuple) else gamma


def suite_varpi_psl2(rng, cfg, cid, seed):
    kind = ["potential", "diff"][cid % 2]
    aux, gamma = _aux(rng, cfg, kind)
    X = random_algebra(rng, 0.6)
    res, lhs, rhs = forms.contraction_psl2_check(_base_for(aux, gamma), X, aux, 0, cfg.eps)
    ratio = lhs / rhs if rhs else float("nan")
    return [record("varpi-psl2", f"{cid}/{kind}", seed, res, _tol(cfg, 1e-5),
                   lhs=lhs, rhs=rhs, ratio=ratio)]


def suite_varpi_diff(rng, cfg, cid, seed):
    kind = ["potential", "psl2"][cid % 2]
    aux, gamma = _aux(rng, cfg, kind)
    v = random_vector_field(rng, cfg.grid_size)
    res, lhs, rhs = forms.contraction_diff_check(_base_for(aux, gamma), v, aux, 0, cfg.eps)
    ratio = lhs / rhs if rhs else float("nan")
    return [record("varpi-diff", f"{cid}/{kind}", seed, res, _tol(cfg, 1e-5),
                   lhs=lhs, rhs=rhs, ratio=ratio)]


def suite_varpi_d3(rng, cfg, cid, seed):
    kinds = random_kinds(rng, 3, ("potential", "psl2"))
    fam = random_family(rng, cfg, kinds)
    dv, eta = forms.varpi_d3_check(fam)
    ratio = dv / eta if eta else float("nan")
    return [record("varpi-d3", cid, seed, abs(dv - eta), _tol(cfg, 1e-4),
                   d_varpi=dv, q_eta=eta, ratio=ratio, kinds=kinds)]


def suite_kappa_shift(rng, cfg, cid, seed):
    fam = random_family(rng, cfg, random_kinds(rng, 1))
    rk = forms.kappa_shift_residual(fam, 0)
    r1, r2 = forms.d_l_theta_residuals(fam, 0)
    return [record("kappa-shift", f"{cid}/kappa", seed, rk, _tol(cfg, 1e-5)),
            record("kappa-shift", f"{cid}/d_l_theta", seed, r1, _tol(cfg, 1e-6)),
            record("kappa-shift", f"{cid}/d_l_periodic", seed, r2, _tol(cfg, 1e-6))]


def _can_families(rng, n):
    F1 = random_diffeo(rng, n)
    F2 = random_diffeo(rng, n)
    T2 = random_potential(rng, n)
    e = [random_density(rng, n, 0, 0.03, 2) for _ in range(4)]
    q = [random_density(rng, n, 2, 0.3, 2) for _ in range(2)]

    def f1(t):
        return MonotoneGridFunction(F1.samples + t[0] * e[0].samples + t[1] * e[1].samples)

    def f2(t):
        return MonotoneGridFunction(F2.samples + t[0] * e[2].samples + t[1] * e[3].samples)

    def t2(t):
        return HillPotential(T2.samples + t[0] * q[0].samples + t[1] * q[1].samples)

    return f1, f2, t2


def suite_omega_can(rng, cfg, cid, seed):
    n = cfg.grid_size
    T = random_potential(rng, n)
    v = random_vector_field(rng, n)
    dT = random_density(rng, n, 2, 0.5, 3, rng.normal())
    lhs, rhs = groupoids.can_unit_rho_check(T, v, dT)
    fams = _can_families(rng, n)
    res, *_ = groupoids.can_multiplicativity_residual(*fams, eps=cfg.eps)
    coef, defect = groupoids.fit_third_coefficient(*fams, eps=cfg.eps)
    return [record("omega-can", f"{cid}/unit_rho", seed, abs(lhs - rhs), _tol(cfg, 1e-6)),
            record("omega-can", f"{cid}/multiplicative", seed, res, _tol(cfg, 1e-5),
                   fitted_third_coefficient=coef, printed_third_coefficient=groupoids.PRINTED_THIRD,
                   defect_at_fit=defect)]


def suite_omega2(rng, cfg, cid, seed):
    g2, a2, g1 = (random_sl2(rng, 0.6) for _ in range(3))
    p2 = groupoids.GroupoidPoint2(g2, a2)
    p1 = groupoids.GroupoidPoint2(g1, p2.target)
    t2 = [groupoids.Tangent2(random_algebra(rng), random_algebra(rng)) for _ in range(2)]
    x1 = [random_algebra(rng) for _ in range(2)]
    rm = groupoids.multiplicativity_residual2(p1, p2, x1, t2)
    fam = groupoids.Family2(g1, a2, [random_algebra(rng) for _ in range(3)],
                            [random_algebra(rng) for _ in range(3)])
    d, rhs = groupoids.quasi_closed_residual2(fam, cfg.eps)
    return [record("omega2-groupoid", f"{cid}/multiplicative", seed, rm, _tol(cfg, 1e-9)),
            record("omega2-groupoid", f"{cid}/quasi_closed", seed, abs(d - rhs), _tol(cfg, 1e-7),
                   d_omega=d, eta_difference=rhs)]


def suite_g1_descent(rng, cfg, cid, seed):
    kind = ["potential", "diff"][cid % 2]
    aux, gamma = _aux(rng, cfg, kind)
    F = random_diffeo(rng, cfg.grid_size)
    X = random_algebra(rng, 0.6)
    res, w1, w2 = forms.g1_descent_check(gamma, F, X, aux, 0, cfg.eps)
    return [record("g1-descent", f"{cid}/{kind}", seed, res, _tol(cfg, 1e-5), leg1=w1, leg2=w2)]


def suite_ds_integrand(rng, cfg, cid, seed):
    fam = random_family(rng, cfg, random_kinds(rng, 2))
    frames = ds.FrameFamily(fam)
    res, _, _ = ds.integrand_check(frames, 0, 1)
    fd, closed = ds.xi_matrix(frames, 0)
    return [record("ds-integrand", f"{cid}/integrand", seed, res, _tol(cfg, 1e-5)),
            record("ds-integrand", f"{cid}/xi_closed_form", seed,
                   np.max(np.abs(fd - closed)), _tol(cfg, 1e-5))]


def suite_ds_pullback(rng, cfg, cid, seed):
    fam = random_family(rng, cfg, random_kinds(rng, 2))
    wp = ds.varpi_P(ds.FrameFamily(fam), 0, 1)
    wd = forms.varpi_D(fam, 0, 1)
    ratio = wp / wd if wd else float("nan")
    return [record("ds-pullback", cid, seed, abs(wp - wd), _tol(cfg, 1e-5),
                   varpi_P=wp, varpi_D=wd, ratio=ratio)]


def suite_ds_roundtrip(rng, cfg, cid, seed):
    n = cfg.grid_size
    T = random_potential(rng, n, -2.0, 4.0)
    chi = random_density(rng, n, 0, 0.5, 4, rng.normal())
    A = ds.ds_connection(T)
    B = ds.n_gauge_action(chi, A)
    res = np.max(np.abs(ds.ds_reduce(B).samples - T.samples))
    moment = np.max(np.abs(B.A[:, 1, 0] - A.A[:, 1, 0]))
    return [record("ds-roundtrip", f"{cid}/roundtrip", seed, res, _tol(cfg, 1e-7)),
            record("ds-roundtrip", f"{cid}/moment", seed, moment, 0.0)]


def suite_stabilizer_tau(rng, cfg, cid, seed):
    n = cfg.grid_size
    T = random_potential(rng, n, 2.0, 30.0, 0.6)
    gamma = from_potential(T, cfg.ode_steps)
    tau_h = translation_number(gamma.monodromy)
    F = stabilizer_generator(gamma)
    tau_f = circle_translation_number(F)
    return [record("stabilizer-tau", cid, seed, abs(tau_h * tau_f - 1.0), _tol(cfg, 1e-6),
                   tau_monodromy=tau_h, tau_stabilizer=tau_f)]


def random_lifted(rng, scale=1.5):
    g = random_sl2(rng, scale)
    return Sl2TildeElement.lift(g, near=rng.uniform(-4 * math.pi, 4 * math.pi))


def suite_translation_props(rng, cfg, cid, seed, batch=100):
    tol = _tol(cfg, 1e-9)
    worst_conj = worst_qh = 0.0
    mismatches = 0
    for _ in range(batch):
        a, b = random_lifted(rng), random_lifted(rng)
        k = random_lifted(rng, 1.0)
        try:
            ca, cc = classify(a), classify(k @ a @ k.inverse())
        except VirorbitError:
            continue
        worst_conj = max(worst_conj, abs(translation_number(a)
                                         - translation_number(k @ a @ k.inverse())))
        if not ca.same_as(cc, 1e-6):
            mismatches += 1
        worst_qh = max(worst_qh, abs(translation_number(a @ b) - translation_number(a)
                                     - translation_number(b)))
        if in_positive_subset(a) != ca.in_positive_list():
            mismatches += 1
    return [record("translation-props", f"{cid}/conjugation", seed, worst_conj, tol),
            record("translation-props", f"{cid}/quasi_homomorphism", seed,
                   max(0.0, worst_qh - 1.0), 0.0, worst=worst_qh),
            record("translation-props", f"{cid}/class_and_positive", seed, mismatches, 0)]


def suite_hill_core(rng, cfg, cid, seed):
    n = cfg.grid_size
    T = random_potential(rng, n, -3.0, 6.0)
    sol = solve_hill(T, cfg.ode_steps)
    rw = np.max(np.abs(sol.wronskian() + 1.0))
    rdet = abs(np.linalg.det(sol.monodromy_matrix) - 1.0)
    F = random_diffeo(rng, n)
    sol2 = solve_hill(coadjoint_action(F, T), cfg.ode_steps)
    rtr = abs(abs(np.trace(sol.monodromy_matrix)) - abs(np.trace(sol2.monodromy_matrix)))
    gamma = from_potential(T, cfg.ode_steps)
    rp = np.max(np.abs(hill_of(gamma).samples - T.samples))
    q_of(gamma, check=True)
    return [record("hill-core", f"{cid}/wronskian", seed, rw, _tol(cfg, 1e-8)),
            record("hill-core", f"{cid}/det", seed, rdet, _tol(cfg, 1e-8)),
            record("hill-core", f"{cid}/trace_invariance", seed, rtr, _tol(cfg, 1e-6)),
            record("hill-core", f"{cid}/potential_roundtrip", seed, rp, _tol(cfg, 1e-6))]


SUITES = {
    "theta-mc": (suite_theta_mc, 10),
    "theta-contractions": (suite_theta_contractions, 20),
    "varpi-x0": (suite_varpi_x0, 10),
    "varpi-psl2": (suite_varpi_psl2, 10),
    "varpi-diff": (suite_varpi_diff, 10),
    "varpi-d3": (suite_varpi_d3, 5),
    "kappa-shift": (suite_kappa_shift, 10),
    "omega-can": (suite_omega_can, 5),
    "omega2-groupoid": (suite_omega2, 20),
    "g1-descent": (suite_g1_descent, 5),
    "ds-integrand": (suite_ds_integrand, 10),
    "ds-pullback": (suite_ds_pullback, 10),
    "ds-roundtrip": (suite_ds_roundtrip, 20),
    "stabilizer-tau": (suite_stabilizer_tau, 20),
    "translation-props": (suite_translation_props, 10),
    "hill-core": (suite_hill_core, 10),
}


def run_suite(name, seed=0, cases=None, cfg=None):
    """Run a named suite; failures inside a case are recorded as failing records."""
    if name not in SUITES:
        raise KeyError(name)
    fn, default_cases = SUITES[name]
    cfg = cfg or SuiteConfig()
    cases = cases or cfg.cases or default_cases
    report = SuiteReport(name)
    children = np.random.SeedSequence(seed).spawn(cases)
    for cid, child in enumerate(children):
        case_seed = int(child.generate_state(1)[0])
        rng = np.random.default_rng(case_seed)
        try:
            report.records.extend(fn(rng, cfg, cid, case_seed))
        except VirorbitError as exc:
            r = record(name, f"{cid}/error", case_seed, float("inf"), 0.0,
                       error=f"{type(exc).__name__}: {exc}")
            report.records.append(r)
    return report
