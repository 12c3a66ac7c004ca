import numpy as np
import pytest
from hypothesis import given, strategies as st

from virorbit import ds, forms
from virorbit.circle import MonotoneGridFunction, grid
from virorbit.devmap import from_potential, hill_of
from virorbit.errors import NotOnLevelSet
from virorbit.hill import HillPotential
from virorbit.sl2 import J1, J2, J3, exp_sl2, random_algebra
from virorbit.suites import (SuiteConfig, random_density, random_diffeo, random_family,
                             random_kinds, random_potential)

N = 256
X = grid(N)
CFG = SuiteConfig()
seeds = st.integers(0, 2 ** 31)


def family(seed, kinds=None):
    r = np.random.default_rng(seed)
    return random_family(r, CFG, kinds or random_kinds(r, 2))


# ------------------------------------------------------------- gauge slice

def test_ds_connection_shape():
    T = HillPotential(1.0 + 0.2 * np.cos(2 * np.pi * X))
    A = ds.ds_connection(T).A
    assert np.array_equal(A[:, 0, 1], T.samples)
    assert np.all(A[:, 1, 0] == -1.0) and np.all(A[:, 0, 0] == 0) and np.all(A[:, 1, 1] == 0)


@given(seeds)
def test_slice_round_trip(seed):
    r = np.random.default_rng(seed)
    T = random_potential(r, N, -2.0, 4.0)
    chi = random_density(r, N, 0, 0.5, 4, r.normal())
    A = ds.ds_connection(T)
    B = ds.n_gauge_action(chi, A)
    assert np.array_equal(B.A[:, 1, 0], A.A[:, 1, 0])
    assert np.max(np.abs(ds.ds_reduce(B).samples - T.samples)) < 1e-7


def test_n_gauge_group_law():
    r = np.random.default_rng(1)
    A = ds.ds_connection(random_potential(r, N))
    c1 = random_density(r, N, 0, 0.4, 3, 0.2)
    c2 = random_density(r, N, 0, 0.4, 3, -0.5)
    two = ds.n_gauge_action(c2, ds.n_gauge_action(c1, A))
    one = ds.n_gauge_action(c1 + c2, A)
    assert np.max(np.abs(two.A - one.A)) < 1e-10


def test_n_gauge_matches_general_gauge_transform():
    r = np.random.default_rng(2)
    A = ds.ds_connection(random_potential(r, N))
    chi = random_density(r, N, 0, 0.4, 3, 0.1).samples
    g = np.zeros((N, 2, 2))
    g[:, 0, 0] = g[:, 1, 1] = 1.0
    g[:, 0, 1] = chi
    assert np.max(np.abs(ds.gauge_transform(g, A).A - ds.n_gauge_action(chi, A).A)) < 1e-10


def test_reduce_requires_level_set():
    a = ds.ds_connection(HillPotential(np.ones(N))).A.copy()
    a[:, 1, 0] = -2.0
    with pytest.raises(NotOnLevelSet):
        ds.ds_reduce(ds.GaugeConnection(a))


def test_connection_json_round_trip():
    A = ds.ds_connection(HillPotential(0.5 + np.sin(2 * np.pi * X)))
    back = ds.GaugeConnection.from_json(A.to_json())
    assert np.array_equal(back.A, A.A)


def test_connection_must_be_traceless():
    with pytest.raises(ValueError):
        ds.GaugeConnection(np.tile(np.eye(2), (N, 1, 1)))


def test_diff_to_gauge_oracle(oracle):
    F = MonotoneGridFunction(X + 0.05 * np.sin(2 * np.pi * X))
    g = ds.diff_to_gauge(F)
    idx = oracle["indices"]
    ref = np.array(oracle["diff_to_gauge_x_plus_0p05_sin"])
    got = np.stack([g[idx, 0, 0], g[idx, 0, 1], g[idx, 1, 1]], axis=1)
    assert np.max(np.abs(got - ref)) < 1e-11
    assert np.allclose(np.linalg.det(g), 1.0, atol=1e-14)
    assert np.all(g[:, 1, 0] == 0)


@given(seeds)
def test_diff_gauge_equivariance(seed):
    r = np.random.default_rng(seed)
    T = random_potential(r, N)
    F = random_diffeo(r, N, 0.03)
    assert ds.ds_equivariance_residual(T, F) < 1e-7


# ------------------------------------------------------------------ frames

def test_frame_unimodular_and_quasi_periodic():
    T = random_potential(np.random.default_rng(3), N)
    gamma = from_potential(T)
    fr = ds.frame_of(gamma)
    assert np.allclose(np.linalg.det(fr.tau), 1.0, atol=1e-9)
    assert np.allclose(fr.matrix_monodromy.T, gamma.monodromy.g, atol=1e-9)


def test_frame_connection_is_ds_form():
    fam = family(4, ["potential"])
    frames = ds.FrameFamily(fam)
    x = np.linspace(0, 1, 33)
    A = frames.connection_at(x)
    T = hill_of(fam.base)(x)
    assert np.max(np.abs(A[0, 1] - T)) < 1e-7
    assert np.max(np.abs(A[1, 0] + 1)) < 1e-9
    assert np.max(np.abs(A[0, 0])) < 1e-9 and np.max(np.abs(A[1, 1])) < 1e-9


@pytest.mark.parametrize("kind", ["potential", "diff", "psl2"])
def test_xi_closed_form(kind):
    frames = ds.FrameFamily(family(5, [kind]))
    fd, closed = ds.xi_matrix(frames, 0)
    assert np.max(np.abs(fd - closed)) < 1e-5


@pytest.mark.parametrize("kind", ["potential", "diff", "psl2"])
def test_covariant_derivative_shape(kind):
    frames = ds.FrameFamily(family(6, [kind]))
    assert ds.covariant_shape_residual(frames, 0) < 1e-5


@pytest.mark.parametrize("seed", [7, 8, 9])
def test_integrand_identity(seed):
    res, lhs, _ = ds.integrand_check(ds.FrameFamily(family(seed)), 0, 1)
    assert np.max(np.abs(lhs)) > 1e-4
    assert res < 1e-5


# ----------------------------------------------------------------- varpi_P

def test_varpi_p_boundary_forms_agree():
    frames = ds.FrameFamily(family(10))
    for x0 in (0, 77):
        assert ds.varpi_P_direct(frames, 0, 1, x0) == pytest.approx(
            ds.varpi_P(frames, 0, 1, x0), abs=1e-9)


def test_varpi_p_independent_of_base_point():
    frames = ds.FrameFamily(family(11))
    vals = [ds.varpi_P(frames, 0, 1, x0) for x0 in (0, 40, 130)]
    assert max(vals) - min(vals) < 1e-6


def test_varpi_p_constant_gauge_invariant():
    fam = family(12)
    g = exp_sl2(0.3 * J1 - 0.4 * J2 + 0.2 * J3)
    a = ds.varpi_P(ds.FrameFamily(fam), 0, 1)
    b = ds.varpi_P(ds.FrameFamily(fam, left=g), 0, 1)
    assert b == pytest.approx(a, abs=1e-9)


def test_pullback_measured_sign():
    # the integrand identity holds pointwise; the two 2-forms integrate it
    # with opposite orderings, so the pullback equals -varpi_D
    fam = family(13)
    wp = ds.varpi_P(ds.FrameFamily(fam), 0, 1)
    wd = forms.varpi_D(fam, 0, 1)
    assert abs(wd) > 1e-4
    assert wp == pytest.approx(-wd, rel=1e-6)


def test_loop_group_monodromy_is_inverse_transpose():
    fam = family(14, ["potential"])
    frames = ds.FrameFamily(fam)
    q = ds.frame_q(frames, fam.base)
    A = fam.base.monodromy.g
    assert np.allclose(q, np.linalg.inv(A).T, atol=1e-9)
    assert np.allclose(q, J1 @ A @ np.linalg.inv(J1), atol=1e-9)


def test_loop_group_contraction_measured_sign():
    r = np.random.default_rng(15)
    T = random_potential(r, N)
    Q = HillPotential(random_density(r, N, 2, 0.5, 2, 0.3).samples)
    Xd = random_algebra(r, 0.6)
    fam = forms.compose_family(forms.potential_builder(T, [Q]), [forms.psl2_op(Xd)])
    frames = ds.FrameFamily(fam)
    lhs = ds.varpi_P(frames, 1, 0)
    rhs = ds.psl2_contraction_P(frames, 0, -Xd.T)
    assert abs(rhs) > 1e-3
    assert lhs == pytest.approx(-rhs, rel=1e-5)
