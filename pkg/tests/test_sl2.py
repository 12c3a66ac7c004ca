import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from virorbit.errors import BoundaryAmbiguous
from virorbit.sl2 import (J1, J2, J3, ConjClass, Sl2TildeElement, cartan3, cartan3_permutation_sum,
                          classify, compose, exp_sl2, hyperbolic, in_positive_subset, invert,
                          lifted_action, metric, parabolic, random_sl2, rotation,
                          translation_number, translation_number_iterated)

seeds = st.integers(0, 2 ** 31)


def lifted(seed, scale=1.5):
    r = np.random.default_rng(seed)
    return Sl2TildeElement.lift(random_sl2(r, scale), near=r.uniform(-4 * math.pi, 4 * math.pi))


def test_exp_examples():
    assert np.allclose(exp_sl2(J1, math.pi / 2), [[0, 1], [-1, 0]], atol=1e-15)
    assert np.allclose(exp_sl2(J2, 0.7), np.diag([math.exp(0.7), math.exp(-0.7)]), atol=1e-14)
    assert np.allclose(exp_sl2(J3, 2.5), [[1, 2.5], [0, 1]], atol=1e-15)


def test_lifted_action_examples(oracle):
    ident = Sl2TildeElement.identity()
    assert lifted_action(ident, 1.234) == pytest.approx(1.234, abs=1e-15)
    r = Sl2TildeElement(exp_sl2(J1, 0.3), 0.3)
    assert lifted_action(r, 0.0) == pytest.approx(0.3, abs=1e-15)
    p = Sl2TildeElement(exp_sl2(J3), math.pi / 4)
    ref = oracle["lifted_parabolic"]
    assert lifted_action(p, 0.0) == pytest.approx(ref["f0"], abs=1e-14)
    assert lifted_action(p, math.pi / 2) == pytest.approx(ref["f_half_pi"], abs=1e-14)


def test_inconsistent_lift_rejected():
    with pytest.raises(ValueError):
        Sl2TildeElement(exp_sl2(J1, 0.3), 1.0)
    with pytest.raises(ValueError):
        Sl2TildeElement(np.diag([2.0, 2.0]), 0.0)


@given(seeds)
def test_lifted_action_monotone_and_pi_equivariant(seed):
    h = lifted(seed)
    phi = np.linspace(-7, 7, 4001)
    f = h(phi)
    assert np.all(np.diff(f) > 0)
    assert np.abs(h(phi + math.pi) - f - math.pi).max() < 1e-12


def test_central_composition():
    r = rotation(math.pi)
    assert compose(r, r).psi0 == pytest.approx(2 * math.pi, abs=1e-14)


@given(seeds)
def test_group_laws(seed):
    r = np.random.default_rng(seed)
    a, b, c = (Sl2TildeElement.lift(random_sl2(r), r.uniform(-9, 9)) for _ in range(3))
    assert compose(a, invert(a)).close_to(Sl2TildeElement.identity(), 1e-10)
    assert compose(compose(a, b), c).close_to(compose(a, compose(b, c)), 1e-9)


@pytest.mark.parametrize("alpha", [0.3, 1.0, math.pi / 2, 2.5, 4.0, 7.5])
def test_translation_number_of_rotations(alpha):
    assert translation_number(rotation(alpha)) == pytest.approx(alpha / math.pi, abs=1e-12)
    assert translation_number_iterated(rotation(alpha)) == pytest.approx(alpha / math.pi, abs=1e-6)


@pytest.mark.parametrize("beta,n", [(0.5, 0), (1.0, 1), (2.0, 3), (0.1, -2)])
def test_translation_number_of_hyperbolics(beta, n):
    assert translation_number(hyperbolic(beta, n)) == n
    assert translation_number_iterated(hyperbolic(beta, n)) == pytest.approx(n, abs=1e-6)


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("n", [0, 1, 4, -1])
def test_translation_number_of_parabolics(sign, n):
    assert translation_number(parabolic(sign, n)) == n
    assert translation_number_iterated(parabolic(sign, n)) == pytest.approx(n, abs=1e-3)


def test_classify_representatives():
    c = classify(Sl2TildeElement(exp_sl2(J1, 0.3), 0.3))
    assert c.kind == "elliptic" and c.alpha == pytest.approx(0.3, abs=1e-12)
    h = Sl2TildeElement.lift(exp_sl2(J2, 1.0), 0.0)
    c = classify(h)
    assert (c.kind, c.n) == ("hyperbolic", 0) and c.beta == pytest.approx(1.0, abs=1e-12)
    assert classify(Sl2TildeElement(np.eye(2), math.pi)) == ConjClass.central(1)


def test_classify_boundary_error():
    # a central matrix can only carry psi0 in pi Z; force an off-lattice value
    h = rotation(math.pi)
    object.__setattr__(h, "psi0", math.pi + 1e-6)
    with pytest.raises(BoundaryAmbiguous):
        classify(h)


@pytest.mark.parametrize("cls", [ConjClass.elliptic(1.2), ConjClass.hyperbolic(0.8, 2),
                                 ConjClass.parabolic(-1, 1), ConjClass.central(2)])
@given(seed=seeds)
def test_classify_conjugation_invariant(cls, seed):
    h = cls.representative()
    k = lifted(seed, 1.0)
    c = classify(k @ h @ k.inverse())
    assert c.same_as(cls, 1e-6)
    assert translation_number(k @ h @ k.inverse()) == pytest.approx(translation_number(h), abs=1e-6)


@given(seeds, seeds)
def test_quasi_homomorphism(s1, s2):
    a, b = lifted(s1), lifted(s2)
    assert abs(translation_number(a @ b) - translation_number(a) - translation_number(b)) <= 1 + 1e-9


def test_positive_subset_examples():
    assert in_positive_subset(rotation(0.2))
    assert not in_positive_subset(parabolic(-1, 0))
    assert in_positive_subset(parabolic(1, 0))
    for n in (0, 1, 3):
        assert in_positive_subset(hyperbolic(1.3, n))
    assert not in_positive_subset(hyperbolic(1.3, -1))


@given(seeds)
def test_positive_subset_matches_class_list(seed):
    h = lifted(seed, 2.0)
    assert in_positive_subset(h) == classify(h).in_positive_list()


def test_metric_and_cartan(oracle):
    assert metric(J1, J1) == -4.0
    assert cartan3(J1, J2, J3) == pytest.approx(oracle["cartan3_J1_J2_J3"], abs=1e-14)
    assert cartan3_permutation_sum(J1, J2, J3) == pytest.approx(oracle["cartan3_J1_J2_J3"], abs=1e-14)


@given(seeds)
def test_cartan_alternates(seed):
    r = np.random.default_rng(seed)
    x, y, z = (r.normal(size=(2, 2)) for _ in range(3))
    x, y, z = (m - np.trace(m) / 2 * np.eye(2) for m in (x, y, z))
    assert abs(cartan3(x, x, y)) < 1e-12
    assert cartan3(x, y, z) == pytest.approx(-cartan3(y, x, z), abs=1e-12)
    assert cartan3(x, y, z) == pytest.approx(cartan3_permutation_sum(x, y, z), abs=1e-12)


def test_json_round_trips():
    h = hyperbolic(0.7, 2)
    assert Sl2TildeElement.from_json(h.to_json()).close_to(h, 1e-15)
    for c in (ConjClass.elliptic(1.1), ConjClass.parabolic(1, 0), ConjClass.hyperbolic(2.0, 1)):
        assert set(c.to_json()) >= {"type"}
