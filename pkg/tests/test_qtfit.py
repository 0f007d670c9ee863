"""Representation fitting: closed forms, round trips, conventions."""

import math

import numpy as np
import pytest

from qtrep import pme, qtfit
from qtrep.errors import InputError
from qtrep.relaxation import ThreeStateRates


def random_chain(n, seed, lo=0.05, hi=1.0):
    rng = np.random.default_rng(seed)
    w = rng.uniform(lo, hi, (n, n))
    np.fill_diagonal(w, 0.0)
    return pme.TransitionMatrix(w)


class TestQuadraticEntropy:
    def test_value_and_gradient(self):
        q = np.array([[2.0, 1.0], [1.0, 3.0]])
        ent = qtfit.QuadraticEntropy(q)
        p = np.array([0.4, 0.6])
        assert ent.value(p) == pytest.approx(0.5 * p @ q @ p, rel=1e-14)
        np.testing.assert_allclose(ent.gradient(p), q @ p, atol=0)

    def test_asymmetric_rejected(self):
        with pytest.raises(InputError):
            qtfit.QuadraticEntropy(np.array([[0.0, 1.0], [0.5, 0.0]]))

    def test_symmetrized_roundoff_accepted(self):
        q = np.array([[1.0, 2.0], [2.0 + 1e-16, 1.0]])
        assert qtfit.QuadraticEntropy(q).n == 2


class TestCatalog:
    def test_subset_counts(self):
        # (n-1 choose n-3) terms, matching (n-1)(n-2)/2
        assert qtfit.ham_subsets(2) == ()
        assert qtfit.ham_subsets(3) == ((),)
        assert len(qtfit.ham_subsets(4)) == 3
        assert len(qtfit.ham_subsets(5)) == 6
        assert len(qtfit.ham_subsets(6)) == 10

    def test_parameter_count_matches_generator_dof(self):
        for n in range(2, 7):
            q_dof = n * (n + 1) // 2 - 1
            assert q_dof + len(qtfit.ham_subsets(n)) == n * (n - 1)


class TestTwoState:
    def test_entropy_matrix(self):
        w = pme.TransitionMatrix([[0.0, 1.0], [2.0, 0.0]])
        ent = qtfit.two_state_entropy(w)
        # cross assignment: rate 1->2 sits on the p1 slot
        np.testing.assert_allclose(ent.q, np.diag([-2.0, -1.0]), atol=0)

    def test_flow_is_exact(self):
        w = random_chain(2, seed=0)
        rep = qtfit.fit(w, seed=0)
        assert rep.norm == 1.0
        assert rep.r.size == 0
        assert rep.residual < 1e-14
        p = np.array([0.3, 0.7])
        np.testing.assert_allclose(
            qtfit.qt_rhs(rep, p), pme.pme_rhs(w, p), atol=1e-14
        )

    def test_entropy_increases_along_flow(self):
        w = random_chain(2, seed=1)
        rep = qtfit.fit(w, seed=0)
        p = np.array([0.9, 0.1])
        production = rep.entropy.gradient(p) @ qtfit.qt_rhs(rep, p)
        assert production >= -1e-15


class TestThreeStateClosedForm:
    def test_kappa_reference(self):
        # a+d+e = 3, b+c+f = 0: fully one-directional, kappa = 0, |r| = 1
        kappa, r = qtfit.three_state_kappa_r((1, 0, 0, 1, 1, 0))
        assert kappa == 0.0
        assert r == 1.0

    def test_balanced_chain_has_zero_r(self):
        kappa, r = qtfit.three_state_kappa_r((1, 1, 1, 1, 1, 1))
        assert kappa == 1.0
        assert r == 0.0

    def test_reverse_direction_limit(self):
        kappa, r = qtfit.three_state_kappa_r((0, 1, 1, 0, 0, 1))
        assert kappa == math.inf
        assert r == -1.0

    def test_all_zero_rejected(self):
        with pytest.raises(InputError):
            qtfit.three_state_kappa_r((0, 0, 0, 0, 0, 0))

    def test_accepts_rate_object(self):
        rates = ThreeStateRates(1, 2, 3, 4, 5, 6)
        kappa, _ = qtfit.three_state_kappa_r(rates)
        assert kappa == pytest.approx(11.0 / 10.0, rel=1e-15)

    def test_fitted_r_is_negated_closed_form(self):
        # orientation convention: fit() returns -(1-kappa)/(1+kappa),
        # equal to -omega/xi
        for rates in [(1, 2, 3, 4, 5, 6), (2, 1, 1, 2, 2, 1), (0.3, 0.7, 0.2, 0.9, 1.1, 0.5)]:
            w = ThreeStateRates(*rates).to_transition_matrix()
            rep = qtfit.fit(w, seed=0)
            _, r_formula = qtfit.three_state_kappa_r(rates)
            assert rep.r[0] == pytest.approx(-r_formula, abs=1e-10)
            omega = (rates[0] + rates[3] + rates[4]) - (rates[1] + rates[2] + rates[5])
            assert rep.r[0] == pytest.approx(-omega / sum(rates), abs=1e-10)


class TestFitRoundTrip:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_flow_matches_target(self, n):
        for trial in range(3):
            w = random_chain(n, seed=1000 * n + trial)
            rep = qtfit.fit(w, seed=0)
            assert rep.residual < 1e-8
            rng = np.random.default_rng(trial)
            for _ in range(5):
                p = rng.dirichlet(np.ones(n))
                np.testing.assert_allclose(
                    qtfit.qt_rhs(rep, p), pme.pme_rhs(w, p), atol=1e-8
                )

    def test_flow_matrix_agrees_with_rhs(self):
        w = random_chain(4, seed=5)
        rep = qtfit.fit(w, seed=0)
        mat = qtfit.flow_matrix(rep)
        p = np.random.default_rng(6).dirichlet(np.ones(4))
        np.testing.assert_allclose(mat @ p, qtfit.qt_rhs(rep, p), atol=1e-12)

    def test_gauge_invariance_of_flow(self):
        # q and q + k*ones generate the same flow on the simplex
        w = random_chain(3, seed=8)
        rep = qtfit.fit(w, seed=0)
        shifted = qtfit.QTRepresentation(
            entropy=qtfit.QuadraticEntropy(rep.entropy.q + 5.0),
            r=rep.r,
            subsets=rep.subsets,
            norm=rep.norm,
            residual=rep.residual,
        )
        p = np.array([0.2, 0.5, 0.3])
        np.testing.assert_allclose(
            qtfit.qt_rhs(shifted, p), qtfit.qt_rhs(rep, p), atol=1e-12
        )

    def test_deterministic_given_seed(self):
        w = random_chain(4, seed=21)
        rep1 = qtfit.fit(w, seed=3)
        rep2 = qtfit.fit(w, seed=3)
        np.testing.assert_array_equal(rep1.entropy.q, rep2.entropy.q)
        np.testing.assert_array_equal(rep1.r, rep2.r)
        assert rep1.residual == rep2.residual

    def test_entropy_production_nonnegative(self):
        # main term produces sum of squares, ham terms conserve entropy
        w = random_chain(4, seed=30)
        rep = qtfit.fit(w, seed=0)
        rng = np.random.default_rng(31)
        for _ in range(20):
            p = rng.dirichlet(np.ones(4))
            g = rep.entropy.gradient(p)
            assert g @ qtfit.qt_rhs(rep, p) >= -1e-12


class TestSerialization:
    def test_json_round_trip(self):
        w = random_chain(4, seed=50)
        rep = qtfit.fit(w, seed=0)
        doc = rep.to_json_dict()
        back = qtfit.QTRepresentation.from_json_dict(doc)
        np.testing.assert_array_equal(back.entropy.q, rep.entropy.q)
        np.testing.assert_array_equal(back.r, rep.r)
        assert back.subsets == rep.subsets
        assert back.norm == rep.norm

    def test_inconsistent_document_rejected(self):
        w = random_chain(3, seed=51)
        doc = qtfit.fit(w, seed=0).to_json_dict()
        doc["n"] = 4
        with pytest.raises(InputError):
            qtfit.QTRepresentation.from_json_dict(doc)

    def test_missing_key_rejected(self):
        with pytest.raises(InputError):
            qtfit.QTRepresentation.from_json_dict({"n": 3})
