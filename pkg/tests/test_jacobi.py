import math
from dataclasses import replace

import mpmath
import numpy as np
import pytest

from oracles import direct_sum, jacobi_constant, mp_tau_derivative, mp_theta
from thetaforge import JetTable, PeriodMatrix, RationalVector
from thetaforge.errors import CrossCheckError, InsufficientData, VanishingDenominator
from thetaforge.jacobi import (
    classical_consistency_residual,
    classical_jacobi_residual,
    d_operator_quotient,
    estimate_constant,
    fd_tau_derivative,
    generalized_jacobi_residual,
    rhs_sum,
    rhs_terms,
    verify_tau_derivatives,
)
from thetaforge.sampling import sample_tau

R = RationalVector.parse
TAU_I = PeriodMatrix([[1j]])

# estimated once with 20 seeded tau; equal to g! (i/(2 pi n))^g e(-g a.delta)
FROZEN_CONSTANTS = {
    (1, 1, "1/2", "0"): 0.15915494309189535j,
    (1, 2, "1/4", "1/2"): 0.05626976975981913 + 0.056269769759819135j,
    (2, 1, "1/2,0", "0,1/2"): -0.050660591821168895,
    (2, 2, "1/4,1/2", "0,0"): -0.012665147955292224,
}


def taus(g, count, seed=60):
    return [sample_tau(g, seed, i) for i in range(count)]


class TestDOperator:
    def test_zero_characteristic(self):
        d = d_operator_quotient(sample_tau(2, 61, 0), R("0,0"), R("0,1/2"), 1)
        assert np.abs(d.matrix).max() < 1e-14 and abs(d.det) < 1e-28

    def test_odd_example_vanishes(self):
        d = d_operator_quotient(TAU_I, R("1/2"), R("1/2"), 1)
        assert abs(d.matrix[0, 0]) < 1e-13 and d.cross_residual < 1e-10

    def test_genus_one_against_mpmath(self):
        t = 0.1 + 0.9j
        d = d_operator_quotient(PeriodMatrix([[t]]), R("1/2"), R("0"), 1)

        def q(x):
            return mp_theta(2 * x, 0, 0.5, 0, dps=60) / mp_theta(2 * x, 0, 0, 0, dps=60)

        with mpmath.workdps(30):
            ref = complex(mpmath.diff(q, mpmath.mpc(t), h=mpmath.mpf(10) ** -10))
        assert abs(d.matrix[0, 0] - ref) < 1e-12 * max(1, abs(ref))

    def test_genus_two_against_finite_differences(self):
        tau = sample_tau(2, 61, 1)
        a, delta = R("1/2,0"), R("0,1/2")
        d = d_operator_quotient(tau, a, delta, 1)
        assert np.allclose(d.matrix, d.matrix.T, atol=1e-15)

        def q(t):
            v = direct_sum((2 * t.matrix).tolist(), None, a, delta, radius=7)[0]
            return v / direct_sum((2 * t.matrix).tolist(), None, [0, 0], delta, radius=7)[0]

        h = 1e-4
        fd = np.zeros((2, 2), dtype=complex)
        for j in range(2):
            for k in range(j, 2):
                c1 = (q(tau.shifted(j, k, h)) - q(tau.shifted(j, k, -h))) / (2 * h)
                c2 = (q(tau.shifted(j, k, h / 2)) - q(tau.shifted(j, k, -h / 2))) / h
                fd[j, k] = fd[k, j] = (4 * c2 - c1) / 3 * (1 if j == k else 0.5)
        assert np.abs(fd - d.matrix).max() < 1e-8 * max(1, np.abs(d.matrix).max())

    def test_order_checked(self):
        from thetaforge.errors import CharacteristicOrderError

        with pytest.raises(CharacteristicOrderError):
            d_operator_quotient(TAU_I, R("1/3"), R("0"), 1)

    def test_cross_check_catches_corruption(self, monkeypatch):
        orig = JetTable.jet

        def bad(self, scale, eps, delta, z=None):
            j = orig(self, scale, eps, delta, z)
            return replace(j, tau_deriv=j.tau_deriv * (1 + 1e-6))

        monkeypatch.setattr(JetTable, "jet", bad)
        with pytest.raises(CrossCheckError):
            d_operator_quotient(sample_tau(1, 61, 2), R("1/2"), R("0"), 1)

    def test_vanishing_denominator(self, monkeypatch):
        orig = JetTable.jet

        def zero(self, scale, eps, delta, z=None):
            j = orig(self, scale, eps, delta, z)
            return replace(j, value=0j) if not any(eps.entries) else j

        monkeypatch.setattr(JetTable, "jet", zero)
        with pytest.raises(VanishingDenominator):
            d_operator_quotient(sample_tau(1, 61, 2), R("1/2"), R("0"), 1)


class TestRHS:
    def test_zero_characteristic(self):
        assert abs(rhs_sum(sample_tau(2, 62, 0), R("0,0"), R("1/2,0"), 2)) < 1e-20

    def test_genus_one_terms(self):
        terms = rhs_terms(TAU_I, R("1/2"), R("1/2"), 1)
        ref = [
            sign * (complex(mp_theta(4j, 0, c, 0, deriv=1)) / math.pi) ** 2
            for sign, c in ((1, 0.25), (-1, 0.75))
        ]
        assert len(terms) == 2
        assert np.abs(np.array(terms) - ref).max() < 1e-12
        assert abs(sum(terms)) < 1e-12  # the two squares coincide

    def test_genus_two_sixteen_terms(self):
        tau = sample_tau(2, 62, 1)
        a = R("1/2,1/2")
        terms = rhs_terms(tau, a, R("0,0"), 1)
        assert len(terms) == 16
        halves = [[0, 0], [0, 0.5], [0.5, 0], [0.5, 0.5]]
        grads = [direct_sum((4 * tau.matrix).tolist(), None, [0.25 + e[0], 0.25 + e[1]], [0, 0], radius=6)[1]
                 for e in halves]
        ref = [np.linalg.det(np.array([grads[i], grads[j]])) ** 2 / math.pi**4 for i in range(4) for j in range(4)]
        assert np.abs(np.array(terms) - ref).max() < 1e-12 * max(1, np.abs(ref).max())


class TestConstant:
    @pytest.mark.parametrize("key", list(FROZEN_CONSTANTS))
    def test_frozen_and_closed_form(self, key):
        g, n, a, d = key
        est = estimate_constant(taus(g, 20), R(a), R(d), n)
        assert est.rel_std < 1e-6 and est.count == 20
        assert abs(est.value - FROZEN_CONSTANTS[key]) < 1e-10
        assert abs(est.value - jacobi_constant(g, n, R(a), R(d))) < 1e-10

    def test_quarter_level_two(self):
        est = estimate_constant(taus(1, 20), R("1/4"), R("0"), 2)
        assert est.rel_std < 1e-6

    def test_held_out(self):
        a, d = R("1/4,1/2"), R("0,1/2")
        est = estimate_constant(taus(2, 20), a, d, 2)
        for tau in taus(2, 10, seed=63):
            rep = generalized_jacobi_residual(tau, est.value, a, d, 2)
            assert rep.passed

    def test_zero_characteristic_insufficient(self):
        with pytest.raises(InsufficientData):
            estimate_constant(taus(1, 20), R("0"), R("0"), 1)

    def test_odd_level_one_is_identically_zero(self):
        """g=1, n=1, a=1/2, delta=1/2: theta[1/2,1/2] is odd and the two
        right-hand squares cancel, so both sides vanish identically."""
        with pytest.raises(InsufficientData):
            estimate_constant(taus(1, 20), R("1/2"), R("1/2"), 1)

    def test_too_few_samples(self):
        with pytest.raises(InsufficientData):
            estimate_constant(taus(1, 9), R("1/2"), R("0"), 1)


class TestClassical:
    @pytest.mark.parametrize("t", [1j, 0.5 + 0.8j])
    def test_examples(self, t):
        assert classical_jacobi_residual(PeriodMatrix([[t]])).residual < 1e-10

    def test_box_samples(self):
        rng = np.random.default_rng(64)
        worst = max(
            classical_jacobi_residual(PeriodMatrix([[complex(rng.uniform(-0.5, 0.5), rng.uniform(0.5, 3))]])).residual
            for _ in range(100)
        )
        assert worst < 1e-9

    def test_genus_check(self):
        with pytest.raises(ValueError):
            classical_jacobi_residual(sample_tau(2, 1, 0))

    def test_consistency_with_level_form(self):
        est = estimate_constant(taus(1, 20), R("1/2"), R("0"), 1)
        for tau in taus(1, 5, seed=65):
            assert classical_consistency_residual(tau, est.value).residual < 1e-8


class TestTauDerivatives:
    def test_fd_against_mpmath(self):
        fd = fd_tau_derivative(PeriodMatrix([[0.3 + 0.9j]]), None, R("1/2"), R("0"))
        ref = complex(mp_tau_derivative(0.3 + 0.9j, 0.5, 0))
        assert abs(fd[0, 0] - ref) < 1e-9

    @pytest.mark.parametrize("g", [1, 2])
    def test_three_routes(self, g):
        rng = np.random.default_rng(g)
        for i in range(5):
            e = RationalVector([f"{k}/4" for k in rng.integers(0, 4, g)])
            d = RationalVector([f"{k}/2" for k in rng.integers(0, 2, g)])
            z = rng.uniform(-0.2, 0.2, g) + 1j * rng.uniform(-0.2, 0.2, g)
            assert verify_tau_derivatives(sample_tau(g, 66, i), z, e, d).residual < 1e-9

    def test_off_diagonal_weight(self):
        """The stored off-diagonal entry is half the raw partial in tau_12."""
        tau = sample_tau(2, 67, 0)
        from thetaforge import theta_jet

        j = theta_jet(tau, None, R("1/4,1/4"), R("0,0"))
        h = 1e-5
        raw = (theta_jet(tau.shifted(0, 1, h), None, R("1/4,1/4"), R("0,0")).value
               - theta_jet(tau.shifted(0, 1, -h), None, R("1/4,1/4"), R("0,0")).value) / (2 * h)
        assert abs(j.tau_deriv[0, 1] - raw / 2) < 1e-8 * max(1, abs(raw))
