"""
Tests for mixing_gen

Validates:
- Exact phi, Gamma, varsigma for the preset chains against ground truth
- phi against brute force over events, Gamma against its closed form
- Non-summable and non-centered chains are rejected
- Sampling is reproducible per (seed, replica) and independent of blocking
- Suspension statistics (taubar, eta, F, Fbar, Gamma^eta, varsigma^eta)
"""

import numpy as np
import pytest

from roughflow.errors import (
    ClosedFormMismatchError,
    InexactFiberModeError,
    NonCenteredObservableError,
    NonSummableMixingError,
)
from roughflow.mixing_gen import (
    MarkovMixingSpec,
    SuspensionSpec,
    chain_preset,
    closed_form_gamma,
    continuous_limit_covariance,
    covariance_summary,
    eta_covariance_summary,
    eta_values,
    fiber_area,
    fiber_area_mean,
    lagged_covariance,
    mixing_condition_check,
    phi_coefficient,
    phi_sequence,
    roof_mean,
    sample_sequence,
    sample_sequences,
    stationary_distribution,
    suspension_batch,
    suspension_preset,
    suspension_sample,
    two_state,
)
from tests.utils.oracles import brute_force_phi, lagged_covariance_mc


def chain_stats(name: str, phi_terms: int) -> dict:
    spec = chain_preset(name)
    summary = covariance_summary(spec)
    return {
        "stationary": spec.stationary,
        "phi": phi_sequence(spec, phi_terms),
        "var0": summary.var0,
        "gamma": summary.gamma,
        "sigma": summary.sigma,
        "spectral_radius": summary.spectral_radius,
    }


@pytest.mark.unit
class TestChainStatistics:
    """Exact statistics of the preset chains."""

    @pytest.mark.parametrize("preset,phi_terms", [
        ("two-state-0.3", 10),
        ("iid-rademacher", 5),
        ("asymmetric-two-state", 5),
    ])
    def test_matches_ground_truth(self, compare_with_ground_truth, preset, phi_terms):
        """
        Test covariance_summary and phi against the stored targets.

        Expected:
        - two-state-0.3: phi(n) = 0.5 * 0.4^n, Gamma = 2/3, varsigma = 7/3
        - every key within 1e-10
        """
        result = compare_with_ground_truth(chain_stats(preset, phi_terms), preset, tolerance=1e-10,
                                           keys=["stationary", "phi", "var0", "gamma", "sigma",
                                                 "spectral_radius"])
        assert result["status"] == "pass", f"{preset}: {result['differences']}"

    def test_two_state_closed_forms(self, two_state_chain):
        """
        Expected:
        - phi(n) = 0.5 * 0.4^n for n = 1..20
        - C(r) = 0.4^r
        """
        phi = phi_sequence(two_state_chain, 20)
        assert np.allclose(phi, 0.5 * 0.4 ** np.arange(1, 21), rtol=0, atol=1e-14), f"phi {phi[:4]}"
        for r in range(6):
            assert abs(lagged_covariance(two_state_chain, r)[0, 0] - 0.4 ** r) < 1e-14

    def test_phi_matches_brute_force(self):
        """
        Test phi against sup over events on a three-state chain.

        Expected:
        - max_i TV equals max over subsets B of |P^n(i, B) - pi(B)|
        """
        spec = chain_preset("three-state-cycle")
        for n in range(1, 6):
            brute = brute_force_phi(spec.transition, spec.stationary, n)
            assert abs(phi_coefficient(spec, n) - brute) < 1e-12, f"n={n}: {phi_coefficient(spec, n)} vs {brute}"

    def test_gamma_matches_closed_form(self):
        """
        Expected:
        - truncated Gamma equals g^T diag(pi) Q (I - Q)^{-1} g
        - varsigma is symmetric with var0 + Gamma + Gamma^T
        """
        summary = covariance_summary(chain_preset("three-state-cycle"))
        assert np.allclose(summary.gamma, summary.gamma_closed, atol=1e-11)
        assert np.allclose(summary.sigma, summary.var0 + summary.gamma + summary.gamma.T, atol=1e-12)
        assert not np.allclose(summary.gamma, summary.gamma.T), "three-state Gamma should be nonsymmetric"

    def test_vanishing_first_lag(self):
        """
        Test the lazy rotation P = I/3 + 2C/3 with g = cos(2 pi s / 3).

        The kernel eigenvalue on g is i / sqrt(3), so C(r) = Re(i / sqrt 3)^r / 2.

        Expected:
        - C(1) = 0 while later lags do not vanish
        - Gamma = Re(lambda / (1 - lambda)) / 2 = -1/8, varsigma = 1/2 - 1/4 = 1/4
        - summation runs past the zero lag
        """
        spec = MarkovMixingSpec(
            states=3,
            P=[[1.0 / 3.0, 2.0 / 3.0, 0.0], [0.0, 1.0 / 3.0, 2.0 / 3.0], [2.0 / 3.0, 0.0, 1.0 / 3.0]],
            g=[1.0, -0.5, -0.5],
            name="lazy-rotation",
        )
        assert abs(lagged_covariance(spec, 1)[0, 0]) < 1e-15
        assert abs(lagged_covariance(spec, 2)[0, 0] + 1.0 / 6.0) < 1e-12
        summary = covariance_summary(spec)
        assert abs(summary.gamma[0, 0] + 0.125) < 1e-10, f"gamma {summary.gamma}"
        assert abs(summary.sigma[0, 0] - 0.25) < 1e-10, f"sigma {summary.sigma}"
        assert np.allclose(summary.gamma, closed_form_gamma(spec), atol=1e-10)
        assert summary.lag_cutoff > 2 and summary.tail_bound < 1e-12

    def test_closed_form_disagreement_raises(self, two_state_chain, mocker):
        """
        Expected:
        - a closed form off by more than the tail bound raises ClosedFormMismatchError
        """
        mocker.patch("roughflow.mixing_gen.statistics.closed_form_gamma", return_value=np.zeros((1, 1)))
        with pytest.raises(ClosedFormMismatchError) as info:
            covariance_summary(two_state_chain)
        assert abs(info.value.gap - 2.0 / 3.0) < 1e-10

    def test_swap_not_summable(self):
        """
        Expected:
        - the periodic swap chain raises NonSummableMixingError
        - mixing_condition_check flags it
        """
        spec = chain_preset("swap")
        with pytest.raises(NonSummableMixingError):
            covariance_summary(spec)
        assert mixing_condition_check(spec, 20).violated

    def test_mixing_condition_holds(self, two_state_chain):
        """
        Expected:
        - n^3 phi(n) peaks early for a geometric chain
        """
        diagnostics = mixing_condition_check(two_state_chain, 50)
        assert not diagnostics.violated, f"argmax {diagnostics.argmax}"
        assert np.all(diagnostics.rho == 0.0)

    def test_non_centered_rejected(self):
        """
        Expected:
        - auto_center off with E_pi g != 0 raises NonCenteredObservableError
        - centered=True with E_pi g != 0 fails validation (a ValueError)
        """
        spec = MarkovMixingSpec(states=2, P=[[0.5, 0.5], [0.5, 0.5]], g=[1.0, 0.0], auto_center=False)
        with pytest.raises(NonCenteredObservableError):
            covariance_summary(spec)
        with pytest.raises(ValueError):
            MarkovMixingSpec(states=2, P=[[0.5, 0.5], [0.5, 0.5]], g=[1.0, 0.0], centered=True)

    def test_non_stochastic_rejected(self):
        """
        Expected:
        - rows not summing to 1 fail validation
        """
        with pytest.raises(ValueError):
            MarkovMixingSpec(states=2, P=[[0.5, 0.6], [0.5, 0.5]], g=[1.0, -1.0])

    def test_auto_centering(self, asymmetric_chain):
        """
        Expected:
        - g = (1, -1) under pi = (1/3, 2/3) centers to (4/3, -2/3)
        """
        assert np.allclose(asymmetric_chain.observable[:, 0], [4.0 / 3.0, -2.0 / 3.0], atol=1e-14)

    def test_stationary_distribution(self):
        """
        Expected:
        - pi P = pi with total mass 1
        """
        P = np.array([[0.6, 0.4], [0.2, 0.8]])
        pi = stationary_distribution(P)
        assert np.allclose(pi, [1.0 / 3.0, 2.0 / 3.0], atol=1e-12)


@pytest.mark.unit
class TestSampling:
    """Counter-based sampling per (seed, replica)."""

    def test_replica_independent_of_block(self, two_state_chain):
        """
        Expected:
        - replica 3 is bit-identical sampled alone or inside a block
        """
        block = sample_sequences(two_state_chain, 200, seed=9, start=0, stop=6)
        alone = sample_sequence(two_state_chain, 200, seed=9, replica=3)
        assert np.array_equal(block[3], alone)

    def test_seed_changes_output(self, two_state_chain):
        """
        Expected:
        - different seeds give different sequences; equal seeds equal ones
        """
        a = sample_sequence(two_state_chain, 100, seed=1)
        b = sample_sequence(two_state_chain, 100, seed=2)
        assert not np.array_equal(a, b)
        assert np.array_equal(a, sample_sequence(two_state_chain, 100, seed=1))

    def test_values_are_observable_rows(self, asymmetric_chain):
        """
        Expected:
        - every sampled value is a centered observable row
        """
        xi = sample_sequence(asymmetric_chain, 500, seed=0)
        assert set(np.round(xi[:, 0], 12)) <= {round(4.0 / 3.0, 12), round(-2.0 / 3.0, 12)}

    @pytest.mark.slow
    def test_lagged_covariances(self, two_state_chain):
        """
        Test empirical lag covariances along one long path.

        Expected:
        - C(0) = 1, C(1) = 0.4, C(2) = 0.16 within 0.03
        """
        xi = sample_sequence(two_state_chain, 200_000, seed=5)
        for r, target in ((0, 1.0), (1, 0.4), (2, 0.16)):
            estimate = lagged_covariance_mc(xi, r)[0, 0]
            assert abs(estimate - target) < 0.03, f"C({r}) = {estimate}, expected {target}"

    @pytest.mark.slow
    def test_area_mean(self, two_state_chain):
        """
        Test E SS_N(1) = Gamma at N = 256.

        Expected:
        - replica mean of N^{-1} sum_{k<l} xi(k) xi(l) within 4 SE of the
          finite-N value N^{-1} sum_r (N - r) 0.4^r
        """
        N = 256
        xi = sample_sequences(two_state_chain, N, seed=11, start=0, stop=3000)[:, :, 0]
        prefix = np.cumsum(xi, axis=1) - xi
        ss = np.sum(prefix * xi, axis=1) / N
        r = np.arange(1, N)
        target = float(np.sum((N - r) * 0.4 ** r) / N)
        se = ss.std(ddof=1) / np.sqrt(len(ss))
        assert abs(ss.mean() - target) <= 4 * se, f"mean {ss.mean()} vs {target} (se {se})"


def suspension_stats(spec) -> dict:
    eta = eta_covariance_summary(spec)
    return {
        "taubar": roof_mean(spec),
        "eta": eta_values(spec),
        "fiber_area": fiber_area(spec),
        "fiber_area_mean": fiber_area_mean(spec),
        "eta_var0": eta.var0,
        "eta_gamma": eta.gamma,
        "eta_sigma": eta.sigma,
        "continuous_covariance": continuous_limit_covariance(spec),
    }


@pytest.mark.unit
class TestSuspension:
    """Exact fiber integrals and sampled suspension increments."""

    @pytest.mark.parametrize("preset", ["two-state-roof", "unit-roof"])
    def test_matches_ground_truth(self, compare_with_ground_truth, preset):
        """
        Test suspension statistics against the stored targets.

        Expected:
        - two-state-roof: taubar = 7/6, eta = (6/7, -3/7), Fbar = 9/49,
          Gamma^eta = 12/49, varsigma^eta = 6/7
        """
        actual = suspension_stats(suspension_preset(preset))
        result = compare_with_ground_truth(actual, preset, tolerance=1e-10, keys=list(actual))
        assert result["status"] == "pass", f"{preset}: {result['differences']}"

    def test_fiber_area_symmetric_part(self):
        """
        Expected:
        - Sym F(state) = eta (x) eta / 2 also for polynomial fibers
        """
        spec = suspension_preset("ramp-roof")
        eta = eta_values(spec)
        area = fiber_area(spec)
        sym = 0.5 * (area + np.swapaxes(area, 1, 2))
        assert np.allclose(sym, 0.5 * eta[:, :, None] * eta[:, None, :], atol=1e-12)

    def test_eta_centered(self, two_state_roof):
        """
        Expected:
        - E_pi eta = 0 after centering by E_mu g
        """
        mean = two_state_roof.base.stationary @ eta_values(two_state_roof)
        assert np.allclose(mean, 0.0, atol=1e-14), f"E eta = {mean}"

    def test_inexact_fiber_mode(self):
        """
        Expected:
        - a fiber mode without exact antiderivative fails validation
        """
        with pytest.raises(ValueError, match="exact antiderivative"):
            SuspensionSpec(base=two_state(0.3, 0.3), tau=[1.0, 1.0], fiber_mode="numeric")
        assert issubclass(InexactFiberModeError, ValueError)

    def test_roof_bound(self):
        """
        Expected:
        - roof values outside [1/L, L] fail validation
        """
        with pytest.raises(ValueError):
            SuspensionSpec(base=two_state(0.3, 0.3), tau=[0.5, 3.0], roof_bound=2.0)

    def test_batch_fills_horizon(self, two_state_roof):
        """
        Expected:
        - total flow time per replica is exactly taubar T
        - cells past the final fragment carry zero increments
        """
        eps, T = 0.25, 1.0
        batch = suspension_batch(two_state_roof, eps, T, seed=3, start=0, stop=8)
        total = batch.real_time.sum(axis=1)
        assert np.allclose(total, T * roof_mean(two_state_roof), atol=1e-12), f"flow time {total}"
        for r, n in enumerate(batch.full_fibers):
            assert np.all(batch.u[r, n + 1:] == 0.0), f"replica {r} has increments past its fragment"

    def test_sample_record(self, two_state_roof):
        """
        Expected:
        - the path ends at T and its endpoint equals V(T) of the batch
        - renewal_count inverts the cumulative roofs
        """
        eps, T = 0.25, 1.0
        record = suspension_sample(two_state_roof, eps, T, seed=4, replica=2)
        v, _ = suspension_batch(two_state_roof, eps, T, seed=4, start=2, stop=3).terminal()
        assert abs(record.path.grid[-1] - T) < 1e-12
        assert np.allclose(record.path.increment(0, record.path.cells), v[0], atol=1e-12)
        roofs = record.renewal_times
        assert record.renewal_count(0.0) == 0
        assert np.array_equal(record.renewal_count(roofs[:5]), np.arange(5))

    @pytest.mark.slow
    def test_terminal_law(self, two_state_roof):
        """
        Test (V(1), VV(1)) over replicas at eps = 1/8.

        Expected:
        - Cov V(1) near varsigma^eta = 6/7
        - E VV(1) near Gamma^eta + Fbar = 21/49
        """
        batch = suspension_batch(two_state_roof, 0.125, 1.0, seed=6, start=0, stop=4000)
        v, vv = batch.terminal()
        assert abs(v[:, 0].mean()) < 0.08, f"mean V {v[:, 0].mean()}"
        assert abs(v[:, 0].var(ddof=1) - 6.0 / 7.0) < 0.15, f"var V {v[:, 0].var(ddof=1)}"
        assert abs(vv[:, 0, 0].mean() - 21.0 / 49.0) < 0.08, f"mean VV {vv[:, 0, 0].mean()}"
