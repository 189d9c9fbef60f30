"""
Tests for tensor_core

Validates:
- Level-2 group law: associativity, identity, inverse, dilation homogeneity
- Chen's relation on every span of a cadlag rough path
- Canonical lifts reproduce strictly ordered iterated sums
- p-variation DP agrees with exhaustive enumeration
- Homogeneous norm scales linearly under dilation
- Truncated tensor algebra and Lyons extensions up to depth 3
"""

import numpy as np
import pytest

from roughflow.errors import DimensionMismatchError, GridMismatchError, InvalidParameterError
from roughflow.tensor_core import (
    CadlagRoughPath,
    Level2GroupElement,
    TruncatedTensor,
    canonical_lift,
    dilate,
    homogeneous_norm,
    iterated_sums,
    lyons_extend,
    p_variation,
    p_variation_bruteforce,
    read_path_csv,
    rough_distance,
    star_inv,
    star_mul,
    symmetric_defect,
    write_path_csv,
    write_solution_csv,
    zero_path,
)
from tests.utils.oracles import ordered_iterated_sum

ELEMENTS = 2000
EXACT = 1e-12


def random_element(rng, d: int = 3) -> Level2GroupElement:
    return Level2GroupElement(rng.standard_normal(d), rng.standard_normal((d, d)))


def random_path(rng, n: int = 12, d: int = 2, canonical: bool = False) -> CadlagRoughPath:
    grid = np.cumsum(np.concatenate([[0.0], rng.uniform(0.1, 1.0, n)]))
    level2 = np.zeros((n, d, d)) if canonical else 0.3 * rng.standard_normal((n, d, d))
    return CadlagRoughPath(grid, rng.standard_normal((n, d)), level2)


@pytest.mark.unit
class TestLevel2Group:
    """Group law of (a, M) * (b, N) = (a + b, M + a (x) b + N)."""

    def test_associativity(self, rng_factory):
        """
        Test associativity on random elements.

        Expected:
        - (x * y) * z equals x * (y * z) to 1e-12 on every sample
        """
        rng = rng_factory()
        for _ in range(ELEMENTS):
            x, y, z = (random_element(rng) for _ in range(3))
            left, right = (x * y) * z, x * (y * z)
            assert left.allclose(right, atol=EXACT * 10), \
                f"associativity broken: {left.m} vs {right.m}"

    def test_identity_and_inverse(self, rng_factory):
        """
        Test identity and two-sided inverse.

        Expected:
        - x * 1 = 1 * x = x
        - x * x^{-1} = x^{-1} * x = 1
        """
        rng = rng_factory(1)
        one = Level2GroupElement.identity(3)
        for _ in range(ELEMENTS):
            x = random_element(rng)
            assert (x * one).allclose(x) and (one * x).allclose(x), "identity is not neutral"
            assert (x * star_inv(x)).allclose(one, atol=1e-11), f"right inverse fails for {x.a}"
            assert (star_inv(x) * x).allclose(one, atol=1e-11), f"left inverse fails for {x.a}"

    def test_product_formula(self):
        """
        Test the product on a hand-computed pair.

        Expected:
        - second level picks up a (x) b with a before b
        """
        x = Level2GroupElement([1.0, 0.0], np.zeros((2, 2)))
        y = Level2GroupElement([0.0, 1.0], np.zeros((2, 2)))
        z = star_mul(x, y)
        assert np.array_equal(z.a, [1.0, 1.0]), f"first level {z.a}"
        assert z.m[0, 1] == 1.0 and z.m[1, 0] == 0.0, f"second level {z.m}"

    def test_dilation_is_homomorphism(self, rng_factory):
        """
        Test delta_lam (x * y) = delta_lam x * delta_lam y.

        Expected:
        - equality for every random lam in (0, 5)
        """
        rng = rng_factory(2)
        for _ in range(ELEMENTS):
            x, y = random_element(rng), random_element(rng)
            lam = rng.uniform(0.0, 5.0)
            assert dilate(x * y, lam).allclose(dilate(x, lam) * dilate(y, lam), atol=1e-10), \
                f"dilation not multiplicative at lam={lam}"

    def test_negative_dilation_rejected(self, rng_factory):
        """
        Expected:
        - lam < 0 raises InvalidParameterError (a ValueError)
        """
        x = random_element(rng_factory())
        with pytest.raises(InvalidParameterError):
            x.dilate(-1.0)
        with pytest.raises(ValueError):
            x.dilate(float("nan"))

    def test_dimension_mismatch(self):
        """
        Expected:
        - multiplying d=2 by d=3 raises DimensionMismatchError
        """
        with pytest.raises(DimensionMismatchError):
            Level2GroupElement.identity(2) * Level2GroupElement.identity(3)


@pytest.mark.unit
class TestCadlagRoughPath:
    """Span increments derived from stored cell increments."""

    def test_chen_on_all_spans(self, rng_factory):
        """
        Test Chen's relation for every i <= j <= k.

        Expected:
        - span(i, k) = span(i, j) * span(j, k) to 1e-12
        """
        path = random_path(rng_factory(), n=10)
        for i in range(path.cells + 1):
            for j in range(i, path.cells + 1):
                for k in range(j, path.cells + 1):
                    joined = path.span_element(i, j) * path.span_element(j, k)
                    assert joined.allclose(path.span_element(i, k), atol=1e-11), \
                        f"Chen fails on ({i}, {j}, {k})"

    def test_canonical_lift_matches_iterated_sums(self, rng_factory):
        """
        Test the lift of a sequence against ordered-tuple enumeration.

        Expected:
        - U(0, t_n) = N^{-1/2} sum xi
        - UU(0, t_n)_{ij} = N^{-1} sum_{k<l} xi_i(k) xi_j(l)
        """
        rng = rng_factory(3)
        xi = rng.standard_normal((9, 2))
        N = 4
        path = canonical_lift(xi, N)
        assert np.allclose(path.increment(0, 9), xi.sum(axis=0) / 2.0, atol=EXACT)
        uu = path.rebased_increment(0, 9)
        for i in range(2):
            for j in range(2):
                expected = ordered_iterated_sum(xi, [i, j]) / N
                assert abs(uu[i, j] - expected) < 1e-12, f"UU[{i},{j}] = {uu[i, j]}, expected {expected}"

    def test_canonical_lift_grid_and_horizon(self):
        """
        Expected:
        - grid t0 + k/N
        - more than N * t_max terms is rejected
        """
        path = canonical_lift([1.0, -1.0, 1.0], 2, t0=1.0)
        assert np.allclose(path.grid, [1.0, 1.5, 2.0, 2.5]), f"grid {path.grid}"
        with pytest.raises(InvalidParameterError):
            canonical_lift([1.0, -1.0, 1.0], 2, t_max=1.0)

    def test_symmetric_identity(self, rng_factory):
        """
        Test Sym(UU) = U (x) U / 2 - [U] / 2 for canonical lifts.

        Expected:
        - symmetric_defect vanishes on every span
        """
        path = random_path(rng_factory(4), n=8, d=3, canonical=True)
        for i in range(path.cells + 1):
            for j in range(i, path.cells + 1):
                assert symmetric_defect(path, i, j) < 1e-12, f"defect on ({i}, {j})"

    def test_coarsen_keeps_spans(self, rng_factory):
        """
        Expected:
        - every span between kept indices is unchanged by coarsening
        """
        path = random_path(rng_factory(5), n=12)
        keep = [0, 3, 4, 9, 12]
        coarse = path.coarsen(keep)
        for a, i in enumerate(keep):
            for b in range(a, len(keep)):
                j = keep[b]
                assert coarse.span_element(a, b).allclose(path.span_element(i, j), atol=1e-11), \
                    f"coarse span ({i}, {j}) changed"

    def test_value_at_is_cadlag(self):
        """
        Expected:
        - X(t) = sum_{k < [Nt]} xi(k) / sqrt(N): constant on [t_k, t_{k+1}),
          jumping at t_{k+1}
        """
        path = canonical_lift([1.0, 2.0], 1)
        assert path.value_at(0.5).a[0] == 0.0, "value inside the first cell"
        assert path.value_at(1.0).a[0] == 1.0, "value at the first jump"
        assert path.value_at(1.5).a[0] == 1.0, "value inside the second cell"
        assert path.value_at(2.5).a[0] == 3.0, "value after t_n"
        assert path.value_at(-1.0).a[0] == 0.0, "value before t_0"

    def test_restrict_and_concatenate(self, rng_factory):
        """
        Expected:
        - restrict(0, j).concatenate(restrict(j, n)) reproduces every span
        """
        path = random_path(rng_factory(6), n=6)
        joined = path.restrict(0, 2).concatenate(path.restrict(2, 6))
        assert joined.span_element(0, 6).allclose(path.span_element(0, 6), atol=1e-11)
        with pytest.raises(GridMismatchError):
            path.restrict(0, 2).concatenate(path.restrict(3, 6))

    def test_bad_grid(self):
        """
        Expected:
        - non-increasing grids raise GridMismatchError
        """
        with pytest.raises(GridMismatchError):
            CadlagRoughPath([0.0, 1.0, 1.0], np.zeros((2, 1)), np.zeros((2, 1, 1)))

    def test_path_csv_roundtrip(self, rng_factory, tmp_path):
        """
        Expected:
        - a written path reads back bit-identically
        """
        path = random_path(rng_factory(7), n=5)
        back = read_path_csv(write_path_csv(path, tmp_path / "path.csv"))
        assert np.array_equal(back.grid, path.grid)
        assert np.array_equal(back.level1, path.level1)
        assert np.array_equal(back.level2, path.level2)

    def test_solution_csv_header(self, tmp_path):
        """
        Expected:
        - header t,y_1..y_e
        """
        out = write_solution_csv(np.array([0.0, 1.0]), np.array([[1.0, 2.0], [3.0, 4.0]]), tmp_path / "y.csv")
        assert out.read_text().splitlines()[0] == "t,y_1,y_2"


@pytest.mark.unit
class TestPVariation:
    """Exact dynamic programme against enumeration."""

    @pytest.mark.parametrize("p", [1.0, 1.5, 2.5])
    @pytest.mark.parametrize("level", [1, 2])
    def test_dp_matches_bruteforce(self, rng_factory, p, level):
        """
        Test DP against every partition of <= 10 cells.

        Expected:
        - equal value and equal (lexicographically smallest) witness
        """
        rng = rng_factory(int(10 * p) + level)
        for _ in range(5):
            path = random_path(rng, n=int(rng.integers(1, 11)))
            dp = p_variation(path, p, level=level)
            brute = p_variation_bruteforce(path, p, level=level)
            assert abs(dp.value - brute.value) <= 1e-10 * max(1.0, brute.value), \
                f"DP {dp.value} vs brute {brute.value}"
            assert dp.witness_partition == brute.witness_partition, \
                f"witness {dp.witness_partition} vs {brute.witness_partition}"

    def test_monotone_path(self):
        """
        Expected:
        - p-variation of a monotone scalar path is its total increment for p > 1
        """
        values = np.cumsum([0.0, 1.0, 0.5, 2.0, 0.25])
        report = p_variation(values, 2.0)
        assert abs(report.value - values[-1]) < 1e-12, f"value {report.value}"
        assert report.witness_partition == [0, 4]

    def test_window(self, rng_factory):
        """
        Expected:
        - a window equal to a restriction gives the restricted value
        """
        path = random_path(rng_factory(11), n=8)
        t = path.grid
        windowed = p_variation(path, 2.5, window=(t[2], t[6])).value
        restricted = p_variation(path.restrict(2, 6), 2.5).value
        assert abs(windowed - restricted) < 1e-12

    def test_estimate_above_limit(self, rng_factory):
        """
        Expected:
        - above the exact limit the value is a lower bound with an upper bound
        """
        path = random_path(rng_factory(12), n=40, canonical=True)
        exact = p_variation(path, 2.5).value
        estimate = p_variation(path, 2.5, exact_limit=10)
        assert not estimate.exact
        assert estimate.value <= exact + 1e-12, f"lower bound {estimate.value} above {exact}"
        assert estimate.upper >= exact - 1e-12, f"upper bound {estimate.upper} below {exact}"

    def test_invalid_p(self):
        """
        Expected:
        - p < 1 raises InvalidParameterError
        """
        with pytest.raises(InvalidParameterError):
            p_variation(np.arange(4.0), 0.5)


@pytest.mark.unit
class TestRoughNorms:
    """Homogeneous norm and inhomogeneous distance."""

    def test_homogeneous_norm_dilation(self, rng_factory):
        """
        Expected:
        - |||delta_lam X||| = lam |||X|||
        """
        path = random_path(rng_factory(13), n=9)
        base = homogeneous_norm(path, 2.5)
        for lam in (0.5, 2.0, 3.7):
            scaled = homogeneous_norm(path.dilate(lam), 2.5)
            assert abs(scaled - lam * base) < 1e-10 * max(1.0, lam * base), \
                f"lam={lam}: {scaled} vs {lam * base}"

    def test_distance_axioms(self, rng_factory):
        """
        Expected:
        - d(X, X) = 0, symmetry, positivity
        """
        rng = rng_factory(14)
        x = random_path(rng, n=7)
        y = CadlagRoughPath(x.grid, rng.standard_normal((7, 2)), np.zeros((7, 2, 2)))
        assert rough_distance(x, x, 2.5) == 0.0
        assert abs(rough_distance(x, y, 2.5) - rough_distance(y, x, 2.5)) < 1e-12
        assert rough_distance(x, y, 2.5) > 0.0

    def test_distance_levels_add_up(self, rng_factory):
        """
        Expected:
        - full distance = level-1 term + level-2 term
        """
        rng = rng_factory(15)
        x = random_path(rng, n=6)
        y = random_path(rng, n=6).with_grid(x.grid)
        full = rough_distance(x, y, 2.5)
        parts = rough_distance(x, y, 2.5, level=1) + rough_distance(x, y, 2.5, level=2)
        assert abs(full - parts) < 1e-12

    def test_grid_mismatch_and_p_range(self, rng_factory):
        """
        Expected:
        - different grids raise GridMismatchError
        - p outside (2, 3) raises InvalidParameterError
        """
        rng = rng_factory(16)
        x = random_path(rng, n=4)
        y = random_path(rng, n=5)
        with pytest.raises(GridMismatchError):
            rough_distance(x, y, 2.5)
        with pytest.raises(InvalidParameterError):
            homogeneous_norm(x, 3.0)

    def test_zero_path(self):
        """
        Expected:
        - the zero path has zero norm
        """
        assert homogeneous_norm(zero_path(np.linspace(0, 1, 5), 2), 2.5) == 0.0


@pytest.mark.unit
class TestTruncatedTensor:
    """Truncated tensor algebra and Lyons extensions."""

    def test_exp_inverse(self, rng_factory):
        """
        Expected:
        - exp(v) * exp(-v) = 1 and exp(v).inverse() = exp(-v)
        """
        v = rng_factory(17).standard_normal(2)
        a = TruncatedTensor.exp(v, 4)
        one = TruncatedTensor.identity(2, 4)
        assert (a * TruncatedTensor.exp(-v, 4)).allclose(one)
        assert a.inverse().allclose(TruncatedTensor.exp(-v, 4))

    def test_iterated_sums_match_enumeration(self, rng_factory):
        """
        Expected:
        - level-k entries equal ordered-tuple sums for k <= 3
        """
        xi = rng_factory(18).standard_normal((7, 2))
        sig = iterated_sums(xi, 3)
        for indices in ([0], [1, 0], [0, 1, 1], [1, 1, 0]):
            got = sig.level(len(indices))[tuple(indices)]
            expected = ordered_iterated_sum(xi, indices)
            assert abs(got - expected) < 1e-10, f"{indices}: {got} vs {expected}"

    def test_lyons_extension_chen(self, rng_factory):
        """
        Expected:
        - extension over [0, n] = extension over [0, j] * [j, n]
        - level 2 agrees with the rough path's rebased second level
        """
        path = canonical_lift(rng_factory(19).standard_normal((8, 2)), 8)
        ext = lyons_extend(path, 3)
        assert (ext.span(0, 3) * ext.span(3, 8)).allclose(ext.full(), atol=1e-12)
        assert np.allclose(ext.span(2, 7).level(2), path.rebased_increment(2, 7), atol=1e-12)

    def test_lyons_needs_canonical(self, rng_factory):
        """
        Expected:
        - a path with within-cell second levels is rejected
        """
        with pytest.raises(InvalidParameterError):
            lyons_extend(random_path(rng_factory(20), n=3), 2)

    def test_contract(self):
        """
        Expected:
        - <e_0 (x) e_0, exp(v)> = v_0^2 / 2
        """
        sig = TruncatedTensor.exp(np.array([3.0, 1.0]), 2)
        A = np.zeros((2, 2))
        A[0, 0] = 1.0
        assert abs(sig.contract(A) - 4.5) < 1e-12
        with pytest.raises(DimensionMismatchError):
            sig.contract(np.zeros((3, 3)))
