import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pointerlab import (MOMENTUM, POSITION, GridContainment, PointerGrid, PointerObservable,
                        PointerState, gaussian_pointer, moments, observable_mean, translate)
from pointerlab.pointer import (anticommutator_mean, ccv, commutator_mean, cov, pair_statistic,
                                variance)
from pointerlab.verify import skewed_pointer

Q2 = PointerObservable.parse("q^2")


def pointers(grid):
    """A spread of states: stationary, moving, chirped, displaced and skewed."""
    return [
        gaussian_pointer(grid, 0.0, 1.0),
        gaussian_pointer(grid, 1.0, 0.7, momentum=0.8),
        gaussian_pointer(grid, -2.0, 1.3, chirp=0.2),
        skewed_pointer(grid),
    ]


class TestGrid:
    @pytest.mark.parametrize("n", [32, 100, 1000])
    def test_rejects_bad_sizes(self, n):
        with pytest.raises(ValueError):
            PointerGrid(n)

    def test_default_grid(self, grid):
        assert grid.n_points == 1024
        assert grid.dq == pytest.approx(40 / 1024)
        assert grid.q[0] == -20.0
        assert grid.p[1] == pytest.approx(2 * np.pi / 40)

    def test_hbar_scales_momentum(self):
        g = PointerGrid(hbar=2.0)
        assert np.allclose(g.p, 2 * PointerGrid().p)


class TestGaussian:
    def test_unit_gaussian_moments(self, gauss):
        rep = moments(gauss)
        assert abs(rep.mean_q) < 1e-9
        assert rep.var_q == pytest.approx(1.0, rel=1e-6)
        assert rep.var_p == pytest.approx(0.25, rel=1e-6)
        assert abs(rep.mean_p) < 1e-12

    def test_displaced_center(self, grid):
        assert observable_mean(gaussian_pointer(grid, 3.0, 0.5), POSITION) == pytest.approx(
            3.0, abs=1e-9)

    def test_too_wide_for_grid(self, grid):
        with pytest.raises(GridContainment):
            gaussian_pointer(grid, 0.0, 4.0)

    def test_off_center_support(self, grid):
        with pytest.raises(GridContainment):
            gaussian_pointer(grid, 16.0, 1.0)

    def test_hbar_enters_momentum_spread(self):
        g = PointerGrid.centered(1.0, hbar=0.5)
        rep = moments(gaussian_pointer(g, 0.0, 1.0))
        assert rep.var_p == pytest.approx(0.5 ** 2 / 4, rel=1e-6)


class TestStateInvariants:
    def test_rejects_unnormalized(self, grid, gauss):
        with pytest.raises(ValueError):
            PointerState(grid, 2 * gauss.amplitudes)

    def test_rejects_edge_leakage(self, grid):
        with pytest.raises(GridContainment):
            PointerState.from_amplitudes(grid, np.ones(grid.n_points))

    def test_csv_round_trip(self, grid):
        phi = gaussian_pointer(grid, 0.5, 1.0, chirp=0.1)
        text = phi.to_csv()
        assert text.startswith("# n_points = 1024")
        assert "q,re_phi,im_phi,abs2_phi" in text
        back = PointerState.from_csv(text)
        assert back.grid == grid
        assert np.array_equal(back.amplitudes, phi.amplitudes)


class TestTranslate:
    def test_zero_is_identity(self, gauss):
        assert np.max(np.abs(translate(gauss, 0.0).amplitudes - gauss.amplitudes)) < 1e-15

    def test_whole_shift_moves_gaussian(self, grid, gauss):
        out = translate(gauss, 1.5)
        ref = gaussian_pointer(grid, 1.5, 1.0)
        assert np.max(np.abs(out.amplitudes - ref.amplitudes)) < 1e-12

    def test_fractional_shift_matches_samples(self, grid, gauss):
        g = 0.3 * grid.dq
        out = translate(gauss, g)
        ref = (2 * np.pi) ** -0.25 * np.exp(-(grid.q - g) ** 2 / 4)
        assert np.max(np.abs(out.amplitudes - ref)) < 1e-9

    def test_shift_off_grid_raises(self, gauss):
        with pytest.raises(GridContainment):
            translate(gauss, 17.0)

    @pytest.mark.parametrize("center, gamma", [(0.0, 30.0), (10.0, 15.0), (-10.0, -15.0)])
    def test_clean_wrap_is_detected(self, grid, center, gamma):
        # the packet lands whole on the far side, so only the centroid reveals the wrap
        with pytest.raises(GridContainment, match="wrapped"):
            translate(gaussian_pointer(grid, center, 1.0), gamma)

    @given(st.floats(-5, 5), st.floats(-5, 5))
    @settings(max_examples=40, deadline=None)
    def test_group_property(self, a, b):
        phi = gaussian_pointer(PointerGrid.centered(1.0), 0.0, 1.0)
        lhs = translate(translate(phi, a), b).amplitudes
        rhs = translate(phi, a + b).amplitudes
        assert np.max(np.abs(lhs - rhs)) < 1e-10

    @given(st.floats(-5, 5), st.sampled_from(range(4)))
    @settings(max_examples=40, deadline=None)
    def test_unitary_and_momentum_preserving(self, gamma, which):
        phi = pointers(PointerGrid.centered(1.0))[which]
        out = translate(phi, gamma)
        assert abs(np.sum(np.abs(out.amplitudes) ** 2) * phi.grid.dq - 1) < 1e-12
        assert abs(observable_mean(out, MOMENTUM) - observable_mean(phi, MOMENTUM)) < 1e-12


class TestObservables:
    def test_parse(self):
        assert PointerObservable.parse("q") == POSITION
        assert PointerObservable.parse("p") == MOMENTUM
        assert PointerObservable.parse("q**2") == Q2
        assert PointerObservable.parse("qp").kind == "polynomial"
        assert PointerObservable.parse({"terms": [[2, 0, 2]]}).label == "2*p^2"
        with pytest.raises(ValueError):
            PointerObservable.parse("x")

    def test_kinds(self):
        assert Q2.kind == "position"
        assert PointerObservable.parse("p^2").kind == "momentum"

    @pytest.mark.parametrize("m, expected", [(POSITION, 0.0), (MOMENTUM, 0.0), (Q2, 1.0)])
    def test_gaussian_means(self, gauss, m, expected):
        assert observable_mean(gauss, m) == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("spec", ["qp", {"terms": [[1, 2, 1]]}, {"terms": [[0.5, 1, 2], [1, 0, 1]]}])
    def test_mixed_terms_are_hermitian(self, grid, spec):
        m = PointerObservable.parse(spec)
        a, b = pointers(grid)[1], pointers(grid)[3]
        lhs = np.vdot(a.amplitudes, m.apply(grid, b.amplitudes))
        rhs = np.conj(np.vdot(b.amplitudes, m.apply(grid, a.amplitudes)))
        assert abs(lhs - rhs) * grid.dq < 1e-10

    def test_commutator_with_p(self, grid):
        # [q, p] = i hbar on any normalized state
        for phi in pointers(grid):
            assert commutator_mean(phi, POSITION) == pytest.approx(1j, abs=1e-10)
            assert abs(commutator_mean(phi, MOMENTUM)) < 1e-12

    def test_pair_statistic_sign_switch(self, grid):
        phi = pointers(grid)[3]
        # the same evaluator gives <[M,p]> and <{M,p}> depending on the sign
        assert pair_statistic(grid, phi.amplitudes, Q2, -1, 1) == pytest.approx(
            commutator_mean(phi, Q2), abs=1e-14)
        assert pair_statistic(grid, phi.amplitudes, Q2, +1, 1).real == pytest.approx(
            anticommutator_mean(phi, Q2), abs=1e-14)


class TestCovariances:
    def test_ccv_pp_is_variance(self, gauss):
        rep = moments(gauss, MOMENTUM)
        assert rep.ccv_mp == pytest.approx(rep.var_p, abs=1e-12)

    def test_stationary_gaussian_ccv(self, gauss):
        assert ccv(gauss, POSITION) == pytest.approx(0.5j, abs=1e-12)
        assert abs(cov(gauss, POSITION)) < 1e-12

    @pytest.mark.parametrize("c, sigma", [(0.1, 1.0), (-0.3, 0.8), (0.05, 2.0)])
    def test_chirped_gaussian_cov(self, grid, c, sigma):
        phi = gaussian_pointer(grid, 0.0, sigma, chirp=c)
        assert cov(phi, POSITION) == pytest.approx(2 * c * sigma ** 2, rel=1e-8)

    def test_mass_gives_spreading_rate(self, grid):
        # cov(q, p) = 2 c sigma^2 = 0.2, so m d/dt(var q) = 0.4 with m = 2
        rep = moments(gaussian_pointer(grid, 0.0, 1.0, chirp=0.1), mass=2.0)
        assert rep.dvar_q_dt() == pytest.approx(0.2, rel=1e-8)
        with pytest.raises(ValueError):
            moments(gaussian_pointer(grid)).dvar_q_dt()

    @given(st.sampled_from(range(4)), st.sampled_from(["q", "p", "q^2", "qp", "p^2"]))
    @settings(max_examples=40, deadline=None)
    def test_identities(self, which, spec):
        grid = PointerGrid.centered(1.0)
        phi = pointers(grid)[which]
        m = PointerObservable.parse(spec)
        rep = moments(phi, m)
        assert abs(2 * rep.cov_mp - (rep.ccv_mp + rep.ccv_pm)) < 1e-10
        assert abs((rep.ccv_mp + rep.ccv_pm).imag) < 1e-10
        assert abs(2 * ccv(phi, POSITION) - (1j + 2 * cov(phi, POSITION))) < 1e-10
        assert rep.var_q >= 0 and rep.var_p >= 0
        assert rep.var_q * rep.var_p >= 0.25 - 1e-9
        assert variance(phi, m) >= -1e-12
