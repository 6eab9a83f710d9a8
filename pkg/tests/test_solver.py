import numpy as np
import pytest

from strz.errors import CalibrationError, NonContractionError, PreconditionError
from strz.exponents import Exponent
from strz.groundstate import default_weight, ground_pair, standing_wave_potential
from strz.potentials import StaticPotential, ZeroPotential, real_profile
from strz.solver import (
    calibrate_tau,
    duhamel_iterate,
    endpoint_q,
    frozen_duhamel,
    solve_global,
    split_step_evolve,
    z_norm,
)
from strz.spectral import (
    ComplexField,
    free_propagate,
    gaussian_field,
    lq_norm,
    make_grid,
)


@pytest.fixture(scope="module")
def standing1d():
    grid = make_grid(1, 12.0, 64)
    gp = ground_pair(default_weight(grid, sigma=1.0))
    W, u0 = standing_wave_potential(gp)
    return grid, W, u0


@pytest.fixture(scope="module")
def standing2d():
    grid = make_grid(2, 10.0, 32)
    gp = ground_pair(default_weight(grid, sigma=1.0))
    W, u0 = standing_wave_potential(gp)
    return grid, W, u0


def linf_l2_gap(traj_a, traj_b, scale):
    vol = traj_a.grid.cell_volume
    diffs = [
        np.sqrt(np.sum(np.abs(a.values - b.values) ** 2) * vol)
        for a, b in zip(traj_a.states, traj_b.states)
    ]
    return max(diffs) / scale


class TestSplitStep:
    def test_zero_potential_matches_free(self):
        grid = make_grid(1, 16.0, 128)
        u0 = gaussian_field(grid, sigma=1.0)
        rep = split_step_evolve(u0, ZeroPotential(), interval=(0.0, 1.0), dt=1e-2)
        for t, s in zip(rep.trajectory.times, rep.trajectory.states):
            exact = free_propagate(u0, float(t))
            assert np.abs(s.values - exact.values).max() < 1e-10

    def test_standing_wave_phase(self, standing1d):
        grid, W, u0 = standing1d
        err = {"max": 0.0}

        def probe(t, vals):
            exact = np.exp(-1j * t) * u0.values
            d = np.sqrt(np.sum(np.abs(vals - exact) ** 2) * grid.cell_volume)
            err["max"] = max(err["max"], d / lq_norm(u0, 2))

        rep = split_step_evolve(u0, StaticPotential(W), interval=(0.0, 2.0), dt=1e-3,
                                step_probe=probe)
        assert err["max"] < 1e-4
        assert rep.energy_drift < 1e-10

    def test_second_order_self_convergence(self, standing1d):
        grid, W, u0 = standing1d

        def phase_err(dt):
            e = {"max": 0.0}

            def probe(t, vals):
                exact = np.exp(-1j * t) * u0.values
                d = np.sqrt(np.sum(np.abs(vals - exact) ** 2) * grid.cell_volume)
                e["max"] = max(e["max"], d / lq_norm(u0, 2))

            split_step_evolve(u0, StaticPotential(W), interval=(0.0, 1.0), dt=dt,
                              step_probe=probe)
            return e["max"]

        e_coarse, e_fine = phase_err(4e-3), phase_err(2e-3)
        assert e_coarse / e_fine == pytest.approx(4.0, rel=0.15)

    def test_energy_conserved_random_potential(self):
        grid = make_grid(1, 10.0, 64)
        rng = np.random.default_rng(1)
        vals = rng.standard_normal(grid.shape)
        V = StaticPotential(real_profile(grid, vals))
        u0 = gaussian_field(grid, sigma=1.0)
        rep = split_step_evolve(u0, V, interval=(0.0, 1.0), dt=1e-3)
        assert rep.energy_drift < 1e-10

    def test_source_term_accuracy(self, standing1d):
        # manufactured solution: u = exp(-it) u0 solves the equation with
        # W shifted by a constant c when F = c exp(-it) u0
        grid, W, u0 = standing1d
        c = 0.3
        Wc = real_profile(grid, W.values.real + c)

        def F(t):
            return ComplexField(grid, c * np.exp(-1j * t) * u0.values)

        err = {"max": 0.0}

        def probe(t, vals):
            exact = np.exp(-1j * t) * u0.values
            d = np.sqrt(np.sum(np.abs(vals - exact) ** 2) * grid.cell_volume)
            err["max"] = max(err["max"], d / lq_norm(u0, 2))

        split_step_evolve(u0, StaticPotential(Wc), F=F, interval=(0.0, 1.0), dt=1e-3,
                          step_probe=probe)
        assert err["max"] < 1e-4

    def test_ratio_tracking_inf2_is_one(self, standing2d):
        grid, W, u0 = standing2d
        rep = split_step_evolve(u0, StaticPotential(W), interval=(0.0, 1.0), dt=1e-3,
                                pairs=[("inf", 2)])
        key = (Exponent("inf"), Exponent(2))
        assert rep.strichartz_ratios[key] == pytest.approx(1.0, abs=1e-10)

    def test_inadmissible_pair_rejected(self, standing1d):
        grid, W, u0 = standing1d
        with pytest.raises(Exception):
            split_step_evolve(u0, StaticPotential(W), interval=(0.0, 0.1), dt=1e-2,
                              pairs=[(4, 4)])  # no admissible pairs for n = 1

    def test_singularity_propagates_from_potential(self, standing1d):
        from strz.errors import SingularityError
        from strz.potentials import PseudoconformalPotential

        grid, W, u0 = standing1d
        V = PseudoconformalPotential(W)
        with pytest.raises(SingularityError):
            # first midpoint sits at negative time
            split_step_evolve(u0, V, interval=(-0.5, 0.5), dt=1e-2)


class TestZNorm:
    def test_endpoint_exponents(self):
        assert endpoint_q(3) == Exponent(6)
        assert endpoint_q(4) == Exponent(4)
        assert endpoint_q(2) == Exponent(8)
        assert endpoint_q(2, q_fallback=12) == Exponent(12)

    def test_zero_only_for_zero(self, standing1d):
        grid, _, u0 = standing1d
        rep = split_step_evolve(u0, ZeroPotential(), interval=(0.0, 0.5), dt=1e-2,
                                store_every=1)
        zn = z_norm(rep.trajectory)
        assert zn.value > 0
        assert zn.l_inf_l2 <= zn.value


class TestDuhamel:
    def test_zero_potential_one_iteration(self, standing1d):
        grid, _, u0 = standing1d
        res = duhamel_iterate(u0, None, ZeroPotential(), (0.0, 0.5), dt=0.01)
        assert res.iterations == 1
        assert res.first_increment == 0.0
        for t, s in zip(res.trajectory.times, res.trajectory.states):
            exact = free_propagate(u0, float(t))
            assert np.abs(s.values - exact.values).max() < 1e-10

    def test_zero_potential_with_source(self, standing1d):
        # Phi does not depend on v when V = 0: fixed point after one
        # corrective application
        grid, _, u0 = standing1d
        F = ComplexField(grid, 0.5 * u0.values)
        res = duhamel_iterate(u0, F, ZeroPotential(), (0.0, 0.5), dt=0.01)
        assert res.iterations == 2
        assert res.residual < 1e-12

    def test_contraction_and_residual(self, standing1d):
        grid, W, u0 = standing1d
        res = duhamel_iterate(u0, None, StaticPotential(W), (0.0, 0.25), dt=0.005,
                              tol=1e-8)
        assert all(f < 1.0 for f in res.factors)
        assert res.residual < 1e-8

    def test_factors_scale_with_amplitude(self, standing1d):
        grid, W, u0 = standing1d
        facs = []
        amps = np.linspace(0.2, 2.0, 10)
        for c in amps:
            V = StaticPotential(real_profile(grid, c * W.values.real))
            r = duhamel_iterate(u0, None, V, (0.0, 0.25), dt=0.01)
            facs.append(max(r.factors) if r.factors else 0.0)
        # monotone in amplitude and roughly linear
        assert all(a < b for a, b in zip(facs, facs[1:]))
        ratio = facs[-1] / facs[4]
        assert ratio == pytest.approx(amps[-1] / amps[4], rel=0.2)

    def test_agrees_with_split_step(self, standing1d):
        grid, W, u0 = standing1d
        res = duhamel_iterate(u0, None, StaticPotential(W), (0.0, 0.25), dt=0.005)
        rep = split_step_evolve(u0, StaticPotential(W), interval=(0.0, 0.25), dt=0.005,
                                store_every=1)
        assert linf_l2_gap(res.trajectory, rep.trajectory, lq_norm(u0, 2)) < 1e-3

    def test_non_contraction_error(self, standing1d):
        grid, W, u0 = standing1d
        V = StaticPotential(real_profile(grid, 40.0 * W.values.real))
        with pytest.raises(NonContractionError):
            duhamel_iterate(u0, None, V, (0.0, 1.0), dt=0.01, maxit=8)


class TestFrozenDuhamel:
    def test_static_one_iteration(self, standing1d):
        grid, W, u0 = standing1d
        res = frozen_duhamel(u0, None, StaticPotential(W), (0.0, 0.5), dt=0.01)
        assert res.iterations == 1
        assert res.first_increment == 0.0

    def test_slow_variation_contracts_faster_on_short_pieces(self, standing1d):
        # slowly varying potential emulated by four windows whose rescale
        # factors drift with time: the frozen perturbation W(t) = V(t) - V(0)
        # shrinks with the piece length, and so do the contraction factors
        grid, W, u0 = standing1d
        from strz.exponents import ScheduleKind, ScheduleParams
        from strz.potentials import PatchedRescaledPotential, Schedule, Window
        from fractions import Fraction as F

        params = ScheduleParams(alpha=F(3, 2), beta=F(2), kind=ScheduleKind.LOCAL)

        def ramp_potential(piece_len):
            windows = tuple(
                Window(k=i + 1, start=i * piece_len / 4, length=piece_len / 4,
                       eps=1.0 + 0.02 * i)
                for i in range(4)
            )
            sched = Schedule(kind=ScheduleKind.LOCAL, params=params, n=1,
                             windows=windows, total_time=piece_len)
            return PatchedRescaledPotential(W, sched)

        factors = []
        for piece_len in (2.0, 1.0, 0.5):
            V = ramp_potential(piece_len)
            res = frozen_duhamel(u0, None, V, (0.0, piece_len), dt=piece_len / 200,
                                 maxit=60)
            factors.append(max(res.factors) if res.factors else 0.0)
        # shorter pieces -> smaller frozen perturbation -> smaller factors
        assert factors[2] < factors[1] < factors[0]

    def test_agrees_with_split_step(self, standing1d):
        grid, W, u0 = standing1d
        scaled = StaticPotential(real_profile(grid, 0.5 * W.values.real))
        res = frozen_duhamel(u0, None, scaled, (0.0, 0.5), dt=0.005)
        rep = split_step_evolve(u0, scaled, interval=(0.0, 0.5), dt=0.005,
                                store_every=1)
        assert linf_l2_gap(res.trajectory, rep.trajectory, lq_norm(u0, 2)) < 1e-3


class TestSolveGlobal:
    def test_zero_potential_single_piece(self, standing1d):
        grid, _, u0 = standing1d
        rep = solve_global(u0, None, ZeroPotential(), (0.0, 1.0), 2, 2, tau=1.0,
                           dt=0.01, pairs=[])
        assert rep.pieces == 1
        assert rep.energy_drift < 1e-12
        for t, s in zip(rep.trajectory.times, rep.trajectory.states):
            exact = free_propagate(u0, float(t))
            assert np.abs(s.values - exact.values).max() < 1e-10

    def test_chained_equals_single_when_tau_large(self, standing1d):
        grid, W, u0 = standing1d
        rep = solve_global(u0, None, StaticPotential(W), (0.0, 0.5), 2, 2, tau=100.0,
                           dt=0.01, pairs=[], store_every=1)
        single = duhamel_iterate(u0, None, StaticPotential(W), (0.0, 0.5), dt=0.01)
        assert rep.pieces == 1
        gap = linf_l2_gap(rep.trajectory, single.trajectory, lq_norm(u0, 2))
        assert gap < 1e-12

    def test_chained_matches_split_step(self, standing1d):
        grid, W, u0 = standing1d
        tau = 1.5
        rep = solve_global(u0, None, StaticPotential(W), (0.0, 2.0), 2, 2, tau=tau,
                           dt=0.005, pairs=[], store_every=1)
        assert rep.pieces >= 2
        ss = split_step_evolve(u0, StaticPotential(W), interval=(0.0, 2.0), dt=0.005,
                               store_every=1)
        assert linf_l2_gap(rep.trajectory, ss.trajectory, lq_norm(u0, 2)) < 1e-3
        assert rep.energy_drift < 1e-6

    def test_report_contents(self, standing2d):
        grid, W, u0 = standing2d
        rep = solve_global(u0, None, StaticPotential(W), (0.0, 1.0), 2, 2, tau=1.5,
                           dt=0.01, pairs=[("inf", 2)])
        assert rep.tau == 1.5
        assert rep.c_hat == pytest.approx(1.0 / 3.0)
        k = rep.pieces
        assert rep.constant_bound == pytest.approx(k * (1 + 2 * rep.c_hat) ** k)
        key = (Exponent("inf"), Exponent(2))
        assert rep.strichartz_ratios[key] == pytest.approx(1.0, abs=1e-6)
        assert rep.strichartz_ratios[key] <= rep.constant_bound
        d = rep.to_json_dict()
        assert d["pieces"] == k
        assert "partition" in d

    def test_modulus_of_continuity_stable_under_refinement(self, standing1d):
        # discrete C_t L^2 bound: max step increment scales like dt, with a
        # stable constant across refinements
        grid, W, u0 = standing1d
        consts = []
        for dt in (0.02, 0.01, 0.005):
            rep = split_step_evolve(u0, StaticPotential(W), interval=(0.0, 1.0),
                                    dt=dt, store_every=1)
            states = rep.trajectory.states
            inc = max(
                np.sqrt(np.sum(np.abs(a.values - b.values) ** 2) * grid.cell_volume)
                for a, b in zip(states, states[1:])
            )
            consts.append(inc / dt)
        assert max(consts) / min(consts) < 1.5


class TestCalibrateTau:
    def test_zero_reference_returns_cap(self, standing1d):
        grid, _, _ = standing1d
        tau = calibrate_tau([ZeroPotential()], grid, dt=0.02, cap=8.0)
        assert tau == 8.0

    def test_deterministic(self, standing1d):
        grid, W, _ = standing1d
        refs = [StaticPotential(W)]
        a = calibrate_tau(refs, grid, dt=0.02, rounds=8)
        b = calibrate_tau(refs, grid, dt=0.02, rounds=8)
        assert a == b
        assert 0 < a < 8.0

    def test_calibrated_tau_contracts(self, standing1d):
        grid, W, u0 = standing1d
        tau = calibrate_tau([StaticPotential(W)], grid, dt=0.01, rounds=8)
        rep = solve_global(u0, None, StaticPotential(W), (0.0, 1.0), 2, 2, tau=tau,
                           dt=0.01, pairs=[])
        for fs in rep.contraction_factors:
            if fs:
                assert max(fs) <= 0.6

    def test_empty_reference_error(self, standing1d):
        grid, _, _ = standing1d
        with pytest.raises(PreconditionError):
            calibrate_tau([], grid, dt=0.02)

    def test_impossible_reference_error(self, standing1d):
        grid, W, _ = standing1d
        V = StaticPotential(real_profile(grid, 500.0 * W.values.real))
        with pytest.raises(CalibrationError):
            calibrate_tau([V], grid, dt=0.05, cap=0.5, rounds=4, maxit=6)
