import json
import math

import numpy as np
import pytest

from meanvalue.analysis import (
    DECAY_LEVEL,
    BlowupPrediction,
    SandwichBounds,
    Verdict,
    energy_monitor,
    evaluate_blowup_criterion,
    evaluate_decay_criteria,
    evaluate_wang_criteria,
    judge,
    predict_blowup,
    verify_trajectory,
    xi_integrand,
)
from meanvalue.errors import DegenerateFieldError, NotReachedError, PositivityError
from meanvalue.foundation import (
    Domain1D,
    GridField,
    InitialData,
    Potential,
    ProblemSpec,
    l2_norm,
    sample_initial_data,
    unit_grid,
)
from meanvalue.mvt import path_over_trajectory
from meanvalue.solvers import SolveConfig, solve

PI2 = math.pi**2


def sem_spec(f, u0=None, nu=1.0):
    return ProblemSpec(Domain1D(0.0, 1.0), nu, f, u0 or InitialData.preset("amp_sin", 1.0), "dirichlet")


def sin_data(A, n=2000):
    return sample_initial_data(InitialData.preset("amp_sin", A), unit_grid(n))


def ramp_data(A, n=2000):
    return sample_initial_data(InitialData.preset("amp_ramp", A), unit_grid(n), "mixed")


class TestJudge:
    @pytest.mark.parametrize("lhs, rhs, sense, verdict", [
        (1.0, 0.0, ">", Verdict.HOLDS),
        (-1.0, 0.0, ">", Verdict.FAILS),
        (1.0, 1.0 + 1e-12, "<", Verdict.BOUNDARY),
        (1.0, 1.0 + 1e-12, "<=", Verdict.HOLDS),
        (2.0, 1.0, "<=", Verdict.FAILS),
        (math.nan, 1.0, "<", Verdict.INCONCLUSIVE),
    ])
    def test_verdicts(self, lhs, rhs, sense, verdict):
        assert judge("x", lhs, rhs, sense, {}).verdict is verdict

    def test_margin_sign(self):
        assert judge("x", 1.0, 3.0, "<", {}).margin == 2.0
        assert judge("x", 1.0, 3.0, ">", {}).margin == -2.0


class TestDecayCriteria:
    def test_positive_potential(self):
        r = evaluate_decay_criteria(sem_spec(Potential.polynomial([1.0, 0.0, 1.0])), (-10, 10), PI2)
        assert r["positivity"].verdict is Verdict.HOLDS
        assert r["positivity"].margin == pytest.approx(1.0, abs=1e-9)
        assert r.holds()

    def test_chafee_infante_boundary(self):
        r = evaluate_decay_criteria(sem_spec(Potential.chafee_infante(PI2)), (-10, 10), PI2)
        assert r["inf_bound"].verdict is Verdict.BOUNDARY
        assert r["inf_bound"].inputs["inf"] == pytest.approx(-PI2, rel=1e-12)

    def test_f2_avg_fails_with_unit_lambda(self):
        r = evaluate_decay_criteria(sem_spec(Potential.piecewise_f2()), (0.0, 15.0), 1.0)
        assert r["avg_bound"].verdict is Verdict.FAILS
        assert r["avg_bound"].inputs["min_avg"] < -1.0

    def test_necessary(self):
        r = evaluate_decay_criteria(sem_spec(Potential.chafee_infante(1.0)), (0, 2), PI2)
        assert r["necessary"].inputs["m0"] == pytest.approx(-0.25, abs=1e-5)
        assert r["necessary"].verdict is Verdict.HOLDS

    def test_empty_interval(self):
        with pytest.raises(ValueError):
            evaluate_decay_criteria(sem_spec(Potential.constant(1.0)), (2, 2), PI2)

    def test_domain_errors_propagate(self):
        with pytest.raises(ValueError):
            evaluate_decay_criteria(sem_spec(Potential.singular_f3(0.5)), (0, 2), PI2)

    def test_json_and_text(self):
        r = evaluate_decay_criteria(sem_spec(Potential.constant(2.0)), (0, 1), PI2)
        doc = json.loads(r.to_json())
        assert [c["id"] for c in doc["criteria"]] == ["positivity", "inf_bound", "avg_bound", "necessary"]
        assert set(doc["criteria"][0]) >= {"id", "verdict", "margin", "inputs"}
        assert "Holds" in r.to_text()


class TestBlowupCriterion:
    bounds = SandwichBounds(0.0, 2.0, 4.0)

    def test_holds_for_large_data(self):
        r = evaluate_blowup_criterion(sin_data(2.5), 1.0, self.bounds, Potential.polynomial([0, 0, 0, 0, -2.0]), (0, 3))
        assert r["sandwich"].verdict is Verdict.HOLDS
        e = r["blowup_criterion"]
        assert e.verdict is Verdict.HOLDS
        assert e.inputs["lhs"] == pytest.approx(PI2 * 2.5**2 / 2, rel=1e-5)
        assert e.inputs["rhs"] == pytest.approx(2.5**6 * 5 / 16, rel=1e-5)

    def test_fails_for_small_data(self):
        r = evaluate_blowup_criterion(sin_data(1.0), 1.0, self.bounds, Potential.polynomial([0, 0, 0, 0, -2.0]), (0, 3))
        assert r["blowup_criterion"].verdict is Verdict.FAILS
        assert r["blowup_criterion"].inputs["rhs"] == pytest.approx(0.3125, rel=1e-5)

    def test_sandwich_violation(self):
        r = evaluate_blowup_criterion(sin_data(1.0), 1.0, self.bounds, Potential.polynomial([0, 0, 0, 0, -5.0]), (0, 3))
        assert r["sandwich"].verdict is Verdict.FAILS

    def test_negative_data(self):
        g = unit_grid(32)
        with pytest.raises(PositivityError):
            evaluate_blowup_criterion(GridField(g, np.sin(2 * np.pi * g.nodes)), 1.0, self.bounds,
                                      Potential.constant(0.0), (0, 1))

    @pytest.mark.parametrize("c1, c2, r", [(-1, 1, 3), (0, 0, 3), (0, 1, 2)])
    def test_bounds_validation(self, c1, c2, r):
        with pytest.raises(ValueError):
            SandwichBounds(c1, c2, r)

    def test_margin_flips_at_crossing(self):
        A_star = (8 * PI2 / 5) ** 0.25
        f = self.bounds.lower_envelope()
        below = evaluate_blowup_criterion(sin_data(A_star * 0.99), 1.0, self.bounds, f, (0, 3))
        above = evaluate_blowup_criterion(sin_data(A_star * 1.01), 1.0, self.bounds, f, (0, 3))
        assert below["blowup_criterion"].margin < 0 < above["blowup_criterion"].margin


class TestWang:
    def test_ramp_blowup(self):
        r = evaluate_wang_criteria(ramp_data(5.0), 2.0, 2.0)
        e = r["wang_blowup"]
        assert e.verdict is Verdict.HOLDS
        assert e.inputs["weighted_grad_sq"] == pytest.approx(25 / 3, rel=1e-4)
        assert e.inputs["lp1_pow"] / 3 == pytest.approx(125 / 12, rel=1e-4)

    def test_unit_ramp_fails(self):
        assert evaluate_wang_criteria(ramp_data(1.0), 2.0, 2.0)["wang_blowup"].verdict is Verdict.FAILS

    def test_d_zero_threshold(self):
        e = evaluate_wang_criteria(sample_initial_data(InitialData.preset("x_sin_pi_x"), unit_grid(400), "mixed"), 0.0, 2.0)["e_set"]
        assert e.inputs["rhs"] == DECAY_LEVEL

    def test_degenerate_data(self):
        with pytest.raises(DegenerateFieldError):
            evaluate_wang_criteria(GridField(unit_grid(16), np.zeros(17)), 1.0, 2.0)

    def test_refinement_invariance(self):
        u0 = InitialData.preset("x_sin_pi_x")
        a = evaluate_wang_criteria(sample_initial_data(u0, unit_grid(200), "mixed"), 1.0, 2.0)["e_set"].inputs["lhs"]
        b = evaluate_wang_criteria(sample_initial_data(u0, unit_grid(400), "mixed"), 1.0, 2.0)["e_set"].inputs["lhs"]
        assert abs(a - b) <= 50 * (1 / 200) ** 2


class TestVerify:
    def test_zero_potential_envelope_is_flat(self, heat_traj):
        path = path_over_trajectory(heat_traj, "xi")
        r = verify_trajectory(heat_traj, path, PI2)
        np.testing.assert_allclose(r.envelope_general, r.l2[0])
        assert r.envelope_general[0] == r.l2[0]
        assert r.holds("general")

    def test_constant_potential_sharp_equality(self):
        c = 2.0
        traj = solve(sem_spec(Potential.constant(c)), SolveConfig(t_end=0.1, n=1000, dt_max=1e-3))
        r = verify_trajectory(traj, path_over_trajectory(traj, "xi"), PI2)
        np.testing.assert_allclose(r.envelope_general, np.exp(-c * r.times) * r.l2[0], rtol=1e-12)
        np.testing.assert_allclose(r.l2, r.envelope_sharp, rtol=1e-5)
        assert r.holds()

    def test_misaligned(self, heat_traj, chafee_traj):
        with pytest.raises(ValueError):
            verify_trajectory(heat_traj, path_over_trajectory(chafee_traj, "xi"), PI2)

    def test_degenerate_envelope(self, degenerate_traj):
        path = path_over_trajectory(degenerate_traj, "xi")
        xi = path_over_trajectory(degenerate_traj, ("xi_weighted", 2.0))
        chi = path_over_trajectory(degenerate_traj, ("chi", 2.0))
        r = verify_trajectory(degenerate_traj, path, None, xi, chi)
        assert r.envelope_sharp is None
        assert r.envelope_deg[0] == r.l2[0]
        assert r.holds()

    def test_report_json(self, chafee_traj):
        r = verify_trajectory(chafee_traj, path_over_trajectory(chafee_traj, "xi"), PI2)
        doc = json.loads(r.to_json())
        assert set(doc["worst_violation"]) == {"general", "sharp"}
        assert "energy identity" in r.to_text()


class TestEnergy:
    def test_lower_envelope_run(self):
        b = SandwichBounds(0.0, 2.0, 4.0)
        traj = solve(sem_spec(b.lower_envelope(), InitialData.preset("amp_sin", 2.5)), SolveConfig(t_end=0.05, n=200))
        rep = energy_monitor(traj, bounds=b)
        assert rep.asserted["script_E"]
        assert rep.script_E[0] == pytest.approx(PI2 * 2.5**2 / 2 - 2.5**6 * 5 / 16, rel=1e-3)
        assert rep.monotone

    def test_not_asserted_for_other_potentials(self, semilinear_blowup_traj):
        rep = energy_monitor(semilinear_blowup_traj, bounds=SandwichBounds(0.0, 2.0, 4.0))
        assert not rep.asserted["script_E"]
        assert rep.monotone

    def test_degenerate(self, degenerate_traj):
        rep = energy_monitor(degenerate_traj, degenerate=(2.0, 2.0))
        assert rep.E_deg[0] == pytest.approx(-25 / 12, rel=0.02)
        assert rep.asserted["E_deg"] and rep.monotone

    def test_zero_trajectory(self):
        spec = sem_spec(Potential.constant(0.0), InitialData.sampled([(0, 0), (1, 0)]))
        traj = solve(spec, SolveConfig(t_end=0.02, n=16))
        rep = energy_monitor(traj, bounds=SandwichBounds(0.0, 1.0, 3.0), degenerate=(1.0, 2.0))
        assert np.all(rep.script_E == 0) and np.all(rep.E_deg == 0)
        assert rep.violations == {"script_E": 0, "E_deg": 0}

    def test_needs_parameters(self, heat_traj):
        with pytest.raises(ValueError):
            energy_monitor(heat_traj)


class TestPredict:
    def test_degenerate_formulas_coincide_at_unit_norm(self):
        preds = {p.method: p.t_prime for p in predict_blowup(1.0, degenerate=(1.0, 3.0))}
        assert preds["PaperDegenerate"] == pytest.approx(4 / 6)
        assert preds["ComparisonODE"] == pytest.approx(4 / 6)

    def test_ramp_values(self):
        preds = {p.method: p.t_prime for p in predict_blowup(math.sqrt(25 / 3), degenerate=(2.0, 2.0))}
        assert preds["PaperDegenerate"] == pytest.approx(0.4414, abs=1e-4)
        assert preds["ComparisonODE"] == pytest.approx(0.5196, abs=1e-4)

    def test_generic_constant_integrand(self):
        b = SandwichBounds(0.0, 2.0, 4.0)
        K, u0 = 3.0, 0.5
        t = np.linspace(0, 10, 10001)
        (pred,) = predict_blowup(u0, bounds=b, xi_integrand_data=(t, np.full_like(t, K)))
        expected = 2.0 / (b.c2 * (b.r - 2) * K * u0 ** (b.r - 2))
        assert isinstance(pred, BlowupPrediction)
        assert pred.method == "PaperGeneric"
        assert pred.t_prime == pytest.approx(expected, rel=1e-10)
        assert pred.inputs["accumulated_integral"] == pytest.approx(pred.inputs["threshold"])

    def test_not_reached(self):
        t = np.linspace(0, 1, 11)
        with pytest.raises(NotReachedError):
            predict_blowup(0.1, bounds=SandwichBounds(0.0, 1.0, 4.0), xi_integrand_data=(t, np.full_like(t, 1e-3)))

    def test_integrand_from_run(self, semilinear_blowup_traj):
        t, y = xi_integrand(semilinear_blowup_traj, path_over_trajectory(semilinear_blowup_traj, "xi"))
        assert t.shape == y.shape and np.all(y >= 0)

    def test_zero_norm(self):
        with pytest.raises(DegenerateFieldError):
            predict_blowup(0.0, degenerate=(1.0, 2.0))
