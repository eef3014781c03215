import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from meanvalue.errors import BracketError, CoverageError, DomainError
from meanvalue.foundation import (
    Domain1D,
    ExtrapolationWarning,
    GridField,
    GridSpec,
    InitialData,
    Potential,
    ProblemSpec,
    SpectralInfo,
    bisect_root,
    field_norms,
    h1_seminorm,
    integrate_nodal,
    l2_norm,
    lp_norm,
    potential_avg,
    potential_eval,
    potential_inf,
    read_two_column_csv,
    sample_initial_data,
    unit_grid,
    weighted_square,
)


def sin_field(n, A=1.0):
    g = unit_grid(n)
    return GridField(g, A * np.sin(np.pi * g.nodes))


class TestGrid:
    def test_nodes_and_spacing(self):
        g = GridSpec(Domain1D(-1.0, 2.0), 30)
        assert g.nodes.size == 31
        assert g.nodes[0] == -1.0 and g.nodes[-1] == 2.0
        np.testing.assert_allclose(np.diff(g.nodes), 0.1, rtol=1e-12)

    @pytest.mark.parametrize("n", [0, 4, 7])
    def test_too_few_cells(self, n):
        with pytest.raises(ValueError):
            GridSpec(Domain1D(), n)

    def test_bad_domain(self):
        with pytest.raises(ValueError):
            Domain1D(1.0, 1.0)

    def test_weights_sum_to_measure(self):
        g = GridSpec(Domain1D(0.0, 3.0), 17)
        assert g.weights.sum() == pytest.approx(3.0, rel=1e-14)

    def test_field_length_checked(self):
        with pytest.raises(ValueError):
            GridField(unit_grid(8), np.zeros(5))


class TestPotential:
    @pytest.mark.parametrize("f, s, expected", [
        (Potential.piecewise_f2(), 3.0, -2.0),
        (Potential.piecewise_f2(), 1.0, 0.0),
        (Potential.chafee_infante(1.0), 0.0, -1.0),
        (Potential.singular_f3(0.5), 0.75, -2.0),
        (Potential.polynomial([1.0, 0.0, 2.0]), 3.0, 19.0),
        (Potential.constant(4.5), -7.0, 4.5),
    ])
    def test_eval_examples(self, f, s, expected):
        assert potential_eval(f, s) == pytest.approx(expected, rel=1e-14)

    def test_f2_continuous_at_branch(self):
        f = Potential.piecewise_f2()
        assert potential_eval(f, 3.0 - 1e-12) == pytest.approx(potential_eval(f, 3.0), abs=1e-10)

    @pytest.mark.parametrize("s", [1.0, 1.5, -0.1])
    def test_singular_domain(self, s):
        with pytest.raises(DomainError):
            potential_eval(Potential.singular_f3(0.5), s)

    @pytest.mark.parametrize("p", [0.0, 1.0, 1.5])
    def test_singular_needs_p_in_unit_interval(self, p):
        with pytest.raises(ValueError):
            Potential.singular_f3(p)

    @pytest.mark.parametrize("s, expected", [
        (2.0, 0.0),
        (10.0, 3 / 20 - 1 - math.log(8) / 10),
    ])
    def test_f2_average(self, s, expected):
        assert potential_avg(Potential.piecewise_f2(), s) == pytest.approx(expected, abs=1e-10)

    def test_chafee_average_closed_form(self):
        f = Potential.chafee_infante(1.0)
        assert potential_avg(f, 3.0) == pytest.approx(2.0, rel=1e-14)
        for s in (0.1, 1.3, 7.0):
            ref = quad(lambda x: x * x - 1.0, 0, s)[0] / s
            assert potential_avg(f, s) == pytest.approx(ref, rel=1e-10)

    @pytest.mark.parametrize("p", [0.25, 0.5, 0.9])
    def test_singular_average(self, p):
        f = Potential.singular_f3(p)
        for s in (0.1, 0.5, 0.9):
            ref = ((1 - s) ** (1 - p) - 1) / ((1 - p) * s)
            assert potential_avg(f, s) == pytest.approx(ref, rel=1e-12)
        assert potential_avg(f, 1.0) == pytest.approx(1.0 / (p - 1.0), rel=1e-12)
        s = 1.0 - 1e-9
        assert potential_avg(f, s) == pytest.approx(((1 - s) ** (1 - p) - 1) / ((1 - p) * s), rel=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(-3, 3), min_size=1, max_size=5), st.floats(0.01, 4.0))
    def test_polynomial_average_matches_quadrature(self, coeffs, s):
        f = Potential.polynomial(coeffs)
        ref = quad(lambda x: np.polyval(coeffs[::-1], x), 0, s)[0] / s
        assert potential_avg(f, s) == pytest.approx(ref, rel=1e-9, abs=1e-12)

    def test_tabulated_linear_and_extrapolation(self):
        f = Potential.tabulated([(0.0, 1.0), (1.0, 3.0), (2.0, 2.0)])
        assert potential_eval(f, 0.5) == pytest.approx(2.0)
        assert potential_avg(f, 2.0) == pytest.approx((2.0 + 2.5) / 2.0)
        with pytest.warns(ExtrapolationWarning):
            assert potential_eval(f, 5.0) == 2.0
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            potential_eval(f, 1.5)

    def test_tabulated_needs_increasing(self):
        with pytest.raises(ValueError):
            Potential.tabulated([(0.0, 1.0), (0.0, 2.0)])

    @pytest.mark.parametrize("f, interval, expected", [
        (Potential.chafee_infante(2.0), (-5.0, 5.0), -2.0),
        (Potential.polynomial([0.0, 1.0]), (2.0, 4.0), 2.0),
        (Potential.polynomial([1.0, 0.0, 1.0]), (-10.0, 10.0), 1.0),
    ])
    def test_inf_examples(self, f, interval, expected):
        assert potential_inf(f, interval) == pytest.approx(expected, abs=1e-10)

    def test_inf_f2_below_minus_one(self):
        assert potential_inf(Potential.piecewise_f2(), (0.0, 100.0)) < -1.0

    def test_csv_roundtrip(self, tmp_path):
        p = tmp_path / "f.csv"
        p.write_text("s,value\n0,1\n2,5\n")
        f = Potential.from_csv(p)
        assert potential_eval(f, 1.0) == pytest.approx(3.0)

    def test_csv_header_checked(self, tmp_path):
        p = tmp_path / "f.csv"
        p.write_text("a,b\n0,1\n2,5\n")
        with pytest.raises(ValueError):
            read_two_column_csv(p, key="s")


class TestInitialData:
    def test_x_sin_pi_x(self):
        u = sample_initial_data(InitialData.preset("x_sin_pi_x"), unit_grid(8))
        x = unit_grid(8).nodes
        np.testing.assert_allclose(u.values[1:-1], (x * np.sin(np.pi * x))[1:-1])
        assert u.values[0] == 0.0 and u.values[-1] == 0.0

    def test_amp_sin_peak(self):
        u = sample_initial_data(InitialData.preset("amp_sin", 2.5), unit_grid(10))
        assert u.values[5] == pytest.approx(2.5)

    def test_sampled_interpolates(self):
        u0 = InitialData.sampled([(0, 0), (0.5, 1), (1, 0)])
        u = sample_initial_data(u0, unit_grid(8))
        assert u.values[2] == pytest.approx(0.5)

    def test_sampled_coverage(self):
        with pytest.raises(CoverageError):
            sample_initial_data(InitialData.sampled([(0, 0), (0.5, 1)]), unit_grid(8))

    def test_mixed_keeps_left_end(self):
        u = sample_initial_data(InitialData.preset("amp_ramp", 5.0), unit_grid(8), "mixed")
        assert u.values[0] == 5.0 and u.values[-1] == 0.0

    @pytest.mark.parametrize("name, A", [("amp_sin", None), ("exp_bump", 1.0), ("nope", None)])
    def test_preset_arguments(self, name, A):
        with pytest.raises(ValueError):
            InitialData.preset(name, A)


class TestSpectral:
    def test_dirichlet(self):
        assert SpectralInfo("dirichlet", Domain1D(0, 2)).lambda1 == pytest.approx(math.pi**2 / 4)

    def test_mixed_unit(self):
        assert SpectralInfo("mixed").lambda1 == pytest.approx(math.pi**2 / 4, rel=1e-15)

    def test_override(self):
        assert SpectralInfo("dirichlet", override=1.0).lambda1 == 1.0
        with pytest.raises(ValueError):
            SpectralInfo("dirichlet", override=-1.0)


class TestProblemSpec:
    def test_nu_positive(self):
        with pytest.raises(ValueError):
            ProblemSpec(Domain1D(), 0.0, Potential.constant(0), InitialData.preset("x_sin_pi_x"))

    def test_degenerate_needs_origin(self):
        with pytest.raises(ValueError):
            ProblemSpec(Domain1D(0.5, 1), 1.0, None, InitialData.preset("x_sin_pi_x"), "mixed", (1.0, 2.0))

    def test_weighted_mixed_needs_degenerate(self):
        with pytest.raises(ValueError):
            ProblemSpec(Domain1D(), 1.0, Potential.constant(0), InitialData.preset("x_sin_pi_x"), "weighted_mixed")


class TestNorms:
    def test_sin_l2(self):
        u = sin_field(1000)
        assert l2_norm(u) ** 2 == pytest.approx(0.5, abs=1e-5)

    def test_sin_h1(self):
        u = sin_field(1000)
        assert h1_seminorm(u) ** 2 == pytest.approx(math.pi**2 / 2, rel=1e-3)

    def test_zero_field(self):
        u = GridField(unit_grid(16), np.zeros(17))
        norms = field_norms(u, ["l2", "h1_semi", "sup", ("lp", 3), ("weighted", 2.0)])
        assert all(v == 0.0 for v in norms.values())

    def test_lp2_equals_l2(self):
        u = sin_field(50, 3.0)
        assert lp_norm(u, 2) == pytest.approx(l2_norm(u), rel=1e-14)

    def test_weighted_constant(self):
        g = unit_grid(400)
        v = GridField(g, np.ones(401))
        assert weighted_square(v, 2.0) == pytest.approx(1 / 3, rel=1e-5)

    def test_trapezoid_order(self):
        err = [abs(integrate_nodal(np.exp(unit_grid(n).nodes), unit_grid(n)) - (math.e - 1)) for n in (20, 40, 80)]
        orders = np.log2(np.array(err[:-1]) / np.array(err[1:]))
        assert orders.min() >= 1.9

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.floats(-5, 5).map(lambda x: round(x, 6)), min_size=9, max_size=40))
    def test_cauchy_schwarz_on_unit_interval(self, vals):
        n = len(vals) - 1
        if n < 8:
            return
        v = GridField(unit_grid(n), np.array(vals))
        assert l2_norm(v) ** 2 <= lp_norm(v, 4) ** 2 * (1 + 1e-12) + 1e-300


class TestBisect:
    @pytest.mark.parametrize("g, lo, hi, root", [
        (lambda x: x - 0.3, 0.0, 1.0, 0.3),
        (lambda x: math.cos(math.pi * x), 0.0, 1.0, 0.5),
        (lambda x: x * x - 2.0, 1.0, 2.0, math.sqrt(2.0)),
    ])
    def test_roots(self, g, lo, hi, root):
        assert bisect_root(g, lo, hi, tol=1e-12) == pytest.approx(root, abs=1e-10)

    def test_no_bracket(self):
        with pytest.raises(BracketError):
            bisect_root(lambda x: x * x + 1.0, -1.0, 1.0)

    def test_endpoint_root(self):
        assert bisect_root(lambda x: x, 0.0, 1.0) == 0.0
