import math

import pytest

from stripcavity.analytic import (
    CavityContext,
    ValidityWarning,
    absorptance_dsc,
    absorptance_dsc_dielectric,
    absorptance_mlc,
    absorptance_ssc,
    absorptance_ssc_dielectric,
    analytic_input_impedance,
    combine_dsc_detunings,
    detuning_from_thickness,
    dielectric_optimum_dsc,
    dielectric_optimum_ssc,
    max_absorptance,
    max_absorptance_detuned,
    mlc_reflection,
    qwt_relations,
    wire_optimum_dsc,
    wire_optimum_mlc,
    wire_optimum_ssc,
)

EPS_NBN = complex(4.905**2 - 4.293**2, -2 * 4.905 * 4.293)
EPS_SIO = 1.551**2
N_AG = complex(0.322, -10.99)
LAMBDA = 1550.0


def mix(f, eps_slit=1.0):
    return EPS_NBN * f + eps_slit * (1 - f)


def ctx_ssc(f=0.5, mirror=N_AG):
    return CavityContext(mix(f), n_i=1.0, n_c=1.551, n_m=mirror, wavelength_nm=LAMBDA)


def ctx_dsc(f=0.5, mirror=N_AG):
    return CavityContext(
        mix(f, EPS_SIO), n_i=3.628, n_c1=1.444, n_c2=1.551, n_m=mirror, wavelength_nm=LAMBDA
    )


def ctx_mlc(f=0.5):
    return CavityContext(mix(f), n_i=1.0, n_c1=1.444, n_c2=2.15, wavelength_nm=LAMBDA)


class TestWireOptimumSsc:
    @pytest.mark.parametrize(
        "f, expected",
        [(0.5, 11.5728), (0.4, 14.4387), (1.0 / 3.0, 17.2915), (1.0, 5.8060)],
    )
    def test_thickness(self, f, expected):
        assert wire_optimum_ssc(ctx_ssc(f)).d_opt_nm == pytest.approx(expected, abs=1e-3)

    def test_peak_absorptance(self):
        assert wire_optimum_ssc(ctx_ssc()).A_opt == pytest.approx(0.993881, abs=1e-5)

    def test_absorptance_vanishes_with_wire(self):
        assert absorptance_ssc(1e-9, ctx_ssc()) == pytest.approx(0.0, abs=1e-9)

    def test_optimum_consistency(self):
        for f in (0.5, 0.4):
            ctx = ctx_ssc(f)
            opt = wire_optimum_ssc(ctx)
            assert absorptance_ssc(opt.d_opt_nm, ctx) == pytest.approx(opt.A_opt, rel=1e-12)

    def test_near_optimum_example(self):
        # rounded design value sits within 2e-5 of the true peak
        ctx = ctx_ssc(0.4)
        assert absorptance_ssc(14.4, ctx) == pytest.approx(wire_optimum_ssc(ctx).A_opt, abs=2e-5)

    def test_zero_permittivity_rejected(self):
        with pytest.raises(ValueError):
            wire_optimum_ssc(CavityContext(0.0j, wavelength_nm=LAMBDA))


class TestDielectricOptimumSsc:
    @pytest.mark.parametrize(
        "f, expected",
        [(0.5, 211.4656), (0.4, 210.2953), (1.0 / 3.0, 209.1318)],
    )
    def test_thickness_with_metal_mirror(self, f, expected):
        assert dielectric_optimum_ssc(ctx_ssc(f)).d_opt_nm == pytest.approx(expected, abs=1e-3)

    def test_ideal_mirror_limit(self):
        assert dielectric_optimum_ssc(ctx_ssc(mirror=None)).d_opt_nm == pytest.approx(
            233.893, abs=1e-2
        )

    def test_below_quarter_wave_for_metal_mirrors(self):
        quarter = LAMBDA / (4 * 1.551)
        for mirror in (N_AG, complex(4.905, -4.293)):
            assert dielectric_optimum_ssc(ctx_ssc(mirror=mirror)).d_opt_nm < quarter

    def test_peak_reached_at_detuning_optimum(self):
        ctx = ctx_ssc()
        opt = dielectric_optimum_ssc(ctx)
        assert absorptance_ssc_dielectric(opt.dphi, ctx) == pytest.approx(
            max_absorptance_detuned(ctx.eps_w), rel=1e-12
        )
        assert absorptance_ssc_dielectric(0.0, ctx) < opt.A_opt

    def test_detuning_thickness_consistency(self):
        ctx = ctx_ssc()
        opt = dielectric_optimum_ssc(ctx)
        assert detuning_from_thickness(opt.d_opt_nm, ctx.n_c, LAMBDA) == pytest.approx(
            opt.dphi, abs=1e-12
        )


class TestWireOptimumDsc:
    @pytest.mark.parametrize(
        "f, expected",
        [(0.5, 6.6139), (0.4, 8.2210), (1.0 / 3.0, 9.8030)],
    )
    def test_thickness(self, f, expected):
        assert wire_optimum_dsc(ctx_dsc(f)).d_opt_nm == pytest.approx(expected, abs=1e-3)

    def test_scaling_against_single_side(self):
        # same eps_w: optimum rescales by n_c1**2 / n_i
        eps = mix(0.5)
        a = CavityContext(eps, n_i=3.628, n_c1=1.444, n_c2=1.551, wavelength_nm=LAMBDA)
        b = CavityContext(eps, n_i=1.0, n_c=1.551, wavelength_nm=LAMBDA)
        assert wire_optimum_dsc(a).d_opt_nm == pytest.approx(
            wire_optimum_ssc(b).d_opt_nm * 1.444**2 / 3.628, rel=1e-12
        )

    def test_optimum_consistency(self):
        ctx = ctx_dsc()
        opt = wire_optimum_dsc(ctx)
        assert absorptance_dsc(opt.d_opt_nm, ctx) == pytest.approx(opt.A_opt, rel=1e-12)
        assert absorptance_dsc(2 * opt.d_opt_nm, ctx) < opt.A_opt

    def test_absorptance_vanishes_with_wire(self):
        assert absorptance_dsc(1e-9, ctx_dsc()) == pytest.approx(0.0, abs=1e-9)


class TestDielectricOptimumDsc:
    @pytest.mark.parametrize(
        "f, expected",
        [(0.5, 216.3660), (0.4, 214.7837), (1.0 / 3.0, 213.2295)],
    )
    def test_thickness_with_metal_mirror(self, f, expected):
        assert dielectric_optimum_dsc(ctx_dsc(f)).d_opt_nm == pytest.approx(expected, abs=1e-3)

    def test_ideal_mirror_limit(self):
        assert dielectric_optimum_dsc(ctx_dsc(mirror=None)).d_opt_nm == pytest.approx(
            238.794, abs=1e-2
        )

    def test_below_quarter_wave(self):
        assert dielectric_optimum_dsc(ctx_dsc()).d_opt_nm < LAMBDA / (4 * 1.551)

    def test_peak_reached_at_detuning_optimum(self):
        ctx = ctx_dsc()
        opt = dielectric_optimum_dsc(ctx)
        assert absorptance_dsc_dielectric(opt.dphi, ctx) == pytest.approx(
            max_absorptance_detuned(ctx.eps_w), rel=1e-12
        )
        assert absorptance_dsc_dielectric(0.0, ctx) < opt.A_opt

    def test_detuning_trade_invariance(self):
        ctx = ctx_dsc()
        base = combine_dsc_detunings(0.05, -0.02, ctx)
        a = absorptance_dsc_dielectric(base, ctx)
        for delta in (0.01, -0.03, 0.07):
            traded = combine_dsc_detunings(
                0.05 + delta * ctx.n_c2 / ctx.n_c1, -0.02 - delta, ctx
            )
            b = absorptance_dsc_dielectric(traded, ctx)
            assert abs(a - b) < 1e-12


class TestUniversality:
    def test_same_peak_formula_all_cavities(self):
        eps = mix(0.5)
        a = wire_optimum_ssc(CavityContext(eps, wavelength_nm=LAMBDA)).A_opt
        b = wire_optimum_dsc(
            CavityContext(eps, n_i=3.628, n_c1=1.444, wavelength_nm=LAMBDA)
        ).A_opt
        c = wire_optimum_mlc(CavityContext(eps, wavelength_nm=LAMBDA)).A_opt
        assert a == b == c == max_absorptance(eps)

    def test_mlc_absorptance_is_single_side_formula(self):
        assert absorptance_mlc is absorptance_ssc

    def test_detuned_peaks_shared(self):
        eps = mix(0.5)
        assert dielectric_optimum_ssc(ctx_ssc()).A_opt == max_absorptance_detuned(eps)


class TestStationarity:
    H = 1e-3

    def central_diff(self, fn, x):
        return (fn(x + self.H) - fn(x - self.H)) / (2 * self.H)

    def test_wire_formulas(self):
        ctx = ctx_ssc()
        d = wire_optimum_ssc(ctx).d_opt_nm
        assert abs(self.central_diff(lambda x: absorptance_ssc(x, ctx), d)) < 1e-6
        ctx = ctx_dsc()
        d = wire_optimum_dsc(ctx).d_opt_nm
        assert abs(self.central_diff(lambda x: absorptance_dsc(x, ctx), d)) < 1e-6

    def test_dielectric_formulas(self):
        ctx = ctx_ssc()
        opt = dielectric_optimum_ssc(ctx)

        def a_of_thickness(d):
            return absorptance_ssc_dielectric(detuning_from_thickness(d, ctx.n_c, LAMBDA), ctx)

        assert abs(self.central_diff(a_of_thickness, opt.d_opt_nm)) < 1e-6

        ctx = ctx_dsc()
        opt = dielectric_optimum_dsc(ctx)

        def a_of_upper(d):
            dphi = combine_dsc_detunings(0.0, detuning_from_thickness(d, ctx.n_c2, LAMBDA), ctx)
            return absorptance_dsc_dielectric(dphi, ctx)

        assert abs(self.central_diff(a_of_upper, opt.d_opt_nm)) < 1e-6


class TestMlcReflection:
    def test_mirror_limit_as_wire_vanishes(self):
        _, limit = mlc_reflection(1e-9, 12, ctx_mlc())
        assert limit == pytest.approx(1.0, abs=1e-6)

    def test_finite_period_converges_to_limit(self):
        ctx = ctx_mlc()
        d = wire_optimum_mlc(ctx).d_opt_nm
        full, limit = mlc_reflection(d, 6, ctx)
        assert abs(full - limit) == pytest.approx(0.004255, abs=5e-4)
        assert abs(full - limit) < 1e-2

    def test_reflectance_grows_with_periods_at_small_wire(self):
        ctx = ctx_mlc()
        mags = [abs(mlc_reflection(1.0, n, ctx)[0]) for n in range(1, 9)]
        assert all(a < b for a, b in zip(mags, mags[1:]))
        assert mags[-1] < abs(mlc_reflection(1.0, 1, ctx)[1])

    def test_ordering_enforced(self):
        ctx = CavityContext(mix(0.5), n_c1=2.15, n_c2=1.444, wavelength_nm=LAMBDA)
        with pytest.raises(ValueError, match="smaller refractive index"):
            mlc_reflection(11.6, 6, ctx)


class TestAnalyticInputImpedance:
    def test_matched_at_optimum(self):
        ctx = ctx_ssc()
        d = wire_optimum_ssc(ctx).d_opt_nm
        assert abs(analytic_input_impedance("ssc", d, ctx)) == pytest.approx(
            ctx.eta_i, rel=1e-12
        )
        ctx = ctx_dsc()
        d = wire_optimum_dsc(ctx).d_opt_nm
        assert abs(analytic_input_impedance("dsc", d, ctx)) == pytest.approx(
            ctx.eta_i, rel=1e-12
        )

    def test_inverse_linear_scaling(self):
        ctx = ctx_ssc()
        d = wire_optimum_ssc(ctx).d_opt_nm
        assert abs(analytic_input_impedance("ssc", 2 * d, ctx)) == pytest.approx(
            ctx.eta_i / 2, rel=1e-12
        )

    def test_mlc_same_as_ssc(self):
        ctx = ctx_ssc()
        assert analytic_input_impedance("mlc", 10.0, ctx) == analytic_input_impedance(
            "ssc", 10.0, ctx
        )

    def test_guards(self):
        with pytest.raises(ValueError):
            analytic_input_impedance("ssc", 0.0, ctx_ssc())
        with pytest.raises(ValueError):
            analytic_input_impedance("ring", 10.0, ctx_ssc())


class TestQwtRelations:
    def test_roundtrip(self):
        ctx = ctx_dsc()
        for d in (3.0, 6.6139, 12.0):
            assert qwt_relations(ctx, d).d_w_implied_nm == pytest.approx(d, rel=1e-12)

    def test_matched_index_at_optimum(self):
        ctx = ctx_dsc()
        d = wire_optimum_dsc(ctx).d_opt_nm
        result = qwt_relations(ctx, d)
        assert result.n_qwt == pytest.approx(ctx.n_c1, rel=1e-12)
        assert abs(result.eta_qwt) == pytest.approx(1.0 / 1.444, rel=1e-12)

    def test_sqrt_scaling(self):
        ctx = ctx_dsc()
        a = abs(qwt_relations(ctx, 6.6139).eta_qwt)
        b = abs(qwt_relations(ctx, 2 * 6.6139).eta_qwt)
        assert b == pytest.approx(a / math.sqrt(2), rel=1e-12)


class TestValidityWarnings:
    def test_thick_wire_warns(self):
        with pytest.warns(ValidityWarning):
            absorptance_ssc(32.0, ctx_ssc())

    def test_large_detuning_warns(self):
        with pytest.warns(ValidityWarning):
            absorptance_ssc_dielectric(0.6, ctx_ssc())

    def test_quiet_in_comfort_zone(self):
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("error", ValidityWarning)
            absorptance_ssc(11.6, ctx_ssc())
            absorptance_ssc_dielectric(-0.24, ctx_ssc())


class TestContextValidation:
    def test_bad_input_index(self):
        with pytest.raises(ValueError):
            CavityContext(mix(0.5), n_i=0.0)

    def test_wrong_sign_eps(self):
        with pytest.raises(ValueError, match="sign convention"):
            CavityContext(complex(3.0, 21.0))

    def test_wrong_sign_mirror(self):
        with pytest.raises(ValueError, match="sign convention"):
            CavityContext(mix(0.5), n_m=complex(0.3, 11.0))

    def test_missing_field(self):
        with pytest.raises(ValueError, match="n_c"):
            absorptance_ssc_dielectric(0.0, CavityContext(mix(0.5)))
