"""Closed-form rates, loss scalings and delay-fluctuation averaging."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homlab.rates import (
    LossParams,
    RateCurve,
    RateSurface,
    RegimeError,
    bp_plateau,
    box_average_curve,
    box_average_surface,
    coarse_grain_curve,
    coarse_grain_surface,
    cp_plateau,
    hom_bp_analytic,
    hom_cp_analytic,
    hom_cp_coarse_analytic,
    mhom_bp_analytic,
    mhom_bp_coarse_analytic,
    mhom_bp_loss_coarse,
    mhom_cp_analytic,
    mhom_cp_coarse_analytic,
    mhom_cp_loss_coarse,
    sample_curve,
    sample_surface,
)
from homlab.spectra import CoherentSpectrum, GaussianJointSpectrum

SPECTRUM = GaussianJointSpectrum(omega0=5.0, d_omega_plus=0.2, d_omega_minus=1.0)
PULSE = CoherentSpectrum(omega0=5.0, d_omega=0.5, total_intensity=1.0)
BRIGHT = CoherentSpectrum(omega0=5.0, d_omega=0.5, total_intensity=2.5)


# ----- standard interferometer closed forms -----


def test_hom_bp_frozen_values():
    assert hom_bp_analytic(0.0, SPECTRUM) == 0.0
    assert hom_bp_analytic(1.0, SPECTRUM) == pytest.approx(
        0.5 * (1.0 - math.exp(-2.0)), rel=1e-15
    )
    assert hom_bp_analytic(50.0, SPECTRUM) == pytest.approx(0.5, abs=1e-15)


def test_hom_bp_ignores_carrier_and_sum_spread():
    other = GaussianJointSpectrum(omega0=123.0, d_omega_plus=2.0, d_omega_minus=1.0)
    taus = np.linspace(-3, 3, 41)
    np.testing.assert_array_equal(hom_bp_analytic(taus, SPECTRUM), hom_bp_analytic(taus, other))


def test_hom_cp_frozen_values():
    assert hom_cp_analytic(0.0, PULSE) == 0.0
    # carrier quadrature point: the squared cosine factor vanishes
    tau = math.pi / (4.0 * PULSE.omega0)
    assert hom_cp_analytic(tau, PULSE) == pytest.approx(1.0, rel=1e-12)
    assert hom_cp_analytic(40.0, BRIGHT) == pytest.approx(BRIGHT.total_intensity**2, rel=1e-12)


def test_hom_cp_coarse_frozen_values():
    assert hom_cp_coarse_analytic(0.0, PULSE) == pytest.approx(0.5, rel=1e-15)
    assert hom_cp_coarse_analytic(0.0, BRIGHT) == pytest.approx(
        0.5 * BRIGHT.total_intensity**2, rel=1e-15
    )
    assert hom_cp_coarse_analytic(30.0, PULSE) == pytest.approx(1.0, rel=1e-13)


# ----- two-delay interferometer closed forms -----


def test_mhom_bp_origin_values():
    assert mhom_bp_analytic(0.0, 0.0, math.pi / 2.0, SPECTRUM) == 0.0
    assert mhom_bp_analytic(0.0, 0.0, 0.0, SPECTRUM) == 1.0


def test_mhom_bp_zero_is_unique_at_quadrature_phase():
    """Only the origin cell dips below 1e-6 of the plateau on the reference
    grid when the achromatic phase sits at its quadrature setting."""
    axis = np.linspace(-4.0, 4.0, 101)
    vals = mhom_bp_analytic(axis[:, None], axis[None, :], math.pi / 2.0, SPECTRUM)
    i0 = int(np.argmin(np.abs(axis)))
    assert abs(axis[i0]) < 1e-12
    assert vals[i0, i0] < 1e-12
    mask = np.ones_like(vals, dtype=bool)
    mask[i0, i0] = False
    assert vals[mask].min() >= 1e-6


def test_mhom_bp_reduces_to_standard_chain():
    """With the first delay and the phase off, the two-delay rate carries an
    extra carrier fringe but its slow part matches the standard dip scale."""
    taus = np.linspace(-2.5, 2.5, 101)
    two_stage = mhom_bp_analytic(0.0, taus, 0.0, SPECTRUM)
    assert two_stage.min() >= 0.0
    assert two_stage.max() <= 1.0 + 1e-12


def test_mhom_cp_origin_for_all_phases():
    for theta in (0.0, math.pi / 4.0, math.pi / 2.0):
        assert mhom_cp_analytic(0.0, 0.0, theta, PULSE) == pytest.approx(1.0, abs=1e-12)
        assert mhom_cp_analytic(0.0, 0.0, theta, BRIGHT) == pytest.approx(6.25, abs=1e-12 * 6.25)


def test_mhom_cp_strictly_positive_on_grid():
    rng = np.random.default_rng(11)
    t1 = rng.uniform(-4, 4, size=(50, 1))
    t2 = rng.uniform(-4, 4, size=(1, 50))
    for theta in (0.0, math.pi / 2.0):
        vals = mhom_cp_analytic(t1, t2, theta, PULSE)
        assert np.all(vals > 0.0)


def test_mhom_cp_has_no_half_plateau_floor():
    """The oscillatory pulse rate dips well below half the plateau near the
    origin; only the coarse-grained surface keeps a 3/4 floor. Frozen from a
    direct scan of the closed form on the reference grid."""
    axis = np.linspace(-4.0, 4.0, 101)
    vals = mhom_cp_analytic(axis[:, None], axis[None, :], math.pi / 2.0, PULSE)
    floor = float(vals.min())
    assert floor == pytest.approx(0.026106160646, rel=1e-9)
    assert 0.0 < floor < 0.5
    coarse = mhom_cp_coarse_analytic(axis[:, None], axis[None, :], PULSE)
    assert coarse.min() >= 0.75 - 1e-12


def test_mhom_coarse_frozen_landmarks():
    assert mhom_bp_coarse_analytic(0.0, 0.0, SPECTRUM) == pytest.approx(0.5, rel=1e-15)
    assert mhom_bp_coarse_analytic(8.0, 0.0, SPECTRUM) == pytest.approx(0.75, rel=1e-12)
    assert mhom_bp_coarse_analytic(8.0, 8.0, SPECTRUM) == pytest.approx(0.375, rel=1e-12)
    assert mhom_bp_coarse_analytic(8.0, -8.0, SPECTRUM) == pytest.approx(0.375, rel=1e-12)

    assert mhom_cp_coarse_analytic(0.0, 0.0, PULSE) == pytest.approx(0.75, rel=1e-15)
    assert mhom_cp_coarse_analytic(6.0, 6.0, PULSE) == pytest.approx(0.875, rel=1e-12)
    assert mhom_cp_coarse_analytic(6.0, -6.0, PULSE) == pytest.approx(0.875, rel=1e-12)
    assert mhom_cp_coarse_analytic(20.0, 7.0, PULSE) == pytest.approx(1.0, rel=1e-12)


def test_plateaus():
    assert bp_plateau() == 0.5
    assert cp_plateau(PULSE) == 1.0
    assert cp_plateau(BRIGHT) == 6.25
    loss = LossParams(chi2=0.5)
    assert bp_plateau(loss) == pytest.approx(4.0 * loss.a_bp_loss, rel=1e-15)
    assert cp_plateau(BRIGHT, loss) == pytest.approx(loss.a_cp_loss(2.5), rel=1e-15)


@settings(max_examples=80)
@given(
    t1=st.floats(-6.0, 6.0),
    t2=st.floats(-6.0, 6.0),
    theta=st.floats(-7.0, 7.0),
)
def test_closed_forms_are_nonnegative_and_bounded(t1, t2, theta):
    assert 0.0 <= mhom_bp_analytic(t1, t2, theta, SPECTRUM) <= 1.0 + 1e-12
    assert 0.0 <= mhom_cp_analytic(t1, t2, theta, PULSE) <= 1.0 + 1e-12
    assert 0.375 - 1e-12 <= mhom_bp_coarse_analytic(t1, t2, SPECTRUM) <= 0.75 + 1e-12
    assert 0.75 - 1e-12 <= mhom_cp_coarse_analytic(t1, t2, PULSE) <= 1.0 + 1e-12


@given(
    tau=st.floats(0.0, 2.5),
    bump=st.floats(0.01, 2.0),
)
def test_hom_bp_monotone_in_delay_magnitude(tau, bump):
    assert hom_bp_analytic(tau + bump, SPECTRUM) > hom_bp_analytic(tau, SPECTRUM)
    assert hom_bp_analytic(-tau, SPECTRUM) == hom_bp_analytic(tau, SPECTRUM)


# ----- containers -----


def test_rate_curve_validation():
    axis = np.linspace(-1, 1, 5)
    curve = RateCurve(axis, np.abs(axis), 0.5)
    assert curve.values.shape == axis.shape
    with pytest.raises(ValueError):
        RateCurve(axis, np.abs(axis), 0.0)
    with pytest.raises(ValueError):
        RateCurve(axis, np.abs(axis[:-1]), 0.5)
    with pytest.raises(ValueError):
        RateCurve(axis, axis, 0.5)  # genuinely negative values


def test_rate_curve_clamps_roundoff_negatives():
    axis = np.linspace(-1, 1, 5)
    vals = np.array([0.0, -1e-14, 0.2, 0.3, 0.4])
    curve = RateCurve(axis, vals, 1.0)
    assert curve.values[1] == 0.0


def test_rate_surface_validation_and_orientation():
    t1 = np.linspace(-1, 1, 3)
    t2 = np.linspace(-2, 2, 5)
    surf = sample_surface(lambda a, b: mhom_bp_coarse_analytic(a, b, SPECTRUM), t1, t2, 0.5)
    assert surf.values.shape == (3, 5)
    assert surf.values[2, 4] == mhom_bp_coarse_analytic(t1[2], t2[4], SPECTRUM)
    with pytest.raises(ValueError):
        RateSurface(t1, t2, np.zeros((5, 3)) + 0.1, 0.5)


def test_sample_curve_matches_direct_evaluation():
    axis = np.linspace(-2, 2, 9)
    curve = sample_curve(lambda t: hom_bp_analytic(t, SPECTRUM), axis, 0.5)
    np.testing.assert_array_equal(curve.values, hom_bp_analytic(axis, SPECTRUM))


# ----- losses -----


def test_loss_params_derived_quantities():
    loss = LossParams(xi1=1.0, xi2=0.8, chi1=0.9, chi2=0.5)
    xi_p = 1.0 + 0.64
    chi_p = 0.81 + 0.25
    assert loss.xi_power == pytest.approx(xi_p, rel=1e-15)
    assert loss.chi_power == pytest.approx(chi_p, rel=1e-15)
    assert loss.eta_a == pytest.approx(((1.0 - 0.64) / xi_p) ** 2, rel=1e-14)
    assert loss.eta_b == pytest.approx(((0.81 - 0.25) / chi_p) ** 2, rel=1e-14)
    assert loss.a_bp_loss == pytest.approx(0.64 * chi_p**2 / 32.0, rel=1e-14)
    assert loss.a_cp_loss(2.0) == pytest.approx((2.0 * chi_p * xi_p / 4.0) ** 2, rel=1e-14)


def test_loss_params_no_loss_is_neutral():
    neutral = LossParams()
    assert neutral.eta_a == 0.0 and neutral.eta_b == 0.0
    assert neutral.a_bp_loss == pytest.approx(1.0 / 8.0, rel=1e-15)
    assert neutral.a_cp_loss(1.0) == pytest.approx(1.0, rel=1e-15)


def test_loss_params_rejects_dark_stage():
    with pytest.raises(ValueError):
        LossParams(xi1=0.0, xi2=0.0)
    with pytest.raises(ValueError):
        LossParams(chi1=0.0, chi2=0.0)
    with pytest.raises(ValueError):
        LossParams(xi1=1.5)


def test_bp_loss_reduces_when_balanced():
    loss = LossParams(xi1=0.9, xi2=0.7, chi1=0.8, chi2=0.8)
    assert loss.eta_b == 0.0
    t1 = np.linspace(-3, 3, 21)[:, None]
    t2 = np.linspace(-3, 3, 21)[None, :]
    lossy = mhom_bp_loss_coarse(t1, t2, SPECTRUM, loss)
    clean = mhom_bp_coarse_analytic(t1, t2, SPECTRUM)
    np.testing.assert_allclose(lossy, 8.0 * loss.a_bp_loss * clean, rtol=1e-12)


def test_bp_loss_input_imbalance_only_rescales():
    """Changing the input attenuations multiplies the surface by a constant;
    the normalized shape and its extremum cells do not move."""
    t1 = np.linspace(-3, 3, 41)[:, None]
    t2 = np.linspace(-3, 3, 41)[None, :]
    ref_loss = LossParams(chi1=0.9, chi2=0.6)
    alt_loss = LossParams(xi1=0.55, xi2=0.85 * np.exp(1.1j), chi1=0.9, chi2=0.6)
    ref = mhom_bp_loss_coarse(t1, t2, SPECTRUM, ref_loss)
    alt = mhom_bp_loss_coarse(t1, t2, SPECTRUM, alt_loss)
    np.testing.assert_allclose(
        alt / alt_loss.a_bp_loss, ref / ref_loss.a_bp_loss, rtol=1e-12
    )
    assert np.argmax(alt) == np.argmax(ref)
    assert np.argmin(alt) == np.argmin(ref)


def test_bp_loss_visibility_scaling():
    """Internal imbalance shrinks every feature excursion by 1 - eta_b."""
    from homlab.figures import chi2_for_eta_b

    t1 = 2.5
    for eta in (0.3, 0.6, 0.9):
        loss = LossParams(chi2=chi2_for_eta_b(eta))
        assert loss.eta_b == pytest.approx(eta, rel=1e-12)
        plateau = 4.0 * loss.a_bp_loss
        ridge = mhom_bp_loss_coarse(t1, 0.0, SPECTRUM, loss)
        dip = mhom_bp_loss_coarse(t1, t1, SPECTRUM, loss)
        v_ridge = (ridge - plateau) / plateau
        v_dip = (plateau - dip) / plateau
        assert v_ridge == pytest.approx(0.5 * (1.0 - eta), abs=2e-3)
        assert v_dip == pytest.approx(0.25 * (1.0 - eta), abs=2e-3)


def test_cp_loss_reduces_when_balanced():
    loss = LossParams(xi1=0.9, xi2=0.9, chi1=0.6, chi2=0.6)
    t1 = np.linspace(-3, 3, 15)[:, None]
    t2 = np.linspace(-3, 3, 15)[None, :]
    lossy = mhom_cp_loss_coarse(t1, t2, PULSE, loss)
    clean = mhom_cp_coarse_analytic(t1, t2, PULSE)
    scale = loss.a_cp_loss(PULSE.total_intensity)
    np.testing.assert_allclose(lossy, scale * clean, rtol=1e-12)


def test_cp_loss_full_input_imbalance_drops_first_delay():
    """With one input path dark the rate keeps only the second-delay dip."""
    loss = LossParams(xi2=0.0, chi1=0.95, chi2=0.7)
    assert loss.eta_a == pytest.approx(1.0, rel=1e-15)
    scale = loss.a_cp_loss(1.0)
    t1 = np.linspace(-4, 4, 17)
    t2 = np.linspace(-4, 4, 17)
    vals = mhom_cp_loss_coarse(t1[:, None], t2[None, :], PULSE, loss)
    spread = np.max(np.abs(vals - vals[0, :]), axis=0)
    assert spread.max() <= 1e-10 * scale
    expected = scale * (1.0 - 0.5 * (1.0 - loss.eta_b) * np.exp(-4.0 * PULSE.d_omega**2 * t2**2))
    np.testing.assert_allclose(vals[0, :], expected, rtol=1e-10)


# ----- fluctuation averaging -----


def test_box_average_of_cosine_is_exact():
    k, window = 3.0, 2.0
    for tau in (0.0, 0.7, -1.9):
        got = box_average_curve(lambda t: np.cos(k * t), tau, window, n=64)
        want = math.cos(k * tau) * math.sin(k * window / 2.0) / (k * window / 2.0)
        assert got == pytest.approx(want, abs=1e-14)


def test_box_average_surface_separable():
    k1, k2, window = 2.0, 5.0, 1.5

    def f(a, b):
        return np.cos(k1 * a) * np.cos(k2 * b)

    got = box_average_surface(f, 0.4, -0.3, window, n=64)
    damp1 = math.sin(k1 * window / 2.0) / (k1 * window / 2.0)
    damp2 = math.sin(k2 * window / 2.0) / (k2 * window / 2.0)
    want = math.cos(k1 * 0.4) * damp1 * math.cos(k2 * -0.3) * damp2
    assert got == pytest.approx(want, abs=1e-14)


def test_regime_bounds_enforced():
    with pytest.raises(RegimeError, match="carrier"):
        coarse_grain_curve(
            lambda t: hom_cp_analytic(t, PULSE), 0.0, 0.5, carrier=5.0, envelope=0.5
        )
    with pytest.raises(RegimeError, match="envelope"):
        coarse_grain_curve(
            lambda t: hom_cp_analytic(t, PULSE), 0.0, 0.5, carrier=500.0, envelope=0.5
        )
    with pytest.raises(ValueError):
        coarse_grain_curve(lambda t: t, 0.0, -1.0, carrier=500.0, envelope=0.1)


def test_regime_error_is_value_error():
    assert issubclass(RegimeError, ValueError)


FAST_PULSE = CoherentSpectrum(omega0=500.0, d_omega=0.5, total_intensity=1.0)
FAST_SPECTRUM = GaussianJointSpectrum(omega0=500.0, d_omega_plus=0.2, d_omega_minus=1.0)
WINDOW = 0.2


def test_coarse_curve_recovers_closed_form():
    taus = np.linspace(-2.4, 2.4, 17)
    got = coarse_grain_curve(
        lambda t: hom_cp_analytic(t, FAST_PULSE),
        taus,
        WINDOW,
        carrier=FAST_PULSE.omega0,
        envelope=FAST_PULSE.d_omega,
    )
    want = hom_cp_coarse_analytic(taus, FAST_PULSE)
    assert np.max(np.abs(got - want)) <= 0.02 * 1.0


def test_coarse_curve_leaves_slow_rate_alone():
    taus = np.linspace(-2.4, 2.4, 17)
    got = coarse_grain_curve(
        lambda t: hom_bp_analytic(t, FAST_SPECTRUM),
        taus,
        WINDOW,
        carrier=FAST_SPECTRUM.omega0,
        envelope=FAST_SPECTRUM.d_omega_minus,
    )
    want = hom_bp_analytic(taus, FAST_SPECTRUM)
    assert np.max(np.abs(got - want)) <= 0.02 * 0.5


def test_coarse_curve_preserves_constant():
    got = coarse_grain_curve(lambda t: np.full_like(t, 0.37), 1.0, WINDOW,
                             carrier=500.0, envelope=1.0)
    assert got == pytest.approx(0.37, rel=1e-13)


def test_coarse_curve_accepts_tabulated_curve():
    axis = np.linspace(-3.0, 3.0, 4001)
    curve = sample_curve(lambda t: hom_bp_analytic(t, FAST_SPECTRUM), axis, 0.5)
    got = coarse_grain_curve(curve, 0.8, WINDOW, carrier=500.0, envelope=1.0)
    assert got == pytest.approx(hom_bp_analytic(0.8, FAST_SPECTRUM), abs=0.01)
    with pytest.raises(ValueError, match="cover"):
        coarse_grain_curve(curve, 2.95, WINDOW, carrier=500.0, envelope=1.0)


def test_coarse_surface_recovers_bp_closed_form():
    taus = np.linspace(-2.4, 2.4, 7)
    got = coarse_grain_surface(
        lambda a, b: mhom_bp_analytic(a, b, 0.0, FAST_SPECTRUM),
        taus[:, None],
        taus[None, :],
        WINDOW,
        carrier=FAST_SPECTRUM.omega0,
        envelope=1.0,
    )
    want = mhom_bp_coarse_analytic(taus[:, None], taus[None, :], FAST_SPECTRUM)
    assert np.max(np.abs(got - want)) <= 0.02 * 0.5


def test_coarse_surface_recovers_cp_closed_form():
    taus = np.linspace(-2.4, 2.4, 7)
    got = coarse_grain_surface(
        lambda a, b: mhom_cp_analytic(a, b, math.pi / 2.0, FAST_PULSE),
        taus[:, None],
        taus[None, :],
        WINDOW,
        carrier=FAST_PULSE.omega0,
        envelope=FAST_PULSE.d_omega,
    )
    want = mhom_cp_coarse_analytic(taus[:, None], taus[None, :], FAST_PULSE)
    assert np.max(np.abs(got - want)) <= 0.02 * 1.0


def test_coarse_surface_phase_independent():
    taus = np.linspace(-2.0, 2.0, 6)

    def averaged(theta):
        return coarse_grain_surface(
            lambda a, b: mhom_bp_analytic(a, b, theta, FAST_SPECTRUM),
            taus[:, None],
            taus[None, :],
            WINDOW,
            carrier=FAST_SPECTRUM.omega0,
            envelope=1.0,
        )

    delta = np.max(np.abs(averaged(0.0) - averaged(math.pi / 2.0)))
    assert delta <= 0.02 * 0.5
