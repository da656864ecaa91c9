"""Coincidence-rate models for standard and two-delay interferometers.

Three layers live here and deliberately stay independent of each other:

* quadrature oracles (``bp_rate_oracle``, ``cp_rate_oracle``) that compute
  coincidence rates by direct numerical integration over tabulated
  spectra and an arbitrary two-port network,
* Gaussian closed forms for the photon-pair (``bp``) and coherent-pulse
  (``cp``) inputs of the standard single-delay and the two-delay
  interferometer,
* coarse-graining of fast delay fluctuations by sliding-box averaging,
  together with the closed forms of the averaged rates, with and without
  path losses.

The closed forms take a spectrum object and broadcast over delay arrays.
Rates are non-negative by construction; values driven a hair below zero
by round-off are clamped, anything beyond round-off raises.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .network import OpticalNetwork, transfer_at, validate_amplitude
from .spectra import CoherentSpectrum, FrequencyGrid, GaussianJointSpectrum, make_grid

__all__ = [
    "RegimeError",
    "RegimeWarning",
    "RateCurve",
    "RateSurface",
    "LossParams",
    "bp_plateau",
    "cp_plateau",
    "hom_bp_analytic",
    "hom_cp_analytic",
    "hom_cp_coarse_analytic",
    "mhom_bp_analytic",
    "mhom_cp_analytic",
    "mhom_bp_coarse_analytic",
    "mhom_cp_coarse_analytic",
    "mhom_bp_loss_coarse",
    "mhom_cp_loss_coarse",
    "pair_grid",
    "pulse_grid",
    "bp_rate_oracle",
    "cp_rate_oracle",
    "cl_s_rate",
    "box_average_curve",
    "box_average_surface",
    "coarse_grain_curve",
    "coarse_grain_surface",
    "sample_curve",
    "sample_surface",
]

_NEGATIVE_TOL = 1e-12


class RegimeError(ValueError):
    """An averaging window falls outside the fast-fluctuation regime."""


class RegimeWarning(UserWarning):
    """A computation ran outside its intended parameter regime."""


def _as_rate(values):
    """Clamp round-off negatives to zero; reject genuinely negative rates."""
    v = np.asarray(values, dtype=float)
    if np.any(v < -_NEGATIVE_TOL):
        worst = float(np.min(v))
        raise ValueError(f"coincidence rate went negative beyond round-off ({worst})")
    out = np.where(v < 0.0, 0.0, v)
    return out if out.ndim else float(out)


# ----- Result containers -----


@dataclass(frozen=True)
class RateCurve:
    """Rate values sampled along one axis, with the large-delay plateau."""

    axis: np.ndarray
    values: np.ndarray
    plateau: float

    def __post_init__(self) -> None:
        axis = np.asarray(self.axis, dtype=float)
        values = np.asarray(_as_rate(self.values), dtype=float)
        if axis.ndim != 1 or values.shape != axis.shape:
            raise ValueError("axis and values must be matching 1-D arrays")
        plateau = float(self.plateau)
        if not np.isfinite(plateau) or plateau <= 0.0:
            raise ValueError(f"plateau must be positive, got {plateau!r}")
        object.__setattr__(self, "axis", axis)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "plateau", plateau)


@dataclass(frozen=True)
class RateSurface:
    """Rate values on a delay-pair grid, ``values[i, j]`` at ``(tau1[i], tau2[j])``."""

    tau1_axis: np.ndarray
    tau2_axis: np.ndarray
    values: np.ndarray
    plateau: float

    def __post_init__(self) -> None:
        t1 = np.asarray(self.tau1_axis, dtype=float)
        t2 = np.asarray(self.tau2_axis, dtype=float)
        values = np.asarray(_as_rate(self.values), dtype=float)
        if t1.ndim != 1 or t2.ndim != 1 or values.shape != (t1.size, t2.size):
            raise ValueError("surface values must have shape (len(tau1), len(tau2))")
        plateau = float(self.plateau)
        if not np.isfinite(plateau) or plateau <= 0.0:
            raise ValueError(f"plateau must be positive, got {plateau!r}")
        object.__setattr__(self, "tau1_axis", t1)
        object.__setattr__(self, "tau2_axis", t2)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "plateau", plateau)


def sample_curve(func, axis, plateau: float) -> RateCurve:
    """Tabulate a broadcasting rate function along one axis."""
    axis = np.asarray(axis, dtype=float)
    return RateCurve(axis, func(axis), plateau)


def sample_surface(func, tau1_axis, tau2_axis, plateau: float) -> RateSurface:
    """Tabulate a broadcasting two-delay rate function on an outer grid."""
    t1 = np.asarray(tau1_axis, dtype=float)
    t2 = np.asarray(tau2_axis, dtype=float)
    values = func(t1[:, None], t2[None, :])
    return RateSurface(t1, t2, values, plateau)


# ----- Path losses -----


@dataclass(frozen=True)
class LossParams:
    """Flat path attenuations of the two-delay interferometer.

    ``xi1, xi2`` act on the two input paths ahead of the first delay
    stage, ``chi1, chi2`` on the internal paths between the splitters.
    Amplitudes are complex scalars with modulus at most one, evaluated at
    the carrier (white-noise loss model). Each stage must keep at least
    one path open.
    """

    xi1: complex = 1.0
    xi2: complex = 1.0
    chi1: complex = 1.0
    chi2: complex = 1.0

    def __post_init__(self) -> None:
        for name in ("xi1", "xi2", "chi1", "chi2"):
            object.__setattr__(self, name, validate_amplitude(getattr(self, name), name))
        if self.xi_power == 0.0 or self.chi_power == 0.0:
            raise ValueError("each loss stage must keep at least one path open")

    @property
    def xi_power(self) -> float:
        return abs(self.xi1) ** 2 + abs(self.xi2) ** 2

    @property
    def chi_power(self) -> float:
        return abs(self.chi1) ** 2 + abs(self.chi2) ** 2

    @property
    def eta_a(self) -> float:
        """Squared relative imbalance of the input-path transmissions."""
        return ((abs(self.xi1) ** 2 - abs(self.xi2) ** 2) / self.xi_power) ** 2

    @property
    def eta_b(self) -> float:
        """Squared relative imbalance of the internal-path transmissions."""
        return ((abs(self.chi1) ** 2 - abs(self.chi2) ** 2) / self.chi_power) ** 2

    @property
    def a_bp_loss(self) -> float:
        """Overall pair-rate scale: one eighth of plateau under these losses."""
        return abs(self.xi1 * self.xi2) ** 2 * self.chi_power**2 / 32.0

    def a_cp_loss(self, total_intensity: float) -> float:
        """Plateau of the lossy coherent-pulse rate for a pulse of given intensity."""
        a = float(total_intensity)
        if a <= 0.0:
            raise ValueError("total_intensity must be positive")
        return (a * self.chi_power * self.xi_power / 4.0) ** 2


def bp_plateau(loss: LossParams | None = None) -> float:
    """Large-delay pair-coincidence plateau: one half, rescaled under losses."""
    return 0.5 if loss is None else 4.0 * loss.a_bp_loss


def cp_plateau(pulse: CoherentSpectrum, loss: LossParams | None = None) -> float:
    """Large-delay coherent-pulse plateau: squared intensity, rescaled under losses."""
    if loss is None:
        return pulse.total_intensity**2
    return loss.a_cp_loss(pulse.total_intensity)


# ----- Closed forms, standard interferometer -----


def hom_bp_analytic(tau, spectrum: GaussianJointSpectrum):
    """Pair-coincidence rate of the standard interferometer.

    Rises from an exact zero at zero delay to the plateau of one half on
    the time scale set by the frequency-difference spread. The carrier
    and the sum spread drop out entirely.
    """
    t = np.asarray(tau, dtype=float)
    dm = spectrum.d_omega_minus
    return _as_rate(0.5 * (1.0 - np.exp(-2.0 * dm * dm * t * t)))


def hom_cp_analytic(tau, pulse: CoherentSpectrum):
    """Coincidence rate of the standard interferometer fed by identical pulses.

    Oscillates at twice the carrier under a Gaussian envelope and touches
    zero whenever the carrier phase does; the plateau is the squared
    pulse intensity.
    """
    t = np.asarray(tau, dtype=float)
    w0, dw = pulse.omega0, pulse.d_omega
    a2 = pulse.total_intensity**2
    return _as_rate(a2 * (1.0 - np.cos(2.0 * w0 * t) ** 2 * np.exp(-4.0 * dw * dw * t * t)))


def hom_cp_coarse_analytic(tau, pulse: CoherentSpectrum):
    """Fluctuation-averaged coherent-pulse rate: a dip to half the plateau."""
    t = np.asarray(tau, dtype=float)
    dw = pulse.d_omega
    a2 = pulse.total_intensity**2
    return _as_rate(a2 * (1.0 - 0.5 * np.exp(-4.0 * dw * dw * t * t)))


# ----- Closed forms, two-delay interferometer -----


def mhom_bp_analytic(tau1, tau2, theta: float, spectrum: GaussianJointSpectrum):
    """Pair-coincidence rate of the two-delay interferometer.

    Sum of a slow part shaped by the frequency-difference spread and an
    oscillatory part at four times the carrier in the second delay,
    damped by the frequency-sum spread. At zero delays the rate equals
    ``(1 + cos(2 theta)) / 2``; for ``theta = pi/2`` that zero is the only
    one on the surface.
    """
    t1 = np.asarray(tau1, dtype=float)
    t2 = np.asarray(tau2, dtype=float)
    dm, dp, w0 = spectrum.d_omega_minus, spectrum.d_omega_plus, spectrum.omega0

    def g(x):
        return np.exp(-2.0 * dm * dm * x * x)

    bracket = (
        4.0
        + 2.0 * g(t2)
        - g(t1 + t2)
        - g(t1 - t2)
        + 2.0
        * np.exp(-8.0 * dp * dp * t2 * t2)
        * (1.0 + g(t1))
        * np.cos(4.0 * t2 * w0 + 2.0 * theta)
    )
    return _as_rate(bracket / 8.0)


def mhom_cp_analytic(tau1, tau2, theta: float, pulse: CoherentSpectrum):
    """Coherent-pulse rate of the two-delay interferometer.

    Equals the squared intensity exactly at zero delays for every phase
    setting, which is what separates this source from the photon pair.
    Away from the origin it shows deep carrier-frequency fringes but
    never reaches zero.
    """
    t1 = np.asarray(tau1, dtype=float)
    t2 = np.asarray(tau2, dtype=float)
    w0, dw = pulse.omega0, pulse.d_omega
    a2 = pulse.total_intensity**2

    def e(x):
        return np.exp(-2.0 * dw * dw * x * x)

    b = np.cos(theta + 2.0 * w0 * (t2 + t1)) * e(t1 + t2) - np.cos(
        theta + 2.0 * w0 * (t2 - t1)
    ) * e(t1 - t2)
    return _as_rate(a2 * (1.0 - 0.25 * b * b))


def mhom_bp_coarse_analytic(tau1, tau2, spectrum: GaussianJointSpectrum):
    """Fluctuation-averaged pair rate of the two-delay interferometer.

    The carrier term averages away, leaving a ridge at zero second delay
    (three quarters high against the half plateau) flanked by two dips to
    three eighths where the second delay matches the first in magnitude.
    """
    t1 = np.asarray(tau1, dtype=float)
    t2 = np.asarray(tau2, dtype=float)
    dm = spectrum.d_omega_minus

    def g(x):
        return np.exp(-2.0 * dm * dm * x * x)

    return _as_rate((4.0 + 2.0 * g(t2) - g(t1 + t2) - g(t1 - t2)) / 8.0)


def mhom_cp_coarse_analytic(tau1, tau2, pulse: CoherentSpectrum):
    """Fluctuation-averaged coherent-pulse rate of the two-delay interferometer.

    Flat at the squared-intensity plateau except for two dips of an
    eighth where the delays match in magnitude, and a dip of a quarter at
    the origin where both Gaussian factors overlap.
    """
    t1 = np.asarray(tau1, dtype=float)
    t2 = np.asarray(tau2, dtype=float)
    dw = pulse.d_omega
    a2 = pulse.total_intensity**2
    out = 1.0 - (
        np.exp(-4.0 * dw * dw * (t1 + t2) * (t1 + t2))
        + np.exp(-4.0 * dw * dw * (t1 - t2) * (t1 - t2))
    ) / 8.0
    return _as_rate(a2 * out)


def mhom_bp_loss_coarse(tau1, tau2, spectrum: GaussianJointSpectrum, loss: LossParams):
    """Fluctuation-averaged pair rate with flat path losses.

    Input-path imbalance only rescales the surface; internal-path
    imbalance ``eta_b`` mixes in a reversed copy of the feature terms, so
    every feature visibility shrinks by ``1 - eta_b`` while the plateau
    stays at four times the loss scale.
    """
    t1 = np.asarray(tau1, dtype=float)
    t2 = np.asarray(tau2, dtype=float)
    dm = spectrum.d_omega_minus
    eta = loss.eta_b

    def g(x):
        return np.exp(-2.0 * dm * dm * x * x)

    bracket = (
        4.0
        + 2.0 * g(t2)
        - g(t1 + t2)
        - g(t1 - t2)
        + eta * (-2.0 * g(t2) + 4.0 * g(t1) + g(t1 + t2) + g(t1 - t2))
    )
    return _as_rate(loss.a_bp_loss * bracket)


def mhom_cp_loss_coarse(tau1, tau2, pulse: CoherentSpectrum, loss: LossParams):
    """Fluctuation-averaged coherent-pulse rate with flat path losses.

    Both imbalances enter. At full input-path imbalance the rate loses
    all dependence on the first delay and keeps a single dip in the
    second delay, scaled by ``1 - eta_b``.
    """
    t1 = np.asarray(tau1, dtype=float)
    t2 = np.asarray(tau2, dtype=float)
    dw = pulse.d_omega
    eta_a, eta_b = loss.eta_a, loss.eta_b
    e1 = np.exp(-4.0 * dw * dw * t1 * t1)
    e2 = np.exp(-4.0 * dw * dw * t2 * t2)
    d = (
        np.exp(-4.0 * dw * dw * (t1 - t2) * (t1 - t2))
        + np.exp(-4.0 * dw * dw * (t1 + t2) * (t1 + t2))
    ) / 8.0
    bracket = (
        1.0
        - d
        + eta_a * (d - 0.5 * e2)
        + eta_b * (d + 0.5 * e1)
        + eta_a * eta_b * (0.5 * (e2 - e1) - d)
    )
    return _as_rate(loss.a_cp_loss(pulse.total_intensity) * bracket)


# ----- Oracle grids -----


def _resolved_nodes(half_width: float, tau_max: float, n: int | None) -> int:
    """Node count resolving phases up to ``2 tau_max`` across the grid."""
    if n is not None:
        return int(n)
    base = 257
    if tau_max > 0.0:
        # keep at least 16 samples per period of exp(2 i omega tau_max)
        need = int(math.ceil(32.0 * half_width * tau_max / math.pi)) + 1
        if need > base:
            base = need if need % 2 == 1 else need + 1
    return base


def pair_grid(spectrum: GaussianJointSpectrum, tau_max: float = 4.0,
              n: int | None = None) -> FrequencyGrid:
    """Quadrature grid sized for a pair spectrum and a maximum delay.

    Spans six marginal widths around the carrier, which also covers six
    widths of the difference variable along the anti-diagonal. The node
    count grows with ``tau_max`` so delay phases stay resolved.
    """
    half_width = 6.0 * spectrum.local_spread
    return make_grid(spectrum.omega0, half_width,
                     _resolved_nodes(half_width, abs(float(tau_max)), n))


def pulse_grid(pulse: CoherentSpectrum, tau_max: float = 4.0,
               n: int | None = None) -> FrequencyGrid:
    """Quadrature grid sized for a pulse spectrum and a maximum delay."""
    half_width = 6.0 * pulse.d_omega
    return make_grid(pulse.omega0, half_width,
                     _resolved_nodes(half_width, abs(float(tau_max)), n))


# ----- Quadrature oracles -----


def bp_rate_oracle(amplitude: np.ndarray, grid: FrequencyGrid,
                   network: OpticalNetwork) -> float:
    """Pair-coincidence rate by direct double quadrature.

    ``amplitude`` is the joint spectral amplitude tabulated on
    ``grid x grid`` and must be normalized to one there. The two-photon
    component reaching distinct detectors carries the amplitude

        ``amp(w, w') S11(w) S22(w') + amp(w', w) S12(w) S21(w')``

    and the rate is the double integral of its squared modulus. The
    expression needs no unitarity, so lossy chains are handled by the
    same projection: terms with an absorbed photon cannot produce a
    coincidence.
    """
    psi = np.asarray(amplitude, dtype=complex)
    n = grid.size
    if psi.shape != (n, n):
        raise ValueError(f"amplitude must be tabulated on the full grid, expected {(n, n)}, got {psi.shape}")
    w = grid.weights
    norm = float(np.einsum("i,j,ij->", w, w, np.abs(psi) ** 2).real)
    if abs(norm - 1.0) > 1e-6:
        raise ValueError(f"joint amplitude must be normalized on the grid, got norm {norm:.8g}")
    s = transfer_at(network, grid.nodes)
    coinc = psi * np.outer(s[0, 0], s[1, 1]) + psi.T * np.outer(s[0, 1], s[1, 0])
    return float(np.einsum("i,j,ij->", w, w, np.abs(coinc) ** 2).real)


def cp_rate_oracle(alpha: np.ndarray, grid: FrequencyGrid,
                   network: OpticalNetwork) -> float:
    """Coincidence rate for identical coherent amplitudes on both inputs.

    The outputs stay coherent with amplitudes ``(Si1 + Si2) alpha``, so
    the coincidence rate is the product of the two output intensities.
    Feeding the two ports differently is outside this model, which is why
    the signature accepts a single tabulated amplitude.
    """
    a = np.asarray(alpha, dtype=complex)
    if a.shape != (grid.size,):
        raise ValueError(f"alpha must be tabulated on the grid, expected {(grid.size,)}, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("alpha must be finite")
    s = transfer_at(network, grid.nodes)
    g1 = (s[0, 0] + s[0, 1]) * a
    g2 = (s[1, 0] + s[1, 1]) * a
    n1 = float(grid.integrate(np.abs(g1) ** 2))
    n2 = float(grid.integrate(np.abs(g2) ** 2))
    return n1 * n2


def cl_s_rate(mixture, grid: FrequencyGrid, tau1: float, tau2: float,
              theta: float) -> float:
    """Two-delay rate for a statistical mixture of symmetric pulse pairs.

    ``mixture`` is a sequence of ``(weight, alpha)`` entries with positive
    weights summing to one, each ``alpha`` tabulated on the grid and fed
    identically to both inputs. Every component contributes its squared
    intensity minus a squared interference overlap, so the total is
    strictly positive at zero delays for any mixture.
    """
    items = list(mixture)
    if not items:
        raise ValueError("mixture must contain at least one component")
    weights = np.array([float(wk) for wk, _ in items])
    if np.any(weights <= 0.0):
        raise ValueError("mixture weights must be positive")
    if abs(weights.sum() - 1.0) > 1e-9:
        raise ValueError(f"mixture weights must sum to 1, got {weights.sum():.12g}")
    om = grid.nodes
    mod = np.sin(2.0 * om * tau2 + theta) * np.sin(2.0 * om * tau1)
    total = 0.0
    for wk, alpha in items:
        p = np.abs(np.asarray(alpha, dtype=complex)) ** 2
        if p.shape != om.shape:
            raise ValueError("each mixture amplitude must be tabulated on the grid")
        intensity = float(grid.integrate(p))
        overlap = float(grid.integrate(p * mod))
        total += float(wk) * (intensity * intensity - overlap * overlap)
    return float(_as_rate(total))


# ----- Coarse graining -----


def _gauss_nodes(window: float, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x * (0.5 * window), w * 0.5


def box_average_curve(rate, tau, window: float, n: int = 129):
    """Plain sliding-box average of a rate function, no regime policy.

    Averages ``rate`` over ``[tau - window/2, tau + window/2]`` with an
    ``n``-point Gauss-Legendre rule; ``n`` above half the phase swept by
    the fastest fringe across the window gives near-exact averages.
    """
    if window <= 0.0:
        raise ValueError("window must be positive")
    t = np.asarray(tau, dtype=float)
    x, w = _gauss_nodes(window, int(n))
    vals = rate(t[..., None] + x)
    out = np.tensordot(np.asarray(vals, dtype=float), w, axes=([-1], [0]))
    return out if np.ndim(out) else float(out)


def box_average_surface(rate2, tau1, tau2, window: float, n: int = 129):
    """Two-axis sliding-box average of a two-delay rate function."""
    if window <= 0.0:
        raise ValueError("window must be positive")
    t1 = np.asarray(tau1, dtype=float)
    t2 = np.asarray(tau2, dtype=float)
    x, w = _gauss_nodes(window, int(n))
    vals = rate2(t1[..., None, None] + x[:, None], t2[..., None, None] + x[None, :])
    out = np.tensordot(np.asarray(vals, dtype=float), np.outer(w, w), axes=([-2, -1], [0, 1]))
    return out if np.ndim(out) else float(out)


def _check_window(window: float, carrier: float, envelope: float) -> None:
    if window <= 0.0 or carrier <= 0.0 or envelope <= 0.0:
        raise ValueError("window, carrier and envelope must all be positive")
    if window * carrier < 20.0:
        raise RegimeError(
            "averaging window too short to wash out carrier fringes: "
            f"window * carrier = {window * carrier:.4g} < 20"
        )
    if window * envelope > 0.2:
        raise RegimeError(
            "averaging window wide enough to smear the envelope: "
            f"window * envelope = {window * envelope:.4g} > 0.2"
        )


def _auto_nodes(window: float, carrier: float) -> int:
    # fastest fringe sweeps 4 * carrier * window radians across the window
    return max(48, int(math.ceil(2.0 * carrier * window)) + 16)


def _curve_callable(rate):
    if callable(rate):
        return rate, None
    if isinstance(rate, RateCurve):
        lo, hi = float(rate.axis[0]), float(rate.axis[-1])

        def f(t):
            return np.interp(t, rate.axis, rate.values)

        return f, (lo, hi)
    raise TypeError("rate must be a callable or a RateCurve")


def coarse_grain_curve(rate, tau, window: float, *, carrier: float,
                       envelope: float, n: int | None = None):
    """Average a rate curve over delay fluctuations of width ``window``.

    The window must sit between the carrier period and the envelope time
    scale: at least twenty carrier radians wide, at most a fifth of the
    envelope time. Outside that band the average would either keep
    carrier fringes or wash out the envelope, so the call is rejected
    with a ``RegimeError`` naming the violated bound.
    """
    _check_window(window, carrier, envelope)
    f, support = _curve_callable(rate)
    t = np.asarray(tau, dtype=float)
    if support is not None:
        lo, hi = support
        if np.min(t) - 0.5 * window < lo or np.max(t) + 0.5 * window > hi:
            raise ValueError("tabulated curve does not cover the averaging window")
    return _as_rate(box_average_curve(f, t, window, n=n or _auto_nodes(window, carrier)))


def coarse_grain_surface(rate2, tau1, tau2, window: float, *, carrier: float,
                         envelope: float, n: int | None = None):
    """Average a two-delay rate over independent fluctuations of both delays.

    Both delays jitter with the same window. Averaging over the pair is
    what removes every cross fringe; a single-axis average would leave
    carrier terms in the other delay untouched. Same regime bounds as
    ``coarse_grain_curve``.
    """
    _check_window(window, carrier, envelope)
    if not callable(rate2):
        raise TypeError("rate2 must be callable on (tau1, tau2)")
    return _as_rate(
        box_average_surface(rate2, tau1, tau2, window, n=n or _auto_nodes(window, carrier))
    )
