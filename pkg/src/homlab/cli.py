"""Command-line front end emitting CSV data files and JSON reports.

Two subcommands:

``homlab figure PRESET [--theta VAL] [--n N] [--out DIR]``
    Emit the data files of one preset plot (see the figures module).

``homlab run CONFIG [--out DIR]``
    Run a scenario described by a versioned JSON document.

Configuration documents share the envelope ``{"version": 1, "mode":
...}`` with mode-specific fields; unknown fields are rejected with the
offending field path. Modes:

* ``hom``: single-delay curve. Fields: ``source`` (``bp``, ``cp`` or
  ``cp_coarse``), ``spectrum`` or ``pulse``, ``tau`` range, optional
  ``stem``.
* ``mhom``: two-delay surface. Fields: ``source`` (``bp``/``cp``),
  optional ``theta`` (number or ``"pi/2"`` style string), model,
  ``tau1``/``tau2`` ranges.
* ``coarse``: fluctuation-averaged two-delay surface from the averaged
  closed forms; with an explicit ``window`` the oscillatory closed form
  is box-averaged instead (optional ``theta`` and ``window_n`` apply
  only there).
* ``loss``: averaged two-delay surface with path losses. Adds ``loss``
  with amplitudes ``xi1, xi2, chi1, chi2`` (number or ``[re, im]``).
* ``sense``: two-offset recovery scan. Fields: ``source``, model,
  ``scenario`` (``dl1_0``, ``dl2_0``, optional ``x1``, ``c``), optional
  ``loss``, ``n``, ``span``.
* ``qps``: simulated position-recovery scan. Fields: ``target`` (``r``,
  ``gamma``, ``vartheta``), ``spectrum``, optional ``loss``, ``c``,
  ``n``, ``surface_n``.
* ``figure``: same as the figure subcommand. Fields: ``preset``,
  optional ``theta``, ``n``.

Ranges are ``{"min": a, "max": b, "n": k}``. All emitted rates are
divided by the model plateau; every artifact gets the parameters echoed
into a JSON sidecar or report. Outputs are written atomically and are
byte-identical for identical configurations (nothing in the pipeline is
randomized). Exit codes: 0 success, 2 validation error, 3 averaging
regime violation, 1 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import math
import numbers
import os
import re
import sys
from pathlib import Path

import numpy as np

from .figures import FIGURE_PRESETS, FigureBundle, build_figure
from .qps import QpsTarget, qps_scan
from .rates import (
    LossParams,
    RateCurve,
    RateSurface,
    RegimeError,
    bp_plateau,
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
from .sensing import SensingScenario, run_sensing
from .spectra import CoherentSpectrum, GaussianJointSpectrum

__all__ = [
    "CONFIG_VERSION",
    "ConfigError",
    "parse_angle",
    "run_figure",
    "run_scenario",
    "main",
]

CONFIG_VERSION = 1
_MODES = ("hom", "mhom", "coarse", "loss", "sense", "qps", "figure")
_UNITS = {
    "delay": "1/d_omega_minus",
    "rate": "rescaled by the plateau value",
    "c": "same length unit as delays unless set in the scenario",
}
_STEM_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")

_MISSING = object()


class ConfigError(ValueError):
    """Configuration rejected; the message names the offending field."""


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def _require_mapping(value, path: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{path or 'config'}: expected a JSON object")
    return value


def _check_keys(cfg: dict, path: str, required: tuple, optional: tuple) -> None:
    unknown = sorted(set(cfg) - set(required) - set(optional))
    if unknown:
        where = path or "config"
        raise ConfigError(f"{where}: unknown field(s) {', '.join(map(repr, unknown))}")
    for key in required:
        if key not in cfg:
            raise ConfigError(f"{_join(path, key)}: required field is missing")


def _as_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise ConfigError(f"{path}: expected a number")
    out = float(value)
    if not math.isfinite(out):
        raise ConfigError(f"{path}: expected a finite number")
    return out


def _as_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ConfigError(f"{path}: expected an integer")
    return int(value)


def _number_field(cfg: dict, path: str, key: str, default=_MISSING) -> float:
    if key not in cfg:
        if default is _MISSING:
            raise ConfigError(f"{_join(path, key)}: required field is missing")
        return default
    return _as_number(cfg[key], _join(path, key))


def parse_angle(value, path: str = "theta") -> float:
    """Angle from a JSON value: a plain number or a 'pi'-style string.

    Accepted strings: ``"pi"``, ``"-pi"``, ``"pi/2"``, ``"3pi/4"``,
    ``"0.5pi"``, ``"1.25"`` (spaces and ``*`` are ignored).
    """
    if isinstance(value, bool):
        raise ConfigError(f"{path}: expected an angle, got a boolean")
    if isinstance(value, numbers.Real):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{path}: expected a number or a 'pi'-style string")
    text = value.strip().lower().replace(" ", "").replace("*", "")
    try:
        if "pi" in text:
            head, _, tail = text.partition("pi")
            if head in ("", "+"):
                coef = 1.0
            elif head == "-":
                coef = -1.0
            else:
                coef = float(head)
            den = 1.0
            if tail:
                if not tail.startswith("/"):
                    raise ValueError
                den = float(tail[1:])
                if den == 0.0:
                    raise ValueError
            return coef * math.pi / den
        return float(text)
    except ValueError:
        raise ConfigError(f"{path}: cannot parse angle {value!r}") from None


# ----- Model parsing -----


def _wrap_model_error(path: str):
    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if (
                exc_type is not None
                and issubclass(exc_type, (ValueError, TypeError))
                and not issubclass(exc_type, ConfigError)
            ):
                raise ConfigError(f"{path}: {exc}") from None
            return False

    return _Ctx()


def _parse_spectrum(cfg, path: str) -> GaussianJointSpectrum:
    cfg = _require_mapping(cfg, path)
    _check_keys(cfg, path, ("omega0", "d_omega_plus", "d_omega_minus"), ())
    kwargs = {key: _as_number(cfg[key], _join(path, key)) for key in cfg}
    with _wrap_model_error(path):
        return GaussianJointSpectrum(**kwargs)


def _parse_pulse(cfg, path: str) -> CoherentSpectrum:
    cfg = _require_mapping(cfg, path)
    _check_keys(cfg, path, ("omega0", "d_omega"), ("total_intensity",))
    kwargs = {key: _as_number(cfg[key], _join(path, key)) for key in cfg}
    with _wrap_model_error(path):
        return CoherentSpectrum(**kwargs)


def _parse_amplitude(value, path: str) -> complex:
    if isinstance(value, list):
        if len(value) != 2:
            raise ConfigError(f"{path}: complex amplitude needs [re, im]")
        return complex(_as_number(value[0], path), _as_number(value[1], path))
    return complex(_as_number(value, path))


def _parse_loss(cfg, path: str) -> LossParams:
    cfg = _require_mapping(cfg, path)
    names = ("xi1", "xi2", "chi1", "chi2")
    _check_keys(cfg, path, (), names)
    kwargs = {key: _parse_amplitude(cfg[key], _join(path, key)) for key in cfg}
    with _wrap_model_error(path):
        return LossParams(**kwargs)


def _parse_range(cfg, path: str) -> np.ndarray:
    cfg = _require_mapping(cfg, path)
    _check_keys(cfg, path, ("min", "max", "n"), ())
    lo = _as_number(cfg["min"], _join(path, "min"))
    hi = _as_number(cfg["max"], _join(path, "max"))
    n = _as_int(cfg["n"], _join(path, "n"))
    if hi <= lo:
        raise ConfigError(f"{path}: 'max' must exceed 'min'")
    if n < 2:
        raise ConfigError(f"{_join(path, 'n')}: need at least 2 samples")
    return np.linspace(lo, hi, n)


def _parse_scenario(cfg, path: str) -> SensingScenario:
    cfg = _require_mapping(cfg, path)
    _check_keys(cfg, path, ("dl1_0", "dl2_0"), ("x1", "c"))
    with _wrap_model_error(path):
        return SensingScenario(
            dl1_0=_as_number(cfg["dl1_0"], _join(path, "dl1_0")),
            dl2_0=_as_number(cfg["dl2_0"], _join(path, "dl2_0")),
            x1=_number_field(cfg, path, "x1", 0.0),
            c=_number_field(cfg, path, "c", 1.0),
        )


def _parse_target(cfg, path: str) -> QpsTarget:
    cfg = _require_mapping(cfg, path)
    _check_keys(cfg, path, ("r", "gamma", "vartheta"), ())
    with _wrap_model_error(path):
        return QpsTarget(
            r=_as_number(cfg["r"], _join(path, "r")),
            gamma=parse_angle(cfg["gamma"], _join(path, "gamma")),
            vartheta=parse_angle(cfg["vartheta"], _join(path, "vartheta")),
        )


def _parse_source(cfg, path: str, choices: tuple) -> str:
    if "source" not in cfg:
        raise ConfigError(f"{_join(path, 'source')}: required field is missing")
    source = cfg["source"]
    if source not in choices:
        raise ConfigError(
            f"{_join(path, 'source')}: expected one of {', '.join(choices)}, got {source!r}"
        )
    return source


def _parse_stem(cfg, default: str) -> str:
    stem = cfg.get("stem", default)
    if not isinstance(stem, str) or not _STEM_RE.match(stem):
        raise ConfigError(f"stem: expected a plain file-name stem, got {stem!r}")
    return stem


# ----- Serialization -----


def _fmt(x) -> str:
    return "%.12g" % float(x)


def curve_csv(curve: RateCurve, label: str = "delay") -> str:
    scaled = np.asarray(curve.values, dtype=float) / curve.plateau
    lines = [f"{label},rate_rescaled"]
    lines.extend(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(curve.axis, scaled))
    return "\n".join(lines) + "\n"


def surface_csv(surface: RateSurface, labels=("tau1", "tau2")) -> str:
    scaled = np.asarray(surface.values, dtype=float) / surface.plateau
    lines = [f"{labels[0]},{labels[1]},rate_rescaled"]
    for i, t1 in enumerate(surface.tau1_axis):
        row = scaled[i]
        lines.extend(
            f"{_fmt(t1)},{_fmt(t2)},{_fmt(y)}"
            for t2, y in zip(surface.tau2_axis, row)
        )
    return "\n".join(lines) + "\n"


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _spectrum_dict(s: GaussianJointSpectrum) -> dict:
    return {
        "omega0": s.omega0,
        "d_omega_plus": s.d_omega_plus,
        "d_omega_minus": s.d_omega_minus,
    }


def _pulse_dict(p: CoherentSpectrum) -> dict:
    return {
        "omega0": p.omega0,
        "d_omega": p.d_omega,
        "total_intensity": p.total_intensity,
    }


def _loss_dict(loss: LossParams | None):
    if loss is None:
        return None
    out = {}
    for name in ("xi1", "xi2", "chi1", "chi2"):
        z = getattr(loss, name)
        out[name] = z.real if z.imag == 0.0 else [z.real, z.imag]
    out["eta_a"] = loss.eta_a
    out["eta_b"] = loss.eta_b
    return out


def _range_dict(axis: np.ndarray) -> dict:
    return {"min": float(axis[0]), "max": float(axis[-1]), "n": int(axis.size)}


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    except OSError:
        tmp.unlink(missing_ok=True)
        raise


def _write_artifacts(out_dir: Path, artifacts) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in artifacts:
        target = out_dir / name
        _atomic_write(target, text)
        written.append(target)
    return written


# ----- Mode pipelines (pure: config -> artifact list) -----


def _model_for(cfg: dict, kind: str):
    """Model object plus its record, honoring the bp/cp field split."""
    if kind == "bp":
        if "pulse" in cfg:
            raise ConfigError("pulse: not used when the source is 'bp'")
        if "spectrum" not in cfg:
            raise ConfigError("spectrum: required field is missing")
        spectrum = _parse_spectrum(cfg["spectrum"], "spectrum")
        return spectrum, {"spectrum": _spectrum_dict(spectrum)}
    if "spectrum" in cfg:
        raise ConfigError("spectrum: not used for pulse sources")
    if "pulse" not in cfg:
        raise ConfigError("pulse: required field is missing")
    pulse = _parse_pulse(cfg["pulse"], "pulse")
    return pulse, {"pulse": _pulse_dict(pulse)}


def _build_hom(cfg: dict) -> list:
    _check_keys(cfg, "", ("version", "mode", "source", "tau"),
                ("spectrum", "pulse", "stem"))
    source = _parse_source(cfg, "", ("bp", "cp", "cp_coarse"))
    model, record = _model_for(cfg, "bp" if source == "bp" else "cp")
    axis = _parse_range(cfg.get("tau"), "tau")
    if source == "bp":
        plateau = bp_plateau()
        curve = sample_curve(lambda t: hom_bp_analytic(t, model), axis, plateau)
    elif source == "cp":
        plateau = cp_plateau(model)
        curve = sample_curve(lambda t: hom_cp_analytic(t, model), axis, plateau)
    else:
        plateau = cp_plateau(model)
        curve = sample_curve(lambda t: hom_cp_coarse_analytic(t, model), axis, plateau)
    stem = _parse_stem(cfg, f"hom_{source}")
    params = {
        "mode": "hom",
        "source": source,
        "tau": _range_dict(axis),
        "plateau": plateau,
        "units": _UNITS,
        "files": [f"{stem}.csv"],
        **record,
    }
    return [(f"{stem}.csv", curve_csv(curve)), (f"{stem}.json", _json_text(params))]


def _build_mhom(cfg: dict) -> list:
    _check_keys(cfg, "", ("version", "mode", "source", "tau1", "tau2"),
                ("spectrum", "pulse", "theta", "stem"))
    source = _parse_source(cfg, "", ("bp", "cp"))
    model, record = _model_for(cfg, source)
    theta = parse_angle(cfg.get("theta", 0.0), "theta")
    t1 = _parse_range(cfg.get("tau1"), "tau1")
    t2 = _parse_range(cfg.get("tau2"), "tau2")
    if source == "bp":
        plateau = bp_plateau()
        surface = sample_surface(
            lambda a, b: mhom_bp_analytic(a, b, theta, model), t1, t2, plateau)
    else:
        plateau = cp_plateau(model)
        surface = sample_surface(
            lambda a, b: mhom_cp_analytic(a, b, theta, model), t1, t2, plateau)
    stem = _parse_stem(cfg, f"mhom_{source}")
    params = {
        "mode": "mhom",
        "source": source,
        "theta": theta,
        "tau1": _range_dict(t1),
        "tau2": _range_dict(t2),
        "plateau": plateau,
        "units": _UNITS,
        "files": [f"{stem}.csv"],
        **record,
    }
    return [(f"{stem}.csv", surface_csv(surface)), (f"{stem}.json", _json_text(params))]


def _build_coarse(cfg: dict) -> list:
    _check_keys(cfg, "", ("version", "mode", "source", "tau1", "tau2"),
                ("spectrum", "pulse", "window", "window_n", "theta", "stem"))
    source = _parse_source(cfg, "", ("bp", "cp"))
    model, record = _model_for(cfg, source)
    t1 = _parse_range(cfg.get("tau1"), "tau1")
    t2 = _parse_range(cfg.get("tau2"), "tau2")
    window = None
    if "window" in cfg:
        window = _as_number(cfg["window"], "window")
        if window <= 0.0:
            raise ConfigError("window: must be positive")
    for key in ("theta", "window_n"):
        if key in cfg and window is None:
            raise ConfigError(f"{key}: only meaningful together with 'window'")
    theta = parse_angle(cfg.get("theta", 0.0), "theta")
    window_n = _as_int(cfg["window_n"], "window_n") if "window_n" in cfg else None

    if source == "bp":
        plateau = bp_plateau()
        carrier = model.omega0
        envelope = max(model.d_omega_minus, 2.0 * model.d_omega_plus)

        def exact(a, b):
            return mhom_bp_analytic(a, b, theta, model)

        def coarse(a, b):
            return mhom_bp_coarse_analytic(a, b, model)

    else:
        plateau = cp_plateau(model)
        carrier = model.omega0
        envelope = math.sqrt(2.0) * model.d_omega

        def exact(a, b):
            return mhom_cp_analytic(a, b, theta, model)

        def coarse(a, b):
            return mhom_cp_coarse_analytic(a, b, model)

    if window is None:
        surface = sample_surface(coarse, t1, t2, plateau)
    else:
        values = coarse_grain_surface(
            exact, t1[:, None], t2[None, :], window,
            carrier=carrier, envelope=envelope, n=window_n)
        surface = RateSurface(t1, t2, values, plateau)
    stem = _parse_stem(cfg, f"coarse_{source}")
    params = {
        "mode": "coarse",
        "source": source,
        "tau1": _range_dict(t1),
        "tau2": _range_dict(t2),
        "plateau": plateau,
        "units": _UNITS,
        "files": [f"{stem}.csv"],
        **record,
    }
    if window is not None:
        params["window"] = window
        params["theta"] = theta
        if window_n is not None:
            params["window_n"] = window_n
    return [(f"{stem}.csv", surface_csv(surface)), (f"{stem}.json", _json_text(params))]


def _build_loss(cfg: dict) -> list:
    _check_keys(cfg, "", ("version", "mode", "source", "tau1", "tau2", "loss"),
                ("spectrum", "pulse", "stem"))
    source = _parse_source(cfg, "", ("bp", "cp"))
    model, record = _model_for(cfg, source)
    loss = _parse_loss(cfg.get("loss"), "loss")
    t1 = _parse_range(cfg.get("tau1"), "tau1")
    t2 = _parse_range(cfg.get("tau2"), "tau2")
    if source == "bp":
        plateau = bp_plateau(loss)
        surface = sample_surface(
            lambda a, b: mhom_bp_loss_coarse(a, b, model, loss), t1, t2, plateau)
    else:
        plateau = cp_plateau(model, loss)
        surface = sample_surface(
            lambda a, b: mhom_cp_loss_coarse(a, b, model, loss), t1, t2, plateau)
    stem = _parse_stem(cfg, f"loss_{source}")
    params = {
        "mode": "loss",
        "source": source,
        "loss": _loss_dict(loss),
        "tau1": _range_dict(t1),
        "tau2": _range_dict(t2),
        "plateau": plateau,
        "units": _UNITS,
        "files": [f"{stem}.csv"],
        **record,
    }
    return [(f"{stem}.csv", surface_csv(surface)), (f"{stem}.json", _json_text(params))]


def _build_sense(cfg: dict) -> list:
    _check_keys(cfg, "", ("version", "mode", "source", "scenario"),
                ("spectrum", "pulse", "loss", "n", "span", "stem"))
    source = _parse_source(cfg, "", ("bp", "cp"))
    model, record = _model_for(cfg, source)
    scenario = _parse_scenario(cfg.get("scenario"), "scenario")
    loss = _parse_loss(cfg["loss"], "loss") if "loss" in cfg else None
    n = _as_int(cfg["n"], "n") if "n" in cfg else 2001
    span = _as_number(cfg["span"], "span") if "span" in cfg else None
    with _wrap_model_error("scenario"):
        result = run_sensing(scenario, source, model, loss=loss, n=n, span=span)
    stem = _parse_stem(cfg, f"sense_{source}")
    dl1_eff = scenario.dl1_0 - 2.0 * scenario.x1
    report = {
        "mode": "sense",
        "source": source,
        "scenario": {
            "dl1_0": scenario.dl1_0,
            "dl2_0": scenario.dl2_0,
            "x1": scenario.x1,
            "c": scenario.c,
        },
        "loss": _loss_dict(loss),
        "plateau": result.curve.plateau,
        "extrema": result.report.to_dict(),
        "recovered": {"dl1": result.dl1_recovered, "dl2": result.dl2_recovered},
        "residuals": {
            "dl1": result.dl1_recovered - abs(dl1_eff),
            "dl2": result.dl2_recovered - scenario.dl2_0,
        },
        "units": _UNITS,
        "files": [f"{stem}_scan.csv"],
        **record,
    }
    return [
        (f"{stem}_scan.csv", curve_csv(result.curve, label="x2")),
        (f"{stem}_report.json", _json_text(report)),
    ]


def _build_qps(cfg: dict) -> list:
    _check_keys(cfg, "", ("version", "mode", "target", "spectrum"),
                ("loss", "c", "n", "surface_n", "stem"))
    target = _parse_target(cfg.get("target"), "target")
    spectrum = _parse_spectrum(cfg.get("spectrum"), "spectrum")
    loss = _parse_loss(cfg["loss"], "loss") if "loss" in cfg else None
    c = _number_field(cfg, "", "c", 1.0)
    n = _as_int(cfg["n"], "n") if "n" in cfg else None
    surface_n = _as_int(cfg["surface_n"], "surface_n") if "surface_n" in cfg else 81
    with _wrap_model_error("target"):
        result = qps_scan(target, spectrum, loss=loss, c=c, n=n,
                          surface_n=surface_n)
    stem = _parse_stem(cfg, "qps")
    report = {
        "mode": "qps",
        "target": {"r": target.r, "gamma": target.gamma, "vartheta": target.vartheta},
        "spectrum": _spectrum_dict(spectrum),
        "loss": _loss_dict(loss),
        "c": c,
        "recovered": {
            "r": result.recovered.r,
            "gamma": result.recovered.gamma,
            "vartheta": result.recovered.vartheta,
            "degenerate_azimuth": result.degenerate_azimuth,
        },
        "controls": {
            "s1": result.s1,
            "s2": result.s2,
            "sign_u": result.sign_u,
            "sign_v": result.sign_v,
            "d1": result.d1,
            "d2": result.d2,
        },
        "residuals": {
            "gamma_error": result.gamma_error,
            "vartheta_error": result.vartheta_error,
            "position_error": result.position_error,
        },
        "extrema": result.report.to_dict(),
        "units": _UNITS,
        "files": [f"{stem}_scan.csv", f"{stem}_surface.csv"],
    }
    return [
        (f"{stem}_scan.csv", curve_csv(result.curve, label="s2_control")),
        (f"{stem}_surface.csv",
         surface_csv(result.surface, labels=("s1_control", "s2_control"))),
        (f"{stem}_report.json", _json_text(report)),
    ]


def _bundle_artifacts(bundle: FigureBundle) -> list:
    artifacts = []
    for ds in bundle.datasets:
        if ds.kind == "curve":
            artifacts.append((ds.name + ".csv", curve_csv(ds.curve, ds.labels[0])))
        else:
            artifacts.append((ds.name + ".csv", surface_csv(ds.surface, ds.labels)))
    params = dict(bundle.params)
    params["files"] = [name for name, _ in artifacts]
    artifacts.append((bundle.preset + ".json", _json_text(params)))
    return artifacts


def _build_figure_mode(cfg: dict) -> list:
    _check_keys(cfg, "", ("version", "mode", "preset"), ("theta", "n"))
    preset = cfg.get("preset")
    if preset not in FIGURE_PRESETS:
        raise ConfigError(
            f"preset: expected one of {', '.join(FIGURE_PRESETS)}, got {preset!r}"
        )
    theta = parse_angle(cfg["theta"], "theta") if "theta" in cfg else None
    n = _as_int(cfg["n"], "n") if "n" in cfg else None
    with _wrap_model_error("preset"):
        bundle = build_figure(preset, theta=theta, n=n)
    return _bundle_artifacts(bundle)


_BUILDERS = {
    "hom": _build_hom,
    "mhom": _build_mhom,
    "coarse": _build_coarse,
    "loss": _build_loss,
    "sense": _build_sense,
    "qps": _build_qps,
    "figure": _build_figure_mode,
}


# ----- Entry points -----


def run_figure(preset: str, out_dir, theta: float | None = None,
               n: int | None = None) -> list[Path]:
    """Build one preset and write its files; returns the written paths."""
    with _wrap_model_error("figure"):
        bundle = build_figure(preset, theta=theta, n=n)
    return _write_artifacts(Path(out_dir), _bundle_artifacts(bundle))


def run_scenario(config: dict, out_dir) -> list[Path]:
    """Validate a configuration document, run it, write its artifacts.

    Everything is computed before the first byte is written, so a
    rejected configuration leaves no partial files behind.
    """
    config = _require_mapping(config, "")
    if "version" not in config:
        raise ConfigError("version: required field is missing")
    version = config["version"]
    if version != CONFIG_VERSION:
        raise ConfigError(
            f"version: expected {CONFIG_VERSION}, got {version!r}"
        )
    mode = config.get("mode")
    if mode not in _MODES:
        raise ConfigError(f"mode: expected one of {', '.join(_MODES)}, got {mode!r}")
    artifacts = _BUILDERS[mode](config)
    return _write_artifacts(Path(out_dir), artifacts)


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read configuration {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON: {exc}") from None


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="homlab",
        description="Photon-coincidence data generator for one- and "
                    "two-delay interferometers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fig = sub.add_parser("figure", help="emit the data files of a preset plot")
    fig.add_argument("preset", choices=FIGURE_PRESETS)
    fig.add_argument("--theta", default=None,
                     help="achromatic phase, e.g. 'pi/2' (fig3 and fig4 only)")
    fig.add_argument("--n", type=int, default=None, help="samples per axis")
    fig.add_argument("--out", default=".", help="output directory")

    run = sub.add_parser("run", help="run a JSON scenario configuration")
    run.add_argument("config", help="path to the JSON configuration document")
    run.add_argument("--out", default=".", help="output directory")

    args = parser.parse_args(argv)
    try:
        if args.command == "figure":
            theta = None if args.theta is None else parse_angle(args.theta, "--theta")
            written = run_figure(args.preset, args.out, theta=theta, n=args.n)
        else:
            written = run_scenario(_load_config(args.config), args.out)
    except RegimeError as exc:
        print(f"regime error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
