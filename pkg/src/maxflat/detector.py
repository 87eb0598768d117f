"""Teager-Kaiser pulse detectors and the Monte-Carlo ROC study.

Five detector pipelines are provided:

- FIR_NUL_NC: the bare non-causal three-point Teager-Kaiser (TK) operator,
  no pre-filter.
- IIR_BW0: causal Butterworth reference smoother (the stable half of a
  2K = 12 zero-phase prototype, discretized by the bilinear method) followed
  by causal three-point TK.
- IIR_BW1: the one-stage smoother/differentiator filterbank (K_w_dc = 3,
  K_w_nb = 3, K = 9, optimal delay); TK energy formed directly from the
  derivative outputs.
- IIR_BW0_NC: zero-phase Butterworth (2K = 8, bilinear), realized as a
  forward pass plus a time-reversed pass of the causal half, followed by
  non-causal TK.
- IIR_BW1_NC: zero-delay two-sided filterbank smoother (K_w_dc = 4,
  K_w_nb = 2 over all 2K = 8 impulse-invariant Butterworth poles) followed
  by non-causal TK.

The Monte-Carlo study measures detectability of a damped-oscillator pulse
of unknown frequency buried in narrowband interference at 0.07 cyc/smp.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Tuple

import numpy as np
from scipy.signal import lfilter

from .butter import butterworth_s_poles
from .design import DesignSpec, FilterbankDesign, design_filterbank, \
    noncausal_design
from .procsim import InputSpec, discretize_process, generate_waveform, \
    scenario_params
from .realize import run_filter, run_noncausal

#: Sampling rate of the detection study (Hz).
DETECT_FS = 1000.0
#: Samples per Monte-Carlo instance.
DETECT_N = 1000
#: Deterministic pulse arrival sample.
PULSE_SAMPLE = 400
#: True-detection search window (inclusive).
TRUE_WINDOW = (400, 500)
#: False-alarm search window (inclusive).
FALSE_WINDOW = (200, 800)
#: Pulse and interference powers.
P_SIG = 1.0
P_INT = 0.1

DETECTOR_TAGS = ("FIR_NUL_NC", "IIR_BW0", "IIR_BW1", "IIR_BW0_NC",
                 "IIR_BW1_NC")


@dataclass(frozen=True)
class RocCurve:
    """Empirical ROC: (P_fa, P_d) pairs swept over thresholds, plus AUC."""

    p_fa: np.ndarray
    p_d: np.ndarray
    auc: float


def three_point_kernels(t_s: float) -> Tuple[np.ndarray, np.ndarray,
                                             np.ndarray]:
    """Centered three-point smoothing/derivative kernels.

    h0 passes the (delayed) sample through, h1 is the central first
    difference scaled by 1/T_s, h2 the second difference scaled by 1/T_s^2.
    """
    if t_s <= 0:
        raise ValueError("T_s must be positive")
    h0 = np.array([0.0, 1.0, 0.0])
    h1 = np.array([0.5, 0.0, -0.5]) / t_s
    h2 = np.array([1.0, -2.0, 1.0]) / t_s ** 2
    return h0, h1, h2


def tk_energy_threepoint(x: np.ndarray, causal: bool, t_s: float) -> np.ndarray:
    """Three-point Teager-Kaiser energy.

    Causal: E[n] = (x[n-1]^2 - x[n-2] x[n]) / T_s^2.
    Non-causal: E[n] = (x[n]^2 - x[n-1] x[n+1]) / T_s^2.
    Edge samples (with missing neighbours) are zero.
    """
    x = np.asarray(x, dtype=float)
    if len(x) < 3:
        raise ValueError("need at least 3 samples")
    e = np.zeros_like(x)
    if causal:
        e[2:] = (x[1:-1] ** 2 - x[:-2] * x[2:]) / t_s ** 2
    else:
        e[1:-1] = (x[1:-1] ** 2 - x[:-2] * x[2:]) / t_s ** 2
    return e


def tk_energy_derivatives(y0: np.ndarray, y1: np.ndarray,
                          y2: np.ndarray) -> np.ndarray:
    """TK energy from direct derivative estimates: E = y1^2 - y0 y2."""
    y0, y1, y2 = map(np.asarray, (y0, y1, y2))
    if not len(y0) == len(y1) == len(y2):
        raise ValueError("derivative sequences must have equal lengths")
    return y1 ** 2 - y0 * y2


def _bilinear_allpole(s_poles: np.ndarray, t_s: float) -> Tuple[np.ndarray,
                                                                np.ndarray]:
    """Bilinear transform of an all-pole analog filter, dc gain forced to 1.

    Each analog pole maps to (2/T_s + s)/(2/T_s - s); each excess pole
    contributes a zero at z = -1.
    """
    fs2 = 2.0 / t_s
    zp = (fs2 + s_poles) / (fs2 - s_poles)
    zz = -np.ones(len(s_poles))
    b = np.real(np.atleast_1d(np.poly(zz)))
    a = np.real(np.atleast_1d(np.poly(zp)))
    b = b * (np.polyval(a, 1.0) / np.polyval(b, 1.0))
    return b, a


def bw0_reference(causal: bool, f_wb: float = 0.05,
                  f_s: float = DETECT_FS) -> Tuple[np.ndarray, np.ndarray]:
    """Butterworth reference smoother coefficients (bilinear method).

    The causal reference is the stable half of a 2K = 12 zero-phase
    prototype (a 6th-order lowpass); the non-causal reference is the causal
    half of a 2K = 8 prototype (4th order), intended to be applied forward
    and backward so the net response is its squared magnitude.
    """
    t_s = 1.0 / f_s
    w_c = 2.0 * np.pi * f_wb * f_s
    order = 6 if causal else 4
    s_poles = butterworth_s_poles(order, w_c)
    lhp = s_poles[s_poles.real < 0]
    return _bilinear_allpole(lhp, t_s)


def bw1_filterbank(f_s: float = DETECT_FS) -> FilterbankDesign:
    """The K = 9 causal filterbank of the detection study."""
    return design_filterbank(DesignSpec(
        f_s=f_s, f_wb=0.05, f_nb=0.07, k_w_dc=3, k_w_nb=3, k_w_pi=0,
        k_t=3, group_delay="optimal"))


def bw1_nc_smoother(f_s: float = DETECT_FS) -> Tuple[FilterbankDesign,
                                                     FilterbankDesign]:
    """Zero-delay two-sided smoother: K_w_dc = 4, K_w_nb = 2, 2K = 8 poles."""
    return noncausal_design(DesignSpec(
        f_s=f_s, f_wb=0.05, f_nb=0.07, k_w_dc=4, k_w_nb=2, k_w_pi=0,
        k_t=1, group_delay=0.0, causal=False))


def build_detector(tag: str,
                   f_s: float = DETECT_FS) -> Callable[[np.ndarray],
                                                       np.ndarray]:
    """Map a detector tag to a callable x -> TK energy sequence."""
    t_s = 1.0 / f_s
    if tag == "FIR_NUL_NC":
        return lambda x: tk_energy_threepoint(x, causal=False, t_s=t_s)
    if tag == "IIR_BW0":
        b, a = bw0_reference(causal=True, f_s=f_s)
        return lambda x: tk_energy_threepoint(run_filter(b, a, x),
                                              causal=True, t_s=t_s)
    if tag == "IIR_BW1":
        d = bw1_filterbank(f_s)

        def detect(x: np.ndarray) -> np.ndarray:
            y = [run_filter(d.b[kt], d.a, x) for kt in range(3)]
            return tk_energy_derivatives(*y)
        return detect
    if tag == "IIR_BW0_NC":
        b, a = bw0_reference(causal=False, f_s=f_s)

        def detect(x: np.ndarray) -> np.ndarray:
            y = run_filter(b, a, x)
            y = run_filter(b, a, y[::-1])[::-1]
            return tk_energy_threepoint(y, causal=False, t_s=t_s)
        return detect
    if tag == "IIR_BW1_NC":
        fwd, bwd = bw1_nc_smoother(f_s)

        def detect(x: np.ndarray) -> np.ndarray:
            y = run_noncausal(fwd, bwd, x, k_t=0)
            return tk_energy_threepoint(y, causal=False, t_s=t_s)
        return detect
    raise ValueError(f"unknown detector tag {tag!r}; supported tags: "
                     + ", ".join(DETECTOR_TAGS))


def trial_statistics(detector: Callable[[np.ndarray], np.ndarray],
                      seed: int, trial: int,
                      deterministic_signal: bool = True
                      ) -> Tuple[float, float]:
    """One MC trial: a signal+interference instance and an
    interference-only instance from independent sub-seeds."""
    t_s = 1.0 / DETECT_FS
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(trial,))
    rng_sig, rng_int1, rng_int2 = (np.random.default_rng(s)
                                   for s in ss.spawn(3))

    sig_params = scenario_params("detect", "signal", known_freq=False,
                                 rng=rng_sig, f_s=DETECT_FS)
    int_params = scenario_params("detect", "interference", f_s=DETECT_FS)
    sig_proc = discretize_process(sig_params, t_s)
    int_proc = discretize_process(int_params, t_s)

    if deterministic_signal:
        sig_in = InputSpec("deterministic", PULSE_SAMPLE, PULSE_SAMPLE, P_SIG)
        p_int = P_INT
    else:
        sig_in = InputSpec("stochastic", PULSE_SAMPLE, PULSE_SAMPLE + 50,
                           P_SIG)
        p_int = 1.0
    int_in = InputSpec("stochastic", 0, DETECT_N - 1, p_int)

    sig = generate_waveform(sig_proc, sig_in, DETECT_N, rng=rng_sig)
    int1 = generate_waveform(int_proc, int_in, DETECT_N, rng=rng_int1)
    int2 = generate_waveform(int_proc, int_in, DETECT_N, rng=rng_int2)

    e_true = detector(sig + int1)
    e_false = detector(int2)
    stat_true = float(e_true[TRUE_WINDOW[0]:TRUE_WINDOW[1] + 1].max())
    stat_false = float(e_false[FALSE_WINDOW[0]:FALSE_WINDOW[1] + 1].max())
    return stat_true, stat_false


def roc_from_statistics(stat_true: np.ndarray,
                        stat_false: np.ndarray) -> RocCurve:
    """Empirical ROC over the pooled sorted statistics; AUC by trapezoid."""
    thresholds = np.concatenate([[-np.inf],
                                 np.unique(np.concatenate([stat_true,
                                                           stat_false]))])
    st = np.sort(stat_true)
    sf = np.sort(stat_false)
    # P(statistic > threshold) via binary search on the sorted samples.
    p_d = 1.0 - np.searchsorted(st, thresholds, side="right") / len(st)
    p_fa = 1.0 - np.searchsorted(sf, thresholds, side="right") / len(sf)
    # Sort by (P_fa, P_d) so ties in P_fa are traversed in ascending P_d;
    # the trapezoid then integrates the upper staircase of the curve.
    order = np.lexsort((p_d, p_fa))
    p_fa, p_d = p_fa[order], p_d[order]
    auc = float(np.trapezoid(p_d, p_fa))
    return RocCurve(p_fa=p_fa, p_d=p_d, auc=auc)


def run_detection_mc(detector: Callable[[np.ndarray], np.ndarray],
                     trials: int, seed: int,
                     deterministic_signal: bool = True) -> RocCurve:
    """Monte-Carlo ROC of a detector over paired instances.

    Per trial, the true statistic is the max TK energy over samples
    [400, 500] of a signal+interference instance; the false statistic is
    the max over [200, 800] of an independent interference-only instance.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    stat_true = np.empty(trials)
    stat_false = np.empty(trials)
    for t in range(trials):
        stat_true[t], stat_false[t] = trial_statistics(
            detector, seed, t, deterministic_signal)
    return roc_from_statistics(stat_true, stat_false)


def detector_metrics(tag: str, f_s: float = DETECT_FS) -> Dict[str, float]:
    """Static summary metrics for one detector's smoothing stage:
    group delay, white-noise gain, and response levels at the passband
    edge and the interference frequency."""
    from .analyze import frequency_response, measured_group_delay, \
        noncausal_response

    t_s = 1.0 / f_s
    w_wb, w_nb = 2 * np.pi * 0.05, 2 * np.pi * 0.07
    if tag == "IIR_BW1":
        d = bw1_filterbank(f_s)
        q = d.q
        sigma0 = float(d.sigma[0, 0])
        h_wb = frequency_response(d.b[0], d.a, np.array([w_wb]))[0]
        h_nb = frequency_response(d.b[0], d.a, np.array([w_nb]))[0]
    elif tag == "IIR_BW1_NC":
        fwd, bwd = bw1_nc_smoother(f_s)
        q = 0.0
        sigma0 = float(fwd.sigma[0, 0])
        h_wb = noncausal_response(fwd, bwd, np.array([w_wb]))[0]
        h_nb = noncausal_response(fwd, bwd, np.array([w_nb]))[0]
    elif tag in ("IIR_BW0", "IIR_BW0_NC"):
        b, a = bw0_reference(causal=(tag == "IIR_BW0"), f_s=f_s)
        h = lambda w: frequency_response(b, a, np.array([w]))[0]
        if tag == "IIR_BW0":
            grid = np.linspace(1e-4, w_wb / 2, 64)
            q = float(np.mean(measured_group_delay(b, a, grid)))
            h_wb, h_nb = h(w_wb), h(w_nb)
            imp = run_filter(b, a, np.r_[1.0, np.zeros(9999)])
            sigma0 = float(np.sum(imp ** 2))
        else:
            q = 0.0
            h_wb, h_nb = h(w_wb) * h(-w_wb), h(w_nb) * h(-w_nb)
            imp = run_filter(b, a, np.r_[np.zeros(5000), 1.0,
                                         np.zeros(4999)])
            imp = run_filter(b, a, imp[::-1])[::-1]
            sigma0 = float(np.sum(imp ** 2))
    elif tag == "FIR_NUL_NC":
        q = 0.0
        sigma0 = 1.0   # no pre-filter: the smoothing path is the identity
        h_wb, h_nb = 1.0 + 0.0j, 1.0 + 0.0j
    else:
        raise ValueError(f"unknown detector tag {tag!r}; supported tags: "
                         + ", ".join(DETECTOR_TAGS))
    return {"tag": tag, "q": float(q), "sigma0": sigma0,
            "h_wb": float(abs(h_wb)), "h_nb": float(abs(h_nb))}


def table_row(tag: str, trials: int = 2000, seed: int = 0,
              f_s: float = DETECT_FS) -> Dict[str, float]:
    """Summary metrics for one detector: delay, WNG, response levels, AUC."""
    row = detector_metrics(tag, f_s)
    roc = run_detection_mc(build_detector(tag, f_s), trials, seed)
    row.update({"auc": roc.auc, "trials": trials, "seed": seed})
    return row
