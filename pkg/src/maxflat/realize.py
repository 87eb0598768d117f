"""State-space and difference-equation realizations of a filterbank design.

Three equivalent forms are provided: the diagonal canonical form (DCF,
complex arithmetic, poles on the diagonal), the controller canonical form
(CCF, fully real companion matrix), and the derivative state form (DSF, a
similarity transform of the DCF whose first K_t states are the filterbank
outputs themselves).  All obey the recursion

    w[n] = G w[n-1] + H x[n],      y[n] = C w[n],

i.e. the output taps the state *after* the update.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.signal import lfilter

from .design import TOL_CPX, FilterbankDesign

DCF = "DCF"
CCF = "CCF"
DSF = "DSF"


@dataclass(frozen=True)
class StateSpaceRealization:
    """One (G, H, C) realization of a filterbank design."""

    form: str
    g: np.ndarray
    h: np.ndarray
    c: np.ndarray
    complex_arithmetic: bool

    @property
    def order(self) -> int:
        return self.g.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.c.shape[0]


@dataclass
class FilterState:
    """Mutable per-stream state: the state vector and a sample counter."""

    w: np.ndarray
    n: int = 0


def to_dcf(design: FilterbankDesign) -> StateSpaceRealization:
    """Diagonal canonical form: G = diag(p), H = 1, C = coefficient rows."""
    g = np.diag(design.poles)
    h = np.ones(design.order, dtype=complex)
    c = design.c.T.copy()  # row k_t holds the coefficients of output k_t
    return StateSpaceRealization(DCF, g, h, c, complex_arithmetic=True)


def to_ccf(design: FilterbankDesign) -> StateSpaceRealization:
    """Controller canonical form: real companion matrix of the denominator."""
    K = design.order
    g = np.zeros((K, K))
    g[0, :] = -design.a[1:]
    if K > 1:
        g[1:, :-1] = np.eye(K - 1)
    h = np.zeros(K)
    h[0] = 1.0
    c = np.vstack([b[:K] for b in design.b])
    return StateSpaceRealization(CCF, g, h, c, complex_arithmetic=False)


def to_dsf(design: FilterbankDesign) -> StateSpaceRealization:
    """Derivative state form: transform the DCF so the leading states are
    the outputs and C becomes the first K_t rows of the identity."""
    dcf = to_dcf(design)
    K, kt = design.order, design.n_outputs
    c_aug = np.eye(K, dtype=complex)
    c_aug[:kt, :] = dcf.c
    try:
        t_inv = c_aug  # w_dsf = C_aug w_dcf, so the transform inverse is C_aug
        t = np.linalg.inv(c_aug)
    except np.linalg.LinAlgError as exc:
        raise ValueError("DSF transform unavailable for this design") from exc
    g = t_inv @ dcf.g @ t
    h = t_inv @ dcf.h
    c = np.eye(K, dtype=complex)[:kt, :]
    return StateSpaceRealization(DSF, g, h, c, complex_arithmetic=True)


def lss_step(realization: StateSpaceRealization, state: FilterState,
             x: float) -> Tuple[FilterState, np.ndarray]:
    """Advance one sample: w' = G w + H x, y = C w'."""
    w = realization.g @ state.w + realization.h * x
    y = realization.c @ w
    if realization.complex_arithmetic:
        # DSF warm starts place a real vector in a complex coordinate frame,
        # which makes the decaying transient genuinely complex; only the
        # real part is meaningful there, so the residue check is skipped.
        if realization.form != DSF:
            resid = float(np.max(np.abs(y.imag))) if y.size else 0.0
            if resid > TOL_CPX:
                raise ValueError("complex realization produced non-real "
                                 f"output (imaginary residue {resid:.3e})")
        y = y.real
    state.w = w
    state.n += 1
    return state, y


def run_lss(realization: StateSpaceRealization, x: np.ndarray,
            state: FilterState | None = None) -> np.ndarray:
    """Stream a whole sequence; returns an (len(x), K_t) output array."""
    if state is None:
        state = zero_state(realization)
    out = np.empty((len(x), realization.n_outputs))
    for n, xn in enumerate(x):
        state, out[n] = lss_step(realization, state, float(xn))
    return out


def zero_state(realization: StateSpaceRealization) -> FilterState:
    dtype = complex if realization.complex_arithmetic else float
    return FilterState(w=np.zeros(realization.order, dtype=dtype), n=0)


def initialize_state(realization: StateSpaceRealization,
                     x0: float) -> FilterState:
    """Steady state of a held input x0: w = (I - G)^{-1} H x0.

    The DSF instead starts from [x0, 0, ..., 0], which places the smoother
    output at x0 and all derivative states at rest.
    """
    K = realization.order
    if realization.form == DSF:
        w = np.zeros(K, dtype=complex)
        w[0] = x0
        return FilterState(w=w, n=0)
    eigs = np.linalg.eigvals(realization.g)
    if np.any(np.abs(eigs - 1.0) < 1e-12):
        raise ValueError("no steady state: realization has a pole at z = 1")
    dtype = complex if realization.complex_arithmetic else float
    w = np.linalg.solve(np.eye(K, dtype=dtype) - realization.g,
                        realization.h * x0)
    return FilterState(w=w, n=0)


def run_filter(b: np.ndarray, a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Direct-form difference equation with zero history before n = 0:

        y[n] = sum_k b[k] x[n-k] - sum_{k>=1} a[k] y[n-k].
    """
    a = np.asarray(a, dtype=float)
    if abs(a[0] - 1.0) > 1e-12:
        raise ValueError("denominator must be monic (a[0] = 1)")
    return lfilter(np.asarray(b, dtype=float), a, np.asarray(x, dtype=float))


def run_noncausal(forward: FilterbankDesign, backward: FilterbankDesign,
                  x: np.ndarray, k_t: int = 0) -> np.ndarray:
    """Apply a split non-causal design: forward pass plus a time-reversed
    backward pass (filter the reversed input, reverse the result)."""
    x = np.asarray(x, dtype=float)
    y_f = run_filter(forward.b[k_t], forward.a, x)
    y_b = run_filter(backward.b[k_t], backward.a, x[::-1])[::-1]
    return y_f + y_b
