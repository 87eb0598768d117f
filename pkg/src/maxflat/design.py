"""Maximally-flat IIR filterbank design.

A bank of K_t filters (a smoother plus temporal-derivative estimators of
orders 1..K_t-1) is built on K fixed one-pole basis functions
``psi_k(z) = z / (z - p_k)``.  The numerator coefficients are chosen so that
frequency-derivative constraints hold exactly at dc (flat passband with a
prescribed group delay q), at an optional narrowband null frequency
(+/- omega_nb), and at the Nyquist frequency (pi).  Stacking the constraints
gives a square linear system ``Psi C = D`` whose solution is the coefficient
matrix of the bank.

The white-noise gain (WNG) of the smoother is a polynomial in the group
delay q; its minimizer gives the optimal delay for a given pole set.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .butter import causal_z_poles, full_z_poles
from .poly import poly_from_roots

#: Tolerance on imaginary residue when coercing analytically-real
#: quantities (filter coefficients, WNG entries, polynomial roots) to real.
TOL_CPX = 1.0e-3
#: Two candidate delays whose WNG differs by less than this are tied;
#: the smaller delay wins.
TOL_WNG = 1.0e-6
#: Relative residual bound on the constraint solve.
RESIDUAL_RTOL = 1.0e-8
#: Condition-number threshold above which the constraint system is flagged.
COND_WARN = 1.0e12

OPTIMAL = "optimal"


class IllConditionedSystem(UserWarning):
    """Constraint matrix condition estimate exceeds COND_WARN."""


@dataclass(frozen=True)
class DesignSpec:
    """Complete description of one filterbank design problem.

    f_s is in Hz; f_wb and f_nb are in cycles/sample; group_delay is in
    samples and may be the string "optimal".
    """

    f_s: float
    f_wb: float
    k_w_dc: int
    k_t: int
    f_nb: Optional[float] = None
    k_w_nb: int = 0
    k_w_pi: int = 0
    group_delay: Union[float, str] = OPTIMAL
    causal: bool = True

    def __post_init__(self) -> None:
        if self.f_s <= 0:
            raise ValueError("F_s must be positive")
        if not 0 < self.f_wb < 0.5:
            raise ValueError("f_wb must lie in (0, 0.5) cycles/sample")
        if self.k_t < 1:
            raise ValueError("K_t must be a positive integer")
        if min(self.k_w_dc, self.k_w_nb, self.k_w_pi) < 0:
            raise ValueError("constraint counts must be nonnegative")
        if self.k_w_dc < self.k_t:
            raise ValueError("K_w_dc >= K_t violated")
        if self.k_w_nb > 0:
            if self.f_nb is None:
                raise ValueError("f_nb required when K_w_nb > 0")
            if not 0 < self.f_nb < 0.5:
                raise ValueError("f_nb must lie in (0, 0.5) cycles/sample")
            if not self.f_nb > self.f_wb:
                raise ValueError("F_nb > F_wb violated")
        if self.total_constraints < 1:
            raise ValueError("K = K_w_dc + 2 K_w_nb + K_w_pi must be >= 1")
        if isinstance(self.group_delay, str) and self.group_delay != OPTIMAL:
            raise ValueError('group_delay must be a number or "optimal"')

    @property
    def total_constraints(self) -> int:
        return self.k_w_dc + 2 * self.k_w_nb + self.k_w_pi

    @property
    def t_s(self) -> float:
        return 1.0 / self.f_s

    @property
    def omega_wb(self) -> float:
        return 2.0 * np.pi * self.f_wb

    @property
    def omega_nb(self) -> float:
        if self.f_nb is None:
            raise ValueError("spec has no narrowband frequency")
        return 2.0 * np.pi * self.f_nb


@dataclass(frozen=True)
class ConstraintSystem:
    """The stacked linear constraints Psi C = D for one design."""

    psi: np.ndarray
    d: np.ndarray
    constraint_freqs: Tuple[Tuple[float, int], ...]
    condition: float


@dataclass(frozen=True)
class FilterbankDesign:
    """A solved filterbank: basis poles, coefficients, and realizable forms.

    c is the K x K_t coefficient matrix (column k_t drives derivative order
    k_t).  a is the shared monic denominator (length K+1); b[k_t] is the
    matching numerator (length K+1, last entry zero for causal banks).
    sigma is the real white-noise cross-gain matrix.
    """

    poles: np.ndarray
    c: np.ndarray
    q: float
    sigma: np.ndarray
    a: np.ndarray
    b: Tuple[np.ndarray, ...]
    t_s: float
    q_per_output: Optional[Tuple[float, ...]] = None

    @property
    def order(self) -> int:
        return len(self.poles)

    @property
    def n_outputs(self) -> int:
        return self.c.shape[1]


def alpha_table(K: int) -> np.ndarray:
    """Coefficients alpha_{k,l} of the frequency-derivative expansion.

    Built by the product-rule recursion
    alpha_{k,l} = l*alpha_{k-1,l-1} + (l+1)*alpha_{k-1,l}, with
    alpha_{k,0} = 1, alpha_{k,k} = k!, alpha_{k,l} = 0 for l > k.
    """
    if K < 1:
        raise ValueError("K must be a positive integer")
    alp = np.zeros((K, K), dtype=np.int64)
    for kw in range(K):
        for lw in range(K):
            if lw > kw:
                continue
            if lw == 0:
                alp[kw, lw] = 1
            elif lw == kw:
                alp[kw, lw] = math.factorial(lw)
            else:
                alp[kw, lw] = lw * alp[kw - 1, lw - 1] + (lw + 1) * alp[kw - 1, lw]
    return alp


def basis_derivative_column(p: complex, omega_d: float, K: int,
                            alp: Optional[np.ndarray] = None) -> np.ndarray:
    """Frequency derivatives 0..K-1 of psi(w) = e^{iw}/(e^{iw}-p) at omega_d.

    Entry k equals (d/dw)^k psi(w) |_{w=omega_d}, computed as
    i^k * sum_l (-1)^l alpha_{k,l} psi^{l+1}.
    """
    z = np.exp(1j * omega_d)
    if abs(z - p) < 1e-12:
        raise ValueError("singular basis evaluation: pole on the unit circle "
                         "at a constraint frequency")
    if alp is None:
        alp = alpha_table(K)
    psi = z / (z - p)
    # psi_pows[l] = (-1)^l psi^{l+1}
    psi_pows = psi ** np.arange(1, K + 1) * (-1.0) ** np.arange(K)
    out = np.empty(K, dtype=complex)
    for kw in range(K):
        out[kw] = (1j) ** kw * np.dot(alp[kw, :kw + 1], psi_pows[:kw + 1])
    return out


def dc_targets(q: float, t_s: float, k_w_dc: int, k_t: int) -> np.ndarray:
    """Passband (dc) constraint targets for derivative order k_t.

    Entry k_w is i^{k_w} (-q)^{k_w-k_t} (1/T_s)^{k_t} k_w!/(k_w-k_t)! for
    k_w >= k_t and zero otherwise.
    """
    if not 0 <= k_t < k_w_dc:
        raise ValueError("require 0 <= k_t < K_w_dc")
    d = np.zeros(k_w_dc, dtype=complex)
    for kw in range(k_t, k_w_dc):
        ratio = math.factorial(kw) // math.factorial(kw - k_t)
        d[kw] = ((1j) ** kw * (-q) ** (kw - k_t) * (1.0 / t_s) ** k_t * ratio)
    return d


def _target_matrix(spec: DesignSpec, q: float,
                   q_per_output: Optional[Sequence[float]] = None) -> np.ndarray:
    """Stack the dc targets (one column per k_t) over zero nb/pi rows."""
    K = spec.total_constraints
    D = np.zeros((K, spec.k_t), dtype=complex)
    for kt in range(spec.k_t):
        q_kt = q if q_per_output is None else q_per_output[kt]
        D[:spec.k_w_dc, kt] = dc_targets(q_kt, spec.t_s, spec.k_w_dc, kt)
    return D


def assemble_system(spec: DesignSpec, poles: np.ndarray,
                    q: Optional[float] = None) -> ConstraintSystem:
    """Build the square constraint system Psi C = D.

    Row blocks are ordered dc, -omega_nb, +omega_nb, pi.  When q is omitted,
    a numeric spec.group_delay is used (0 for the "optimal" sentinel, since
    Psi does not depend on q and D is rebuilt after the delay search).
    """
    K = spec.total_constraints
    if len(poles) != K:
        raise ValueError("pole count must equal the constraint count K")
    if spec.k_w_nb > 0:
        w_nb = spec.omega_nb
        if w_nb <= 0.0 or abs(w_nb - np.pi) < 1e-12:
            raise ValueError("degenerate narrowband frequency: use the dc or "
                             "pi constraint blocks instead")
        blocks = [(0.0, spec.k_w_dc), (-w_nb, spec.k_w_nb),
                  (w_nb, spec.k_w_nb), (np.pi, spec.k_w_pi)]
    else:
        blocks = [(0.0, spec.k_w_dc), (np.pi, spec.k_w_pi)]
    blocks = [(w, n) for (w, n) in blocks if n > 0]

    alp = alpha_table(K)
    psi = np.empty((K, K), dtype=complex)
    row = 0
    for w_d, count in blocks:
        for k, p in enumerate(poles):
            psi[row:row + count, k] = basis_derivative_column(p, w_d, K, alp)[:count]
        row += count
    cond = float(np.linalg.cond(psi))
    if cond > COND_WARN:
        warnings.warn("ill-conditioned constraint system: condition estimate "
                      f"{cond:.3e}", IllConditionedSystem)

    if q is None:
        q = spec.group_delay if not isinstance(spec.group_delay, str) else 0.0
    d = _target_matrix(spec, float(q))
    return ConstraintSystem(psi=psi, d=d, constraint_freqs=tuple(blocks),
                            condition=cond)


def gram_matrix(poles: np.ndarray) -> np.ndarray:
    """Gram matrix of the causal basis impulse responses.

    S_{a,b} = sum_{m>=0} conj(p_a)^m p_b^m = 1/(1 - conj(p_a) p_b).
    """
    poles = np.asarray(poles, dtype=complex)
    if np.any(np.abs(poles) >= 1.0):
        raise ValueError("Gram matrix undefined for non-causal basis")
    return 1.0 / (1.0 - np.conj(poles)[:, None] * poles[None, :])


def _solve(psi: np.ndarray, d: np.ndarray) -> np.ndarray:
    try:
        c = np.linalg.solve(psi, d)
        # One step of iterative refinement keeps the residual small even
        # when Psi is badly conditioned (it is Vandermonde-like in K).
        c = c + np.linalg.solve(psi, d - psi @ c)
    except np.linalg.LinAlgError as exc:
        raise ValueError("degenerate constraint set: constraint matrix is "
                         "singular") from exc
    return c


def solve_coefficients(system: ConstraintSystem) -> np.ndarray:
    """Coefficient matrix C with Psi C = D."""
    c = _solve(system.psi, system.d)
    _check_residual(system.psi, c, system.d)
    return c


def _check_residual(psi: np.ndarray, c: np.ndarray, d: np.ndarray) -> None:
    res = np.max(np.abs(psi @ c - d))
    bound = RESIDUAL_RTOL * (1.0 + np.max(np.abs(d)))
    if res > bound:
        raise ValueError("degenerate constraint set: solve residual "
                         f"{res:.3e} exceeds {bound:.3e}")


def white_noise_gain(c: np.ndarray, s: np.ndarray) -> np.ndarray:
    """White-noise cross-gain matrix Sigma = C^H S C, coerced to real."""
    sigma = c.conj().T @ s @ c
    resid = float(np.max(np.abs(sigma.imag)))
    resid /= max(1.0, float(np.max(np.abs(sigma))))
    if resid > TOL_CPX:
        raise ValueError("non-real WNG — design inconsistency "
                         f"(imaginary residue {resid:.3e})")
    return sigma.real


def wng_polynomial(spec: DesignSpec, poles: np.ndarray, s: np.ndarray,
                   k_t: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """WNG of output k_t as a polynomial in the group delay q.

    Returns (sigma_poly, p_poly) as ascending-power real coefficient arrays:
    Sigma(q) and its formal derivative P(q).  Only the dc targets depend on
    q, so with Phi = the dc columns of Psi^{-1} and J = Phi^H S Phi,

        Sigma(q) = sum_{a,b >= k_t} conj(g_a) g_b J[a,b] q^{a+b-2 k_t},

    where g_k collects the q-independent factor (-i)^k (1/T_s)^{k_t}
    k!/(k-k_t)! of the dc target of row k.
    """
    if not 0 <= k_t < spec.k_w_dc:
        raise ValueError("require 0 <= k_t < K_w_dc")
    system = assemble_system(spec, poles, q=0.0)
    phi = _solve(system.psi, np.eye(spec.total_constraints,
                                    dtype=complex))[:, :spec.k_w_dc]
    j = phi.conj().T @ s @ phi

    kdc = spec.k_w_dc
    deg = 2 * (kdc - 1 - k_t)
    coeffs = np.zeros(deg + 1, dtype=complex)
    scale = (1.0 / spec.t_s) ** k_t
    g = np.zeros(kdc, dtype=complex)
    for k in range(k_t, kdc):
        ratio = math.factorial(k) // math.factorial(k - k_t)
        g[k] = (-1j) ** k * scale * ratio
    for ka in range(k_t, kdc):
        for kb in range(k_t, kdc):
            coeffs[ka + kb - 2 * k_t] += np.conj(g[ka]) * g[kb] * j[ka, kb]
    resid = float(np.max(np.abs(coeffs.imag))) if len(coeffs) else 0.0
    resid /= max(1.0, float(np.max(np.abs(coeffs))) if len(coeffs) else 1.0)
    if resid > TOL_CPX:
        raise ValueError("non-real WNG — design inconsistency "
                         f"(imaginary residue {resid:.3e})")
    sigma_poly = coeffs.real
    p_poly = np.polynomial.polynomial.polyder(sigma_poly) if deg > 0 \
        else np.zeros(1)
    return sigma_poly, np.atleast_1d(p_poly)


def optimal_group_delay(spec: DesignSpec, poles: np.ndarray, s: np.ndarray,
                        k_t: int = 0) -> float:
    """Delay minimizing the WNG polynomial of output k_t.

    Among real roots of P(q) = dSigma/dq (imaginary part below TOL_CPX),
    picks the one with the lowest Sigma; ties within TOL_WNG go to the
    smallest delay.  A delay-independent WNG yields q = 0.
    """
    sigma_poly, p_poly = wng_polynomial(spec, poles, s, k_t)
    if np.all(np.abs(p_poly) < 1e-14):
        warnings.warn("delay-independent WNG — any q admissible; returning 0",
                      UserWarning)
        return 0.0
    roots = np.polynomial.polynomial.polyroots(p_poly)
    real_roots = np.sort(roots[np.abs(roots.imag) < TOL_CPX].real)
    if len(real_roots) == 0:
        raise ValueError("WNG derivative has no real roots")
    w = np.polynomial.polynomial.polyval(real_roots, sigma_poly)
    tied = real_roots[w <= w.min() + TOL_WNG]
    return float(tied.min())


def transfer_coefficients(c: np.ndarray,
                          poles: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Expand sum_k c_k z / (z - p_k) into numerator/denominator polynomials.

    Returns (b, a), both real of length K+1 in descending powers of z,
    with a monic (a[0] = 1) and b[K] = 0.
    """
    # Expand in extended precision: the product accumulation is the
    # accuracy bottleneck for clustered pole sets.
    poles_hp = np.asarray(poles, dtype=np.clongdouble)
    K = len(poles_hp)
    a = np.ones(1, dtype=np.clongdouble)
    for p in poles_hp:
        a = np.convolve(a, np.array([1.0, -p], dtype=np.clongdouble))
    b = np.zeros(K + 1, dtype=np.clongdouble)
    for k in range(K):
        term = np.array([c[k], 0.0], dtype=np.clongdouble)
        for j in range(K):
            if j != k:
                term = np.convolve(term,
                                   np.array([1.0, -poles_hp[j]],
                                            dtype=np.clongdouble))
        b += term
    resid = max(float(np.max(np.abs(a.imag))), float(np.max(np.abs(b.imag))))
    if resid > TOL_CPX:
        raise ValueError("transfer coefficients have imaginary residue "
                         f"{resid:.3e} — design inconsistency")
    a = np.asarray(a.real, dtype=float)
    b = np.asarray(b.real, dtype=float)
    a[0] = 1.0
    b[K] = 0.0
    return b, a


def design_filterbank(spec: DesignSpec,
                      per_output_delay: bool = False) -> FilterbankDesign:
    """Solve a causal filterbank design end to end.

    With group_delay = "optimal" the smoother-optimal delay (k_t = 0) is
    applied to every output; per_output_delay = True instead optimizes each
    derivative order separately.
    """
    if not spec.causal:
        raise ValueError("use noncausal_design for causal=False specs")
    K = spec.total_constraints
    poles = causal_z_poles(K, spec.omega_wb * spec.f_s, spec.t_s)
    system = assemble_system(spec, poles, q=0.0)
    s = gram_matrix(poles)

    q_per_output: Optional[Tuple[float, ...]] = None
    if isinstance(spec.group_delay, str):  # the "optimal" sentinel
        if per_output_delay:
            q_per_output = tuple(optimal_group_delay(spec, poles, s, kt)
                                 for kt in range(spec.k_t))
            q = q_per_output[0]
        else:
            q = optimal_group_delay(spec, poles, s, 0)
    else:
        q = float(spec.group_delay)

    d = _target_matrix(spec, q, q_per_output)
    c = _solve(system.psi, d)
    _check_residual(system.psi, c, d)
    sigma = white_noise_gain(c, s)
    a = None
    bs = []
    for kt in range(spec.k_t):
        b_kt, a = transfer_coefficients(c[:, kt], poles)
        bs.append(b_kt)
    return FilterbankDesign(poles=poles, c=c, q=q, sigma=sigma, a=a,
                            b=tuple(bs), t_s=spec.t_s,
                            q_per_output=q_per_output)


def noncausal_design(spec: DesignSpec) -> Tuple[FilterbankDesign,
                                                FilterbankDesign]:
    """Solve a zero-delay design over all 2K Butterworth poles and split it.

    The 2K-term partial fraction is partitioned by pole radius: poles inside
    the unit circle form the forward (causal) part; poles outside are
    realized backwards in time after the substitution z -> 1/z, which maps
    each outside pole p to the stable pole r = 1/p and each term
    c z/(z - p) to -c r/(z - r) on the reversed axis.

    Returns (forward, backward) FilterbankDesigns.  The forward design's
    sigma holds the total (two-sided) white-noise gain; the backward
    design's sigma holds only the anticausal contribution.  The backward
    b/a run on time-reversed input (output reversed again afterwards);
    its response on the original axis is B(e^{-iw})/A(e^{-iw}).
    """
    if spec.causal:
        raise ValueError("noncausal_design requires a causal=False spec")
    K = spec.total_constraints
    if K % 2 != 0:
        raise ValueError("non-causal designs need an even constraint count "
                         "(2K basis functions)")
    if isinstance(spec.group_delay, str):
        raise ValueError("non-causal designs require a numeric group delay "
                         "(conventionally 0)")
    q = float(spec.group_delay)
    poles = full_z_poles(K // 2, spec.omega_wb * spec.f_s, spec.t_s)
    if np.any(np.abs(np.abs(poles) - 1.0) < 1e-9):
        raise ValueError("marginal pole — cannot split")

    system = assemble_system(spec, poles, q=q)
    c = solve_coefficients(system)

    inside = np.abs(poles) < 1.0
    p_in, c_in = poles[inside], c[inside, :]
    p_out, c_out = poles[~inside], c[~inside, :]
    r = 1.0 / p_out

    s_fwd = gram_matrix(p_in)
    # Anticausal impulse responses -c p^n, n <= -1, have pairwise inner
    # products conj(r_a) r_b / (1 - conj(r_a) r_b) with r = 1/p.
    s_bwd = (np.conj(r)[:, None] * r[None, :]) \
        / (1.0 - np.conj(r)[:, None] * r[None, :])
    sigma_fwd = white_noise_gain(c_in, s_fwd)
    sigma_bwd = white_noise_gain(c_out, s_bwd)

    a_f = None
    bs_f = []
    for kt in range(spec.k_t):
        b_kt, a_f = transfer_coefficients(c_in[:, kt], p_in)
        bs_f.append(b_kt)
    forward = FilterbankDesign(poles=p_in, c=c_in, q=q,
                               sigma=sigma_fwd + sigma_bwd, a=a_f,
                               b=tuple(bs_f), t_s=spec.t_s)

    # Backward part: sum_k (-c_k r_k) / (z - r_k) over the reversed axis.
    Kb = len(r)
    a_b = poly_from_roots(r)
    bs_b = []
    for kt in range(spec.k_t):
        b_kt = np.zeros(Kb + 1, dtype=complex)
        for k in range(Kb):
            term = np.array([-c_out[k, kt] * r[k]], dtype=complex)
            for j in range(Kb):
                if j != k:
                    term = np.convolve(term, [1.0, -r[j]])
            b_kt[1:] += term
        resid = float(np.max(np.abs(b_kt.imag)))
        if resid > TOL_CPX:
            raise ValueError("transfer coefficients have imaginary residue "
                             f"{resid:.3e} — design inconsistency")
        bs_b.append(b_kt.real.copy())
    resid = float(np.max(np.abs(a_b.imag)))
    if resid > TOL_CPX:
        raise ValueError("transfer coefficients have imaginary residue "
                         f"{resid:.3e} — design inconsistency")
    a_b = a_b.real.copy()
    a_b[0] = 1.0
    backward = FilterbankDesign(poles=r, c=c_out, q=q, sigma=sigma_bwd,
                                a=a_b, b=tuple(bs_b), t_s=spec.t_s)
    return forward, backward
