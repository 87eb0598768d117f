"""Butterworth pole placement in the s-plane and its z-plane images."""

import numpy as np
import pytest

from maxflat.butter import butterworth_s_poles, causal_z_poles, full_z_poles


def test_first_order_poles():
    """K = 1: s^2 = omega_c^2, so s = +-omega_c; z = e^{T_s s} = {1/e, e}."""
    z = full_z_poles(1, omega_c=1.0, t_s=1.0)
    assert np.allclose(sorted(np.abs(z)), [np.exp(-1.0), np.exp(1.0)])
    zc = causal_z_poles(1, omega_c=1.0, t_s=1.0)
    assert len(zc) == 1
    assert zc[0] == pytest.approx(np.exp(-1.0))


@pytest.mark.parametrize("K", [1, 2, 3, 5, 8])
def test_s_poles_satisfy_characteristic_polynomial(K):
    wc = 3.7
    s = butterworth_s_poles(K, wc)
    assert len(s) == 2 * K
    resid = np.abs(1.0 + (-(s ** 2) / wc ** 2) ** K)
    assert np.max(resid) < 1e-8
    # All on the circle |s| = omega_c, half of them strictly stable.
    assert np.allclose(np.abs(s), wc, atol=1e-12)
    assert np.sum(s.real < 0) == K


@pytest.mark.parametrize("K", [2, 3, 6])
def test_conjugate_closure(K):
    s = butterworth_s_poles(K, 1.0)
    # Every pole's conjugate is itself a pole (closure under conjugation).
    dist = np.abs(np.conj(s)[:, None] - s[None, :])
    assert np.max(np.min(dist, axis=1)) < 1e-10


def test_z_magnitudes_follow_impulse_invariance():
    K, wc, t_s = 4, 2 * np.pi * 0.05 * 10.0, 0.1
    s = butterworth_s_poles(K, wc)
    z = full_z_poles(K, wc, t_s)
    assert np.allclose(np.sort(np.abs(z)), np.sort(np.exp(t_s * s.real)),
                       atol=1e-12)
    # Causal poles are exactly the stable subset.
    zc = causal_z_poles(K, wc, t_s)
    assert np.all(np.abs(zc) < 1.0)
    assert len(zc) == K


def test_bandwidth_beyond_nyquist_rejected():
    with pytest.raises(ValueError, match="bandwidth exceeds Nyquist"):
        causal_z_poles(3, omega_c=np.pi / 0.1, t_s=0.1)
    # Just inside is fine.
    causal_z_poles(3, omega_c=0.99 * np.pi / 0.1, t_s=0.1)


def test_invalid_arguments():
    with pytest.raises(ValueError):
        butterworth_s_poles(0, 1.0)
    with pytest.raises(ValueError):
        butterworth_s_poles(2, -1.0)
    with pytest.raises(ValueError):
        causal_z_poles(2, 1.0, t_s=0.0)
