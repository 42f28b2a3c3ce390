"""Unconstrained digital precoder/combiner and the spectral-efficiency rate.

The digital baseline takes the leading right/left singular vectors of the
channel as precoder/combiner; with orthonormal columns the precoder already
meets the total-power constraint ||F||_F^2 = n_s, so no extra power loading
is applied (equal power across streams, no water-filling).
"""

from dataclasses import dataclass

import numpy as np

from .numerics import logdet_eval, svd

__all__ = ["OptimalFactors", "optimal_factors", "spectral_efficiency"]

# Combiners whose singular-value ratio falls below this are rejected as
# degenerate (the noise covariance would be numerically singular).
_COMBINER_RANK_TOL = 1e-10


@dataclass(frozen=True)
class OptimalFactors:
    """Leading singular-vector blocks of one channel matrix."""

    f_opt: np.ndarray
    w_opt: np.ndarray
    singular_values: np.ndarray


def optimal_factors(h, n_s):
    """Unconstrained rate-maximizing precoder/combiner from the channel SVD.

    Parameters
    ----------
    h : ndarray, shape (n_rx, n_tx)
    n_s : int
        Number of data streams; must not exceed min(n_rx, n_tx).

    Returns
    -------
    OptimalFactors
        ``f_opt`` is the first n_s right singular vectors (n_tx x n_s),
        ``w_opt`` the first n_s left singular vectors (n_rx x n_s), ordered
        by decreasing singular value.
    """
    h = np.asarray(h)
    if h.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {h.shape}")
    if not 1 <= n_s <= min(h.shape):
        raise ValueError(f"n_s={n_s} out of range for channel shape {h.shape}")
    u, s, v = svd(h)
    return OptimalFactors(
        f_opt=v[:, :n_s].copy(), w_opt=u[:, :n_s].copy(), singular_values=s
    )


def spectral_efficiency(h, f, wc, snr, n_s):
    """Achievable rate in bits/s/Hz under Gaussian signaling.

    Evaluates ``log2 det(I + (snr/n_s) * Rn^-1 Wc^H H F F^H H^H Wc)`` with
    ``Rn = Wc^H Wc``, where ``snr`` is the ratio of average received power to
    noise variance.  Computed as a difference of two Hermitian log-dets so
    the argument is always factored in symmetric form.

    Parameters
    ----------
    h : ndarray, shape (n_rx, n_tx)
    f : ndarray, shape (n_tx, n_s)
        Composite precoder (digital, or analog times baseband).
    wc : ndarray, shape (n_rx, n_s)
        Composite combiner; must have full column rank.
    snr : float
    n_s : int

    Returns
    -------
    float
    """
    h = np.asarray(h)
    f = np.asarray(f)
    wc = np.asarray(wc)
    if snr < 0:
        raise ValueError("snr must be nonnegative")
    if f.shape != (h.shape[1], n_s) or wc.shape != (h.shape[0], n_s):
        raise ValueError(
            f"inconsistent shapes: H {h.shape}, F {f.shape}, Wc {wc.shape}, "
            f"n_s={n_s}"
        )
    sv = np.linalg.svd(wc, compute_uv=False)
    if sv[-1] < _COMBINER_RANK_TOL * sv[0]:
        raise np.linalg.LinAlgError(
            f"combiner is rank deficient (singular-value ratio {sv[-1] / sv[0]:.3e})"
        )
    rn = wc.conj().T @ wc
    g = wc.conj().T @ h @ f
    signal = rn + (snr / n_s) * (g @ g.conj().T)
    # symmetrize away the fp asymmetry of the Gram products
    rn = 0.5 * (rn + rn.conj().T)
    signal = 0.5 * (signal + signal.conj().T)
    return logdet_eval(signal) - logdet_eval(rn)
