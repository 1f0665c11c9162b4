"""Rate and estimation-error metrics, plus controlled channel corruption for
imperfect-CSI studies."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beamforming import HybridBeamformers
from .effective import EffectiveChannel


@dataclass(frozen=True)
class EvaluationInput:
    """Everything spectral_efficiency needs: the channel the signal actually
    passes through, the transceiver under test, and the noise variance."""

    h_tot: np.ndarray
    beamformers: HybridBeamformers
    noise_var: float

    def __post_init__(self):
        if self.noise_var <= 0:
            raise ValueError("noise_var must be positive")
        n_r, n_t = np.asarray(self.h_tot).shape
        if self.beamformers.w_rf.shape[0] != n_r:
            raise ValueError("combiner antenna count does not match the channel")
        if self.beamformers.f_rf.shape[0] != n_t:
            raise ValueError("precoder antenna count does not match the channel")


def spectral_efficiency(inp: EvaluationInput) -> float:
    """Achievable rate in bit/s/Hz with Gaussian signaling.

    Computes log2 det(I + Rn^-1 T T^H) where T is the stream-to-stream
    response through combiner, channel, and precoder, and Rn is the combined
    noise covariance. Evaluated through a Cholesky factor of Rn and the
    singular values of the whitened response, which keeps the determinant
    well-conditioned; a singular Rn (rank-deficient combiner) is rejected.
    """
    bf = inp.beamformers
    w = bf.w_rf @ bf.w_bb
    t = w.conj().T @ np.asarray(inp.h_tot) @ bf.f_rf @ bf.f_bb
    rn = inp.noise_var * (w.conj().T @ w)
    rn = 0.5 * (rn + rn.conj().T)
    try:
        chol = np.linalg.cholesky(rn)
    except np.linalg.LinAlgError as exc:
        raise ValueError("noise covariance is singular; combiner is rank deficient") from exc
    white = np.linalg.solve(chol, t)
    sing = np.linalg.svd(white, compute_uv=False)
    return float(np.sum(np.log1p(sing ** 2)) / math.log(2.0))


def nmse(h_true: EffectiveChannel, h_est: EffectiveChannel) -> float:
    """Normalized estimation error ||est - true||_F^2 / ||true||_F^2 over all
    cascade blocks jointly."""
    if h_true.blocks.shape != h_est.blocks.shape:
        raise ValueError("shapes differ")
    ref = float(np.linalg.norm(h_true.blocks) ** 2)
    if ref == 0.0:
        raise ValueError("reference channel is identically zero")
    return float(np.linalg.norm(h_est.blocks - h_true.blocks) ** 2) / ref


def perturb_to_nmse(
    h_true: EffectiveChannel,
    target_nmse_db: float,
    rng: np.random.Generator,
) -> EffectiveChannel:
    """Corrupt a cascade estimate to an exact error level.

    Adds white complex Gaussian noise rescaled so the realized normalized
    error equals 10^(target_nmse_db / 10) exactly (up to roundoff), which
    makes error sweeps hit their nominal points instead of scattering around
    them. A target of -inf returns the input untouched (perfect CSI).
    """
    if target_nmse_db == -math.inf:
        return h_true
    if not math.isfinite(target_nmse_db):
        raise ValueError("target must be finite or -inf")
    ref = float(np.linalg.norm(h_true.blocks) ** 2)
    if ref == 0.0:
        raise ValueError("reference channel is identically zero")
    shape = h_true.blocks.shape
    noise = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    scale = math.sqrt(10.0 ** (target_nmse_db / 10.0) * ref) / np.linalg.norm(noise)
    return EffectiveChannel(blocks=h_true.blocks + scale * noise)


def perturb_matrix_to_nmse(
    h: np.ndarray,
    target_nmse_db: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Same exact-error corruption for a plain matrix (the direct link)."""
    if target_nmse_db == -math.inf:
        return h.copy()
    if not math.isfinite(target_nmse_db):
        raise ValueError("target must be finite or -inf")
    ref = float(np.linalg.norm(h) ** 2)
    if ref == 0.0:
        raise ValueError("reference channel is identically zero")
    noise = rng.standard_normal(h.shape) + 1j * rng.standard_normal(h.shape)
    scale = math.sqrt(10.0 ** (target_nmse_db / 10.0) * ref) / np.linalg.norm(noise)
    return h + scale * noise
